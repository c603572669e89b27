use std::collections::{BTreeSet, HashSet};

use crate::cost::Cost;
use crate::model::Problem;
use crate::tables::UtilityTable;

/// Entries of the private side `f_ci` that agent `i` can read off received
/// tables, as `(c, i, value_c, value_i)`.
#[derive(Debug, Default)]
pub(crate) struct LeakLedger {
    leaked: HashSet<(usize, usize, usize, usize)>,
}

impl LeakLedger {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn len(&self) -> usize {
        self.leaked.len()
    }

    /// Records what receiver `i` learns about its lower neighbors from `table`.
    ///
    /// A binary table over `{i, c}` that holds nothing but `f_ci` exposes all
    /// of it. Since costs are non-negative, a zero cell in any table that
    /// includes `f_ci` means that entry of `f_ci` is zero.
    pub(crate) fn observe<C: Cost>(
        &mut self,
        problem: &Problem<C>,
        i: usize,
        lowers: &BTreeSet<usize>,
        table: &UtilityTable<C>,
    ) {
        let dims = table.dims();
        let Some(pi) = dims.iter().position(|&d| d == i) else {
            return;
        };
        for &c in lowers {
            if !table.sources().contains(&(c, i)) {
                continue;
            }
            let Some(pc) = dims.iter().position(|&d| d == c) else {
                continue;
            };
            let exposed =
                dims.len() == 2 && !table.is_elimination_result() && table.sources().len() == 1;
            if exposed {
                for vc in 0..problem.domain_size(c) {
                    for vi in 0..problem.domain_size(i) {
                        self.leaked.insert((c, i, vc, vi));
                    }
                }
                continue;
            }
            let sizes = table.domain_sizes();
            for (k, v) in table.values().iter().enumerate() {
                if !v.is_zero() {
                    continue;
                }
                let (vc, vi) = (coordinate(k, pc, sizes), coordinate(k, pi, sizes));
                self.leaked.insert((c, i, vc, vi));
            }
        }
    }
}

/// Value of dimension `pos` at row-major cell `index`.
fn coordinate(index: usize, pos: usize, sizes: &[usize]) -> usize {
    let stride: usize = sizes[pos + 1..].iter().product();
    (index / stride) % sizes[pos]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::two_agent;
    use crate::tables::AccessCounter;

    #[test]
    fn coordinates_are_row_major() {
        let sizes = [2, 3, 4];
        assert_eq!(coordinate(23, 0, &sizes), 1);
        assert_eq!(coordinate(23, 1, &sizes), 2);
        assert_eq!(coordinate(23, 2, &sizes), 3);
        assert_eq!(coordinate(5, 1, &sizes), 1);
    }

    #[test]
    fn raw_binary_side_leaks_fully() {
        let p = two_agent();
        let side = UtilityTable::from_side(&p, 1, 0).unwrap();
        let mut ledger = LeakLedger::new();
        ledger.observe(&p, 0, &BTreeSet::from([1]), &side);
        assert_eq!(ledger.len(), 4);
        // a non-neighbor relation reveals nothing
        let mut other = LeakLedger::new();
        other.observe(&p, 0, &BTreeSet::new(), &side);
        assert_eq!(other.len(), 0);
    }

    #[test]
    fn joined_tables_leak_zero_cells_only() {
        let p = Problem::unconstrained(vec![2, 2])
            .unwrap()
            .with_constraint(
                0,
                1,
                crate::CostMatrix::from_rows(&[&[0, 1], &[0, 0]]),
                crate::CostMatrix::from_rows(&[&[0, 2], &[3, 4]]),
            )
            .unwrap();
        let a = UtilityTable::from_side(&p, 1, 0).unwrap();
        let b = UtilityTable::from_side(&p, 0, 1).unwrap();
        let joined = a.join(&b, &mut AccessCounter::new()).unwrap();
        let mut ledger = LeakLedger::new();
        ledger.observe(&p, 0, &BTreeSet::from([1]), &joined);
        // only (x1=0, x0=0) sums to zero
        assert_eq!(ledger.leaked, HashSet::from([(1, 0, 0, 0)]));
    }
}
