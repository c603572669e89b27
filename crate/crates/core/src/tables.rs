//! Utility tables: dense row-major cost tables over ordered variable
//! dimensions, with join, min-elimination and argmin.
//!
//! Every cell access goes through an [`AccessCounter`] owned by the caller,
//! which is how the simulator measures logical operations:
//!
//! * join producing `c` cells: `3c` accesses (two reads, one write per cell);
//! * eliminating from a `c`-cell table: `c` reads plus one write per output cell;
//! * fused min over a sum of `m` tables: `m` reads per joint point plus one
//!   write per output cell;
//! * argmin: one read per table per candidate point.

use std::collections::BTreeSet;

use crate::cost::{min_cost, Cost};
use crate::error::{Error, Result};
use crate::model::{Assignment, Problem};

/// Operation counter threaded through table operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AccessCounter {
    pub accesses: u64,
    /// Largest dimension count of any table materialized under this counter.
    pub max_dims: usize,
}

impl AccessCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn materialized<C>(&mut self, table: &UtilityTable<C>) {
        self.max_dims = self.max_dims.max(table.dims.len());
    }

    pub fn merge(&mut self, other: AccessCounter) {
        self.accesses += other.accesses;
        self.max_dims = self.max_dims.max(other.max_dims);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTable<C = u64> {
    dims: Vec<usize>,
    domain_sizes: Vec<usize>,
    values: Vec<C>,
    elimination_result: bool,
    /// Directed sides `(owner, other)` whose costs are summed into this table.
    sources: BTreeSet<(usize, usize)>,
}

/// Union of the dimensions of several tables, with each table's stride at
/// every union position (0 where the table lacks that dimension).
struct Layout {
    dims: Vec<usize>,
    sizes: Vec<usize>,
    strides: Vec<Vec<usize>>,
}

impl Layout {
    /// Dims of the tables in order of appearance, with `trailing` moved to
    /// the end in the given order.
    fn new<C: Cost>(tables: &[&UtilityTable<C>], trailing: &[usize]) -> Result<Self> {
        let mut dims: Vec<usize> = Vec::new();
        let mut sizes: Vec<usize> = Vec::new();
        for t in tables {
            for (&d, &s) in t.dims.iter().zip(&t.domain_sizes) {
                match dims.iter().position(|&x| x == d) {
                    Some(p) if sizes[p] != s => {
                        return Err(Error::Table(format!(
                            "dimension {d} has domain size {} and {s}",
                            sizes[p]
                        )))
                    }
                    Some(_) => {}
                    None => {
                        dims.push(d);
                        sizes.push(s);
                    }
                }
            }
        }
        for v in trailing {
            if !dims.contains(v) {
                return Err(Error::Table(format!(
                    "variable {v} is not a dimension of any table"
                )));
            }
        }
        // move trailing dims to the end, keeping the relative order of the rest
        let mut order: Vec<usize> = (0..dims.len())
            .filter(|&p| !trailing.contains(&dims[p]))
            .collect();
        order.extend(
            trailing
                .iter()
                .map(|v| dims.iter().position(|d| d == v).unwrap()),
        );
        let dims: Vec<usize> = order.iter().map(|&p| dims[p]).collect();
        let sizes: Vec<usize> = order.iter().map(|&p| sizes[p]).collect();

        let strides = tables
            .iter()
            .map(|t| {
                let own = t.strides();
                dims.iter()
                    .map(|d| t.dims.iter().position(|x| x == d).map_or(0, |k| own[k]))
                    .collect()
            })
            .collect();
        Ok(Self {
            dims,
            sizes,
            strides,
        })
    }
}

/// Row-major counter over a mixed-radix space that keeps one linear offset
/// per table up to date.
struct Odometer<'a> {
    sizes: &'a [usize],
    strides: &'a [Vec<usize>],
    digits: Vec<usize>,
    offsets: Vec<usize>,
    /// Positions below this index are never advanced.
    first: usize,
}

impl<'a> Odometer<'a> {
    fn new(layout: &'a Layout, base: Vec<usize>, first: usize) -> Self {
        Self {
            sizes: &layout.sizes,
            strides: &layout.strides,
            digits: vec![0; layout.sizes.len()],
            offsets: base,
            first,
        }
    }

    fn advance(&mut self) -> bool {
        for k in (self.first..self.sizes.len()).rev() {
            if self.digits[k] + 1 < self.sizes[k] {
                self.digits[k] += 1;
                for (off, s) in self.offsets.iter_mut().zip(self.strides) {
                    *off += s[k];
                }
                return true;
            }
            for (off, s) in self.offsets.iter_mut().zip(self.strides) {
                *off -= s[k] * (self.sizes[k] - 1);
            }
            self.digits[k] = 0;
        }
        false
    }
}

impl<C: Cost> UtilityTable<C> {
    pub fn new(dims: Vec<usize>, domain_sizes: Vec<usize>, values: Vec<C>) -> Result<Self> {
        if dims.len() != domain_sizes.len() {
            return Err(Error::Table(
                "dims and domain_sizes differ in length".into(),
            ));
        }
        let distinct: BTreeSet<_> = dims.iter().collect();
        if distinct.len() != dims.len() {
            return Err(Error::Table(format!("duplicate dimension in {dims:?}")));
        }
        if domain_sizes.contains(&0) {
            return Err(Error::Table("empty domain".into()));
        }
        let cells: usize = domain_sizes.iter().product();
        if values.len() != cells {
            return Err(Error::Table(format!(
                "expected {cells} values, got {}",
                values.len()
            )));
        }
        Ok(Self {
            dims,
            domain_sizes,
            values,
            elimination_result: false,
            sources: BTreeSet::new(),
        })
    }

    /// 0-dimensional table holding one value.
    pub fn scalar(value: C) -> Self {
        Self {
            dims: Vec::new(),
            domain_sizes: Vec::new(),
            values: vec![value],
            elimination_result: false,
            sources: BTreeSet::new(),
        }
    }

    /// Agent `i`'s private side toward `j` as a table over `[i, j]`.
    pub fn from_side(problem: &Problem<C>, i: usize, j: usize) -> Result<Self> {
        let m = problem
            .side(i, j)
            .ok_or_else(|| Error::Table(format!("no side ({i}, {j})")))?;
        let mut t = Self::new(vec![i, j], vec![m.rows(), m.cols()], m.values().to_vec())?;
        t.sources.insert((i, j));
        Ok(t)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_set(&self) -> BTreeSet<usize> {
        self.dims.iter().copied().collect()
    }

    pub fn has_dim(&self, var: usize) -> bool {
        self.dims.contains(&var)
    }

    pub fn domain_sizes(&self) -> &[usize] {
        &self.domain_sizes
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    /// True if an elimination contributed to this table.
    pub fn is_elimination_result(&self) -> bool {
        self.elimination_result
    }

    pub fn sources(&self) -> &BTreeSet<(usize, usize)> {
        &self.sources
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.domain_sizes[k + 1];
        }
        s
    }

    /// Value at the slice of `point` over this table's dims.
    pub fn value_at(&self, point: &Assignment) -> Option<C> {
        let mut idx = 0;
        for ((&d, &size), stride) in self.dims.iter().zip(&self.domain_sizes).zip(self.strides()) {
            let v = point.get(d)?;
            if v >= size {
                return None;
            }
            idx += v * stride;
        }
        Some(self.values[idx])
    }

    /// Cellwise sum over the union of dimensions: `self`'s dims first, then
    /// the new dims of `other`.
    pub fn join(&self, other: &Self, counter: &mut AccessCounter) -> Result<Self> {
        let layout = Layout::new(&[self, other], &[])?;
        let cells: usize = layout.sizes.iter().product();
        let mut values = Vec::with_capacity(cells);
        let mut od = Odometer::new(&layout, vec![0, 0], 0);
        loop {
            values.push(self.values[od.offsets[0]] + other.values[od.offsets[1]]);
            if !od.advance() {
                break;
            }
        }
        counter.accesses += 3 * cells as u64;
        let out = Self {
            domain_sizes: layout.sizes,
            dims: layout.dims,
            values,
            elimination_result: self.elimination_result || other.elimination_result,
            sources: self.sources.union(&other.sources).copied().collect(),
        };
        counter.materialized(&out);
        Ok(out)
    }

    /// Left fold of [`UtilityTable::join`]; the empty fold is the scalar 0.
    pub fn join_all<'a, I>(tables: I, counter: &mut AccessCounter) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut it = tables.into_iter();
        let Some(first) = it.next() else {
            return Ok(Self::scalar(C::zero()));
        };
        let mut acc = first.clone();
        for t in it {
            acc = acc.join(t, counter)?;
        }
        Ok(acc)
    }

    /// Min-projection removing `vars`.
    pub fn eliminate(&self, vars: &BTreeSet<usize>, counter: &mut AccessCounter) -> Result<Self> {
        if let Some(v) = vars.iter().find(|v| !self.dims.contains(v)) {
            return Err(Error::Table(format!(
                "cannot eliminate {v}: not a dimension"
            )));
        }
        Self::eliminate_joined(&[self], vars, counter)
    }

    /// `min over vars of (t_1 + ... + t_m)` without materializing the join.
    /// Output dims are the union of the inputs' dims (in order of
    /// appearance) minus `vars`.
    pub fn eliminate_joined(
        tables: &[&Self],
        vars: &BTreeSet<usize>,
        counter: &mut AccessCounter,
    ) -> Result<Self> {
        let batch: Vec<usize> = vars.iter().copied().collect();
        let layout = Layout::new(tables, &batch)?;
        let kept = layout.dims.len() - batch.len();
        let batch_cells: usize = layout.sizes[kept..].iter().product();
        let out_cells: usize = layout.sizes[..kept].iter().product();

        let mut values = Vec::with_capacity(out_cells);
        let mut od = Odometer::new(&layout, vec![0; tables.len()], 0);
        'outer: loop {
            let mut best: Option<C> = None;
            for _ in 0..batch_cells {
                let sum = tables
                    .iter()
                    .zip(&od.offsets)
                    .fold(C::zero(), |acc, (t, &off)| acc + t.values[off]);
                best = Some(best.map_or(sum, |b| min_cost(b, sum)));
                if !od.advance() {
                    values.push(best.unwrap());
                    break 'outer;
                }
            }
            values.push(best.unwrap());
        }
        debug_assert_eq!(values.len(), out_cells);
        counter.accesses += (out_cells * batch_cells * tables.len() + out_cells) as u64;

        let out = Self {
            dims: layout.dims[..kept].to_vec(),
            domain_sizes: layout.sizes[..kept].to_vec(),
            values,
            elimination_result: true,
            sources: tables
                .iter()
                .flat_map(|t| t.sources.iter().copied())
                .collect(),
        };
        counter.materialized(&out);
        Ok(out)
    }

    /// Joint assignment of `vars` minimizing this table under `context`.
    /// Ties go to the lexicographically smallest value vector (vars in
    /// ascending order).
    pub fn argmin(
        &self,
        vars: &BTreeSet<usize>,
        context: &Assignment,
        counter: &mut AccessCounter,
    ) -> Result<Assignment> {
        if vars.is_empty() {
            return Ok(Assignment::new());
        }
        Self::argmin_joined(&[self], vars, context, counter).map(|(a, _)| a)
    }

    /// Argmin of the sum of `tables`, returning the minimizer and its value.
    pub fn argmin_joined(
        tables: &[&Self],
        vars: &BTreeSet<usize>,
        context: &Assignment,
        counter: &mut AccessCounter,
    ) -> Result<(Assignment, C)> {
        let batch: Vec<usize> = vars.iter().copied().collect();
        let layout = Layout::new(tables, &batch)?;
        let kept = layout.dims.len() - batch.len();

        let mut base = vec![0; tables.len()];
        for k in 0..kept {
            let d = layout.dims[k];
            let v = context
                .get(d)
                .ok_or_else(|| Error::Table(format!("context does not assign {d}")))?;
            if v >= layout.sizes[k] {
                return Err(Error::Table(format!(
                    "context value {v} out of domain for {d}"
                )));
            }
            for (b, s) in base.iter_mut().zip(&layout.strides) {
                *b += v * s[k];
            }
        }

        let mut od = Odometer::new(&layout, base, kept);
        let mut best: Option<(Vec<usize>, C)> = None;
        loop {
            counter.accesses += tables.len() as u64;
            let sum = tables
                .iter()
                .zip(&od.offsets)
                .fold(C::zero(), |acc, (t, &off)| acc + t.values[off]);
            if best.as_ref().is_none_or(|(_, b)| sum < *b) {
                best = Some((od.digits[kept..].to_vec(), sum));
            }
            if !od.advance() {
                break;
            }
        }
        let (digits, value) = best.expect("non-empty search space");
        Ok((batch.into_iter().zip(digits).collect(), value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(dims: &[usize], sizes: &[usize], values: &[i64]) -> UtilityTable<i64> {
        UtilityTable::new(dims.to_vec(), sizes.to_vec(), values.to_vec()).unwrap()
    }

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(UtilityTable::<i64>::new(vec![0, 0], vec![2, 2], vec![0; 4]).is_err());
        assert!(UtilityTable::<i64>::new(vec![0, 1], vec![2, 2], vec![0; 3]).is_err());
        assert_eq!(UtilityTable::scalar(5i64).cells(), 1);
    }

    #[test]
    fn from_side_copies_row_major() {
        let p = crate::model::tests::two_agent();
        let u = UtilityTable::from_side(&p, 0, 1).unwrap();
        assert_eq!(u.dims(), &[0, 1]);
        assert_eq!(u.values(), &[1, 2, 3, 4]);
        assert!(!u.is_elimination_result());
        let v = UtilityTable::from_side(&p, 1, 0).unwrap();
        assert_eq!(v.dims(), &[1, 0]);
        assert_eq!(u.dim_set(), v.dim_set());
        assert!(UtilityTable::from_side(&p, 0, 2).is_err());
    }

    #[test]
    fn join_disjoint() {
        let mut c = AccessCounter::new();
        let u = t(&[0], &[2], &[1, 2]);
        let v = t(&[1], &[2], &[10, 20]);
        let j = u.join(&v, &mut c).unwrap();
        assert_eq!(j.dims(), &[0, 1]);
        assert_eq!(j.values(), &[11, 21, 12, 22]);
        assert_eq!(c.accesses, 12);
        assert_eq!(c.max_dims, 2);
    }

    #[test]
    fn join_with_zero_scalar_is_identity() {
        let mut c = AccessCounter::new();
        let u = t(&[3, 1], &[2, 3], &[1, 2, 3, 4, 5, 6]);
        let j = u.join(&UtilityTable::scalar(0), &mut c).unwrap();
        assert_eq!(j.values(), u.values());
        assert_eq!(j.dims(), u.dims());
    }

    #[test]
    fn join_shared_dims_and_mismatch() {
        let mut c = AccessCounter::new();
        let u = t(&[0, 1], &[2, 2], &[0, 1, 2, 3]);
        let v = t(&[1, 2], &[2, 2], &[10, 20, 30, 40]);
        let j = u.join(&v, &mut c).unwrap();
        assert_eq!(j.dims(), &[0, 1, 2]);
        // (x0,x1,x2) = (1,1,0) -> u[1][1] + v[1][0] = 3 + 30
        let p: Assignment = [(0, 1), (1, 1), (2, 0)].into_iter().collect();
        assert_eq!(j.value_at(&p), Some(33));
        let w = t(&[1], &[3], &[0, 0, 0]);
        assert!(u.join(&w, &mut c).is_err());
    }

    #[test]
    fn eliminate_row_minima() {
        let mut c = AccessCounter::new();
        let u = t(&[0, 1], &[2, 2], &[3, 7, 5, 1]);
        let e = u.eliminate(&set(&[1]), &mut c).unwrap();
        assert_eq!(e.dims(), &[0]);
        assert_eq!(e.values(), &[3, 1]);
        assert!(e.is_elimination_result());
        // 4 reads + 2 writes
        assert_eq!(c.accesses, 6);
    }

    #[test]
    fn eliminate_nothing_sets_flag() {
        let mut c = AccessCounter::new();
        let u = t(&[0, 1], &[2, 2], &[3, 7, 5, 1]);
        let e = u.eliminate(&set(&[]), &mut c).unwrap();
        assert_eq!(e.values(), u.values());
        assert!(e.is_elimination_result());
    }

    #[test]
    fn eliminate_everything_gives_global_min() {
        let mut c = AccessCounter::new();
        let u = t(&[0, 1], &[2, 2], &[3, 7, 5, 1]);
        let e = u.eliminate(&set(&[0, 1]), &mut c).unwrap();
        assert!(e.dims().is_empty());
        assert_eq!(e.values(), &[1]);
        assert!(u.eliminate(&set(&[4]), &mut c).is_err());
    }

    #[test]
    fn eliminate_leading_dim() {
        let mut c = AccessCounter::new();
        let u = t(&[0, 1], &[2, 3], &[4, 1, 6, 2, 5, 0]);
        let e = u.eliminate(&set(&[0]), &mut c).unwrap();
        assert_eq!(e.dims(), &[1]);
        assert_eq!(e.values(), &[2, 1, 0]);
    }

    #[test]
    fn argmin_cases() {
        let mut c = AccessCounter::new();
        let u = t(&[0, 1], &[2, 2], &[3, 7, 5, 1]);
        let ctx: Assignment = [(0, 1)].into_iter().collect();
        assert_eq!(
            u.argmin(&set(&[1]), &ctx, &mut c).unwrap(),
            [(1, 1)].into_iter().collect()
        );
        assert!(u.argmin(&set(&[]), &ctx, &mut c).unwrap().is_empty());
        assert!(u.argmin(&set(&[1]), &Assignment::new(), &mut c).is_err());
    }

    #[test]
    fn argmin_ties_are_lexicographic() {
        let mut c = AccessCounter::new();
        let u = t(&[5, 2], &[2, 2], &[4, 0, 0, 0]);
        // candidates (x2,x5): (0,0)=4 (1,0)=0 (0,1)=0 (1,1)=0 -> smallest vector (0,1)
        let a = u.argmin(&set(&[2, 5]), &Assignment::new(), &mut c).unwrap();
        assert_eq!(a, [(2, 0), (5, 1)].into_iter().collect());
    }

    #[test]
    fn fused_elimination_avoids_wide_intermediates() {
        // tables over {1,2},{1,3},{1,4},{2,3},{2,4}: eliminating 1 alone leaves
        // {2,3,4}; eliminating {1,2} jointly leaves {3,4}
        let tabs: Vec<UtilityTable<i64>> = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)]
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| t(&[a, b], &[2, 2], &[k as i64, 1, 2, 0]))
            .collect();
        let refs: Vec<&UtilityTable<i64>> = tabs.iter().collect();
        let mut c = AccessCounter::new();
        let joint = UtilityTable::eliminate_joined(&refs, &set(&[1, 2]), &mut c).unwrap();
        assert_eq!(joint.dim_set(), set(&[3, 4]));
        assert_eq!(c.max_dims, 2);
        let mut c1 = AccessCounter::new();
        let single = UtilityTable::eliminate_joined(&refs, &set(&[1]), &mut c1).unwrap();
        assert_eq!(single.dim_set(), set(&[2, 3, 4]));
        assert_eq!(c1.max_dims, 3);
    }

    // -- property tests -------------------------------------------------

    /// Random table over a subset of variables 0..5 with domains 1..=3.
    fn arb_table(domains: [usize; 5]) -> impl Strategy<Value = UtilityTable<i64>> {
        (
            proptest::sample::subsequence(vec![0usize, 1, 2, 3, 4], 0..=3),
            any::<u64>(),
        )
            .prop_flat_map(move |(dims, shuffle)| {
                let mut dims = dims;
                // vary dimension order
                if shuffle % 2 == 1 {
                    dims.reverse();
                }
                let sizes: Vec<usize> = dims.iter().map(|&d| domains[d]).collect();
                let cells: usize = sizes.iter().product();
                proptest::collection::vec(0i64..50, cells)
                    .prop_map(move |vals| t(&dims, &sizes, &vals))
            })
    }

    fn domains() -> impl Strategy<Value = [usize; 5]> {
        [1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3]
    }

    fn all_points(domains: &[usize; 5]) -> Vec<Assignment> {
        let mut pts = vec![Assignment::new()];
        for (v, &d) in domains.iter().enumerate() {
            pts = pts
                .into_iter()
                .flat_map(|a| {
                    (0..d).map(move |x| {
                        let mut b = a.clone();
                        b.insert(v, x);
                        b
                    })
                })
                .collect();
        }
        pts
    }

    /// Oracle: value of min over `vars` of a table, by enumerating the
    /// completions directly from `value_at`.
    fn brute_min(
        u: &UtilityTable<i64>,
        vars: &BTreeSet<usize>,
        point: &Assignment,
        domains: &[usize; 5],
    ) -> i64 {
        let mut completions = vec![point.clone()];
        for &v in vars {
            completions = completions
                .into_iter()
                .flat_map(|a| {
                    (0..domains[v]).map(move |x| {
                        let mut b = a.clone();
                        b.insert(v, x);
                        b
                    })
                })
                .collect();
        }
        completions
            .iter()
            .map(|a| u.value_at(a).unwrap())
            .min()
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn join_matches_definition_and_commutes(
            (d, u, v) in domains().prop_flat_map(|d| (Just(d), arb_table(d), arb_table(d)))
        ) {
            let mut c = AccessCounter::new();
            let uv = u.join(&v, &mut c).unwrap();
            prop_assert_eq!(c.accesses, 3 * uv.cells() as u64);
            let vu = v.join(&u, &mut c).unwrap();
            for p in all_points(&d) {
                let want = u.value_at(&p).unwrap() + v.value_at(&p).unwrap();
                prop_assert_eq!(uv.value_at(&p), Some(want));
                prop_assert_eq!(vu.value_at(&p), Some(want));
            }
        }

        #[test]
        fn eliminate_matches_enumeration(
            (d, u, mask) in domains().prop_flat_map(|d| (Just(d), arb_table(d), any::<u8>()))
        ) {
            let vars: BTreeSet<usize> = u.dims().iter().copied().enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| v).collect();
            let mut c = AccessCounter::new();
            let e = u.eliminate(&vars, &mut c).unwrap();
            prop_assert_eq!(c.accesses, (u.cells() + e.cells()) as u64);
            for p in all_points(&d) {
                prop_assert_eq!(e.value_at(&p), Some(brute_min(&u, &vars, &p, &d)));
            }
        }

        #[test]
        fn fused_elimination_equals_join_then_eliminate(
            (d, ts, mask) in domains().prop_flat_map(|d| (
                Just(d),
                proptest::collection::vec(arb_table(d), 1..4),
                any::<u8>(),
            ))
        ) {
            let mut c = AccessCounter::new();
            let joined = UtilityTable::join_all(ts.iter(), &mut c).unwrap();
            let vars: BTreeSet<usize> = joined.dims().iter().copied().enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| v).collect();
            let refs: Vec<_> = ts.iter().collect();
            let fused = UtilityTable::eliminate_joined(&refs, &vars, &mut c).unwrap();
            let plain = joined.eliminate(&vars, &mut c).unwrap();
            prop_assert_eq!(fused.dim_set(), plain.dim_set());
            for p in all_points(&d) {
                prop_assert_eq!(fused.value_at(&p), plain.value_at(&p));
            }
        }

        #[test]
        fn argmin_joined_agrees_with_joined_table(
            (d, ts, mask, ctx_seed) in domains().prop_flat_map(|d| (
                Just(d),
                proptest::collection::vec(arb_table(d), 1..4),
                any::<u8>(),
                any::<u64>(),
            ))
        ) {
            let mut c = AccessCounter::new();
            let joined = UtilityTable::join_all(ts.iter(), &mut c).unwrap();
            let vars: BTreeSet<usize> = joined.dims().iter().copied().enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| v).collect();
            let ctx: Assignment = (0..5).map(|v| (v, (ctx_seed >> (4 * v)) as usize % d[v])).collect();
            let ctx = ctx.slice(joined.dims().iter().filter(|v| !vars.contains(v)));
            let refs: Vec<_> = ts.iter().collect();
            let (a, val) = UtilityTable::argmin_joined(&refs, &vars, &ctx, &mut c).unwrap();
            prop_assert_eq!(&a, &joined.argmin(&vars, &ctx, &mut c).unwrap());
            let mut full = ctx.clone();
            full.extend(&a);
            prop_assert_eq!(joined.value_at(&full), Some(val));
            prop_assert_eq!(val, brute_min(&joined, &vars, &ctx, &d));
        }

        #[test]
        fn join_all_is_permutation_invariant(
            (d, ts) in domains().prop_flat_map(|d| (Just(d), proptest::collection::vec(arb_table(d), 0..4)))
        ) {
            let mut c = AccessCounter::new();
            let fwd = UtilityTable::join_all(ts.iter(), &mut c).unwrap();
            let rev = UtilityTable::join_all(ts.iter().rev(), &mut c).unwrap();
            for p in all_points(&d) {
                prop_assert_eq!(fwd.value_at(&p), rev.value_at(&p));
            }
        }
    }

    #[test]
    fn join_all_edge_cases() {
        let mut c = AccessCounter::new();
        let empty = UtilityTable::<i64>::join_all([], &mut c).unwrap();
        assert!(empty.dims().is_empty());
        assert_eq!(empty.values(), &[0]);
        let u = t(&[0], &[3], &[1, 2, 3]);
        assert_eq!(UtilityTable::join_all([&u], &mut c).unwrap(), u);
        assert_eq!(c.accesses, 0);
    }
}
