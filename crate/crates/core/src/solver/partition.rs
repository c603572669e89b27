//! Local table partitioning and mini-batch elimination.

use std::collections::{BTreeMap, BTreeSet};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::model::Problem;
use crate::pseudotree::PseudoTree;
use crate::tables::{AccessCounter, UtilityTable};

/// Groups side tables so each group's joined dims stay within `k_p`, then
/// joins each group. Sides are taken in the given order; each goes to the
/// earliest group with the largest dimension overlap that still has room,
/// or opens a new group.
pub fn partition_sides<C: Cost>(
    sides: Vec<UtilityTable<C>>,
    k_p: usize,
    counter: &mut AccessCounter,
) -> Result<Vec<UtilityTable<C>>> {
    let mut groups: Vec<(BTreeSet<usize>, Vec<UtilityTable<C>>)> = Vec::new();
    for side in sides {
        let dims = side.dim_set();
        let slot = groups
            .iter()
            .enumerate()
            .filter(|(_, (g, _))| g.union(&dims).count() <= k_p)
            .max_by_key(|(k, (g, _))| (g.intersection(&dims).count(), std::cmp::Reverse(*k)))
            .map(|(k, _)| k);
        match slot {
            Some(k) => {
                groups[k].0.extend(dims);
                groups[k].1.push(side);
            }
            None => groups.push((dims, vec![side])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let t = UtilityTable::join_all(members.iter(), counter)?;
            counter.materialized(&t);
            Ok(t)
        })
        .collect()
}

/// Agent `i`'s private sides toward its (pseudo) parents, partitioned by
/// `k_p`. This is what a leaf sends.
pub fn local_tables<C: Cost>(
    i: usize,
    problem: &Problem<C>,
    tree: &PseudoTree,
    k_p: usize,
    counter: &mut AccessCounter,
) -> Result<Vec<UtilityTable<C>>> {
    let sides = tree
        .all_parents(i)
        .into_iter()
        .map(|j| UtilityTable::from_side(problem, i, j))
        .collect::<Result<Vec<_>>>()?;
    partition_sides(sides, k_p, counter)
}

/// Connected components of `vars` under "appear together in some table".
fn variable_groups<C: Cost>(
    tables: &[UtilityTable<C>],
    vars: &BTreeSet<usize>,
) -> Vec<BTreeSet<usize>> {
    let mut root: BTreeMap<usize, usize> = vars.iter().map(|&v| (v, v)).collect();
    fn find(root: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let p = root[&v];
        if p == v {
            return v;
        }
        let r = find(root, p);
        root.insert(v, r);
        r
    }
    for t in tables {
        let inside: Vec<usize> = t
            .dims()
            .iter()
            .copied()
            .filter(|d| vars.contains(d))
            .collect();
        for w in inside.windows(2) {
            let (a, b) = (find(&mut root, w[0]), find(&mut root, w[1]));
            if a != b {
                root.insert(a.max(b), a.min(b));
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &v in vars {
        let r = find(&mut root, v);
        groups.entry(r).or_default().insert(v);
    }
    groups.into_values().collect()
}

/// Eliminates `vars` from `tables` in batches of `k_e` (`None`: whole
/// groups). Within a group, variables touching fewer tables go first (then
/// lower index). Each batch is min-eliminated jointly over the tables it
/// touches; the result takes the place of the first of those tables.
///
/// Returns the remaining tables and the batches in execution order.
#[allow(clippy::type_complexity)]
pub fn eliminate_with_mbes<C: Cost>(
    mut tables: Vec<UtilityTable<C>>,
    vars: &BTreeSet<usize>,
    k_e: Option<usize>,
    counter: &mut AccessCounter,
) -> Result<(Vec<UtilityTable<C>>, Vec<Vec<usize>>)> {
    if let Some(v) = vars.iter().find(|&&v| !tables.iter().any(|t| t.has_dim(v))) {
        return Err(Error::Table(format!("variable {v} appears in no table")));
    }
    let mut batches = Vec::new();
    for group in variable_groups(&tables, vars) {
        let mut order: Vec<usize> = group.into_iter().collect();
        order.sort_by_key(|&v| (tables.iter().filter(|t| t.has_dim(v)).count(), v));
        let size = k_e.unwrap_or(order.len()).max(1);
        for chunk in order.chunks(size) {
            let batch: BTreeSet<usize> = chunk.iter().copied().collect();
            let touching: Vec<usize> = (0..tables.len())
                .filter(|&k| tables[k].dims().iter().any(|d| batch.contains(d)))
                .collect();
            let refs: Vec<&UtilityTable<C>> = touching.iter().map(|&k| &tables[k]).collect();
            let out = UtilityTable::eliminate_joined(&refs, &batch, counter)?;
            let first = touching[0];
            for &k in touching.iter().rev() {
                tables.remove(k);
            }
            tables.insert(first, out);
            batches.push(chunk.to_vec());
        }
    }
    Ok((tables, batches))
}
