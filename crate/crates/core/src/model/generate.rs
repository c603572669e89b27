//! Seeded random instance generators.
//!
//! Structure and costs come from two independent ChaCha streams derived
//! from the same seed, so instances that differ only in cost parameters
//! (e.g. MaxDCSP tightness) share their constraint graph, and their
//! prohibited-entry sets are nested.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CostMatrix, Problem};
use crate::cost::Cost;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_COST: u64 = 100;

const STRUCTURE_STREAM: u64 = 0;
const COST_STREAM: u64 = 1;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn check_common(n: usize, density: f64, domain: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!(
            "need at least 2 agents, got {n}"
        )));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidParameters(format!(
            "density must lie in (0, 1], got {density}"
        )));
    }
    if domain == 0 {
        return Err(Error::InvalidParameters(
            "domain size must be positive".into(),
        ));
    }
    Ok(())
}

/// Connected random graph: a random spanning tree (each node in a random
/// permutation attaches to a random earlier node) topped up with uniformly
/// sampled extra edges until `ceil(density * n(n-1)/2)` edges exist.
pub(crate) fn connected_graph(n: usize, density: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = rng(seed, STRUCTURE_STREAM);
    let max_edges = n * (n - 1) / 2;
    let target = ((density * max_edges as f64 - 1e-9).ceil() as usize).clamp(n - 1, max_edges);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = BTreeSet::new();
    for k in 1..n {
        let other = order[rng.gen_range(0..k)];
        let a = order[k];
        edges.insert((a.min(other), a.max(other)));
    }

    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .collect();
    let extra = target - edges.len();
    let (picked, _) = rest.partial_shuffle(&mut rng, extra);
    edges.extend(picked.iter().copied());
    edges.into_iter().collect()
}

fn build<C: Cost>(
    n: usize,
    domain: usize,
    edges: &[(usize, usize)],
    mut entry: impl FnMut() -> C,
) -> Result<Problem<C>> {
    let mut sides = BTreeMap::new();
    for &(i, j) in edges {
        for (a, b) in [(i, j), (j, i)] {
            let values = (0..domain * domain).map(|_| entry()).collect();
            sides.insert((a, b), CostMatrix::new(domain, domain, values)?);
        }
    }
    Problem::new(vec![domain; n], sides)
}

fn from_u64<C: Cost>(v: u64) -> C {
    C::from_u64(v).expect("cost type cannot represent generated integer")
}

/// Random ADCOP with integer costs drawn uniformly from `0..=max_cost`.
pub fn random_adcop<C: Cost>(
    n: usize,
    density: f64,
    domain: usize,
    max_cost: u64,
    seed: u64,
) -> Result<Problem<C>> {
    check_common(n, density, domain)?;
    let edges = connected_graph(n, density, seed);
    let mut rng = rng(seed, COST_STREAM);
    build(n, domain, &edges, || from_u64(rng.gen_range(0..=max_cost)))
}

/// Asymmetric MaxDCSP: every directed entry is 1 (prohibited) with
/// probability `tightness`, else 0.
pub fn random_maxdcsp<C: Cost>(
    n: usize,
    density: f64,
    domain: usize,
    tightness: f64,
    seed: u64,
) -> Result<Problem<C>> {
    check_common(n, density, domain)?;
    if !(0.0..=1.0).contains(&tightness) {
        return Err(Error::InvalidParameters(format!(
            "tightness must lie in [0, 1], got {tightness}"
        )));
    }
    let edges = connected_graph(n, density, seed);
    let mut rng = rng(seed, COST_STREAM);
    build(n, domain, &edges, || {
        from_u64(u64::from(rng.gen::<f64>() < tightness))
    })
}

/// Chain `0 - 1 - ... - (n-1)` where every agent is also constrained with
/// agent 0, so all variables can only be eliminated at the root.
pub fn random_chain<C: Cost>(
    n: usize,
    domain: usize,
    max_cost: u64,
    seed: u64,
) -> Result<Problem<C>> {
    check_common(n, 1.0, domain)?;
    let mut edges: BTreeSet<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.extend((2..n).map(|j| (0, j)));
    let edges: Vec<_> = edges.into_iter().collect();
    let mut rng = rng(seed, COST_STREAM);
    build(n, domain, &edges, || from_u64(rng.gen_range(0..=max_cost)))
}
