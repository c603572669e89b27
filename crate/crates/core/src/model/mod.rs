//! ADCOP instances: agents, domains and directed per-side cost matrices.

mod format;
mod generate;

use std::collections::{BTreeMap, BTreeSet};

use crate::cost::Cost;
use crate::error::{Error, Result};

pub use format::{parse, serialize};
pub use generate::{random_adcop, random_chain, random_maxdcsp, DEFAULT_MAX_COST};

/// Dense row-major cost matrix of one directed constraint side.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<C = u64> {
    rows: usize,
    cols: usize,
    values: Vec<C>,
}

impl<C: Cost> CostMatrix<C> {
    pub fn new(rows: usize, cols: usize, values: Vec<C>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::InvalidProblem(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: vec![C::zero(); rows * cols],
        }
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows(rows: &[&[C]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            values: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[C] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C {
        self.values[row * self.cols + col]
    }
}

/// An asymmetric DCOP. Agent `i` owns variable `i`; `side_costs[(i, j)]` is
/// agent `i`'s private cost toward neighbor `j`, indexed `[v_i][v_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem<C = u64> {
    domain_sizes: Vec<usize>,
    side_costs: BTreeMap<(usize, usize), CostMatrix<C>>,
}

impl<C: Cost> Problem<C> {
    /// Builds and validates a problem.
    pub fn new(
        domain_sizes: Vec<usize>,
        side_costs: BTreeMap<(usize, usize), CostMatrix<C>>,
    ) -> Result<Self> {
        let p = Self {
            domain_sizes,
            side_costs,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds a problem without checking invariants. Call [`Problem::validate`]
    /// before handing it to the solver.
    pub fn new_unchecked(
        domain_sizes: Vec<usize>,
        side_costs: BTreeMap<(usize, usize), CostMatrix<C>>,
    ) -> Self {
        Self {
            domain_sizes,
            side_costs,
        }
    }

    /// Convenience for tests and fixtures: adds both sides of a constraint.
    pub fn with_constraint(
        mut self,
        i: usize,
        j: usize,
        f_ij: CostMatrix<C>,
        f_ji: CostMatrix<C>,
    ) -> Result<Self> {
        self.side_costs.insert((i, j), f_ij);
        self.side_costs.insert((j, i), f_ji);
        self.validate()?;
        Ok(self)
    }

    /// Problem with the given domains and no constraints.
    pub fn unconstrained(domain_sizes: Vec<usize>) -> Result<Self> {
        Self::new(domain_sizes, BTreeMap::new())
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain_sizes.is_empty() {
            return Err(Error::InvalidProblem("no agents".into()));
        }
        if let Some(a) = self.domain_sizes.iter().position(|&d| d == 0) {
            return Err(Error::InvalidProblem(format!(
                "agent {a} has an empty domain"
            )));
        }
        let n = self.n_agents();
        for (&(i, j), m) in &self.side_costs {
            if i == j {
                return Err(Error::InvalidProblem(format!("self-pair ({i}, {i})")));
            }
            if i >= n || j >= n {
                return Err(Error::InvalidProblem(format!(
                    "side ({i}, {j}) references an agent outside 0..{n}"
                )));
            }
            if !self.side_costs.contains_key(&(j, i)) {
                return Err(Error::MissingMirror(i, j));
            }
            let (want_rows, want_cols) = (self.domain_sizes[i], self.domain_sizes[j]);
            if m.rows != want_rows || m.cols != want_cols || m.values.len() != want_rows * want_cols
            {
                return Err(Error::BadShape {
                    i,
                    j,
                    rows: m.rows,
                    cols: m.cols,
                    want_rows,
                    want_cols,
                });
            }
            for v in &m.values {
                if !v.is_finite() {
                    return Err(Error::NonFiniteCost(i, j));
                }
                if *v < C::zero() {
                    return Err(Error::NegativeCost(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.domain_sizes.len()
    }

    pub fn domain_sizes(&self) -> &[usize] {
        &self.domain_sizes
    }

    pub fn domain_size(&self, agent: usize) -> usize {
        self.domain_sizes[agent]
    }

    pub fn side_costs(&self) -> &BTreeMap<(usize, usize), CostMatrix<C>> {
        &self.side_costs
    }

    pub fn side(&self, i: usize, j: usize) -> Option<&CostMatrix<C>> {
        self.side_costs.get(&(i, j))
    }

    /// Undirected constraint edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.side_costs
            .keys()
            .filter(|(i, j)| i < j)
            .copied()
            .collect()
    }

    pub fn neighbors(&self, agent: usize) -> BTreeSet<usize> {
        self.side_costs
            .range((agent, 0)..(agent + 1, 0))
            .map(|(&(_, j), _)| j)
            .collect()
    }

    pub fn degree(&self, agent: usize) -> usize {
        self.side_costs.range((agent, 0)..(agent + 1, 0)).count()
    }

    /// Number of directed cost entries over all sides.
    pub fn directed_entries(&self) -> usize {
        self.side_costs.values().map(|m| m.values.len()).sum()
    }

    /// Product of all domain sizes, saturating.
    pub fn search_space(&self) -> u128 {
        self.domain_sizes
            .iter()
            .fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
    }

    /// Sum of both sides of every constraint under a complete assignment.
    pub fn total_cost(&self, assignment: &Assignment) -> Result<C> {
        let values = assignment.to_vec(self)?;
        Ok(self.cost_of(&values))
    }

    /// `total_cost` for a dense value vector already known to be valid.
    pub(crate) fn cost_of(&self, values: &[usize]) -> C {
        self.side_costs.iter().fold(C::zero(), |acc, (&(i, j), m)| {
            acc + m.get(values[i], values[j])
        })
    }
}

/// A (partial) assignment of agent variables to domain value indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment(BTreeMap<usize, usize>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values(values: &[usize]) -> Self {
        Self(values.iter().copied().enumerate().collect())
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.0.get(&var).copied()
    }

    pub fn insert(&mut self, var: usize, value: usize) -> Option<usize> {
        self.0.insert(var, value)
    }

    pub fn extend(&mut self, other: &Assignment) {
        self.0.extend(other.0.iter().map(|(&k, &v)| (k, v)));
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// The pairs of `self` whose variable is in `keys`.
    pub fn slice<'a, I>(&self, keys: I) -> Assignment
    where
        I: IntoIterator<Item = &'a usize>,
    {
        Assignment(
            keys.into_iter()
                .filter_map(|k| self.0.get(k).map(|&v| (*k, v)))
                .collect(),
        )
    }

    /// Dense value vector, checking completeness and domains.
    pub fn to_vec<C: Cost>(&self, problem: &Problem<C>) -> Result<Vec<usize>> {
        let n = problem.n_agents();
        if let Some(&extra) = self.0.keys().find(|&&k| k >= n) {
            return Err(Error::InvalidAssignment(format!(
                "agent {extra} does not exist"
            )));
        }
        (0..n)
            .map(|a| {
                let v = self
                    .get(a)
                    .ok_or_else(|| Error::InvalidAssignment(format!("agent {a} is unassigned")))?;
                if v >= problem.domain_size(a) {
                    return Err(Error::InvalidAssignment(format!(
                        "value {v} out of domain for agent {a} (size {})",
                        problem.domain_size(a)
                    )));
                }
                Ok(v)
            })
            .collect()
    }
}

impl FromIterator<(usize, usize)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        Self(iter.into_iter().collect())
    }
}
