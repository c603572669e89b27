//! Exhaustive reference solver.

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::model::{Assignment, Problem};

pub const DEFAULT_ORACLE_CAP: u128 = 10_000_000;

/// Minimum-cost complete assignment by plain enumeration, lexicographically
/// smallest on ties.
pub fn brute_force<C: Cost>(problem: &Problem<C>) -> Result<(Assignment, C)> {
    brute_force_with_cap(problem, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_with_cap<C: Cost>(problem: &Problem<C>, cap: u128) -> Result<(Assignment, C)> {
    let size = problem.search_space();
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let domains = problem.domain_sizes();
    let n = domains.len();
    let mut values = vec![0usize; n];
    let mut best = (values.clone(), problem.cost_of(&values));
    loop {
        // next value vector in lexicographic order
        let mut k = n;
        loop {
            if k == 0 {
                return Ok((Assignment::from_values(&best.0), best.1));
            }
            k -= 1;
            values[k] += 1;
            if values[k] < domains[k] {
                break;
            }
            values[k] = 0;
        }
        let cost = problem.cost_of(&values);
        if cost < best.1 {
            best = (values.clone(), cost);
        }
    }
}
