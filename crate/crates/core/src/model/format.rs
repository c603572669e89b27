//! Line-oriented text format for problems.
//!
//! ```text
//! # comments and blank lines are ignored
//! n_agents 2
//! domain_sizes 2 2
//! side 0 1 1 2 3 4      # agent 0's costs toward 1, row-major [v_0][v_1]
//! side 1 0 5 6 7 8
//! ```
//!
//! `n_agents` and `domain_sizes` must precede every `side` record.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{CostMatrix, Problem};
use crate::cost::Cost;
use crate::error::{Error, Result};

pub fn serialize<C: Cost>(problem: &Problem<C>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n_agents {}", problem.n_agents());
    out.push_str("domain_sizes");
    for d in problem.domain_sizes() {
        let _ = write!(out, " {d}");
    }
    out.push('\n');
    for (&(i, j), m) in problem.side_costs() {
        let _ = write!(out, "side {i} {j}");
        for v in m.values() {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_usize(tok: &str, line: usize, field: &str) -> Result<usize> {
    tok.parse().map_err(|_| {
        err(
            line,
            format!("{field}: expected a non-negative integer, got {tok:?}"),
        )
    })
}

pub fn parse<C: Cost>(text: &str) -> Result<Problem<C>> {
    let mut n_agents: Option<usize> = None;
    let mut domains: Option<Vec<usize>> = None;
    let mut sides = BTreeMap::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let key = toks.next().unwrap_or_default();
        match key {
            "n_agents" => {
                if n_agents.is_some() {
                    return Err(err(line, "duplicate n_agents"));
                }
                let tok = toks
                    .next()
                    .ok_or_else(|| err(line, "n_agents: missing value"))?;
                let n = parse_usize(tok, line, "n_agents")?;
                if n == 0 {
                    return Err(err(line, "n_agents must be positive"));
                }
                if toks.next().is_some() {
                    return Err(err(line, "n_agents: trailing tokens"));
                }
                n_agents = Some(n);
            }
            "domain_sizes" => {
                let n = n_agents.ok_or_else(|| err(line, "domain_sizes before n_agents"))?;
                if domains.is_some() {
                    return Err(err(line, "duplicate domain_sizes"));
                }
                let ds = toks
                    .map(|t| parse_usize(t, line, "domain_sizes"))
                    .collect::<Result<Vec<_>>>()?;
                if ds.len() != n {
                    return Err(err(
                        line,
                        format!("domain_sizes: expected {n} values, got {}", ds.len()),
                    ));
                }
                domains = Some(ds);
            }
            "side" => {
                let ds = domains
                    .as_ref()
                    .ok_or_else(|| err(line, "side record before domain_sizes"))?;
                let i = parse_usize(
                    toks.next().ok_or_else(|| err(line, "side: missing i"))?,
                    line,
                    "side i",
                )?;
                let j = parse_usize(
                    toks.next().ok_or_else(|| err(line, "side: missing j"))?,
                    line,
                    "side j",
                )?;
                if i >= ds.len() || j >= ds.len() {
                    return Err(err(line, format!("side ({i}, {j}): agent out of range")));
                }
                let values = toks
                    .map(|t| {
                        t.parse::<C>()
                            .map_err(|_| err(line, format!("side ({i}, {j}): bad cost {t:?}")))
                    })
                    .collect::<Result<Vec<C>>>()?;
                let (rows, cols) = (ds[i], ds[j]);
                if values.len() != rows * cols {
                    return Err(err(
                        line,
                        format!(
                            "side ({i}, {j}): expected {} entries ({rows}x{cols}), got {}",
                            rows * cols,
                            values.len()
                        ),
                    ));
                }
                if sides
                    .insert((i, j), CostMatrix::new(rows, cols, values)?)
                    .is_some()
                {
                    return Err(err(line, format!("duplicate side ({i}, {j})")));
                }
            }
            other => return Err(err(line, format!("unknown field {other:?}"))),
        }
    }

    let end = last_line.max(1);
    if n_agents.is_none() {
        return Err(err(end, "missing n_agents"));
    }
    let domains = domains.ok_or_else(|| err(end, "missing domain_sizes"))?;
    Problem::new(domains, sides)
}
