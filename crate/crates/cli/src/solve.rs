use std::fmt::Write;
use std::path::Path;
use std::str::FromStr;

use adcop::model::parse;
use adcop::{
    brute_force_with_cap, run_with, Cost, PseudoTree, RunOptions, Scheduler, SolverConfig,
    DEFAULT_ORACLE_CAP,
};
use anyhow::{Context, Result};
use num_rational::Ratio;

/// Scalar type costs are read as.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CostKind {
    #[default]
    Int,
    Float,
    Rational,
}

impl FromStr for CostKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "int" => Ok(CostKind::Int),
            "float" => Ok(CostKind::Float),
            "rational" => Ok(CostKind::Rational),
            _ => Err(format!("unknown cost type {s:?} (int, float, rational)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub config: SolverConfig,
    pub costs: CostKind,
    /// Root of the pseudo tree; `None` picks the highest-degree agent.
    pub root: Option<usize>,
    pub scheduler: Scheduler,
    pub trace: bool,
    pub oracle_cap: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            config: SolverConfig::joint(),
            costs: CostKind::Int,
            root: None,
            scheduler: Scheduler::Fifo,
            trace: false,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }
}

pub fn solve_file(path: &Path, options: &SolveOptions) -> Result<String> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    solve_text(&text, options).with_context(|| format!("solving {}", path.display()))
}

/// Solves a problem given in the text format and renders the result.
pub fn solve_text(text: &str, options: &SolveOptions) -> Result<String> {
    match options.costs {
        CostKind::Int => solve_as::<u64>(text, options),
        CostKind::Float => solve_as::<f64>(text, options),
        CostKind::Rational => solve_as::<Ratio<i64>>(text, options),
    }
}

fn solve_as<C: Cost>(text: &str, options: &SolveOptions) -> Result<String> {
    let problem = parse::<C>(text)?;
    let tree = match options.root {
        Some(root) => PseudoTree::build_rooted(&problem, root)?,
        None => PseudoTree::build(&problem)?,
    };
    let run_options = RunOptions {
        scheduler: options.scheduler,
        trace: options.trace,
    };
    let r = run_with(&problem, &tree, &options.config, run_options)?;

    let mut out = String::new();
    if let Some(trace) = &r.trace {
        for e in trace {
            writeln!(out, "{e}")?;
        }
    }
    let values: Vec<String> = r
        .assignment
        .iter()
        .map(|(x, v)| format!("{x}={v}"))
        .collect();
    writeln!(out, "assignment {}", values.join(" "))?;
    writeln!(out, "cost {}", r.cost)?;
    if problem.search_space() <= options.oracle_cap {
        writeln!(
            out,
            "oracle_cost {}",
            brute_force_with_cap(&problem, options.oracle_cap)?.1
        )?;
    } else {
        writeln!(out, "oracle_cost n/a")?;
    }
    let c = &r.config;
    writeln!(
        out,
        "config k_p={} k_e={} induced_width={} table_sets={}",
        c.k_p,
        c.k_e.map_or_else(|| "all".to_string(), |k| k.to_string()),
        c.induced_width,
        c.table_sets
    )?;
    writeln!(out, "{}", r.metrics)?;
    Ok(out)
}
