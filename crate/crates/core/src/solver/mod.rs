//! Agent logic: bottom-up utility propagation with non-local elimination,
//! top-down value propagation, and the two resource knobs.
//!
//! * `k_p` bounds the dimensionality of each table an agent builds from its
//!   own private sides. Below the induced width, agents forward *sets* of
//!   tables instead of one joint table. At or above it every outgoing set
//!   is joined into a single table.
//! * `k_e` is the batch size of each min-elimination. Variables to eliminate
//!   are first split into groups that share tables, then into batches; each
//!   batch is eliminated jointly over the tables it touches.

mod agent;
mod partition;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pseudotree::PseudoTree;

pub use agent::{AgentState, EliminationBatch, UtilMessage, ValueMessage};
pub use partition::{eliminate_with_mbes, local_tables, partition_sides};

/// Requested `k_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TableLimit {
    Dims(usize),
    /// Resolve to the induced width of the pseudo tree in use.
    InducedWidth,
}

/// Requested `k_e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BatchSize {
    Vars(usize),
    /// One batch per variable group.
    All,
}

impl fmt::Display for TableLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableLimit::Dims(k) => write!(f, "{k}"),
            TableLimit::InducedWidth => f.write_str("w*"),
        }
    }
}

impl fmt::Display for BatchSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BatchSize::Vars(k) => write!(f, "{k}"),
            BatchSize::All => f.write_str("all"),
        }
    }
}

impl FromStr for TableLimit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "w*" | "w" | "width" => Ok(TableLimit::InducedWidth),
            other => other
                .parse()
                .map(TableLimit::Dims)
                .map_err(|_| Error::InvalidConfig(format!("bad k_p {other:?}"))),
        }
    }
}

impl FromStr for BatchSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(BatchSize::All),
            other => other
                .parse()
                .map(BatchSize::Vars)
                .map_err(|_| Error::InvalidConfig(format!("bad k_e {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SolverConfig {
    pub k_p: TableLimit,
    pub k_e: BatchSize,
}

impl SolverConfig {
    pub fn new(k_p: TableLimit, k_e: BatchSize) -> Result<Self> {
        if let TableLimit::Dims(k) = k_p {
            if k < 2 {
                return Err(Error::InvalidConfig(format!(
                    "k_p must be at least 2 (a constraint side has two dimensions), got {k}"
                )));
            }
        }
        if k_e == BatchSize::Vars(0) {
            return Err(Error::InvalidConfig("k_e must be at least 1".into()));
        }
        Ok(Self { k_p, k_e })
    }

    /// Plain non-local elimination: one joint table per message, one batch
    /// per group.
    pub fn joint() -> Self {
        Self {
            k_p: TableLimit::InducedWidth,
            k_e: BatchSize::All,
        }
    }

    pub fn resolve(&self, tree: &PseudoTree) -> ResolvedConfig {
        let induced_width = tree.induced_width();
        let k_p = match self.k_p {
            TableLimit::Dims(k) => k,
            TableLimit::InducedWidth => induced_width.max(2),
        };
        ResolvedConfig {
            k_p,
            k_e: match self.k_e {
                BatchSize::Vars(k) => Some(k),
                BatchSize::All => None,
            },
            induced_width,
            table_sets: k_p < induced_width,
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::joint()
    }
}

/// Configuration with symbolic values resolved against a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedConfig {
    pub k_p: usize,
    /// `None` means one batch per group.
    pub k_e: Option<usize>,
    pub induced_width: usize,
    /// True when `k_p` is below the induced width, i.e. agents forward sets
    /// of tables rather than one joint table.
    pub table_sets: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        assert_eq!(
            "w*".parse::<TableLimit>().unwrap(),
            TableLimit::InducedWidth
        );
        assert_eq!("3".parse::<TableLimit>().unwrap(), TableLimit::Dims(3));
        assert_eq!("all".parse::<BatchSize>().unwrap(), BatchSize::All);
        assert_eq!("2".parse::<BatchSize>().unwrap(), BatchSize::Vars(2));
        assert!("x".parse::<BatchSize>().is_err());
        assert_eq!(TableLimit::InducedWidth.to_string(), "w*");
        assert_eq!(BatchSize::All.to_string(), "all");
    }

    #[test]
    fn validation() {
        assert!(SolverConfig::new(TableLimit::Dims(1), BatchSize::All).is_err());
        assert!(SolverConfig::new(TableLimit::Dims(2), BatchSize::Vars(0)).is_err());
        assert!(SolverConfig::new(TableLimit::Dims(2), BatchSize::Vars(1)).is_ok());
    }
}
