//! Complete solver for asymmetric distributed constraint optimization
//! problems (ADCOPs).
//!
//! Variables are eliminated only at their highest (pseudo) parent in a DFS
//! pseudo tree, so no agent ever has to disclose its private side of a
//! constraint to the agent below it. Two knobs trade resources for privacy
//! and time: `k_p` caps the dimensionality of locally built tables and lets
//! agents forward sets of small tables instead of one joint table, and `k_e`
//! sets the batch size of each min-elimination.
//!
//! Everything is generic over the cost scalar ([`Cost`]); the aliases below
//! fix it for the common cases.

pub mod cost;
pub mod engine;
pub mod error;
pub mod model;
pub mod oracle;
pub mod pseudotree;
pub mod solver;
pub mod tables;

pub use cost::Cost;
pub use engine::{run, run_with, Metrics, RunOptions, RunResult, Scheduler, TraceEntry};
pub use error::{Error, Result};
pub use model::{Assignment, CostMatrix, Problem};
pub use oracle::{brute_force, brute_force_with_cap, DEFAULT_ORACLE_CAP};
pub use pseudotree::PseudoTree;
pub use solver::{BatchSize, ResolvedConfig, SolverConfig, TableLimit};
pub use tables::{AccessCounter, UtilityTable};

use num_rational::Ratio;

/// Exact integer costs; what the generators and the CLI use.
pub type IntProblem = Problem<u64>;
pub type IntTable = UtilityTable<u64>;
pub type IntRunResult = RunResult<u64>;

pub type FloatProblem = Problem<f64>;
pub type FloatTable = UtilityTable<f64>;
pub type FloatRunResult = RunResult<f64>;

/// Exact rational costs.
pub type RationalProblem = Problem<Ratio<i64>>;
pub type RationalTable = UtilityTable<Ratio<i64>>;
pub type RationalRunResult = RunResult<Ratio<i64>>;
