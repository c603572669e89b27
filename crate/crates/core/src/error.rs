use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("missing mirror side ({1}, {0}) for side ({0}, {1})")]
    MissingMirror(usize, usize),

    #[error("negative cost in side ({0}, {1})")]
    NegativeCost(usize, usize),

    #[error("non-finite cost in side ({0}, {1})")]
    NonFiniteCost(usize, usize),

    #[error("side ({i}, {j}) has shape {rows}x{cols}, expected {want_rows}x{want_cols}")]
    BadShape {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),

    #[error("constraint graph is disconnected: agent {0} is unreachable from the root")]
    Disconnected(usize),

    #[error("{0} is not a child of {1}")]
    NotAChild(usize, usize),

    #[error("table error: {0}")]
    Table(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("protocol violation at agent {agent}: {msg}")]
    Protocol { agent: usize, msg: String },

    #[error("deadlock: agent {agent} is stuck ({msg})")]
    Deadlock { agent: usize, msg: String },

    #[error("search space of {size} joint assignments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },
}
