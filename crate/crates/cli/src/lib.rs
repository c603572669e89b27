//! Experiment sweeps and single-file solving on top of the `adcop` solver.

mod experiment;
mod range;
mod solve;

pub use experiment::{
    medians, medians_path, read_rows, run_experiment, run_experiment_traced, write_medians,
    write_rows, write_traces, ExperimentSpec, Family, MedianRow, Row,
};
pub use range::{parse_list, parse_range_f64, parse_range_usize};
pub use solve::{solve_file, solve_text, CostKind, SolveOptions};
