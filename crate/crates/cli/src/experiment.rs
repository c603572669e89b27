use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use adcop::model::{random_adcop, random_chain, random_maxdcsp, DEFAULT_MAX_COST};
use adcop::{
    brute_force_with_cap, run_with, BatchSize, IntProblem, PseudoTree, RunOptions, Scheduler,
    SolverConfig, TableLimit, DEFAULT_ORACLE_CAP,
};
use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const NA: &str = "n/a";

/// Canonical position of a row: point, k_p, k_e, instance.
type RowKey = (usize, usize, usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Adcop,
    Maxdcsp,
    /// Path `0 - 1 - ... - (n-1)` with every agent also tied to agent 0,
    /// solved on the path itself as pseudo tree.
    Chain,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Adcop => "adcop",
            Family::Maxdcsp => "maxdcsp",
            Family::Chain => "chain",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "adcop" => Ok(Family::Adcop),
            "maxdcsp" => Ok(Family::Maxdcsp),
            "chain" => Ok(Family::Chain),
            _ => Err(format!("unknown family {s:?} (adcop, maxdcsp, chain)")),
        }
    }
}

/// A sweep: every parameter point times every solver configuration times
/// `instances` generated problems.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub family: Family,
    pub agents: Vec<usize>,
    /// Ignored by the chain family.
    pub density: Vec<f64>,
    pub domain: Vec<usize>,
    /// Used by the MaxDCSP family only.
    pub tightness: Vec<f64>,
    pub kp: Vec<TableLimit>,
    pub ke: Vec<BatchSize>,
    pub instances: usize,
    /// Instance `k` is generated from `seed + k`.
    pub seed: u64,
    pub max_cost: u64,
    /// Largest joint search space the oracle will enumerate.
    pub oracle_cap: u128,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    /// Record wall time; off makes output files byte-for-byte reproducible.
    pub wall_time: bool,
    /// Keep the message log of every run.
    pub trace: bool,
}

impl ExperimentSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            agents: vec![8],
            density: vec![0.25],
            domain: vec![3],
            tightness: vec![0.5],
            kp: vec![TableLimit::InducedWidth],
            ke: vec![BatchSize::All],
            instances: 1,
            seed: 0,
            max_cost: DEFAULT_MAX_COST,
            oracle_cap: DEFAULT_ORACLE_CAP,
            jobs: 0,
            wall_time: true,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.is_empty()
            || self.domain.is_empty()
            || self.kp.is_empty()
            || self.ke.is_empty()
        {
            bail!("every parameter range needs at least one value");
        }
        if self.family != Family::Chain && self.density.is_empty() {
            bail!("density range is empty");
        }
        if self.family == Family::Maxdcsp && self.tightness.is_empty() {
            bail!("tightness range is empty");
        }
        if self.instances == 0 {
            bail!("instances must be at least 1");
        }
        for k in &self.kp {
            SolverConfig::new(*k, BatchSize::All)?;
        }
        for k in &self.ke {
            SolverConfig::new(TableLimit::InducedWidth, *k)?;
        }
        Ok(())
    }

    fn points(&self) -> Vec<Point> {
        let densities: Vec<Option<f64>> = match self.family {
            Family::Chain => vec![None],
            _ => self.density.iter().copied().map(Some).collect(),
        };
        let tightnesses: Vec<Option<f64>> = match self.family {
            Family::Maxdcsp => self.tightness.iter().copied().map(Some).collect(),
            _ => vec![None],
        };
        let mut out = Vec::new();
        for &n in &self.agents {
            for &density in &densities {
                for &domain in &self.domain {
                    for &tightness in &tightnesses {
                        out.push(Point {
                            n,
                            density,
                            domain,
                            tightness,
                        });
                    }
                }
            }
        }
        out
    }

    fn generate(&self, point: &Point, seed: u64) -> Result<IntProblem> {
        let p = match self.family {
            Family::Adcop => random_adcop(
                point.n,
                point.density.unwrap(),
                point.domain,
                self.max_cost,
                seed,
            )?,
            Family::Maxdcsp => random_maxdcsp(
                point.n,
                point.density.unwrap(),
                point.domain,
                point.tightness.unwrap(),
                seed,
            )?,
            Family::Chain => random_chain(point.n, point.domain, self.max_cost, seed)?,
        };
        Ok(p)
    }

    fn tree(&self, problem: &IntProblem) -> Result<PseudoTree> {
        Ok(match self.family {
            Family::Chain => PseudoTree::build_by_index(problem, 0)?,
            _ => PseudoTree::build(problem)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    n: usize,
    density: Option<f64>,
    domain: usize,
    tightness: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), |v| v.to_string())
}

/// One solver run on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub density: String,
    pub domain: usize,
    pub tightness: String,
    pub kp: String,
    pub ke: String,
    pub instance: usize,
    pub seed: u64,
    pub cost: u64,
    pub oracle_cost: String,
    pub nclo: u64,
    pub network_load: u64,
    pub message_count: usize,
    pub max_dims: usize,
    pub privacy_loss: f64,
    pub wall_ms: f64,
}

impl Row {
    fn group(&self) -> (&str, usize, &str, usize, &str, &str, &str) {
        (
            &self.family,
            self.n,
            &self.density,
            self.domain,
            &self.tightness,
            &self.kp,
            &self.ke,
        )
    }
}

/// Runs the sweep. Rows come out ordered by parameter point, then `k_p`,
/// then `k_e`, then instance, whatever the thread count.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Row>> {
    Ok(run_experiment_traced(spec)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Like [`run_experiment`], pairing each row with its message log (one line
/// per message) when `spec.trace` is set.
pub fn run_experiment_traced(spec: &ExperimentSpec) -> Result<Vec<(Row, Option<String>)>> {
    spec.validate()?;
    let points = spec.points();
    let work: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..spec.instances).map(move |k| (p, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs)
        .build()?;
    let per_instance: Vec<Vec<(RowKey, Row, Option<String>)>> = pool.install(|| {
        work.par_iter()
            .map(|&(p, k)| run_instance(spec, p, &points[p], k))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows: Vec<_> = per_instance.into_iter().flatten().collect();
    rows.sort_by_key(|(key, _, _)| *key);
    Ok(rows.into_iter().map(|(_, r, t)| (r, t)).collect())
}

fn run_instance(
    spec: &ExperimentSpec,
    p: usize,
    point: &Point,
    instance: usize,
) -> Result<Vec<(RowKey, Row, Option<String>)>> {
    let seed = spec.seed.wrapping_add(instance as u64);
    let problem = spec
        .generate(point, seed)
        .with_context(|| format!("generating instance {instance} of {point:?}"))?;
    let tree = spec.tree(&problem)?;
    let oracle = if problem.search_space() <= spec.oracle_cap {
        brute_force_with_cap(&problem, spec.oracle_cap)?
            .1
            .to_string()
    } else {
        NA.to_string()
    };
    let mut out = Vec::new();
    for (a, &kp) in spec.kp.iter().enumerate() {
        for (b, &ke) in spec.ke.iter().enumerate() {
            let config = SolverConfig::new(kp, ke)?;
            let start = Instant::now();
            let options = RunOptions {
                scheduler: Scheduler::Fifo,
                trace: spec.trace,
            };
            let r = run_with(&problem, &tree, &config, options)?;
            let wall_ms = if spec.wall_time {
                (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
            } else {
                0.0
            };
            let m = &r.metrics;
            let row = Row {
                family: spec.family.to_string(),
                n: point.n,
                density: opt(point.density),
                domain: point.domain,
                tightness: opt(point.tightness),
                kp: kp.to_string(),
                ke: ke.to_string(),
                instance,
                seed,
                cost: r.cost,
                oracle_cost: oracle.clone(),
                nclo: m.nclo,
                network_load: m.network_load,
                message_count: m.message_count,
                max_dims: m.max_dims,
                privacy_loss: m.privacy_loss,
                wall_ms,
            };
            let trace = r
                .trace
                .as_ref()
                .map(|t| t.iter().map(|e| format!("{e}\n")).collect::<String>());
            out.push(((p, a, b, instance), row, trace));
        }
    }
    Ok(out)
}

pub fn write_rows(rows: &[Row], path: &Path) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(HEADER)?;
    }
    w.flush()?;
    Ok(())
}

const HEADER: [&str; 17] = [
    "family",
    "n",
    "density",
    "domain",
    "tightness",
    "kp",
    "ke",
    "instance",
    "seed",
    "cost",
    "oracle_cost",
    "nclo",
    "network_load",
    "message_count",
    "max_dims",
    "privacy_loss",
    "wall_ms",
];

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(r.deserialize().collect::<Result<Vec<Row>, _>>()?)
}

/// Median of every metric over the instances of one point and configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianRow {
    pub family: String,
    pub n: usize,
    pub density: String,
    pub domain: usize,
    pub tightness: String,
    pub kp: String,
    pub ke: String,
    pub instances: usize,
    pub cost: f64,
    pub nclo: f64,
    pub network_load: f64,
    pub message_count: f64,
    pub max_dims: f64,
    pub privacy_loss: f64,
    pub wall_ms: f64,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Groups rows by point and configuration, in first-appearance order.
pub fn medians(rows: &[Row]) -> Vec<MedianRow> {
    let mut groups: Vec<Vec<&Row>> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|g| g[0].group() == r.group()) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let m = |f: fn(&Row) -> f64| median(g.iter().map(|r| f(r)).collect());
            let first = g[0];
            MedianRow {
                family: first.family.clone(),
                n: first.n,
                density: first.density.clone(),
                domain: first.domain,
                tightness: first.tightness.clone(),
                kp: first.kp.clone(),
                ke: first.ke.clone(),
                instances: g.len(),
                cost: m(|r| r.cost as f64),
                nclo: m(|r| r.nclo as f64),
                network_load: m(|r| r.network_load as f64),
                message_count: m(|r| r.message_count as f64),
                max_dims: m(|r| r.max_dims as f64),
                privacy_loss: m(|r| r.privacy_loss),
                wall_ms: m(|r| r.wall_ms),
            }
        })
        .collect()
}

/// Message logs of a traced sweep, each preceded by a `#` line naming the run.
pub fn write_traces(runs: &[(Row, Option<String>)], path: &Path) -> Result<()> {
    let mut text = String::new();
    for (r, trace) in runs {
        text.push_str(&format!(
            "# family={} n={} density={} domain={} tightness={} kp={} ke={} instance={} seed={}\n",
            r.family, r.n, r.density, r.domain, r.tightness, r.kp, r.ke, r.instance, r.seed
        ));
        text.push_str(trace.as_deref().unwrap_or(""));
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `results.csv` gets `results.medians.tsv` next to it.
pub fn medians_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("medians.tsv")
}

/// Tab-separated, with a `#` header line so gnuplot skips it.
pub fn write_medians(rows: &[MedianRow], path: &Path) -> Result<()> {
    let mut text = String::from(
        "# family\tn\tdensity\tdomain\ttightness\tkp\tke\tinstances\tcost\tnclo\tnetwork_load\tmessage_count\tmax_dims\tprivacy_loss\twall_ms\n",
    );
    for m in rows {
        text.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            m.family,
            m.n,
            m.density,
            m.domain,
            m.tightness,
            m.kp,
            m.ke,
            m.instances,
            m.cost,
            m.nclo,
            m.network_load,
            m.message_count,
            m.max_dims,
            m.privacy_loss,
            m.wall_ms
        ));
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn points_skip_unused_parameters() {
        let mut spec = ExperimentSpec::new(Family::Adcop);
        spec.tightness = vec![0.1, 0.2];
        assert_eq!(spec.points().len(), 1);
        spec.family = Family::Maxdcsp;
        assert_eq!(spec.points().len(), 2);
        spec.family = Family::Chain;
        spec.density = vec![];
        spec.validate().unwrap();
        assert_eq!(spec.points()[0].density, None);
    }

    #[test]
    fn invalid_specs() {
        let mut spec = ExperimentSpec::new(Family::Adcop);
        spec.instances = 0;
        assert!(spec.validate().is_err());
        let mut spec = ExperimentSpec::new(Family::Adcop);
        spec.kp = vec![TableLimit::Dims(1)];
        assert!(spec.validate().is_err());
        let mut spec = ExperimentSpec::new(Family::Maxdcsp);
        spec.tightness.clear();
        assert!(spec.validate().is_err());
    }
}
