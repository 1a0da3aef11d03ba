//! Seeded Monte Carlo over depth grids.
//!
//! Each depth `n` of a grid is an independent cell: its own `R_n`, its own
//! kernel (for `β_n` schedules) and its own seed. Samples come either from the
//! exact streaming evaluator, one tree per sample, or from the pooled sampler
//! in [`pool`] when trees are too large to visit.

pub mod pool;
pub mod stats;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{a_n, gamma_sequences, SlowlyVarying};
use crate::concave::KernelKind;
use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;
use crate::rcm::{critical_point, psi};
use crate::rng::{Domain, Stream};
use crate::tree::{evaluate_root_with, EvalOptions, RSchedule, RecursionConfig, DEFAULT_NODE_BUDGET};
use crate::RecursionFunction;

pub use stats::{fit_exponent, tightness, Fit, Scale, TightnessReport};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GWC_THREADS";
/// Default population of the pooled sampler.
pub const DEFAULT_POOL_SIZE: usize = 1 << 17;
/// Auto engine picks exact evaluation while `N · E[nodes per tree]` stays below this.
pub const EXACT_WORK_LIMIT: f64 = 2e8;
/// Pilot-calibrated floor for `corr(C_n, W_n)` in the critical conductance
/// cell at `n = 200`; see `examples/pilot_calibration.rs`.
pub const CORR_FLOOR_CRITICAL_CONDUCTANCE: f64 = 0.9983;

/// How samples of `B_n(ρ)` are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    #[default]
    Auto,
    Exact,
    Pooled,
}

/// Which quantity the statistics are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `B_n(ρ)` itself (the conductance for the conductance kernel).
    #[default]
    Root,
    /// `π_n = ψ_q(B_n(ρ))`, random cluster kernels only.
    Connection,
}

/// Multiplier turning the observable into the `norm_ratio_*` columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Normalizer {
    #[default]
    None,
    /// `× a_n^(1/s)` with `a_n` built from `m R_n`.
    An,
    /// `× n^exponent`.
    Power { exponent: f64 },
    /// `/ γ_n`.
    Gamma { alpha: f64, l: SlowlyVarying },
    /// `/ γ̃_n`.
    GammaTilde { alpha: f64, l: SlowlyVarying },
    /// `/ (β_n - β_c)^(1/s)`.
    BetaOffset,
}

/// One Monte Carlo experiment over a depth grid.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dist: OffspringDistribution,
    pub kernel: RecursionFunction,
    pub schedule: RSchedule,
    pub depths: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub engine: Engine,
    pub pool_size: usize,
    pub observable: Observable,
    pub normalizer: Normalizer,
    pub node_budget: u64,
}

impl ExperimentConfig {
    pub fn new(
        dist: OffspringDistribution,
        kernel: RecursionFunction,
        schedule: RSchedule,
        depths: Vec<usize>,
        samples: usize,
        seed: u64,
    ) -> Self {
        Self {
            dist,
            kernel,
            schedule,
            depths,
            samples,
            seed,
            engine: Engine::Auto,
            pool_size: DEFAULT_POOL_SIZE,
            observable: Observable::Root,
            normalizer: Normalizer::None,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 100 {
            return Err(Error::Config(format!("samples = {} must be at least 100", self.samples)));
        }
        if self.depths.is_empty() {
            return Err(Error::Config("depth grid is empty".into()));
        }
        if self.depths.windows(2).any(|w| w[1] <= w[0]) || self.depths[0] == 0 {
            return Err(Error::Config("depth grid must be positive and strictly increasing".into()));
        }
        if self.observable == Observable::Connection {
            if let KernelKind::Conductance { .. } = self.kernel.kind() {
                return Err(Error::Config("connection probability needs a random cluster kernel".into()));
            }
        }
        if self.resolved_engine() == Engine::Pooled && self.pool_size < self.samples {
            return Err(Error::Config(format!(
                "pool size {} is smaller than the sample count {}",
                self.pool_size, self.samples
            )));
        }
        for &n in &self.depths {
            self.cell(n).resolve()?;
            if self.resolved_engine() == Engine::Exact {
                let nodes = expected_nodes(self.dist.mean(), n);
                if nodes > self.node_budget as f64 {
                    return Err(Error::CapExceeded {
                        what: "expected nodes per tree",
                        size: nodes.min(u64::MAX as f64) as u64,
                        cap: self.node_budget,
                    });
                }
            }
        }
        Ok(())
    }

    /// Engine after resolving `Auto` against the deepest grid point.
    pub fn resolved_engine(&self) -> Engine {
        match self.engine {
            Engine::Auto => {
                let deepest = *self.depths.last().unwrap_or(&1);
                let work = self.samples as f64 * expected_nodes(self.dist.mean(), deepest);
                if work <= EXACT_WORK_LIMIT {
                    Engine::Exact
                } else {
                    Engine::Pooled
                }
            }
            e => e,
        }
    }

    /// The quenched cell at depth `n`.
    pub fn cell(&self, n: usize) -> RecursionConfig {
        RecursionConfig::new(self.dist.clone(), self.kernel, n, self.schedule)
    }
}

/// `Σ_{k=0}^n m^k`.
pub fn expected_nodes(m: f64, n: usize) -> f64 {
    (0..=n).map(|k| m.powi(k as i32)).sum()
}

/// Seed of the cell at depth `n`.
pub fn depth_seed(master_seed: u64, n: usize) -> u64 {
    let mut z = master_seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Raw samples at one depth.
#[derive(Debug, Clone)]
pub struct DepthSamples {
    pub n: usize,
    /// Observable values.
    pub values: Vec<f64>,
    /// `W_n = Z_n / m^n` of the same samples.
    pub w: Vec<f64>,
    pub engine: Engine,
}

/// One row of the output CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
    pub mean_w: f64,
    pub corr_w: f64,
    pub norm_ratio_q05: f64,
    pub norm_ratio_q50: f64,
    pub norm_ratio_q95: f64,
    pub samples: usize,
    pub seed: u64,
    /// Not written to CSV.
    #[serde(skip)]
    pub median_stderr: f64,
    #[serde(skip)]
    pub norm_factor: f64,
}

pub const CSV_HEADER: &str = "n,mean,stderr,q05,q25,q50,q75,q95,mean_w,corr_w,norm_ratio_q05,norm_ratio_q50,norm_ratio_q95,samples,seed";

/// Thread pool honoring [`THREADS_ENV`].
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV}={v} is not a positive integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))
}

/// Samples of the observable at depth `n`.
pub fn sample_depth(config: &ExperimentConfig, n: usize) -> Result<DepthSamples> {
    let cell = config.cell(n);
    let (g, r) = cell.resolve()?;
    let seed = depth_seed(config.seed, n);
    let engine = config.resolved_engine();
    let m = config.dist.mean();
    let (b, z): (Vec<f64>, Vec<f64>) = match engine {
        Engine::Pooled => {
            let out = pool::run_pool(&config.dist, &g, r, n, config.pool_size, seed, f64::INFINITY)?;
            (
                out.b[..config.samples].to_vec(),
                out.z[..config.samples].to_vec(),
            )
        }
        _ => {
            let options = EvalOptions {
                node_budget: config.node_budget,
                ..Default::default()
            };
            let evals: Vec<_> = (0..config.samples as u64)
                .into_par_iter()
                .map(|i| evaluate_root_with(&cell, seed, i, options))
                .collect::<Result<_>>()?;
            (
                evals.iter().map(|e| e.b_root).collect(),
                evals.iter().map(|e| e.z_n as f64).collect(),
            )
        }
    };
    let values = match (config.observable, g.kind()) {
        (Observable::Connection, KernelKind::Rcm { q, .. }) => b.iter().map(|&x| psi(q, x)).collect(),
        _ => b,
    };
    let scale = m.powi(n as i32);
    Ok(DepthSamples {
        n,
        values,
        w: z.iter().map(|&z| z / scale).collect(),
        engine,
    })
}

/// Multiplier of the normalized ratio columns at depth `n`.
pub fn normalizer_factor(config: &ExperimentConfig, n: usize) -> Result<f64> {
    let (g, r) = config.cell(n).resolve()?;
    let s = g.s_effective();
    let mr = config.dist.mean() * r;
    Ok(match config.normalizer {
        Normalizer::None => 1.0,
        Normalizer::An => a_n(mr, s, n).powf(1.0 / s),
        Normalizer::Power { exponent } => (n as f64).powf(exponent),
        Normalizer::Gamma { alpha, l } => 1.0 / gamma_sequences(mr, alpha, l, s, n)?.0,
        Normalizer::GammaTilde { alpha, l } => 1.0 / gamma_sequences(mr, alpha, l, s, n)?.1,
        Normalizer::BetaOffset => {
            let KernelKind::Rcm { beta, q } = g.kind() else {
                return Err(Error::Config("beta offset normalizer needs a random cluster kernel".into()));
            };
            let (beta_c, _) = critical_point(config.dist.mean(), q)?;
            if !(beta > beta_c) {
                return Err(Error::Config(format!("beta_n = {beta} is not above beta_c = {beta_c}")));
            }
            (beta - beta_c).powf(-1.0 / s)
        }
    })
}

/// Aggregate one depth's samples.
pub fn summarize(samples: &DepthSamples, factor: f64, seed: u64) -> EstimateRecord {
    let sorted = stats::sorted(&samples.values);
    let q = |p| stats::quantile_sorted(&sorted, p);
    EstimateRecord {
        n: samples.n,
        mean: stats::mean(&samples.values),
        stderr: stats::stderr(&samples.values),
        q05: q(0.05),
        q25: q(0.25),
        q50: q(0.5),
        q75: q(0.75),
        q95: q(0.95),
        mean_w: stats::mean(&samples.w),
        corr_w: stats::correlation(&samples.values, &samples.w),
        norm_ratio_q05: q(0.05) * factor,
        norm_ratio_q50: q(0.5) * factor,
        norm_ratio_q95: q(0.95) * factor,
        samples: samples.values.len(),
        seed,
        median_stderr: stats::median_stderr_sorted(&sorted),
        norm_factor: factor,
    }
}

/// Run every depth of the grid on the [`THREADS_ENV`] worker pool.
pub fn estimate(config: &ExperimentConfig) -> Result<Vec<EstimateRecord>> {
    config.validate()?;
    let workers = worker_pool()?;
    workers.install(|| {
        config
            .depths
            .iter()
            .map(|&n| {
                let samples = sample_depth(config, n)?;
                Ok(summarize(&samples, normalizer_factor(config, n)?, config.seed))
            })
            .collect()
    })
}

/// Which column of the records a fit or check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Mean,
    Median,
    NormMedian,
}

/// `(n, y, se(y))` points of a record column.
pub fn column_points(records: &[EstimateRecord], column: Column) -> Vec<(f64, f64, f64)> {
    records
        .iter()
        .map(|r| match column {
            Column::Mean => (r.n as f64, r.mean, r.stderr),
            Column::Median => (r.n as f64, r.q50, r.median_stderr),
            Column::NormMedian => (r.n as f64, r.norm_ratio_q50, r.median_stderr * r.norm_factor),
        })
        .collect()
}

/// Tightness of the normalized ratio columns.
pub fn tightness_report(records: &[EstimateRecord], band_factor: f64, drift_factor: f64) -> TightnessReport {
    let n: Vec<usize> = records.iter().map(|r| r.n).collect();
    let q05: Vec<f64> = records.iter().map(|r| r.norm_ratio_q05).collect();
    let q50: Vec<f64> = records.iter().map(|r| r.norm_ratio_q50).collect();
    let q95: Vec<f64> = records.iter().map(|r| r.norm_ratio_q95).collect();
    tightness(&n, &q05, &q50, &q95, band_factor, drift_factor)
}

/// Numbers with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(records: &[EstimateRecord], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let cols = [
            r.mean,
            r.stderr,
            r.q05,
            r.q25,
            r.q50,
            r.q75,
            r.q95,
            r.mean_w,
            r.corr_w,
            r.norm_ratio_q05,
            r.norm_ratio_q50,
            r.norm_ratio_q95,
        ];
        let body: Vec<String> = cols.iter().map(|&x| format_number(x)).collect();
        writeln!(out, "{},{},{},{}", r.n, body.join(","), r.samples, r.seed)?;
    }
    Ok(())
}

/// `W_ℓ = Z_ℓ / m^ℓ` at each requested generation, for `samples` independent
/// processes. `result[i][j]` is sample `j` at `levels[i]`.
pub fn sample_martingale(
    dist: &OffspringDistribution,
    levels: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let deepest = *levels.iter().max().ok_or_else(|| Error::Config("no levels".into()))?;
    let m = dist.mean();
    let workers = worker_pool()?;
    let paths: Vec<Vec<f64>> = workers.install(|| {
        (0..samples as u64)
            .into_par_iter()
            .map(|j| {
                let mut stream = Stream::new(seed, Domain::Generations, j, 0);
                let mut z = 1u64;
                let mut out = Vec::with_capacity(levels.len());
                let mut sizes = vec![1u64; deepest + 1];
                for size in sizes.iter_mut().skip(1) {
                    z = dist.sample_sum(z, &mut stream);
                    *size = z;
                }
                for &l in levels {
                    out.push(sizes[l] as f64 / m.powi(l as i32));
                }
                out
            })
            .collect()
    });
    Ok((0..levels.len())
        .map(|i| paths.iter().map(|p| p[i]).collect())
        .collect())
}

/// Empirical `P(X > x)`.
pub fn survival(values: &[f64], x: f64) -> f64 {
    values.iter().filter(|&&v| v > x).count() as f64 / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{evaluate_on_tree, ExplicitTree};

    fn critical_conductance(depths: Vec<usize>, samples: usize) -> ExperimentConfig {
        ExperimentConfig::new(
            OffspringDistribution::geometric(0.5).unwrap(),
            RecursionFunction::conductance(1.0).unwrap(),
            RSchedule::CriticalProduct,
            depths,
            samples,
            11,
        )
    }

    #[test]
    fn deterministic_tree_has_zero_variance() {
        let config = ExperimentConfig::new(
            OffspringDistribution::deterministic(2).unwrap(),
            RecursionFunction::conductance(1.0).unwrap(),
            RSchedule::CriticalProduct,
            vec![4],
            200,
            3,
        );
        let recs = estimate(&config).unwrap();
        let exact = evaluate_on_tree(
            &ExplicitTree::full(2, 4).unwrap(),
            &RecursionFunction::conductance(1.0).unwrap(),
            0.5,
        )[0];
        assert_eq!(recs[0].mean, exact);
        assert_eq!(recs[0].stderr, 0.0);
        assert_eq!(recs[0].q05, recs[0].q95);
        assert_eq!(recs[0].mean_w, 1.0);
    }

    #[test]
    fn validation_errors() {
        let mut c = critical_conductance(vec![], 1000);
        assert!(c.validate().is_err());
        c.depths = vec![5, 5];
        assert!(c.validate().is_err());
        c.depths = vec![5];
        c.samples = 10;
        assert!(c.validate().is_err());
        c.samples = 1000;
        c.observable = Observable::Connection;
        assert!(c.validate().is_err());
    }

    #[test]
    fn engines_pick_by_work() {
        let mut c = critical_conductance(vec![10], 1000);
        assert_eq!(c.resolved_engine(), Engine::Exact);
        c.depths = vec![10, 40];
        assert_eq!(c.resolved_engine(), Engine::Pooled);
    }

    #[test]
    fn critical_median_times_n_is_bounded() {
        let mut c = critical_conductance(vec![10, 20, 40, 80], 4000);
        c.engine = Engine::Pooled;
        c.normalizer = Normalizer::An;
        let recs = estimate(&c).unwrap();
        let scaled: Vec<f64> = recs.iter().map(|r| r.q50 * r.n as f64).collect();
        let max = scaled.iter().copied().fold(0.0, f64::max);
        let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(max / min < 3.0, "{scaled:?}");
        assert!(tightness_report(&recs, 10.0, 3.0).pass);
        // Wrong normalizer n^2 drifts.
        c.normalizer = Normalizer::Power { exponent: 2.0 };
        let recs = estimate(&c).unwrap();
        assert!(!tightness_report(&recs, 10.0, 3.0).pass);
    }

    #[test]
    fn csv_round_trip_format() {
        let c = critical_conductance(vec![3, 4], 200);
        let recs = estimate(&c).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 15);
        assert_eq!(row[0], "3");
        let mean: f64 = row[1].parse().unwrap();
        assert_eq!(mean, recs[0].mean);
        assert_eq!(format_number(1.0 / 3.0), "3.3333333333333331e-1");
    }

    #[test]
    fn martingale_moments() {
        let dist = OffspringDistribution::geometric(0.5).unwrap();
        let w = sample_martingale(&dist, &[8], 20_000, 5).unwrap();
        let m = stats::mean(&w[0]);
        assert!((m - 1.0).abs() < 4.0 * stats::stderr(&w[0]));
    }
}
