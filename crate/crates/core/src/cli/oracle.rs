//! Self-consistency suites run by `gwc oracle-suite`.

use crate::asymptotics::{
    critical_constant, critical_constant_chain, near_critical_constant, near_critical_constant_chain,
};
use crate::concave::RecursionFunction;
use crate::conductance::{conductance_exact, min_flow_energy, p_from_s, uniform_flow_energy};
use crate::error::Result;
use crate::offspring::OffspringDistribution;
use crate::rcm::{
    cluster_identity_holds, connection_prob_partition, connection_prob_recursive, ConfigurationCensus,
    RCMParams,
};
use crate::rng::{Domain, Stream};
use crate::tree::{evaluate_on_tree, ExplicitTree};

/// Outcome of one suite.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed discrepancy in the suite's own metric.
    pub worst: f64,
    pub tol: f64,
    pub pass: bool,
}

impl OracleOutcome {
    fn new(name: &'static str, cases: usize, worst: f64, tol: f64) -> Self {
        Self { name, cases, worst, tol, pass: worst <= tol }
    }
}

/// Random tree with at most `max_edges` edges and depth in `1..=max_depth`.
pub fn small_tree(stream: &mut Stream, max_edges: usize, max_depth: usize) -> Result<ExplicitTree> {
    let dist = OffspringDistribution::finite(vec![0.45, 0.35, 0.2])?;
    loop {
        let depth = 1 + stream.index(max_depth);
        let tree = ExplicitTree::sample_from(&dist, depth, stream, 4 * max_edges + 8);
        match tree {
            Ok(t) if t.edge_count() <= max_edges => return Ok(t),
            _ => continue,
        }
    }
}

/// Recursive, partition-function and enumeration connection probabilities.
pub fn rcm_triple(trees: usize, seed: u64) -> Result<OracleOutcome> {
    let mut stream = Stream::new(seed, Domain::Corpus, 1, 0);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for _ in 0..trees {
        let tree = small_tree(&mut stream, 14, 5)?;
        let census = ConfigurationCensus::new(&tree)?;
        for pi in 1..=9 {
            for q in [0.5, 1.0, 1.5, 2.0, 3.0] {
                let params = RCMParams::new(pi as f64 / 10.0, q)?;
                let a = connection_prob_recursive(&tree, &params)?;
                let b = connection_prob_partition(&tree, &params)?;
                let c = census.connection_prob(&params);
                worst = worst.max((a - b).abs()).max((a - c).abs()).max((b - c).abs());
                cases += 1;
            }
        }
    }
    Ok(OracleOutcome::new("rcm-triple", cases, worst, 1e-10))
}

/// `C^(-s)` against the minimal flow energy, and the uniform flow bound.
pub fn thomson(trees: usize, seed: u64) -> Result<OracleOutcome> {
    let mut stream = Stream::new(seed, Domain::Corpus, 2, 0);
    let dist = OffspringDistribution::geometric(0.55)?;
    let mut worst: f64 = 0.0;
    for _ in 0..trees {
        let depth = 1 + stream.index(6);
        let Ok(tree) = ExplicitTree::sample_from(&dist, depth, &mut stream, 2000) else {
            continue;
        };
        let s = [0.5, 1.0, 2.0, 3.0][stream.index(4)];
        let r = 0.5 + stream.uniform();
        let p = p_from_s(s);
        let c = conductance_exact(&tree, s, r)?;
        let opt = min_flow_energy(&tree, p, r, 1e-12)?;
        let uniform = uniform_flow_energy(&tree, p, r)?;
        let target = c.powf(-s);
        worst = worst.max((opt.energy - target).abs() / target);
        if uniform < opt.energy * (1.0 - 1e-12) {
            worst = f64::INFINITY;
        }
    }
    Ok(OracleOutcome::new("thomson", trees, worst, 1e-6))
}

/// `κ1^(-1/s) C ≤ B ≤ κ2^(-1/s) C` for random cluster kernels.
pub fn sandwich(trees: usize, seed: u64) -> Result<OracleOutcome> {
    let mut stream = Stream::new(seed, Domain::Corpus, 3, 0);
    let dist = OffspringDistribution::geometric(0.5)?;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for q in [1.0, 2.0] {
        for beta in [0.2, 0.5, 1.0, 2.0, 4.0] {
            let g = RecursionFunction::rcm(beta, q)?;
            let (k1, k2) = g.sandwich_constants()?;
            let s = g.s_effective();
            let cond = RecursionFunction::conductance(s)?;
            let r = g.psi_beta();
            for _ in 0..trees {
                let depth = 1 + stream.index(6);
                let tree = ExplicitTree::sample_from(&dist, depth, &mut stream, 100_000)?;
                let b = evaluate_on_tree(&tree, &g, r)[0];
                let c = evaluate_on_tree(&tree, &cond, r)[0];
                let lo = k1.powf(-1.0 / s) * c;
                let hi = k2.powf(-1.0 / s) * c;
                let violation = (lo - b).max(b - hi).max(0.0) / b.max(1e-300);
                worst = worst.max(violation);
                cases += 1;
            }
        }
    }
    Ok(OracleOutcome::new("sandwich", cases, worst, 1e-12))
}

/// Cluster-count identity on small trees.
pub fn cluster_identity(trees: usize, seed: u64) -> Result<OracleOutcome> {
    let mut stream = Stream::new(seed, Domain::Corpus, 4, 0);
    let mut failures = 0usize;
    for _ in 0..trees {
        let tree = small_tree(&mut stream, 10, 4)?;
        if !cluster_identity_holds(&tree)? {
            failures += 1;
        }
    }
    Ok(OracleOutcome::new("cluster-identity", trees, failures as f64, 0.0))
}

/// Direct and chain-rule critical and near-critical constants.
pub fn constants() -> Result<OracleOutcome> {
    let laws = [
        OffspringDistribution::geometric(5.0 / 6.0)?,
        OffspringDistribution::geometric(0.5)?,
        OffspringDistribution::finite(vec![0.8, 0.2])?,
        OffspringDistribution::deterministic(2)?,
    ];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for dist in &laws {
        for q in [0.5, 1.0, 1.5, 2.0] {
            let pairs = [
                (critical_constant(q, dist)?, critical_constant_chain(q, dist)?),
                (near_critical_constant(q, dist)?, near_critical_constant_chain(q, dist)?),
            ];
            for (a, b) in pairs {
                worst = worst.max((a - b).abs() / a.abs());
                cases += 1;
            }
        }
    }
    Ok(OracleOutcome::new("constants", cases, worst, 1e-10))
}

/// Every suite, with `scale` multiplying the number of random trees.
pub fn run_all(scale: f64, seed: u64) -> Result<Vec<OracleOutcome>> {
    let n = |base: usize| ((base as f64 * scale).round() as usize).max(1);
    Ok(vec![
        rcm_triple(n(500), seed)?,
        thomson(n(200), seed)?,
        sandwich(n(100), seed)?,
        cluster_identity(n(200), seed)?,
        constants()?,
    ])
}
