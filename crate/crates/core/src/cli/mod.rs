//! The `gwc` command line.
//!
//! Exit codes: 0 success, 2 oracle or check failure, 64 usage, 65 resource cap.

pub mod config;
pub mod manifest;
pub mod oracle;
pub mod svg;

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::asymptotics::{a_n, critical_constant, near_critical_constant};
use crate::concave::KernelKind;
use crate::conductance::{conductance_exact, min_flow_energy, p_from_s, uniform_flow_energy, FLOW_EDGE_CAP};
use crate::error::{Error, Result};
use crate::montecarlo::{
    self, column_points, estimate, fit_exponent, tightness_report, Column, EstimateRecord,
    ExperimentConfig,
};
use crate::montecarlo::stats::{top_half_start, Scale};
use crate::offspring::OffspringSpec;
use crate::rcm::{
    connection_prob_enumerate, connection_prob_partition, connection_prob_recursive, critical_point,
    RCMParams, ENUMERATION_EDGE_CAP,
};
use crate::tree::{ExplicitTree, DEFAULT_TREE_CAP};

use config::{Check, ConstantKind, ExperimentFile};
use manifest::{RunManifest, RunStatus};
use svg::{AxisScale, Plot, Point};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_CAP: i32 = 65;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NodeBudget { .. } | Error::CapExceeded { .. } | Error::ScaleUnderflow { .. } => EXIT_CAP,
        Error::NonConvergence { .. } => EXIT_CHECK,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "gwc", version, about = "Concave recursions, p-conductances and random cluster connection probabilities on Galton-Watson trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// p-conductance of a fixed or sampled tree, checked against the flow optimizer.
    Conductance(ConductanceArgs),
    /// Random cluster critical points and connection probabilities.
    Rcm {
        #[command(subcommand)]
        command: RcmCommand,
    },
    /// Run a Monte Carlo experiment file (JSON or TOML).
    Experiment(ExperimentArgs),
    /// Run the exact self-consistency suites.
    OracleSuite(OracleArgs),
}

/// Which tree to use: a named shape or a sampled Galton-Watson tree.
#[derive(Debug, Args)]
pub struct TreeArgs {
    /// binary, ternary, path, edge, star:<d>, full:<d>, counts:<c1,c2,...>
    #[arg(long)]
    pub tree: Option<String>,
    /// Offspring law for a sampled tree, e.g. geometric:0.5.
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample index within the seed.
    #[arg(long, default_value_t = 0)]
    pub index: u64,
}

impl TreeArgs {
    pub fn build(&self) -> Result<ExplicitTree> {
        match (&self.tree, &self.dist) {
            (Some(_), Some(_)) => Err(Error::Config("give either --tree or --dist, not both".into())),
            (None, None) => Err(Error::Config("one of --tree or --dist is required".into())),
            (None, Some(spec)) => {
                let dist = OffspringSpec::parse_short(spec)?.build()?;
                ExplicitTree::sample_capped(&dist, self.depth, self.seed, self.index, DEFAULT_TREE_CAP)
            }
            (Some(shape), None) => named_tree(shape, self.depth),
        }
    }
}

fn named_tree(shape: &str, depth: usize) -> Result<ExplicitTree> {
    let (name, arg) = shape.split_once(':').unwrap_or((shape, ""));
    let count = |a: &str| -> Result<u64> {
        a.parse().map_err(|_| Error::Config(format!("--tree {shape}: bad count `{a}`")))
    };
    match name {
        "binary" => ExplicitTree::full(2, depth),
        "ternary" => ExplicitTree::full(3, depth),
        "path" => ExplicitTree::path(depth),
        "edge" => ExplicitTree::path(1),
        "star" => ExplicitTree::star(count(arg)?),
        "full" => ExplicitTree::full(count(arg)?, depth),
        "counts" => {
            let counts: Vec<u64> = arg.split(',').map(|c| count(c.trim())).collect::<Result<_>>()?;
            ExplicitTree::from_preorder_counts(depth, &counts)
        }
        _ => Err(Error::Config(format!("unknown tree shape `{shape}`"))),
    }
}

#[derive(Debug, Args)]
pub struct ConductanceArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    /// Recursion exponent s = 1/(p-1).
    #[arg(long, conflicts_with = "p")]
    pub s: Option<f64>,
    /// Energy exponent p > 1.
    #[arg(long)]
    pub p: Option<f64>,
    /// Resistance parameter: the edge into v has resistance R^(-|v|).
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
    /// Relative tolerance of the Thomson comparison.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum RcmCommand {
    /// Critical point (β_c, p_c) for offspring mean m, and with --predict the
    /// critical and near-critical constants of a law.
    Critical(CriticalArgs),
    /// Connection probability π of a tree by every available method.
    Pi(PiArgs),
}

#[derive(Debug, Args)]
pub struct CriticalArgs {
    #[arg(long, required_unless_present = "dist")]
    pub m: Option<f64>,
    /// Offspring law; its mean replaces --m.
    #[arg(long, conflicts_with = "m")]
    pub dist: Option<String>,
    #[arg(long)]
    pub q: f64,
    /// Also print the predicted constants α_q and α̃_q (needs --dist, q ≤ 2).
    #[arg(long)]
    pub predict: bool,
}

#[derive(Debug, Args)]
pub struct PiArgs {
    #[command(flatten)]
    pub tree: TreeArgs,
    #[arg(long, required_unless_present = "beta")]
    pub p: Option<f64>,
    #[arg(long, conflicts_with = "p")]
    pub beta: Option<f64>,
    #[arg(long)]
    pub q: f64,
    /// Also print the predicted critical quantities for the offspring law.
    #[arg(long)]
    pub predict: bool,
    /// Absolute tolerance of the agreement check.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment file, `.json` or `.toml`.
    pub config: PathBuf,
    /// Output directory; defaults to `gwc-out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the SVG plot even if the config asks for one.
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Multiplier on the number of random trees per suite.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 20261016)]
    pub seed: u64,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    execute(cli.command, &mut std::io::stdout().lock())
}

/// Run a parsed command, writing its report to `out`; returns the exit code.
pub fn execute(command: Command, out: &mut impl std::io::Write) -> i32 {
    let result = match command {
        Command::Conductance(a) => cmd_conductance(&a, out),
        Command::Rcm { command: RcmCommand::Critical(a) } => cmd_rcm_critical(&a, out),
        Command::Rcm { command: RcmCommand::Pi(a) } => cmd_rcm_pi(&a, out),
        Command::Experiment(a) => cmd_experiment(&a, out),
        Command::OracleSuite(a) => cmd_oracle_suite(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("gwc: {e}");
            exit_code(&e)
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn cmd_conductance(a: &ConductanceArgs, out: &mut impl std::io::Write) -> Result<i32> {
    let s = match (a.s, a.p) {
        (Some(s), None) => s,
        (None, Some(p)) => crate::conductance::exponents(p)?.0,
        (None, None) => return Err(Error::Config("one of --s or --p is required".into())),
        (Some(_), Some(_)) => unreachable!("clap rejects --s with --p"),
    };
    let p = p_from_s(s);
    let tree = a.tree.build()?;
    let c = conductance_exact(&tree, s, a.r)?;
    let uniform = uniform_flow_energy(&tree, p, a.r)?;
    let flow_bound = uniform.powf(-1.0 / s);
    writeln!(out, "nodes={} leaves={} depth={} s={s} p={p} R={}", tree.len(), tree.leaves().count(), tree.depth(), a.r)?;
    writeln!(out, "C_n={}", c)?;
    writeln!(out, "flow_bound={}", flow_bound)?;
    let mut pass = flow_bound <= c * (1.0 + 1e-12);
    if tree.edge_count() <= FLOW_EDGE_CAP {
        let opt = min_flow_energy(&tree, p, a.r, 1e-12)?;
        let thomson = opt.energy.powf(-1.0 / s);
        let rel = (thomson - c).abs() / c;
        pass &= rel <= a.tol;
        writeln!(out, "thomson={} rel_err={:e} iterations={}", thomson, rel, opt.iterations)?;
    } else {
        writeln!(out, "thomson=skipped ({} edges > {FLOW_EDGE_CAP})", tree.edge_count())?;
    }
    writeln!(out, "oracle={}", verdict(pass))?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK })
}

fn refuse_prediction(q: f64) -> Result<()> {
    if q > 2.0 {
        return Err(Error::Unsupported(format!(
            "no prediction for q = {q} > 2: the kernel is not concave there, so no asymptotic statement applies"
        )));
    }
    Ok(())
}

fn print_prediction(spec: &str, q: f64, out: &mut impl std::io::Write) -> Result<()> {
    refuse_prediction(q)?;
    let dist = OffspringSpec::parse_short(spec)?.build()?;
    let (beta_c, p_c) = critical_point(dist.mean(), q)?;
    writeln!(out, "m={} p_c={} beta_c={}", dist.mean(), p_c, beta_c)?;
    writeln!(out, "alpha={}", critical_constant(q, &dist)?)?;
    writeln!(out, "alpha_tilde={}", near_critical_constant(q, &dist)?)?;
    Ok(())
}

pub fn cmd_rcm_critical(a: &CriticalArgs, out: &mut impl std::io::Write) -> Result<i32> {
    if a.predict {
        let spec = a
            .dist
            .as_deref()
            .ok_or_else(|| Error::Config("--predict needs --dist".into()))?;
        print_prediction(spec, a.q, out)?;
        return Ok(EXIT_OK);
    }
    let m = match (&a.dist, a.m) {
        (Some(spec), _) => OffspringSpec::parse_short(spec)?.build()?.mean(),
        (None, Some(m)) => m,
        (None, None) => unreachable!("clap requires --m or --dist"),
    };
    let (beta_c, p_c) = critical_point(m, a.q)?;
    writeln!(out, "p_c={p_c} beta_c={beta_c}")?;
    Ok(EXIT_OK)
}

pub fn cmd_rcm_pi(a: &PiArgs, out: &mut impl std::io::Write) -> Result<i32> {
    let params = match (a.p, a.beta) {
        (Some(p), _) => RCMParams::new(p, a.q)?,
        (None, Some(b)) => RCMParams::from_beta(b, a.q)?,
        (None, None) => unreachable!("clap requires --p or --beta"),
    };
    let tree = a.tree.build()?;
    let rec = connection_prob_recursive(&tree, &params)?;
    let part = connection_prob_partition(&tree, &params)?;
    let mut values = vec![rec, part];
    let mut line = format!("recursive={rec} partition={part}");
    if tree.edge_count() <= ENUMERATION_EDGE_CAP {
        let en = connection_prob_enumerate(&tree, &params)?;
        values.push(en);
        line.push_str(&format!(" enumerate={en}"));
    } else {
        line.push_str(&format!(" enumerate=skipped({} edges > {ENUMERATION_EDGE_CAP})", tree.edge_count()));
    }
    writeln!(out, "p={} beta={} q={}", params.p(), params.beta(), params.q())?;
    writeln!(out, "{line}")?;
    let spread = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
        - values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let pass = spread <= a.tol;
    writeln!(out, "agreement={} spread={spread:e}", verdict(pass))?;
    if a.predict {
        let spec = a
            .tree
            .dist
            .as_deref()
            .ok_or_else(|| Error::Config("--predict needs a sampled tree (--dist)".into()))?;
        out.flush()?;
        print_prediction(spec, a.q, out)?;
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK })
}

/// Result of one configured check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

/// `s` of the kernel in effect at the first grid depth.
fn kernel_s(config: &ExperimentConfig) -> Result<f64> {
    Ok(config.cell(config.depths[0]).resolve()?.0.s_effective())
}

/// Evaluate the configured checks on finished records.
pub fn evaluate_checks(
    file: &ExperimentFile,
    config: &ExperimentConfig,
    records: &[EstimateRecord],
) -> Result<Vec<Verdict>> {
    let mut verdicts = Vec::new();
    for check in &file.checks {
        let v = match check {
            Check::Slope { column, scale, target, tol } => {
                let fit = fit_exponent(&column_points(records, *column), *scale)?;
                let pass = (fit.slope - target).abs() <= *tol;
                Verdict {
                    check: format!("slope[{column:?},{scale:?}]"),
                    pass,
                    detail: format!("slope={:.6} (se {:.2e}) target={target} tol={tol}", fit.slope, fit.slope_stderr),
                }
            }
            Check::Tightness { band_factor, drift_factor } => {
                let rep = tightness_report(records, *band_factor, *drift_factor);
                Verdict {
                    check: "tightness".into(),
                    pass: rep.pass,
                    detail: format!("band q05/q50/q95={:.3?} drift={:.3?}", rep.band_ratio, rep.drift),
                }
            }
            Check::Constant { constant, rel_tol } => {
                let target = file.predicted_constant(*constant)?;
                let s = kernel_s(config)?;
                let scaled: Vec<f64> = records
                    .iter()
                    .map(|r| match constant {
                        ConstantKind::Critical => Ok(r.mean * (r.n as f64).powf(1.0 / s)),
                        ConstantKind::NearCritical => {
                            let (g, _) = config.cell(r.n).resolve()?;
                            let KernelKind::Rcm { beta, q } = g.kind() else { unreachable!() };
                            let (beta_c, _) = critical_point(config.dist.mean(), q)?;
                            Ok(r.mean / (beta - beta_c).powf(1.0 / s))
                        }
                    })
                    .collect::<Result<_>>()?;
                let dist: Vec<f64> = scaled.iter().map(|x| (x - target).abs()).collect();
                let trending = dist.windows(2).all(|w| w[1] <= w[0]);
                let last = *scaled.last().expect("grid is non-empty");
                let close = (last / target - 1.0).abs() <= *rel_tol;
                Verdict {
                    check: format!("constant[{constant:?}]"),
                    pass: trending && close,
                    detail: format!("scaled means={scaled:.4?} target={target:.6} trending={trending} last_rel_err={:.4}", last / target - 1.0),
                }
            }
            Check::UpperBound => {
                let s = kernel_s(config)?;
                let mut worst = f64::NEG_INFINITY;
                for r in records {
                    let (_, rr) = config.cell(r.n).resolve()?;
                    let bound = a_n(config.dist.mean() * rr, s, r.n).powf(-1.0 / s);
                    worst = worst.max(r.mean - bound - 3.0 * r.stderr);
                }
                Verdict {
                    check: "upper_bound".into(),
                    pass: worst <= 0.0,
                    detail: format!("max(mean - a_n^(-1/s) - 3 se)={worst:.3e}"),
                }
            }
            Check::CorrFloor { floor } => {
                let last = records.last().expect("grid is non-empty");
                Verdict {
                    check: "corr_floor".into(),
                    pass: last.corr_w >= *floor,
                    detail: format!("corr_w(n={})={:.6} floor={floor}", last.n, last.corr_w),
                }
            }
            Check::Band { factor } => {
                let top = &records[top_half_start(records.len())..];
                let vals: Vec<f64> = top.iter().map(|r| r.norm_ratio_q50).collect();
                let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
                Verdict {
                    check: "band".into(),
                    pass: min > 0.0 && max / min <= *factor,
                    detail: format!("top-half norm_ratio_q50 max/min={:.4} factor={factor}", max / min),
                }
            }
        };
        verdicts.push(v);
    }
    Ok(verdicts)
}

/// Plot of the median (or the first slope check's column) against `n`.
pub fn experiment_plot(file: &ExperimentFile, records: &[EstimateRecord]) -> Plot {
    let (column, scale) = file
        .checks
        .iter()
        .find_map(|c| match c {
            Check::Slope { column, scale, .. } => Some((*column, *scale)),
            _ => None,
        })
        .unwrap_or((Column::Median, Scale::LogLog));
    let pts = column_points(records, column);
    let line = fit_exponent(&pts, scale).ok().map(|f| (f.slope, f.intercept));
    Plot {
        title: file.name.clone(),
        x_label: "n".into(),
        y_label: format!("{column:?}").to_lowercase(),
        x_scale: if scale == Scale::LogLog { AxisScale::Log } else { AxisScale::Linear },
        y_scale: AxisScale::Log,
        points: pts.iter().map(|&(x, y, err)| Point { x, y, err }).collect(),
        line,
    }
}

fn create_file(dir: &Path, name: &str) -> Result<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(dir.join(name))?))
}

pub fn cmd_experiment(a: &ExperimentArgs, out: &mut impl std::io::Write) -> Result<i32> {
    let (file, hash) = ExperimentFile::load(&a.config)?;
    let config = file.experiment()?;
    config.validate()?;
    let dir = a.out.clone().unwrap_or_else(|| Path::new("gwc-out").join(&file.name));
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::start(hash, file.seed);
    manifest.write(&dir)?;
    let records = match estimate(&config) {
        Ok(r) => r,
        Err(e) => {
            manifest.finish(RunStatus::Error);
            manifest.write(&dir)?;
            return Err(e);
        }
    };
    let csv_name = format!("{}.csv", file.name);
    let mut csv = create_file(&dir, &csv_name)?;
    montecarlo::write_csv(&records, &mut csv)?;
    csv.flush()?;
    manifest.outputs.push(csv_name);
    if file.plot && !a.no_plot {
        let svg_name = format!("{}.svg", file.name);
        std::fs::write(dir.join(&svg_name), experiment_plot(&file, &records).render())?;
        manifest.outputs.push(svg_name);
    }
    let verdicts = evaluate_checks(&file, &config, &records)?;
    let verdict_name = "verdicts.json".to_string();
    std::fs::write(
        dir.join(&verdict_name),
        serde_json::to_string_pretty(&verdicts).expect("verdicts serialize") + "\n",
    )?;
    manifest.outputs.push(verdict_name);
    writeln!(out, "experiment {} engine={:?} depths={:?} samples={}", file.name, config.resolved_engine(), file.depths, file.samples)?;
    writeln!(out, "config_hash={}", manifest.config_hash)?;
    for v in &verdicts {
        writeln!(out, "{} {} {}", verdict(v.pass), v.check, v.detail)?;
    }
    let pass = verdicts.iter().all(|v| v.pass);
    manifest.finish(if pass { RunStatus::Ok } else { RunStatus::ChecksFailed });
    manifest.write(&dir)?;
    writeln!(out, "outputs in {}", dir.display())?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK })
}

pub fn cmd_oracle_suite(a: &OracleArgs, out: &mut impl std::io::Write) -> Result<i32> {
    if !(a.scale > 0.0) {
        return Err(Error::Config("--scale must be positive".into()));
    }
    let outcomes = oracle::run_all(a.scale, a.seed)?;
    for o in &outcomes {
        writeln!(out, "{} {} cases={} worst={:.3e} tol={:e}", verdict(o.pass), o.name, o.cases, o.worst, o.tol)?;
    }
    Ok(if outcomes.iter().all(|o| o.pass) { EXIT_OK } else { EXIT_CHECK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let cli = match Cli::try_parse_from(std::iter::once("gwc").chain(args.iter().copied())) {
            Ok(c) => c,
            Err(_) => return (EXIT_USAGE, String::new()),
        };
        let mut buf = Vec::new();
        let code = execute(cli.command, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    fn value(text: &str, key: &str) -> f64 {
        let tok = text
            .split_whitespace()
            .find_map(|t| t.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("{key} missing in {text}"));
        tok.parse().unwrap()
    }

    #[test]
    fn conductance_named_trees() {
        let (code, text) = run_capture(&["conductance", "--tree", "binary", "--depth", "2", "--s", "1", "--R", "1"]);
        assert_eq!(code, 0, "{text}");
        assert!((value(&text, "C_n") - 4.0 / 3.0).abs() < 1e-12);
        assert!((value(&text, "flow_bound") - 4.0 / 3.0).abs() < 1e-12);
        let (code, text) = run_capture(&["conductance", "--tree", "path", "--depth", "3", "--s", "1", "--R", "1"]);
        assert_eq!(code, 0);
        assert!((value(&text, "C_n") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn conductance_usage_errors() {
        assert_eq!(run_capture(&["conductance", "--tree", "binary"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["conductance", "--tree", "hexagon", "--s", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["conductance", "--tree", "binary", "--s", "1", "--p", "2"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["conductance", "--tree", "full:10", "--depth", "7", "--s", "1"]).0,
            EXIT_CAP
        );
    }

    #[test]
    fn rcm_commands() {
        let (code, text) = run_capture(&["rcm", "critical", "--m", "2", "--q", "1"]);
        assert_eq!(code, 0);
        assert!((value(&text, "p_c") - 0.5).abs() < 1e-15);
        assert!((value(&text, "beta_c") - 2f64.ln()).abs() < 1e-15);
        let (code, text) = run_capture(&["rcm", "pi", "--tree", "edge", "--p", "0.5", "--q", "2"]);
        assert_eq!(code, 0, "{text}");
        for k in ["recursive", "partition", "enumerate"] {
            assert!((value(&text, k) - 1.0 / 3.0).abs() < 1e-12);
        }
        let (code, _) = run_capture(&["rcm", "pi", "--tree", "binary", "--depth", "2", "--p", "0.9", "--q", "3"]);
        assert_eq!(code, 0);
        let (code, _) = run_capture(&["rcm", "critical", "--dist", "geometric:0.5", "--q", "3", "--predict"]);
        assert_eq!(code, EXIT_USAGE);
        let (code, text) = run_capture(&["rcm", "critical", "--dist", "geometric:0.5", "--q", "2", "--predict"]);
        assert_eq!(code, 0);
        assert!((value(&text, "alpha") - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }
}
