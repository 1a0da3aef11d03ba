//! Monte Carlo over a depth grid: critical conductance, exponent fit, tightness.
//!
//! GWC_THREADS=4 cargo run --release --example critical_scaling

use gwc::montecarlo::{
    column_points, estimate, fit_exponent, tightness_report, write_csv, Column, Engine, ExperimentConfig,
    Normalizer, Scale,
};
use gwc::{OffspringDistribution, RSchedule, RecursionFunction};

fn main() -> gwc::Result<()> {
    let mut config = ExperimentConfig::new(
        OffspringDistribution::geometric(5.0 / 6.0)?,
        RecursionFunction::conductance(1.0)?,
        RSchedule::CriticalProduct,
        vec![10, 14, 20, 28, 40, 57, 80, 113, 160],
        4000,
        9,
    );
    config.engine = Engine::Pooled;
    config.pool_size = 1 << 15;
    config.normalizer = Normalizer::An;
    let records = estimate(&config)?;
    write_csv(&records, std::io::stdout().lock())?;
    let fit = fit_exponent(&column_points(&records, Column::Median), Scale::LogLog)?;
    println!("median slope {:.4} ± {:.4} (prediction -1)", fit.slope, fit.slope_stderr);
    let report = tightness_report(&records, 10.0, 3.0);
    println!("tightness with a_n: {}", if report.pass { "PASS" } else { "FAIL" });
    config.normalizer = Normalizer::Power { exponent: 2.0 };
    let report = tightness_report(&estimate(&config)?, 10.0, 3.0);
    println!("tightness with n^2: {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(())
}
