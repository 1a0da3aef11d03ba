//! Sample statistics, exponent fits and tightness checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean (sample standard deviation over `√N`).
pub fn stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Pearson correlation; NaN when either sample is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

/// Quantile of a sorted sample by linear interpolation between order
/// statistics (`h = (N-1) p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(|a, b| a.total_cmp(b));
    v
}

/// Distribution-free standard error of the median from the order statistics
/// bracketing a 95% interval.
pub fn median_stderr_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let half = 1.96 * n.sqrt() / 2.0;
    let lo = ((n / 2.0 - half).floor().max(0.0)) as usize;
    let hi = ((n / 2.0 + half).ceil() as usize).min(sorted.len() - 1);
    (sorted[hi] - sorted[lo]) / (2.0 * 1.96)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Critical value of the two-sample KS statistic at level `alpha`.
pub fn ks_critical(alpha: f64, na: usize, nb: usize) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((na + nb) as f64 / (na * nb) as f64).sqrt()
}

/// Abscissa transform of an exponent fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// `log y` against `log x`.
    LogLog,
    /// `log y` against `x`.
    SemiLog,
}

/// Result of a straight-line fit of `log y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

/// Weighted least squares of `log y` on `log x` (or `x`), weights
/// `1 / se(log y)^2` with `se(log y) = se(y) / y`. When any standard error
/// is zero the fit is unweighted. The slope error is residual-based.
pub fn fit_exponent(points: &[(f64, f64, f64)], scale: Scale) -> Result<Fit> {
    if points.len() < 4 {
        return Err(Error::Domain(format!(
            "an exponent fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y, _)| !(y > 0.0) || (scale == Scale::LogLog && !(x > 0.0))) {
        return Err(Error::Domain("exponent fits need positive values".into()));
    }
    let weighted = points.iter().all(|&(_, y, se)| se > 0.0 && se.is_finite() && y > 0.0);
    let rows: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|&(x, y, se)| {
            let u = match scale {
                Scale::LogLog => x.ln(),
                Scale::SemiLog => x,
            };
            let w = if weighted { (y / se).powi(2) } else { 1.0 };
            (u, y.ln(), w)
        })
        .collect();
    let sw: f64 = rows.iter().map(|r| r.2).sum();
    let xm = rows.iter().map(|r| r.2 * r.0).sum::<f64>() / sw;
    let ym = rows.iter().map(|r| r.2 * r.1).sum::<f64>() / sw;
    let sxx: f64 = rows.iter().map(|r| r.2 * (r.0 - xm).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Domain("degenerate abscissae in exponent fit".into()));
    }
    let sxy: f64 = rows.iter().map(|r| r.2 * (r.0 - xm) * (r.1 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = rows
        .iter()
        .map(|r| r.2 * (r.1 - intercept - slope * r.0).powi(2))
        .sum();
    let dof = (rows.len() - 2) as f64;
    Ok(Fit {
        slope,
        intercept,
        slope_stderr: (rss / dof / sxx).sqrt(),
        points: rows.len(),
    })
}

/// Tightness of normalized quantile series across a depth grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub n: Vec<usize>,
    pub q05: Vec<f64>,
    pub q50: Vec<f64>,
    pub q95: Vec<f64>,
    /// `max / min` of each series over the whole grid.
    pub band_ratio: [f64; 3],
    /// `last / first` over the top half of the grid, when that stretch is monotone.
    pub drift: [Option<f64>; 3],
    pub band_factor: f64,
    pub drift_factor: f64,
    pub pass: bool,
}

pub const DEFAULT_BAND_FACTOR: f64 = 10.0;
pub const DEFAULT_DRIFT_FACTOR: f64 = 3.0;

/// Index where the top half of a grid of length `len` starts.
pub fn top_half_start(len: usize) -> usize {
    (len - 1) / 2
}

/// PASS when each normalized series (5%, 50%, 95%) stays within
/// `band_factor` across the grid and none of them moves monotonically by more
/// than `drift_factor` over the top half of the grid.
pub fn tightness(
    n: &[usize],
    q05: &[f64],
    q50: &[f64],
    q95: &[f64],
    band_factor: f64,
    drift_factor: f64,
) -> TightnessReport {
    let series = [q05, q50, q95];
    let mut band_ratio = [0.0; 3];
    let mut drift = [None; 3];
    let mut pass = n.len() >= 2;
    for (k, s) in series.iter().enumerate() {
        let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        band_ratio[k] = if min > 0.0 { max / min } else { f64::INFINITY };
        if !(band_ratio[k] <= band_factor) {
            pass = false;
        }
        let top = &s[top_half_start(s.len())..];
        let up = top.windows(2).all(|w| w[1] >= w[0]);
        let down = top.windows(2).all(|w| w[1] <= w[0]);
        if top.len() >= 2 && (up || down) {
            let r = top[top.len() - 1] / top[0];
            drift[k] = Some(r);
            if !(r <= drift_factor && r >= 1.0 / drift_factor) {
                pass = false;
            }
        }
    }
    TightnessReport {
        n: n.to_vec(),
        q05: q05.to_vec(),
        q50: q50.to_vec(),
        q95: q95.to_vec(),
        band_ratio,
        drift,
        band_factor,
        drift_factor,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, Stream};

    #[test]
    fn basic_statistics() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((stderr(&xs) - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(quantile_sorted(&xs, 0.5), 2.5);
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        assert!((correlation(&xs, &[2.0, 4.0, 6.0, 8.0]) - 1.0).abs() < 1e-15);
        assert!(correlation(&xs, &[1.0; 4]).is_nan());
    }

    #[test]
    fn exact_power_law_fit() {
        let pts: Vec<_> = [10.0, 20.0, 40.0, 80.0].iter().map(|&n: &f64| (n, 1.0 / n, 0.0)).collect();
        let fit = fit_exponent(&pts, Scale::LogLog).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-14);
        assert!(fit.slope_stderr < 1e-12);
        assert!(fit_exponent(&pts[..3], Scale::LogLog).is_err());
    }

    #[test]
    fn noisy_power_law_fit() {
        let mut s = Stream::new(4, Domain::Corpus, 0, 0);
        let pts: Vec<_> = (0..8)
            .map(|i| {
                let n = 10.0 * 2f64.powi(i);
                let noise = 1.0 + 0.01 * (2.0 * s.uniform() - 1.0);
                (n, 3.0 * n.powf(-0.5) * noise, 0.01 * 3.0 * n.powf(-0.5))
            })
            .collect();
        let fit = fit_exponent(&pts, Scale::LogLog).unwrap();
        assert!((-0.55..=-0.45).contains(&fit.slope), "{}", fit.slope);
    }

    #[test]
    fn semi_log_fit() {
        let pts: Vec<_> = (1..=6).map(|i| (10.0 * i as f64, 0.9f64.powi(10 * i), 0.0)).collect();
        let fit = fit_exponent(&pts, Scale::SemiLog).unwrap();
        assert!((fit.slope - 0.9f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn tightness_detects_drift() {
        let n = [10, 20, 40, 80];
        let flat = [1.0, 1.1, 0.95, 1.05];
        assert!(tightness(&n, &flat, &flat, &flat, 10.0, 3.0).pass);
        let growing = [1.0, 2.0, 4.0, 8.0];
        let r = tightness(&n, &growing, &growing, &growing, 10.0, 3.0);
        assert!(!r.pass);
        assert_eq!(r.drift[1], Some(4.0));
        let wide = [1.0, 20.0, 1.0, 20.0];
        assert!(!tightness(&n, &wide, &wide, &wide, 10.0, 3.0).pass);
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..1000).map(|i| i as f64 + 0.5).collect();
        assert!(ks_statistic(&a, &b) <= 0.002);
        let c: Vec<f64> = (0..1000).map(|i| i as f64 + 300.0).collect();
        assert!((ks_statistic(&a, &c) - 0.3).abs() < 1e-12);
        assert!(ks_critical(0.01, 1000, 1000) > 0.07);
    }

    #[test]
    fn median_stderr_is_positive_for_spread_data() {
        let xs: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        let se = median_stderr_sorted(&xs);
        // Uniform on [0, N]: se(median) = N / (2 sqrt(N)) = 50.
        assert!((se - 50.0).abs() < 2.0, "{se}");
    }
}
