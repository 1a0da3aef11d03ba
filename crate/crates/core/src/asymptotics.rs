//! Normalizing sequences and predicted constants.

use serde::{Deserialize, Serialize};

use crate::concave::{KernelKind, RecursionFunction};
use crate::error::{Error, Result};
use crate::offspring::OffspringDistribution;
use crate::rcm::critical_point;

/// Position of `mR_n` relative to the window `[1 - 1/n, 1 + 1/n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn classify(mr: f64, n: usize) -> Self {
        let w = 1.0 / n as f64;
        if mr <= 1.0 - w {
            Regime::Subcritical
        } else if mr >= 1.0 + w {
            Regime::Supercritical
        } else {
            Regime::Critical
        }
    }
}

/// `a_n = Σ_{k=1}^n (mR)^(-ks)`.
pub fn a_n(mr: f64, s: f64, n: usize) -> f64 {
    assert!(mr > 0.0 && s > 0.0 && n >= 1, "a_n needs mR > 0, s > 0, n >= 1");
    if (mr - 1.0).abs() <= 1e-12 {
        return (1..=n).map(|k| mr.powf(-(k as f64) * s)).sum();
    }
    // r (r^n - 1) / (r - 1) with r = (mR)^(-s), written with expm1.
    let ln_r = -s * mr.ln();
    ln_r.exp() * (n as f64 * ln_r).exp_m1() / ln_r.exp_m1()
}

/// The order expression that `a_n` is comparable to in each regime.
pub fn a_n_order(mr: f64, s: f64, n: usize) -> f64 {
    match Regime::classify(mr, n) {
        Regime::Subcritical => mr.powf(-(n as f64) * s) / (1.0 - mr.powf(s)),
        Regime::Critical => n as f64,
        Regime::Supercritical => 1.0 / (mr.powf(s) - 1.0),
    }
}

/// `a_n` along a depth grid for a schedule `n ↦ mR_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizingSequence {
    pub n: Vec<usize>,
    pub values: Vec<f64>,
    pub regimes: Vec<Regime>,
}

impl NormalizingSequence {
    pub fn new(mr_of_n: impl Fn(usize) -> f64, s: f64, grid: &[usize]) -> Self {
        Self {
            n: grid.to_vec(),
            values: grid.iter().map(|&n| a_n(mr_of_n(n), s, n)).collect(),
            regimes: grid.iter().map(|&n| Regime::classify(mr_of_n(n), n)).collect(),
        }
    }
}

/// Slowly varying factor `L` in `h(x) = L(1/x) x^(α-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlowlyVarying {
    Const,
    /// `L(y) = log(e + y)`.
    Log,
}

/// `h(x) = L(1/x) x^(α-1)`.
pub fn h(x: f64, alpha: f64, l: SlowlyVarying) -> f64 {
    let base = x.powf(alpha - 1.0);
    match l {
        SlowlyVarying::Const => base,
        SlowlyVarying::Log => base * (std::f64::consts::E + 1.0 / x).ln(),
    }
}

/// `h⁻¹(y)`, exact for `L ≡ const`, by bisection in `log x` otherwise.
pub fn h_inverse(y: f64, alpha: f64, l: SlowlyVarying) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("h needs alpha > 1, got {alpha}")));
    }
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::Domain(format!("h_inverse needs y > 0, got {y}")));
    }
    if l == SlowlyVarying::Const {
        return Ok(y.powf(1.0 / (alpha - 1.0)));
    }
    let (mut lo, mut hi) = (-700.0f64, 700.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid.exp(), alpha, l) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// `(γ_n, γ̃_n)` for a heavy-tailed law with index `α ∈ (1, q]`.
pub fn gamma_sequences(
    mr: f64,
    alpha: f64,
    l: SlowlyVarying,
    s: f64,
    n: usize,
) -> Result<(f64, f64)> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("gamma sequences need alpha > 1, got {alpha}")));
    }
    let nf = n as f64;
    match Regime::classify(mr, n) {
        Regime::Subcritical => {
            let scale = mr.powf(nf);
            let gamma = h_inverse(1.0 - mr, alpha, l)? * scale;
            let tilde = h_inverse(1.0 / nf, alpha, l)? * (nf * (1.0 - mr)).powf(1.0 / s) * scale;
            Ok((gamma, tilde))
        }
        Regime::Critical => {
            let g = h_inverse(1.0 / nf, alpha, l)?;
            Ok((g, g))
        }
        Regime::Supercritical => {
            let g = h_inverse(mr - 1.0, alpha, l)?;
            Ok((g, g))
        }
    }
}

/// `E[W^2]` and, when `E[Z^3] < ∞`, `E[W^3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WMoments {
    pub ew2: f64,
    pub ew3: Option<f64>,
}

/// Moments of the martingale limit `W` from the factorial moments of `Z`.
///
/// `W = m⁻¹ Σ_{i≤Z} W_i` gives `E[W^2] = E[Z(Z-1)] / (m(m-1))` and
/// `E[W^3] = (3 E[Z(Z-1)] E[W^2] + E[Z(Z-1)(Z-2)]) / (m^3 - m)`.
pub fn w_moments(dist: &OffspringDistribution) -> Result<WMoments> {
    let m = dist.mean();
    let f2 = dist.factorial_moment(2)?;
    let ew2 = f2 / (m * (m - 1.0));
    let ew3 = match dist.factorial_moment(3) {
        Ok(f3) => Some((3.0 * f2 * ew2 + f3) / (m * m * m - m)),
        Err(Error::Divergent(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(WMoments { ew2, ew3 })
}

fn ew3(dist: &OffspringDistribution) -> Result<f64> {
    w_moments(dist)?
        .ew3
        .ok_or_else(|| Error::Divergent("E[W^3] needs E[Z^3] < inf".into()))
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 2.0 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("no prediction for q = {q}; supported range is (0, 2]")))
    }
}

/// `α_q` with `n^(1/s) π_n → α_q W` at `β = β_c`.
pub fn critical_constant(q: f64, dist: &OffspringDistribution) -> Result<f64> {
    check_q(q)?;
    let m = dist.mean();
    if q < 2.0 {
        Ok(2.0 / (2.0 - q) * m / (m - 1.0) / w_moments(dist)?.ew2)
    } else {
        Ok((1.5f64).sqrt() * m / (m * m - 1.0).sqrt() / ew3(dist)?.sqrt())
    }
}

/// `α̃_q` with `π_n ≈ α̃_q (β_n - β_c)^(1/s) W` for `β_n ↓ β_c` slowly.
pub fn near_critical_constant(q: f64, dist: &OffspringDistribution) -> Result<f64> {
    check_q(q)?;
    let m = dist.mean();
    if q < 2.0 {
        Ok(2.0 * (m + q - 1.0) / (q * (2.0 - q)) / w_moments(dist)?.ew2)
    } else {
        Ok((1.5 * m).sqrt() / ew3(dist)?.sqrt())
    }
}

/// `ψ_q'(x) = q e^x / (e^x + q - 1)^2`.
pub fn psi_prime(q: f64, x: f64) -> f64 {
    let e = (-x).exp();
    q * e / (1.0 + (q - 1.0) * e).powi(2)
}

/// `α̃_q` recomputed from `α_s(1)` of the critical kernel: near `β_c`,
/// `m R = m ψ_q(β)` moves at rate `m ψ_q'(β_c)`, and `π ≈ B / q`.
pub fn near_critical_constant_chain(q: f64, dist: &OffspringDistribution) -> Result<f64> {
    check_q(q)?;
    let m = dist.mean();
    let (beta_c, _) = critical_point(m, q)?;
    let g = RecursionFunction::rcm(beta_c, q)?;
    let s = g.s_effective();
    let rate = s * m * psi_prime(q, beta_c);
    Ok(alpha_s_critical(&g, dist)? * rate.powf(1.0 / s) / q)
}

/// `α_q` recomputed as `α_s(1) / q` for the kernel at `β_c`.
pub fn critical_constant_chain(q: f64, dist: &OffspringDistribution) -> Result<f64> {
    check_q(q)?;
    let (beta_c, _) = critical_point(dist.mean(), q)?;
    Ok(alpha_s_critical(&RecursionFunction::rcm(beta_c, q)?, dist)? / q)
}

/// `α_s(1) = (s κ_g E[W^(s+1)])^(-1/s)`, the limit of `n^(1/s) B_n / W` when `mR_n = 1`.
pub fn alpha_s_critical(g: &RecursionFunction, dist: &OffspringDistribution) -> Result<f64> {
    let s = g.s_effective();
    let moment = if s == 1.0 {
        w_moments(dist)?.ew2
    } else if s == 2.0 {
        ew3(dist)?
    } else {
        return Err(Error::Unsupported(format!(
            "E[W^(s+1)] has a closed form only for s in {{1, 2}}, got s = {s}"
        )));
    };
    Ok((s * g.kappa_g()? * moment).powf(-1.0 / s))
}

/// Sandwich exponent `s` and cluster weight of a kernel (`q = 0` for conductance).
pub fn kernel_parameters(g: &RecursionFunction) -> (f64, Option<f64>) {
    match g.kind() {
        KernelKind::Conductance { s } => (s, None),
        KernelKind::Rcm { q, .. } => (g.s_effective(), Some(q)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_n_examples() {
        assert!((a_n(1.0, 2.0, 7) - 7.0).abs() < 1e-15);
        assert!((a_n(2.0, 1.0, 3) - 0.875).abs() < 1e-15);
        assert!((a_n(0.5, 1.0, 10) - 2046.0).abs() < 1e-10);
    }

    #[test]
    fn a_n_closed_form_matches_sum() {
        for mr in [0.3f64, 0.8, 0.999, 1.001, 1.3, 2.0] {
            for s in [0.5, 1.0, 2.0] {
                for n in [1, 5, 50] {
                    let direct: f64 = (1..=n).map(|k| mr.powf(-(k as f64) * s)).sum();
                    assert!((a_n(mr, s, n) - direct).abs() <= 1e-12 * direct, "{mr} {s} {n}");
                }
            }
        }
    }

    #[test]
    fn a_n_regime_orders() {
        for s in [1.0, 2.0] {
            for n in [10, 30, 100, 300, 1000] {
                let nf = n as f64;
                for mr in [0.8, 1.0 - 1.0 / nf, 1.0, 1.0 + 1.0 / nf, 1.5] {
                    let ratio = a_n(mr, s, n) / a_n_order(mr, s, n);
                    assert!((0.25..=4.0).contains(&ratio), "mr={mr} s={s} n={n}: {ratio}");
                }
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let (g, gt) = gamma_sequences(1.0, 2.0, SlowlyVarying::Const, 1.0, 100).unwrap();
        assert!((g - 0.01).abs() < 1e-15 && (gt - 0.01).abs() < 1e-15);
        let (g, _) = gamma_sequences(1.5, 2.0, SlowlyVarying::Const, 1.0, 1000).unwrap();
        assert!((g - 0.5).abs() < 1e-15);
        let (_, gt) = gamma_sequences(0.9, 2.0, SlowlyVarying::Const, 2.0, 100).unwrap();
        let hand = 0.01 * 10f64.sqrt() * 0.9f64.powi(100);
        assert!((gt - hand).abs() < 1e-14 * hand);
        assert!(gamma_sequences(1.0, 1.0, SlowlyVarying::Const, 1.0, 10).is_err());
    }

    #[test]
    fn h_inverse_round_trip() {
        for alpha in [1.5, 2.0, 2.5, 3.0] {
            for l in [SlowlyVarying::Const, SlowlyVarying::Log] {
                for i in 0..=60 {
                    let y = 10f64.powf(-6.0 + i as f64 / 10.0);
                    let x = h_inverse(y, alpha, l).unwrap();
                    assert!((h(x, alpha, l) - y).abs() <= 1e-10 * y, "{alpha} {l:?} {y}");
                }
            }
        }
    }

    #[test]
    fn w_moment_examples() {
        for d in [2, 3, 7] {
            let w = w_moments(&OffspringDistribution::deterministic(d).unwrap()).unwrap();
            assert!((w.ew2 - 1.0).abs() < 1e-15);
            assert!((w.ew3.unwrap() - 1.0).abs() < 1e-14);
        }
        // W is exponential with mean 1 for geometric offspring.
        for p in [0.5, 1.0 / 1.2, 0.3] {
            let w = w_moments(&OffspringDistribution::geometric(p).unwrap()).unwrap();
            assert!((w.ew2 - 2.0).abs() < 1e-12);
            assert!((w.ew3.unwrap() - 6.0).abs() < 1e-10);
        }
        let z = w_moments(&OffspringDistribution::zeta(2.5).unwrap()).unwrap();
        assert!(z.ew3.is_none());
    }

    #[test]
    fn constants() {
        let det2 = OffspringDistribution::deterministic(2).unwrap();
        assert!((critical_constant(1.0, &det2).unwrap() - 4.0).abs() < 1e-14);
        let geo = OffspringDistribution::geometric(0.5).unwrap();
        assert!((critical_constant(2.0, &geo).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        for dist in [det2.clone(), geo.clone(), OffspringDistribution::finite(vec![0.2, 0.5, 0.3]).unwrap()] {
            let f2 = dist.factorial_moment(2).unwrap();
            let m = dist.mean();
            assert!((critical_constant(1.0, &dist).unwrap() - 2.0 * m * m / f2).abs() < 1e-12);
        }
        let c1 = RecursionFunction::conductance(1.0).unwrap();
        let c2 = RecursionFunction::conductance(2.0).unwrap();
        assert!((alpha_s_critical(&c1, &det2).unwrap() - 1.0).abs() < 1e-15);
        assert!((alpha_s_critical(&c2, &det2).unwrap() - 1.0).abs() < 1e-15);
        let ising = RecursionFunction::rcm(3f64.ln(), 2.0).unwrap();
        assert!((alpha_s_critical(&ising, &det2).unwrap() - 8f64.sqrt()).abs() < 1e-12);
        assert!(alpha_s_critical(&RecursionFunction::conductance(1.5).unwrap(), &det2).is_err());
        assert!(critical_constant(2.5, &geo).is_err());
    }

    #[test]
    fn two_routes_agree() {
        let dists = [
            OffspringDistribution::deterministic(2).unwrap(),
            OffspringDistribution::geometric(1.0 / 1.2).unwrap(),
            OffspringDistribution::geometric(0.4).unwrap(),
            OffspringDistribution::finite(vec![0.1, 0.6, 0.3]).unwrap(),
        ];
        for dist in &dists {
            for q in [0.5, 1.0, 1.5, 2.0] {
                let a = near_critical_constant(q, dist).unwrap();
                let b = near_critical_constant_chain(q, dist).unwrap();
                assert!((a - b).abs() < 1e-10 * a.max(1.0), "q={q}: {a} vs {b}");
                let a = critical_constant(q, dist).unwrap();
                let b = critical_constant_chain(q, dist).unwrap();
                assert!((a - b).abs() < 1e-10 * a.max(1.0), "q={q}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn psi_prime_at_criticality() {
        for (m, q) in [(2.0, 1.0), (1.2, 2.0), (3.0, 0.5)] {
            let (b, _) = critical_point(m, q).unwrap();
            let expected = (m - 1.0) * (m + q - 1.0) / (m * m * q);
            assert!((psi_prime(q, b) - expected).abs() < 1e-14);
        }
    }
}
