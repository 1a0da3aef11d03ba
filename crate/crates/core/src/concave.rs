//! Recursion kernels `g` for `B(u) = R Σ g(B(v))`.
//!
//! Two families are provided: the p-conductance kernel
//! `g_s(x) = x / (1 + x^s)^(1/s)` and the random cluster kernel
//! `g_β(x) = ψ_q⁻¹(ψ_q(β) ψ_q(x)) / ψ_q(β)`. Both satisfy `g(0) = 0`,
//! `g'(0) = 1` and are bounded; the random cluster kernel is concave only for
//! `q <= 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rcm::{psi, psi_inv};

/// Kernel family and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelKind {
    Conductance { s: f64 },
    Rcm { beta: f64, q: f64 },
}

/// A kernel with its per-instance constants precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionFunction {
    kind: KernelKind,
    /// `ψ_q(β)`; 1 for the conductance kernel.
    psi_beta: f64,
    at_infinity: f64,
    /// Taylor coefficients of `g` at 0 (orders 2..=5), random cluster kernel only.
    taylor: [f64; 4],
}

/// Below this the random cluster kernel is evaluated by its Taylor series.
const SERIES_CUTOFF: f64 = 1e-8;
/// Below this `x - g(x)` is taken from the Taylor series.
const DEFECT_SERIES_CUTOFF: f64 = 1e-3;

impl RecursionFunction {
    pub fn new(kind: KernelKind) -> Result<Self> {
        match kind {
            KernelKind::Conductance { s } => {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Domain(format!("conductance exponent s={s} must be > 0")));
                }
                Ok(Self {
                    kind,
                    psi_beta: 1.0,
                    at_infinity: 1.0,
                    taylor: [0.0; 4],
                })
            }
            KernelKind::Rcm { beta, q } => {
                if !(beta.is_finite() && beta > 0.0 && q.is_finite() && q > 0.0) {
                    return Err(Error::Domain(format!(
                        "random cluster kernel needs beta > 0 and q > 0, got beta={beta}, q={q}"
                    )));
                }
                let a = psi(q, beta);
                Ok(Self {
                    kind,
                    psi_beta: a,
                    at_infinity: beta / a,
                    taylor: rcm_taylor(a, q),
                })
            }
        }
    }

    pub fn conductance(s: f64) -> Result<Self> {
        Self::new(KernelKind::Conductance { s })
    }

    pub fn rcm(beta: f64, q: f64) -> Result<Self> {
        Self::new(KernelKind::Rcm { beta, q })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// The exponent `s` of the comparison bounds: `s` itself for the
    /// conductance kernel, 2 for the Ising point `q = 2`, 1 otherwise.
    pub fn s_effective(&self) -> f64 {
        match self.kind {
            KernelKind::Conductance { s } => s,
            KernelKind::Rcm { q, .. } if q == 2.0 => 2.0,
            KernelKind::Rcm { .. } => 1.0,
        }
    }

    pub fn is_concave(&self) -> bool {
        match self.kind {
            KernelKind::Conductance { .. } => true,
            KernelKind::Rcm { q, .. } => q <= 2.0,
        }
    }

    /// `ψ_q(β)` for the random cluster kernel (the natural `R`), 1 otherwise.
    pub fn psi_beta(&self) -> f64 {
        self.psi_beta
    }

    /// `g(+∞) = sup g`.
    pub fn at_infinity(&self) -> f64 {
        self.at_infinity
    }

    /// `g(x)` for `x` in `[0, +∞]`. Panics on NaN or negative input.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "kernel argument must be in [0, inf], got {x}");
        if x == f64::INFINITY {
            return self.at_infinity;
        }
        match self.kind {
            KernelKind::Conductance { s } => {
                if x <= 1.0 {
                    x * (-(x.powf(s)).ln_1p() / s).exp()
                } else {
                    (-(x.powf(-s)).ln_1p() / s).exp()
                }
            }
            KernelKind::Rcm { q, .. } => {
                if x < SERIES_CUTOFF {
                    let [c2, c3, ..] = self.taylor;
                    x + x * x * (c2 + c3 * x)
                } else {
                    psi_inv(q, self.psi_beta * psi(q, x)) / self.psi_beta
                }
            }
        }
    }

    /// Checked form of [`eval`](Self::eval).
    pub fn try_eval(&self, x: f64) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain(format!("kernel argument {x} not in [0, inf]")));
        }
        Ok(self.eval(x))
    }

    /// `x - g(x)`, accurate also for tiny `x`.
    pub fn defect(&self, x: f64) -> f64 {
        match self.kind {
            KernelKind::Conductance { s } => {
                if x <= 1.0 {
                    -x * (-(x.powf(s)).ln_1p() / s).exp_m1()
                } else {
                    x - self.eval(x)
                }
            }
            KernelKind::Rcm { .. } => {
                if x < DEFECT_SERIES_CUTOFF {
                    let [c2, c3, c4, c5] = self.taylor;
                    -x * x * (c2 + x * (c3 + x * (c4 + x * c5)))
                } else {
                    x - self.eval(x)
                }
            }
        }
    }

    /// `κ_g = lim_{x→0} (x - g(x)) / x^(s+1)` in closed form.
    pub fn kappa_g(&self) -> Result<f64> {
        match self.kind {
            KernelKind::Conductance { s } => Ok(1.0 / s),
            KernelKind::Rcm { q, .. } if q < 2.0 => Ok((2.0 - q) / (2.0 * q) * (1.0 - self.psi_beta)),
            KernelKind::Rcm { q, .. } if q == 2.0 => Ok((1.0 - self.psi_beta.powi(2)) / 12.0),
            KernelKind::Rcm { q, .. } => Err(Error::Unsupported(format!(
                "kappa_g is undefined for the non-concave kernel q={q} > 2"
            ))),
        }
    }

    /// `κ_g` by Richardson extrapolation of `(x - g(x)) / x^(s+1)` over
    /// `x ∈ {1e-2, 1e-3, 1e-4}`, evaluating `g` directly.
    pub fn kappa_g_numeric(&self) -> Result<f64> {
        if !self.is_concave() {
            return self.kappa_g();
        }
        let s = self.s_effective();
        let ratio = |x: f64| (x - self.eval(x)) / x.powf(s + 1.0);
        let (f1, f2, f3) = (ratio(1e-2), ratio(1e-3), ratio(1e-4));
        // Error terms are O(x) then O(x^2) in the step; eliminate both.
        let r12 = (10.0 * f2 - f1) / 9.0;
        let r23 = (10.0 * f3 - f2) / 9.0;
        Ok((100.0 * r23 - r12) / 99.0)
    }

    /// Constants `(κ1, κ2)` with
    /// `x / (1 + κ1 x^s)^(1/s) <= g(x) <= x / (1 + κ2 x^s)^(1/s)` for all `x > 0`.
    ///
    /// The bounds are equivalent to `κ2 <= φ(x) <= κ1` with
    /// `φ(x) = ((x/g(x))^s - 1) / x^s`. `φ` is scanned on a 2000-point log grid
    /// over `[1e-6, 1e6]`, refined around the extremes by golden-section search,
    /// and combined with its limits `s κ_g` at 0 and `g(∞)^(-s)` at ∞. The
    /// resulting constants are checked on the grid with 1e-12 slack.
    pub fn sandwich_constants(&self) -> Result<(f64, f64)> {
        if !self.is_concave() {
            return Err(Error::Unsupported(
                "sandwich constants need a concave kernel (q <= 2)".into(),
            ));
        }
        if let KernelKind::Conductance { .. } = self.kind {
            return Ok((1.0, 1.0));
        }
        let s = self.s_effective();
        let phi = |x: f64| self.sandwich_ratio(x);
        let grid = log_grid(1e-6, 1e6, 2000);
        let values: Vec<f64> = grid.iter().map(|&x| phi(x)).collect();
        let argmax = argext(&values, |a, b| a > b);
        let argmin = argext(&values, |a, b| a < b);
        let refine = |i: usize, sign: f64| {
            let lo = grid[i.saturating_sub(1)].ln();
            let hi = grid[(i + 1).min(grid.len() - 1)].ln();
            let t = golden_section(lo, hi, |t| -sign * phi(t.exp()));
            sign * phi(t.exp()).max(sign * values[i])
        };
        let limit_zero = s * self.kappa_g()?;
        let limit_inf = self.at_infinity.powf(-s);
        let hi = refine(argmax, 1.0).max(limit_zero).max(limit_inf);
        let lo = (-refine(argmin, -1.0)).min(limit_zero).min(limit_inf);
        let kappa1 = hi * (1.0 + 1e-9);
        let kappa2 = lo * (1.0 - 1e-9);
        if !(kappa2 > 0.0 && kappa1.is_finite()) {
            return Err(Error::NoSandwich(format!(
                "ratio range [{lo}, {hi}] does not give positive finite constants"
            )));
        }
        for &x in &grid {
            let g = self.eval(x);
            let lower = bound_form(x, kappa1, s);
            let upper = bound_form(x, kappa2, s);
            if lower > g * (1.0 + 1e-12) || g > upper * (1.0 + 1e-12) {
                return Err(Error::NoSandwich(format!(
                    "grid check failed at x={x}: {lower} <= {g} <= {upper}"
                )));
            }
        }
        Ok((kappa1, kappa2))
    }

    /// `φ(x) = ((x/g(x))^s - 1) / x^s`.
    fn sandwich_ratio(&self, x: f64) -> f64 {
        let s = self.s_effective();
        if x < 1.0 {
            let r = self.defect(x) / x;
            (-s * (-r).ln_1p()).exp_m1() / x.powf(s)
        } else {
            self.eval(x).powf(-s) - x.powf(-s)
        }
    }
}

/// `x / (1 + κ x^s)^(1/s)`, the comparison form; `κ^(-1/s)` at `x = ∞`.
pub fn bound_form(x: f64, kappa: f64, s: f64) -> f64 {
    if x == f64::INFINITY {
        return kappa.powf(-1.0 / s);
    }
    let t = kappa * x.powf(s);
    if t <= 1.0 {
        x * (-t.ln_1p() / s).exp()
    } else {
        x * t.powf(-1.0 / s) * (-(1.0 / t).ln_1p() / s).exp()
    }
}

/// Taylor coefficients of `g_β` at 0 for orders 2..=5, with `a = ψ_q(β)`.
fn rcm_taylor(a: f64, q: f64) -> [f64; 4] {
    let (a2, a3) = (a * a, a * a * a);
    let (q2, q3, q4) = (q * q, q * q * q, q * q * q * q);
    let c2 = -(a - 1.0) * (q - 2.0) / (2.0 * q);
    let c3 = (a - 1.0) * (2.0 * a * q2 - 6.0 * a * q + 6.0 * a - q2 + 6.0 * q - 6.0) / (6.0 * q2);
    let c4 = -(a - 1.0)
        * (q - 2.0)
        * (6.0 * a2 * q2 - 12.0 * a2 * q + 12.0 * a2 - 6.0 * a * q2 + 24.0 * a * q - 24.0 * a + q2
            - 12.0 * q
            + 12.0)
        / (24.0 * q3);
    let c5 = (a - 1.0)
        * (24.0 * a3 * q4 - 120.0 * a3 * q3 + 240.0 * a3 * q2 - 240.0 * a3 * q + 120.0 * a3
            - 36.0 * a2 * q4
            + 240.0 * a2 * q3
            - 600.0 * a2 * q2
            + 720.0 * a2 * q
            - 360.0 * a2
            + 14.0 * a * q4
            - 150.0 * a * q3
            + 510.0 * a * q2
            - 720.0 * a * q
            + 360.0 * a
            - q4
            + 30.0 * q3
            - 150.0 * q2
            + 240.0 * q
            - 120.0)
        / (120.0 * q4);
    [c2, c3, c4, c5]
}

/// `n` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn argext(values: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if better(v, values[best]) { i } else { best })
}

/// Minimizer of a unimodal `f` on `[lo, hi]`.
fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}
