//! Offspring laws on `{1, 2, ...}`.
//!
//! All laws put no mass on zero, so the trees never die out. Sampling is by
//! inversion with exactly one uniform per draw, which keeps tree streams
//! aligned draw-for-draw between the streaming evaluator and the explicit
//! builder.

use std::fmt;
use std::sync::Arc;

use rand_distr::{Binomial, Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Largest value covered by the precomputed heavy-tail CDF.
pub const ZETA_CDF_LEN: usize = 1_000_000;

/// Which law, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum OffspringKind {
    /// Point mass at `d`.
    Deterministic(u64),
    /// `probs[k-1] = P(Z = k)` for `k = 1..=K`.
    FiniteSupport(Vec<f64>),
    /// `P(Z = k) = p (1-p)^(k-1)`.
    Geometric(f64),
    /// `P(Z = k) ∝ k^-(alpha+1)`, so `P(Z > x) ≍ x^-alpha`.
    Zeta(f64),
    /// `Z ∧ t` for `Z` drawn from the base law.
    Truncated(Box<OffspringDistribution>, u64),
}

/// Serializable form used by experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OffspringSpec {
    Deterministic { d: u64 },
    Finite { probs: Vec<f64> },
    Geometric { p: f64 },
    Zeta { alpha: f64 },
    Truncated { base: Box<OffspringSpec>, t: u64 },
}

impl OffspringSpec {
    pub fn build(&self) -> Result<OffspringDistribution> {
        OffspringDistribution::new(self.kind()?)
    }

    fn kind(&self) -> Result<OffspringKind> {
        Ok(match self {
            OffspringSpec::Deterministic { d } => OffspringKind::Deterministic(*d),
            OffspringSpec::Finite { probs } => OffspringKind::FiniteSupport(probs.clone()),
            OffspringSpec::Geometric { p } => OffspringKind::Geometric(*p),
            OffspringSpec::Zeta { alpha } => OffspringKind::Zeta(*alpha),
            OffspringSpec::Truncated { base, t } => {
                OffspringKind::Truncated(Box::new(base.build()?), *t)
            }
        })
    }

    /// Parse the short command-line form: `deterministic:2`, `geometric:0.5`,
    /// `zeta:2.5`, `finite:0.5,0.3,0.2`.
    pub fn parse_short(text: &str) -> Result<Self> {
        let (name, args) = text
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("offspring law `{text}`: expected kind:params")))?;
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("offspring law `{text}`: bad number `{s}`")))
        };
        match name {
            "deterministic" => Ok(OffspringSpec::Deterministic {
                d: args
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("offspring law `{text}`: bad degree")))?,
            }),
            "geometric" => Ok(OffspringSpec::Geometric { p: num(args)? }),
            "zeta" => Ok(OffspringSpec::Zeta { alpha: num(args)? }),
            "finite" => Ok(OffspringSpec::Finite {
                probs: args.split(',').map(num).collect::<Result<_>>()?,
            }),
            other => Err(Error::Config(format!("unknown offspring law `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
enum Sampler {
    Point(u64),
    /// Cumulative probabilities for values `1..=cdf.len()`.
    Table(Arc<Vec<f64>>),
    Geometric { log_fail: f64 },
    /// Table up to `ZETA_CDF_LEN`, Pareto tail above.
    HeavyTail { cdf: Arc<Vec<f64>>, alpha: f64 },
}

/// An offspring law with `P(Z = 0) = 0`.
#[derive(Clone)]
pub struct OffspringDistribution {
    kind: OffspringKind,
    mean: f64,
    sampler: Sampler,
    degenerate_permitted: bool,
}

impl fmt::Debug for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OffspringDistribution")
            .field("kind", &self.kind)
            .field("mean", &self.mean)
            .finish()
    }
}

impl PartialEq for OffspringDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl OffspringDistribution {
    /// A supercritical, non-degenerate law (`m > 1`, `P(Z = 1) < 1`).
    pub fn new(kind: OffspringKind) -> Result<Self> {
        let dist = Self::build(kind, false)?;
        if !(dist.mean > 1.0) || dist.pmf(1) >= 1.0 {
            return Err(Error::InvalidDistribution(format!(
                "law must have mean > 1 and P(Z=1) < 1, got mean {}",
                dist.mean
            )));
        }
        Ok(dist)
    }

    /// Same as [`new`](Self::new) but accepts degenerate laws such as
    /// `Deterministic(1)`. Meant for single-path oracle trees.
    pub fn permit_degenerate(kind: OffspringKind) -> Result<Self> {
        Self::build(kind, true)
    }

    pub fn deterministic(d: u64) -> Result<Self> {
        Self::new(OffspringKind::Deterministic(d))
    }

    pub fn geometric(p: f64) -> Result<Self> {
        Self::new(OffspringKind::Geometric(p))
    }

    pub fn zeta(alpha: f64) -> Result<Self> {
        Self::new(OffspringKind::Zeta(alpha))
    }

    pub fn finite(probs: Vec<f64>) -> Result<Self> {
        Self::new(OffspringKind::FiniteSupport(probs))
    }

    pub fn truncated(base: OffspringDistribution, t: u64) -> Result<Self> {
        Self::new(OffspringKind::Truncated(Box::new(base), t))
    }

    fn build(kind: OffspringKind, degenerate_permitted: bool) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidDistribution(msg));
        let sampler = match &kind {
            OffspringKind::Deterministic(d) => {
                if *d == 0 {
                    return invalid("deterministic degree must be at least 1".into());
                }
                Sampler::Point(*d)
            }
            OffspringKind::FiniteSupport(probs) => {
                if probs.is_empty() || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return invalid("finite law needs nonnegative probabilities".into());
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return invalid(format!("finite law probabilities sum to {total}, not 1"));
                }
                Sampler::Table(Arc::new(cumulative(probs.iter().copied())))
            }
            OffspringKind::Geometric(p) => {
                if !(*p > 0.0 && *p <= 1.0) {
                    return invalid(format!("geometric parameter {p} outside (0, 1]"));
                }
                Sampler::Geometric {
                    log_fail: (-*p).ln_1p(),
                }
            }
            OffspringKind::Zeta(alpha) => {
                if !(alpha.is_finite() && *alpha > 0.0) {
                    return invalid(format!("zeta tail exponent {alpha} must be positive"));
                }
                let s = alpha + 1.0;
                let norm = hurwitz_zeta(s, 1.0);
                let cdf = cumulative((1..=ZETA_CDF_LEN).map(|k| (k as f64).powf(-s) / norm));
                Sampler::HeavyTail {
                    cdf: Arc::new(cdf),
                    alpha: *alpha,
                }
            }
            OffspringKind::Truncated(base, t) => {
                if *t == 0 {
                    return invalid("truncation level must be at least 1".into());
                }
                base.sampler.clone()
            }
        };
        let mut dist = Self {
            kind,
            mean: f64::NAN,
            sampler,
            degenerate_permitted,
        };
        dist.mean = dist.moment(1.0)?;
        Ok(dist)
    }

    pub fn kind(&self) -> &OffspringKind {
        &self.kind
    }

    /// `m = E[Z]`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn is_degenerate_permitted(&self) -> bool {
        self.degenerate_permitted
    }

    /// Largest possible value, if bounded.
    pub fn max_value(&self) -> Option<u64> {
        match &self.kind {
            OffspringKind::Deterministic(d) => Some(*d),
            OffspringKind::FiniteSupport(p) => Some(p.len() as u64),
            OffspringKind::Geometric(p) if *p == 1.0 => Some(1),
            OffspringKind::Geometric(_) | OffspringKind::Zeta(_) => None,
            OffspringKind::Truncated(base, t) => Some(base.max_value().map_or(*t, |b| b.min(*t))),
        }
    }

    /// `P(Z = k)`.
    pub fn pmf(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match &self.kind {
            OffspringKind::Deterministic(d) => f64::from(u8::from(k == *d)),
            OffspringKind::FiniteSupport(p) => p.get(k as usize - 1).copied().unwrap_or(0.0),
            OffspringKind::Geometric(p) => p * (1.0 - p).powf((k - 1) as f64),
            OffspringKind::Zeta(alpha) => {
                let s = alpha + 1.0;
                (k as f64).powf(-s) / hurwitz_zeta(s, 1.0)
            }
            OffspringKind::Truncated(base, t) => match k.cmp(t) {
                std::cmp::Ordering::Less => base.pmf(k),
                std::cmp::Ordering::Equal => base.survival(k - 1),
                std::cmp::Ordering::Greater => 0.0,
            },
        }
    }

    /// `P(Z > k)`.
    pub fn survival(&self, k: u64) -> f64 {
        if k == 0 {
            return 1.0;
        }
        match &self.kind {
            OffspringKind::Deterministic(d) => f64::from(u8::from(*d > k)),
            OffspringKind::FiniteSupport(p) => p.iter().skip(k as usize).fold(0.0, |a, b| a + b),
            OffspringKind::Geometric(p) => (1.0 - p).powf(k as f64),
            OffspringKind::Zeta(alpha) => {
                let s = alpha + 1.0;
                hurwitz_zeta(s, (k + 1) as f64) / hurwitz_zeta(s, 1.0)
            }
            OffspringKind::Truncated(base, t) => {
                if k >= *t {
                    0.0
                } else {
                    base.survival(k)
                }
            }
        }
    }

    /// Draw one offspring count, consuming at most one uniform.
    #[inline]
    pub fn sample(&self, stream: &mut Stream) -> u64 {
        let k = match &self.sampler {
            Sampler::Point(d) => return *d,
            Sampler::Table(cdf) => invert_table(cdf, stream.uniform()),
            Sampler::Geometric { log_fail } => {
                if *log_fail == f64::NEG_INFINITY {
                    stream.uniform();
                    1
                } else {
                    let k = 1.0 + (stream.uniform().ln() / log_fail).floor();
                    if k >= u64::MAX as f64 {
                        u64::MAX
                    } else {
                        k as u64
                    }
                }
            }
            Sampler::HeavyTail { cdf, alpha } => {
                let u = stream.uniform();
                let top = *cdf.last().expect("nonempty table");
                if u <= top {
                    invert_table(cdf, u)
                } else {
                    // Conditional tail above the table, continuous Pareto approximation.
                    let v = (1.0 - u) / (1.0 - top);
                    let x = (ZETA_CDF_LEN as f64) * v.clamp(f64::MIN_POSITIVE, 1.0).powf(-1.0 / alpha);
                    (x.floor() as u64).max(ZETA_CDF_LEN as u64 + 1)
                }
            }
        };
        match &self.kind {
            OffspringKind::Truncated(_, t) => k.min(*t),
            _ => k,
        }
    }

    /// Sum of `count` independent draws. Uses exact compound samplers where the
    /// law allows it (negative binomial, multinomial) and falls back to
    /// drawing one by one otherwise.
    pub fn sample_sum(&self, count: u64, stream: &mut Stream) -> u64 {
        if count == 0 {
            return 0;
        }
        match &self.kind {
            OffspringKind::Deterministic(d) => d * count,
            OffspringKind::Geometric(p) if *p < 1.0 && count > 32 => {
                // Failures before the `count`-th success: Poisson(Gamma(count, (1-p)/p)).
                let gamma = Gamma::new(count as f64, (1.0 - p) / p).expect("valid gamma");
                let lambda = gamma.sample(stream.rng());
                let failures = if lambda > 0.0 {
                    Poisson::new(lambda).expect("valid poisson").sample(stream.rng())
                } else {
                    0.0
                };
                count + failures as u64
            }
            OffspringKind::FiniteSupport(probs) if count > 32 => {
                let mut remaining = count;
                let mut mass_left = 1.0;
                let mut total = 0u64;
                for (i, &p) in probs.iter().enumerate() {
                    if remaining == 0 {
                        break;
                    }
                    let share = if mass_left <= 0.0 {
                        1.0
                    } else {
                        (p / mass_left).clamp(0.0, 1.0)
                    };
                    let n = if i + 1 == probs.len() {
                        remaining
                    } else {
                        Binomial::new(remaining, share)
                            .expect("valid binomial")
                            .sample(stream.rng())
                    };
                    total += n * (i as u64 + 1);
                    remaining -= n;
                    mass_left -= p;
                }
                total
            }
            _ => (0..count).map(|_| self.sample(stream)).fold(0u64, u64::saturating_add),
        }
    }

    /// `E[Z^r]` for `r >= 1`; `+inf` when the series diverges.
    pub fn moment(&self, r: f64) -> Result<f64> {
        if !(r >= 1.0) {
            return Err(Error::Domain(format!("moment order {r} must be at least 1")));
        }
        Ok(match &self.kind {
            OffspringKind::Deterministic(d) => (*d as f64).powf(r),
            OffspringKind::FiniteSupport(p) => p
                .iter()
                .enumerate()
                .map(|(i, &pk)| pk * ((i + 1) as f64).powf(r))
                .sum(),
            OffspringKind::Geometric(_) => self.sum_light_tail(|k| k.powf(r)),
            OffspringKind::Zeta(alpha) => {
                if r >= *alpha {
                    f64::INFINITY
                } else {
                    let s = alpha + 1.0;
                    hurwitz_zeta(s - r, 1.0) / hurwitz_zeta(s, 1.0)
                }
            }
            OffspringKind::Truncated(base, t) => {
                let body: f64 = (1..*t).map(|k| base.pmf(k) * (k as f64).powf(r)).sum();
                body + (*t as f64).powf(r) * base.survival(t - 1)
            }
        })
    }

    /// `E[(Z ∧ x)^q]`, always finite.
    pub fn truncated_moment(&self, q: f64, x: f64) -> Result<f64> {
        if !(q >= 1.0 && x >= 1.0) {
            return Err(Error::Domain(format!(
                "truncated moment needs q >= 1 and x >= 1, got q={q}, x={x}"
            )));
        }
        let cut = x.floor() as u64;
        let head = match self.max_value() {
            Some(top) if top <= cut => return self.moment(q),
            _ => (1..=cut)
                .map(|k| self.pmf(k) * (k as f64).powf(q))
                .sum::<f64>(),
        };
        Ok(head + x.powf(q) * self.survival(cut))
    }

    /// `E[Z]`, `E[Z(Z-1)]` or `E[Z(Z-1)(Z-2)]` for `order` 1, 2, 3.
    pub fn factorial_moment(&self, order: u32) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::Domain(format!("factorial moment order {order} not in 1..=3")));
        }
        let falling = move |k: f64| match order {
            1 => k,
            2 => k * (k - 1.0),
            _ => k * (k - 1.0) * (k - 2.0),
        };
        let value = match &self.kind {
            OffspringKind::Deterministic(d) => falling(*d as f64),
            OffspringKind::FiniteSupport(p) => p
                .iter()
                .enumerate()
                .map(|(i, &pk)| pk * falling((i + 1) as f64))
                .sum(),
            OffspringKind::Geometric(p) => {
                let fail = 1.0 - p;
                match order {
                    1 => 1.0 / p,
                    2 => 2.0 * fail / (p * p),
                    _ => 6.0 * fail * fail / (p * p * p),
                }
            }
            OffspringKind::Zeta(_) => {
                let m: Vec<f64> = (1..=order)
                    .map(|r| self.moment(r as f64))
                    .collect::<Result<_>>()?;
                match order {
                    1 => m[0],
                    2 => m[1] - m[0],
                    _ => m[2] - 3.0 * m[1] + 2.0 * m[0],
                }
            }
            OffspringKind::Truncated(base, t) => {
                let body: f64 = (1..*t).map(|k| base.pmf(k) * falling(k as f64)).sum();
                body + falling(*t as f64) * base.survival(t - 1)
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Divergent(format!(
                "factorial moment of order {order} diverges for {:?}",
                self.kind
            )))
        }
    }

    /// Direct summation for geometric-type tails, stopping once the remaining
    /// mass is negligible.
    fn sum_light_tail(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        let mut k = 1u64;
        loop {
            let term = self.pmf(k) * f(k as f64);
            total += term;
            if k > 10 && (term <= total * 1e-18 || self.survival(k) == 0.0) {
                break;
            }
            k += 1;
        }
        total
    }
}

impl fmt::Display for OffspringDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OffspringKind::Deterministic(d) => write!(f, "deterministic({d})"),
            OffspringKind::FiniteSupport(p) => write!(f, "finite({p:?})"),
            OffspringKind::Geometric(p) => write!(f, "geometric({p})"),
            OffspringKind::Zeta(a) => write!(f, "zeta({a})"),
            OffspringKind::Truncated(b, t) => write!(f, "truncated({b}, {t})"),
        }
    }
}

fn cumulative(probs: impl Iterator<Item = f64>) -> Vec<f64> {
    // Kahan summation keeps the last entries of long heavy-tail tables exact.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    probs
        .map(|p| {
            let y = p - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            sum
        })
        .collect()
}

/// Smallest `k >= 1` with `cdf[k-1] >= u`.
#[inline]
fn invert_table(cdf: &[f64], u: f64) -> u64 {
    let idx = cdf.partition_point(|&c| c < u);
    (idx.min(cdf.len() - 1) + 1) as u64
}

/// Hurwitz zeta `Σ_{j>=0} (a+j)^-s` for `s > 1`, `a > 0`: direct summation of
/// the first terms plus an Euler–Maclaurin tail (absolute error far below 1e-12).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(s > 1.0, "hurwitz_zeta needs s > 1");
    const HEAD: usize = 64;
    let head: f64 = (0..HEAD).map(|j| (a + j as f64).powf(-s)).sum();
    let n = a + HEAD as f64;
    // Bernoulli numbers B2..B10 for the Euler–Maclaurin correction.
    const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising factorial s(s+1)...(s+2k-2) / (2k)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut power = n.powf(-s - 1.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        tail += b / fact * rising * power;
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + k2 - 1.0) * (s + k2);
        fact *= (k2 + 1.0) * (k2 + 2.0);
        power /= n * n;
    }
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, Stream};

    // Smallest terms first to keep rounding below the tolerances.
    fn direct_sum(f: impl Fn(f64) -> f64, upto: u64) -> f64 {
        (1..=upto).rev().map(|k| f(k as f64)).sum()
    }

    #[test]
    fn riemann_zeta_known_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - std::f64::consts::PI.powi(4) / 90.0).abs() < 1e-14);
        // ζ(3.5) by brute force with integral tail.
        let n = 2_000_000u64;
        let brute = direct_sum(|k| k.powf(-3.5), n) + (n as f64).powf(-2.5) / 2.5
            - 0.5 * (n as f64).powf(-3.5);
        assert!((hurwitz_zeta(3.5, 1.0) - brute).abs() < 1e-12);
    }

    #[test]
    fn deterministic_point_mass() {
        let d = OffspringDistribution::deterministic(3).unwrap();
        let mut s = Stream::new(1, Domain::Corpus, 0, 0);
        assert!((0..10).all(|_| d.sample(&mut s) == 3));
        assert_eq!(OffspringDistribution::deterministic(2).unwrap().moment(3.0).unwrap(), 8.0);
        assert_eq!(d.factorial_moment(2).unwrap(), 6.0);
        let five = OffspringDistribution::deterministic(5).unwrap();
        assert_eq!(five.truncated_moment(2.0, 3.0).unwrap(), 9.0);
    }

    #[test]
    fn geometric_moments_match_direct_summation() {
        let g = OffspringDistribution::geometric(0.5).unwrap();
        let pmf = |k: f64| 0.5f64.powf(k);
        let m2 = direct_sum(|k| pmf(k) * k * k, 200);
        let m3 = direct_sum(|k| pmf(k) * k * k * k, 200);
        assert!((m2 - 6.0).abs() < 1e-12);
        assert!((g.moment(2.0).unwrap() - m2).abs() < 1e-12);
        assert!((g.moment(3.0).unwrap() - m3).abs() < 1e-12);
        assert!((g.factorial_moment(2).unwrap() - 4.0).abs() < 1e-12);
        assert!((g.factorial_moment(3).unwrap() - (m3 - 3.0 * m2 + 2.0 * 2.0)).abs() < 1e-12);
        assert!((g.factorial_moment(3).unwrap() - 12.0).abs() < 1e-12);
        assert!((g.truncated_moment(1.0, 2.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zeta_divergent_moments_are_infinite() {
        let z = OffspringDistribution::zeta(2.5).unwrap();
        assert_eq!(z.moment(3.0).unwrap(), f64::INFINITY);
        assert!(z.moment(2.0).unwrap().is_finite());
        assert!(matches!(z.factorial_moment(3), Err(Error::Divergent(_))));
        assert!(z.factorial_moment(2).is_ok());
    }

    #[test]
    fn zeta_mean_matches_zeta_ratio() {
        let z = OffspringDistribution::zeta(2.5).unwrap();
        let brute = direct_sum(|k| k.powf(-2.5), 3_000_000) + 3.0e6f64.powf(-1.5) / 1.5;
        let norm = direct_sum(|k| k.powf(-3.5), 3_000_000);
        assert!((z.mean() - brute / norm).abs() < 1e-9);
    }

    #[test]
    fn zeta_truncated_moment_has_power_shape() {
        let z = OffspringDistribution::zeta(2.0).unwrap();
        let ratios: Vec<f64> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&x| z.truncated_moment(3.0, x).unwrap() / x.powf(3.0 - 2.0))
            .collect();
        // Oracle: direct summation.
        let norm = hurwitz_zeta(3.0, 1.0);
        for (&x, r) in [10.0f64, 100.0, 1000.0].iter().zip(&ratios) {
            let n = x as u64;
            let head = direct_sum(|k| k.powf(-3.0) / norm * k.powi(3), n);
            let tail = 1.0 - direct_sum(|k| k.powf(-3.0) / norm, n);
            let direct = (head + x.powi(3) * tail) / x;
            assert!((direct - r).abs() < 1e-9 * direct.max(1.0), "{direct} vs {r}");
        }
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(lo > 0.1 && hi < 10.0, "{ratios:?}");
    }

    #[test]
    fn truncated_law_moves_tail_mass_to_cutoff() {
        let base = OffspringDistribution::geometric(0.5).unwrap();
        let t = OffspringDistribution::truncated(base.clone(), 2).unwrap();
        assert!((t.pmf(1) - 0.5).abs() < 1e-15);
        assert!((t.pmf(2) - 0.5).abs() < 1e-15);
        assert_eq!(t.pmf(3), 0.0);
        assert!((t.mean() - 1.5).abs() < 1e-15);
        let mut prev = 0.0;
        for cut in 2..60 {
            let m = OffspringDistribution::truncated(base.clone(), cut).unwrap().mean();
            assert!(m >= prev);
            prev = m;
        }
        assert!((prev - 2.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_geometric_sample_frequency() {
        let t = OffspringDistribution::truncated(OffspringDistribution::geometric(0.5).unwrap(), 2)
            .unwrap();
        let mut s = Stream::new(11, Domain::Corpus, 1, 0);
        let n = 1_000_000;
        let ones = (0..n).filter(|_| t.sample(&mut s) == 1).count();
        let freq = ones as f64 / n as f64;
        assert!((0.498..=0.502).contains(&freq), "{freq}");
    }

    #[test]
    fn zeta_tail_frequency_bounded() {
        let z = OffspringDistribution::zeta(2.5).unwrap();
        // Exact tail by direct summation.
        let norm = direct_sum(|k| k.powf(-3.5), 5_000_000) + 5.0e6f64.powf(-2.5) / 2.5;
        let head = direct_sum(|k| k.powf(-3.5), 100);
        let exact_tail = (norm - head) / norm;
        assert!((z.survival(100) - exact_tail).abs() < 1e-12);
        let c = 1.0 / norm;
        let mut s = Stream::new(5, Domain::Corpus, 2, 0);
        let n = 10_000_000u64;
        let big = (0..n).filter(|_| z.sample(&mut s) > 100).count();
        let freq = big as f64 / n as f64;
        assert!(freq <= 2.0 * c * 100f64.powf(-2.5), "{freq}");
        // And agrees with the exact tail within sampling error.
        let se = (exact_tail / n as f64).sqrt();
        assert!((freq - exact_tail).abs() < 5.0 * se, "{freq} vs {exact_tail}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(OffspringDistribution::finite(vec![0.5, 0.4]).is_err());
        assert!(OffspringDistribution::deterministic(1).is_err());
        assert!(OffspringDistribution::permit_degenerate(OffspringKind::Deterministic(1)).is_ok());
        assert!(OffspringDistribution::geometric(1.5).is_err());
        let g = OffspringDistribution::geometric(0.5).unwrap();
        assert!(g.moment(0.5).is_err());
        assert!(g.factorial_moment(4).is_err());
    }

    #[test]
    fn short_form_parses() {
        let spec = OffspringSpec::parse_short("finite:0.5,0.3,0.2").unwrap();
        assert_eq!(spec, OffspringSpec::Finite { probs: vec![0.5, 0.3, 0.2] });
        let json: OffspringSpec = serde_json::from_str(r#"{"kind":"zeta","alpha":2.5}"#).unwrap();
        assert_eq!(json, OffspringSpec::Zeta { alpha: 2.5 });
        assert!(OffspringSpec::parse_short("poisson:2").is_err());
    }

    #[test]
    fn sample_sum_compound_paths_match_means() {
        for dist in [
            OffspringDistribution::geometric(0.5).unwrap(),
            OffspringDistribution::finite(vec![0.5, 0.3, 0.2]).unwrap(),
        ] {
            let mut s = Stream::new(3, Domain::Corpus, 9, 0);
            let count = 1000u64;
            let reps = 2000;
            let mean: f64 = (0..reps)
                .map(|_| dist.sample_sum(count, &mut s) as f64)
                .sum::<f64>()
                / reps as f64;
            let var = dist.moment(2.0).unwrap() - dist.mean().powi(2);
            let se = (var * count as f64 / reps as f64).sqrt();
            assert!((mean - count as f64 * dist.mean()).abs() < 5.0 * se, "{dist}: {mean}");
        }
    }
}
