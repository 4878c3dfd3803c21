//! Priors on the basis dimension `J` and on the coefficient vector `θ`.
//!
//! Dimension priors are truncated to `[min, max]` and renormalized there.
//! Geometric mass is `p (1-p)^(j-1)` on `j >= 1`; Poisson is `e^-λ λ^j / j!`;
//! the negative binomial counts failures before the `r`-th success,
//! `Γ(j+r) / (Γ(r) j!) p^r (1-p)^j`.
//!
//! Spec strings use `family:param[:param...]` with the truncation bounds as
//! trailing integers, e.g. `geom:0.15:5:12`, `poisson:3:1:10`,
//! `negbin:2:0.4:1:30`, `uniform:1:3`, or `fixed:6` for a point mass.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ln_beta, ln_gamma, log_sum_exp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DimensionFamily {
    Geometric { p: f64 },
    Poisson { rate: f64 },
    NegativeBinomial { r: f64, p: f64 },
    /// Flat over the truncation range.
    Uniform,
}

impl DimensionFamily {
    /// Untruncated log mass at `j`.
    pub fn raw_log_pmf(&self, j: usize) -> f64 {
        let jf = j as f64;
        match *self {
            DimensionFamily::Geometric { p } => {
                if j == 0 {
                    f64::NEG_INFINITY
                } else {
                    p.ln() + (jf - 1.0) * (-p).ln_1p()
                }
            }
            DimensionFamily::Poisson { rate } => -rate + jf * rate.ln() - ln_gamma(jf + 1.0),
            DimensionFamily::NegativeBinomial { r, p } => {
                ln_gamma(jf + r) - ln_gamma(r) - ln_gamma(jf + 1.0) + r * p.ln() + jf * (-p).ln_1p()
            }
            DimensionFamily::Uniform => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DimensionFamily::Geometric { p } => p > 0.0 && p < 1.0,
            DimensionFamily::Poisson { rate } => rate > 0.0 && rate.is_finite(),
            DimensionFamily::NegativeBinomial { r, p } => r > 0.0 && r.is_finite() && p > 0.0 && p < 1.0,
            DimensionFamily::Uniform => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param("dimension prior", format!("invalid parameters {self:?}")))
        }
    }
}

/// Truncated, renormalized prior on the basis dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionPrior {
    family: DimensionFamily,
    min: usize,
    max: usize,
    log_pmf: Vec<f64>,
}

impl DimensionPrior {
    pub fn new(family: DimensionFamily, min: usize, max: usize) -> Result<Self> {
        family.validate()?;
        if min == 0 || min > max {
            return Err(Error::param(
                "dimension prior",
                format!("truncation range [{min}, {max}] must satisfy 1 <= min <= max"),
            ));
        }
        let raw: Vec<f64> = (min..=max).map(|j| family.raw_log_pmf(j)).collect();
        let norm = log_sum_exp(&raw);
        if !norm.is_finite() {
            return Err(Error::param("dimension prior", "no mass on the truncation range"));
        }
        let log_pmf = raw.iter().map(|v| v - norm).collect();
        Ok(Self { family, min, max, log_pmf })
    }

    pub fn geometric(p: f64, min: usize, max: usize) -> Result<Self> {
        Self::new(DimensionFamily::Geometric { p }, min, max)
    }

    /// Point mass at `j`.
    pub fn fixed(j: usize) -> Result<Self> {
        Self::geometric(0.5, j, j)
    }

    pub fn family(&self) -> DimensionFamily {
        self.family
    }

    pub fn min(&self) -> usize {
        self.min
    }

    pub fn max(&self) -> usize {
        self.max
    }

    pub fn log_pmf(&self, j: usize) -> Result<f64> {
        if j < self.min || j > self.max {
            return Err(Error::DimensionOutOfRange { j, min: self.min, max: self.max });
        }
        Ok(self.log_pmf[j - self.min])
    }

    /// `(j, ln π(j))` over the truncation range.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.min..=self.max).zip(self.log_pmf.iter().copied())
    }

    /// `ln Π(J > j)` for the untruncated family.
    pub fn log_survival_untruncated(&self, j: usize) -> f64 {
        match self.family {
            DimensionFamily::Geometric { p } => j as f64 * (-p).ln_1p(),
            // Flat has no untruncated form; use the truncated tail.
            DimensionFamily::Uniform => {
                let above = self.max.saturating_sub(j.max(self.min - 1));
                (above as f64 / (self.max - self.min + 1) as f64).ln()
            }
            _ => {
                // Sum the head and complement; adequate for the moderate j used here.
                let head: Vec<f64> = (0..=j).map(|i| self.family.raw_log_pmf(i)).collect();
                let h = log_sum_exp(&head).exp();
                (1.0 - h).max(0.0).ln()
            }
        }
    }
}

impl fmt::Display for DimensionPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            DimensionFamily::Geometric { p } => write!(f, "geom:{p}:{}:{}", self.min, self.max),
            DimensionFamily::Poisson { rate } => write!(f, "poisson:{rate}:{}:{}", self.min, self.max),
            DimensionFamily::NegativeBinomial { r, p } => {
                write!(f, "negbin:{r}:{p}:{}:{}", self.min, self.max)
            }
            DimensionFamily::Uniform => write!(f, "uniform:{}:{}", self.min, self.max),
        }
    }
}

fn split_spec(s: &str) -> (String, Vec<&str>) {
    let mut parts = s.trim().split(':');
    let family = parts.next().unwrap_or("").to_ascii_lowercase();
    (family, parts.collect())
}

fn parse_f64(input: &str, field: &str, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(input, format!("{what} `{field}` is not a number")))
}

fn parse_usize(input: &str, field: &str, what: &str) -> Result<usize> {
    field
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(input, format!("{what} `{field}` is not a nonnegative integer")))
}

impl FromStr for DimensionPrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, args) = split_spec(s);
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(s, format!("`{family}` expects {n} fields after the family")))
            }
        };
        let bounds = |at: usize| -> Result<(usize, usize)> {
            Ok((
                parse_usize(s, args[at], "lower bound")?,
                parse_usize(s, args[at + 1], "upper bound")?,
            ))
        };
        match family.as_str() {
            "geom" | "geometric" => {
                arity(3)?;
                let (lo, hi) = bounds(1)?;
                Self::geometric(parse_f64(s, args[0], "p")?, lo, hi)
            }
            "poisson" | "pois" => {
                arity(3)?;
                let (lo, hi) = bounds(1)?;
                Self::new(DimensionFamily::Poisson { rate: parse_f64(s, args[0], "rate")? }, lo, hi)
            }
            "negbin" | "nb" => {
                arity(4)?;
                let (lo, hi) = bounds(2)?;
                Self::new(
                    DimensionFamily::NegativeBinomial {
                        r: parse_f64(s, args[0], "r")?,
                        p: parse_f64(s, args[1], "p")?,
                    },
                    lo,
                    hi,
                )
            }
            "uniform" | "unif" => {
                arity(2)?;
                let (lo, hi) = bounds(0)?;
                Self::new(DimensionFamily::Uniform, lo, hi)
            }
            "fixed" => {
                arity(1)?;
                Self::fixed(parse_usize(s, args[0], "dimension")?)
            }
            _ => Err(Error::parse(s, format!("unknown dimension prior family `{family}`"))),
        }
    }
}

/// Symmetric coefficient prior family; expands to any dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefFamily {
    Dirichlet { alpha: f64 },
    Gamma { shape: f64, rate: f64 },
    Beta { a: f64, b: f64 },
    Normal { variance: f64 },
}

impl CoefFamily {
    pub fn for_dim(&self, dim: usize) -> CoefficientPrior {
        match *self {
            CoefFamily::Dirichlet { alpha } => CoefficientPrior::Dirichlet { alpha: vec![alpha; dim] },
            CoefFamily::Gamma { shape, rate } => CoefficientPrior::Gamma {
                shape: vec![shape; dim],
                rate: vec![rate; dim],
            },
            CoefFamily::Beta { a, b } => CoefficientPrior::Beta { a: vec![a; dim], b: vec![b; dim] },
            CoefFamily::Normal { variance } => CoefficientPrior::Normal { variance, dim },
        }
    }

    fn validate(self) -> Result<Self> {
        let ok = match self {
            CoefFamily::Dirichlet { alpha } => alpha > 0.0 && alpha.is_finite(),
            CoefFamily::Gamma { shape, rate } => shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite(),
            CoefFamily::Beta { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            CoefFamily::Normal { variance } => variance > 0.0 && variance.is_finite(),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::param("coefficient prior", format!("parameters must be positive: {self:?}")))
        }
    }
}

impl fmt::Display for CoefFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CoefFamily::Dirichlet { alpha } => write!(f, "dirichlet:{alpha}"),
            CoefFamily::Gamma { shape, rate } => write!(f, "gamma:{shape}:{rate}"),
            CoefFamily::Beta { a, b } => write!(f, "beta:{a}:{b}"),
            CoefFamily::Normal { variance } => write!(f, "normal:{variance}"),
        }
    }
}

impl FromStr for CoefFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, args) = split_spec(s);
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(s, format!("`{family}` expects {n} fields after the family")))
            }
        };
        let parsed = match family.as_str() {
            "dirichlet" | "dir" => {
                arity(1)?;
                CoefFamily::Dirichlet { alpha: parse_f64(s, args[0], "alpha")? }
            }
            "gamma" => {
                arity(2)?;
                CoefFamily::Gamma {
                    shape: parse_f64(s, args[0], "shape")?,
                    rate: parse_f64(s, args[1], "rate")?,
                }
            }
            "beta" => {
                arity(2)?;
                CoefFamily::Beta { a: parse_f64(s, args[0], "a")?, b: parse_f64(s, args[1], "b")? }
            }
            "normal" => {
                arity(1)?;
                CoefFamily::Normal { variance: parse_f64(s, args[0], "variance")? }
            }
            _ => return Err(Error::parse(s, format!("unknown coefficient prior family `{family}`"))),
        };
        parsed.validate()
    }
}

/// Coefficient prior for a fixed dimension, with per-coordinate parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientPrior {
    Dirichlet { alpha: Vec<f64> },
    Gamma { shape: Vec<f64>, rate: Vec<f64> },
    Beta { a: Vec<f64>, b: Vec<f64> },
    Normal { variance: f64, dim: usize },
}

const SIMPLEX_TOL: f64 = 1e-9;

impl CoefficientPrior {
    pub fn dim(&self) -> usize {
        match self {
            CoefficientPrior::Dirichlet { alpha } => alpha.len(),
            CoefficientPrior::Gamma { shape, .. } => shape.len(),
            CoefficientPrior::Beta { a, .. } => a.len(),
            CoefficientPrior::Normal { dim, .. } => *dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: &[f64]| v.iter().all(|x| *x > 0.0 && x.is_finite());
        let ok = match self {
            CoefficientPrior::Dirichlet { alpha } => positive(alpha),
            CoefficientPrior::Gamma { shape, rate } => shape.len() == rate.len() && positive(shape) && positive(rate),
            CoefficientPrior::Beta { a, b } => a.len() == b.len() && positive(a) && positive(b),
            CoefficientPrior::Normal { variance, .. } => *variance > 0.0 && variance.is_finite(),
        };
        if ok && self.dim() > 0 {
            Ok(())
        } else {
            Err(Error::param("coefficient prior", "parameters must be positive and nonempty"))
        }
    }

    /// One draw of `θ`.
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Result<Vec<f64>> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        self.validate()?;
        let gamma = |shape: f64, rate: f64| {
            Gamma::new(shape, 1.0 / rate).map_err(|e| Error::param("coefficient prior", e.to_string()))
        };
        Ok(match self {
            CoefficientPrior::Dirichlet { alpha } => {
                let mut draws = Vec::with_capacity(dim);
                for &a in alpha {
                    draws.push(gamma(a, 1.0)?.sample(rng));
                }
                let total: f64 = draws.iter().sum();
                draws.iter().map(|g| g / total).collect()
            }
            CoefficientPrior::Gamma { shape, rate } => {
                let mut draws = Vec::with_capacity(dim);
                for (&a, &b) in shape.iter().zip(rate) {
                    draws.push(gamma(a, b)?.sample(rng));
                }
                draws
            }
            CoefficientPrior::Beta { a, b } => {
                let mut draws = Vec::with_capacity(dim);
                for (&a, &b) in a.iter().zip(b) {
                    let dist = Beta::new(a, b).map_err(|e| Error::param("coefficient prior", e.to_string()))?;
                    draws.push(dist.sample(rng));
                }
                draws
            }
            CoefficientPrior::Normal { variance, .. } => {
                let sd = variance.sqrt();
                (0..dim)
                    .map(|_| sd * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
                    .collect()
            }
        })
    }

    /// Normalized log density at `θ`. For the Dirichlet this is the density of
    /// the first `J - 1` coordinates with respect to Lebesgue measure.
    pub fn log_density(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        let outside = || Error::OutsideSupport(format!("{theta:?}"));
        match self {
            CoefficientPrior::Dirichlet { alpha } => {
                let total: f64 = theta.iter().sum();
                if theta.iter().any(|&t| t < 0.0) || (total - 1.0).abs() > SIMPLEX_TOL {
                    return Err(outside());
                }
                let a_sum: f64 = alpha.iter().sum();
                let mut lp = ln_gamma(a_sum);
                for (&a, &t) in alpha.iter().zip(theta) {
                    lp += (a - 1.0) * t.ln() - ln_gamma(a);
                }
                Ok(lp)
            }
            CoefficientPrior::Gamma { shape, rate } => {
                if theta.iter().any(|&t| t <= 0.0) {
                    return Err(outside());
                }
                Ok(shape
                    .iter()
                    .zip(rate)
                    .zip(theta)
                    .map(|((&a, &b), &t)| a * b.ln() - ln_gamma(a) + (a - 1.0) * t.ln() - b * t)
                    .sum())
            }
            CoefficientPrior::Beta { a, b } => {
                if theta.iter().any(|&t| t <= 0.0 || t >= 1.0) {
                    return Err(outside());
                }
                Ok(a.iter()
                    .zip(b)
                    .zip(theta)
                    .map(|((&a, &b), &t)| (a - 1.0) * t.ln() + (b - 1.0) * (-t).ln_1p() - ln_beta(a, b))
                    .sum())
            }
            CoefficientPrior::Normal { variance, .. } => {
                let ln2pi = (2.0 * std::f64::consts::PI).ln();
                Ok(theta
                    .iter()
                    .map(|t| -0.5 * (ln2pi + variance.ln()) - t * t / (2.0 * variance))
                    .sum())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn geometric_truncated_mass() {
        let prior: DimensionPrior = "geom:0.15:5:12".parse().unwrap();
        let norm: f64 = (5..=12).map(|k| 0.15 * 0.85f64.powi(k - 1)).sum();
        let want = (0.15 * 0.85f64.powi(4) / norm).ln();
        assert_abs_diff_eq!(prior.log_pmf(5).unwrap(), want, epsilon = 1e-13);
        assert!(prior.log_pmf(4).is_err());
        assert!(prior.log_pmf(13).is_err());
    }

    #[test]
    fn point_mass_has_log_probability_zero() {
        for spec in ["geom:0.3:4:4", "poisson:2:7:7", "negbin:2:0.5:3:3", "fixed:9"] {
            let prior: DimensionPrior = spec.parse().unwrap();
            let (j, lp) = prior.support().next().unwrap();
            assert_eq!(lp, 0.0, "{spec} at {j}");
        }
    }

    #[test]
    fn poisson_matches_direct_normalization() {
        let prior: DimensionPrior = "poisson:3:1:10".parse().unwrap();
        let raw: Vec<f64> = (1..=10u32)
            .map(|j| (-3.0f64).exp() * 3f64.powi(j as i32) / (1..=j).map(f64::from).product::<f64>())
            .collect();
        let total: f64 = raw.iter().sum();
        for (j, r) in (1..=10).zip(&raw) {
            assert_abs_diff_eq!(prior.log_pmf(j).unwrap().exp(), r / total, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalization_over_wide_ranges() {
        for spec in ["geom:0.15:1:200", "poisson:40:1:200", "negbin:3:0.1:1:200", "geom:0.9:1:200"] {
            let prior: DimensionPrior = spec.parse().unwrap();
            let total: f64 = prior.support().map(|(_, lp)| lp.exp()).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert!(prior.support().all(|(_, lp)| lp.is_finite()));
        }
    }

    #[test]
    fn geometric_survival_is_linear() {
        let prior = DimensionPrior::geometric(0.15, 1, 50).unwrap();
        let step = prior.log_survival_untruncated(1) - prior.log_survival_untruncated(2);
        for j in 2..40 {
            let d = prior.log_survival_untruncated(j) - prior.log_survival_untruncated(j + 1);
            assert_abs_diff_eq!(d, step, epsilon = 1e-12);
        }
        // Agrees with brute summation of the pmf tail.
        let tail: f64 = (6..2000).map(|k| 0.15 * 0.85f64.powi(k - 1)).sum();
        assert_abs_diff_eq!(prior.log_survival_untruncated(5).exp(), tail, epsilon = 1e-12);
    }

    #[test]
    fn malformed_specs_name_the_problem() {
        for bad in ["geom:0.15:5", "geom:x:5:12", "geom:0.15:12:5", "bogus:1", "geom:1.5:1:3", "fixed:0"] {
            assert!(bad.parse::<DimensionPrior>().is_err(), "{bad}");
        }
        for bad in ["dirichlet", "gamma:1", "beta:0:1", "normal:-1", "weibull:1"] {
            assert!(bad.parse::<CoefFamily>().is_err(), "{bad}");
        }
        let err = "geom:abc:1:3".parse::<DimensionPrior>().unwrap_err().to_string();
        assert!(err.contains("abc"), "{err}");
        assert_eq!("gamma:1.0:2".parse::<CoefFamily>().unwrap(), CoefFamily::Gamma { shape: 1.0, rate: 2.0 });
    }

    #[test]
    fn log_density_examples() {
        let dir = CoefFamily::Dirichlet { alpha: 1.0 }.for_dim(2);
        assert_abs_diff_eq!(dir.log_density(&[0.3, 0.7]).unwrap(), 0.0, epsilon = 1e-15);
        assert!(dir.log_density(&[0.3, 0.6]).is_err());
        let normal = CoefFamily::Normal { variance: 1.0 }.for_dim(3);
        let want = -1.5 * (2.0 * std::f64::consts::PI).ln();
        assert_abs_diff_eq!(normal.log_density(&[0.0; 3]).unwrap(), want, epsilon = 1e-14);
        let gamma = CoefFamily::Gamma { shape: 2.0, rate: 3.0 }.for_dim(1);
        assert_abs_diff_eq!(gamma.log_density(&[1.0]).unwrap(), 2.0 * 3f64.ln() - 3.0, epsilon = 1e-14);
        let beta = CoefFamily::Beta { a: 2.0, b: 2.0 }.for_dim(1);
        assert_abs_diff_eq!(beta.log_density(&[0.5]).unwrap(), 1.5f64.ln(), epsilon = 1e-14);
        assert!(beta.log_density(&[1.0]).is_err());
        assert!(gamma.log_density(&[1.0, 2.0]).is_err());
    }

    fn ks_uniform(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| ((i as f64 + 1.0) / n - x).abs().max((x - i as f64 / n).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn flat_dirichlet_marginal_is_uniform() {
        let prior = CoefFamily::Dirichlet { alpha: 1.0 }.for_dim(2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws: Vec<f64> = (0..100_000).map(|_| prior.sample(2, &mut rng).unwrap()[0]).collect();
        assert!(ks_uniform(draws) < 0.01);
    }

    #[test]
    fn sampler_means_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let gamma = CoefFamily::Gamma { shape: 1.0, rate: 1.0 }.for_dim(1);
        let m: f64 = (0..n).map(|_| gamma.sample(1, &mut rng).unwrap()[0]).sum::<f64>() / n as f64;
        assert!((m - 1.0).abs() < 3.0 * (1.0 / n as f64).sqrt());
        let beta = CoefFamily::Beta { a: 2.0, b: 2.0 }.for_dim(1);
        let m: f64 = (0..n).map(|_| beta.sample(1, &mut rng).unwrap()[0]).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() < 3.0 * (0.05 / n as f64).sqrt());
    }

    #[test]
    fn samples_respect_support_and_seed() {
        let dir = CoefFamily::Dirichlet { alpha: 0.7 }.for_dim(5);
        let a = dir.sample(5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = dir.sample(5, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert_abs_diff_eq!(a.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert!(dir.sample(4, &mut ChaCha8Rng::seed_from_u64(3)).is_err());
    }

    #[test]
    fn sampler_and_density_satisfy_importance_identity() {
        // Draws from p weighted by q/p average to one for any density q.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pairs = [
            (CoefFamily::Gamma { shape: 2.0, rate: 3.0 }, CoefFamily::Gamma { shape: 2.5, rate: 3.0 }),
            (CoefFamily::Beta { a: 2.0, b: 3.0 }, CoefFamily::Beta { a: 2.5, b: 2.5 }),
            (CoefFamily::Dirichlet { alpha: 2.0 }, CoefFamily::Dirichlet { alpha: 1.5 }),
            (CoefFamily::Normal { variance: 1.0 }, CoefFamily::Normal { variance: 0.8 }),
        ];
        for (p, q) in pairs {
            let (p, q) = (p.for_dim(3), q.for_dim(3));
            let w: Vec<f64> = (0..100_000)
                .map(|_| {
                    let theta = p.sample(3, &mut rng).unwrap();
                    (q.log_density(&theta).unwrap() - p.log_density(&theta).unwrap()).exp()
                })
                .collect();
            let (m, v) = crate::numeric::mean_var(&w);
            assert!((m - 1.0).abs() < 4.0 * (v / w.len() as f64).sqrt(), "{p:?}: {m}");
        }
    }
}
