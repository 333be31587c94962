//! Catalog of tail models and separating functions.
//!
//! Every entry exposes a closed-form log-survival function evaluated
//! directly in log space (never as `ln(1 - cdf)`, which cancels
//! catastrophically deep in a tail), a quantile, and seeded
//! inverse-transform sampling. Entries are immutable values and freely
//! shareable across threads; sampling state lives entirely in the caller's
//! [`RngStream`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::special;

/// Errors from parsing distribution specs or evaluating quantiles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("unknown distribution name `{0}`")]
    UnknownName(String),
    #[error("`{name}` takes {expected} parameter(s), got {got}")]
    WrongArity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid parameter for `{name}`: {reason} (got {value})")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },
    #[error("malformed distribution spec `{0}`")]
    Malformed(String),
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
}

/// A seedable counter-based uniform stream.
///
/// `(seed, stream, draw index)` uniquely determines every variate, so
/// distinct streams can be consumed in any order (or in parallel) without
/// affecting each other. Replication `r` of experiment cell `e`
/// conventionally uses `stream = (e << 32) | r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Stream index for replication `rep` of experiment cell `cell`.
    pub fn for_cell(seed: u64, cell: u32, rep: u32) -> Self {
        Self::new(seed, ((cell as u64) << 32) | rep as u64)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A named tail model with closed-form log-survival, cdf, quantile, and
/// inverse-transform sampling.
///
/// `support_min` is the largest `x` with `F(x) = 0` (negative infinity for
/// full-support laws). The three `Sep*` entries are the separating
/// functions used by the discrimination problems; they are ordinary
/// distributions here, although tests consume them only through
/// `log_survival`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// `ln S = -rate * x`, `x >= 0`.
    Exponential { rate: f64 },
    /// Standard-normal family; `ln S` via the dedicated tail routine.
    Normal { mean: f64, sd: f64 },
    /// `ln S(x) = ln Phi_bar((ln x - mu)/sigma)`, `x > 0`.
    LogNormal { mu: f64, sigma: f64 },
    /// `ln S = -(x/scale)^shape`, `x >= 0`.
    Weibull { shape: f64, scale: f64 },
    /// `ln S = -((ln x)/scale)^shape`, `x > 1`.
    LogWeibull { shape: f64, scale: f64 },
    /// `ln S = -shape * ln x`, `x > 1`.
    Pareto { shape: f64 },
    /// `ln S = (ln kappa - ln x)/gamma`, `x > kappa`.
    ParetoGk { gamma: f64, kappa: f64 },
    /// `ln S = -shape * ln ln x`, `x > e`.
    LogPareto { shape: f64 },
    /// Density `x^-2 ln x` on `x > 1`; `F(x) = 1 - (1 + ln x)/x`.
    LogGamma21,
    /// Standard Cauchy.
    Cauchy,
    /// Separating function for Weibull vs log-Weibull:
    /// `ln S = -exp(sqrt(ln x))`, `x > 1` (carries an atom of mass
    /// `1 - 1/e` at `x = 1`).
    SepWlw,
    /// Separating function for logarithmic vs heavy tails:
    /// `ln S = -sqrt(ln x)`, `x > 1`.
    SepSqrtLog,
    /// Separating function for super-heavy vs heavy with index below
    /// `gamma0`: `ln S = -ln x / (2 gamma0)`, `x > 1`.
    SepParetoHalf { gamma0: f64 },
}

use Distribution::*;

impl Distribution {
    /// Catalog name as used in the text spec grammar.
    pub fn name(&self) -> &'static str {
        match self {
            Exponential { .. } => "exp",
            Normal { .. } => "normal",
            LogNormal { .. } => "lognormal",
            Weibull { .. } => "weibull",
            LogWeibull { .. } => "logweibull",
            Pareto { .. } => "pareto",
            ParetoGk { .. } => "pareto_gk",
            LogPareto { .. } => "logpareto",
            LogGamma21 => "loggamma21",
            Cauchy => "cauchy",
            SepWlw => "sep_wlw",
            SepSqrtLog => "sep_sqrtlog",
            SepParetoHalf { .. } => "sep_pareto_half",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Exponential { rate } => vec![rate],
            Normal { mean, sd } => vec![mean, sd],
            LogNormal { mu, sigma } => vec![mu, sigma],
            Weibull { shape, scale } | LogWeibull { shape, scale } => vec![shape, scale],
            Pareto { shape } | LogPareto { shape } => vec![shape],
            ParetoGk { gamma, kappa } => vec![gamma, kappa],
            LogGamma21 | Cauchy | SepWlw | SepSqrtLog => vec![],
            SepParetoHalf { gamma0 } => vec![gamma0],
        }
    }

    /// Largest `x` with `F(x) = 0`; `-inf` for full-support laws.
    pub fn support_min(&self) -> f64 {
        match self {
            Exponential { .. } | LogNormal { .. } | Weibull { .. } => 0.0,
            Normal { .. } | Cauchy => f64::NEG_INFINITY,
            LogWeibull { .. }
            | Pareto { .. }
            | LogGamma21
            | SepWlw
            | SepSqrtLog
            | SepParetoHalf { .. } => 1.0,
            ParetoGk { kappa, .. } => *kappa,
            LogPareto { .. } => std::f64::consts::E,
        }
    }

    /// `ln(1 - F(x))`. Total on finite `x`: zero at or below the support
    /// threshold, nonincreasing, never positive.
    pub fn log_survival(&self, x: f64) -> f64 {
        let m = self.support_min();
        if x <= m {
            return 0.0;
        }
        match *self {
            Exponential { rate } => -rate * x,
            Normal { mean, sd } => special::ln_normal_sf((x - mean) / sd),
            LogNormal { mu, sigma } => special::ln_normal_sf((x.ln() - mu) / sigma),
            Weibull { shape, scale } => -(x / scale).powf(shape),
            LogWeibull { shape, scale } => -(x.ln() / scale).powf(shape),
            Pareto { shape } => -shape * x.ln(),
            ParetoGk { gamma, kappa } => (kappa.ln() - x.ln()) / gamma,
            LogPareto { shape } => -shape * x.ln().ln(),
            LogGamma21 => x.ln().ln_1p() - x.ln(),
            Cauchy => {
                if x > 0.0 {
                    // S(x) = atan(1/x)/pi, no cancellation in the far tail
                    (x.recip().atan() / std::f64::consts::PI).ln()
                } else if x == 0.0 {
                    -std::f64::consts::LN_2
                } else {
                    (0.5 + (-x).atan() / std::f64::consts::PI).ln()
                }
            }
            SepWlw => -x.ln().sqrt().exp(),
            SepSqrtLog => -x.ln().sqrt(),
            SepParetoHalf { gamma0 } => -x.ln() / (2.0 * gamma0),
        }
    }

    /// `F(x)`, consistent with `exp(log_survival)` to within 1e-12.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Normal { mean, sd } => special::normal_cdf((x - mean) / sd),
            LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    special::normal_cdf((x.ln() - mu) / sigma)
                }
            }
            Cauchy => 0.5 + x.atan() / std::f64::consts::PI,
            _ => -self.log_survival(x).exp_m1(),
        }
    }

    /// Generalized inverse of the cdf on `0 < p < 1`.
    ///
    /// Closed form except for `loggamma21` (bisection, tolerance 1e-10 in
    /// probability). For `sep_wlw` the atom at 1 makes the inverse constant
    /// over `p <= 1 - 1/e`. Super-heavy entries can overflow to `+inf` for
    /// moderate `p`; this mirrors the underlying law, whose quantiles
    /// genuinely exceed the largest finite double.
    pub fn quantile(&self, p: f64) -> Result<f64, DistError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(DistError::ProbabilityOutOfRange(p));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: f64) -> f64 {
        match *self {
            Exponential { rate } => -(-p).ln_1p() / rate,
            Normal { mean, sd } => mean + sd * special::normal_quantile_unchecked(p),
            LogNormal { mu, sigma } => (mu + sigma * special::normal_quantile_unchecked(p)).exp(),
            Weibull { shape, scale } => scale * (-(-p).ln_1p()).powf(1.0 / shape),
            LogWeibull { shape, scale } => (scale * (-(-p).ln_1p()).powf(1.0 / shape)).exp(),
            Pareto { shape } => (-(-p).ln_1p() / shape).exp(),
            ParetoGk { gamma, kappa } => kappa * (-gamma * (-p).ln_1p()).exp(),
            LogPareto { shape } => (-(-p).ln_1p() / shape).exp().exp(),
            LogGamma21 => {
                // no closed inverse; bisect the closed-form cdf
                let (mut lo, mut hi) = (1.0_f64, 1e12_f64);
                let mut mid = 0.5 * (lo + hi);
                for _ in 0..200 {
                    mid = 0.5 * (lo + hi);
                    let f = self.cdf(mid);
                    if (f - p).abs() <= 1e-10 || (hi - lo) <= f64::EPSILON * mid {
                        break;
                    }
                    if f < p {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                mid
            }
            Cauchy => (std::f64::consts::PI * (p - 0.5)).tan(),
            SepWlw => {
                let neg_ln_sf = -(-p).ln_1p();
                if neg_ln_sf <= 1.0 {
                    1.0 // the atom at the support threshold
                } else {
                    let r = neg_ln_sf.ln();
                    (r * r).exp()
                }
            }
            SepSqrtLog => {
                let r = (-p).ln_1p();
                (r * r).exp()
            }
            SepParetoHalf { gamma0 } => (-2.0 * gamma0 * (-p).ln_1p()).exp(),
        }
    }

    /// Draw `n` i.i.d. values by inverse transform on `stream`.
    ///
    /// Identical `(seed, stream)` always reproduces the same vector,
    /// independently of what other streams are consumed concurrently.
    pub fn sample(&self, stream: RngStream, n: usize) -> Vec<f64> {
        let mut rng = stream.rng();
        match self {
            // exp(E1 + E2) with E_i standard exponential has exactly the
            // target cdf 1 - (1 + ln x)/x; two uniforms per draw beats
            // 200 bisection steps
            LogGamma21 => (0..n)
                .map(|_| {
                    let u1: f64 = rng.sample(rand::distr::Open01);
                    let u2: f64 = rng.sample(rand::distr::Open01);
                    (-u1.ln() - u2.ln()).exp()
                })
                .collect(),
            _ => (0..n)
                .map(|_| self.quantile_unchecked(rng.sample(rand::distr::Open01)))
                .collect(),
        }
    }

    /// Validate parameters (used by the parser and config loaders).
    pub fn validate(&self) -> Result<(), DistError> {
        let bad = |value: f64, reason: &'static str| DistError::InvalidParameter {
            name: self.name().to_string(),
            value,
            reason,
        };
        let positive = |v: f64, what: &'static str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(bad(v, what))
            }
        };
        match *self {
            Exponential { rate } => positive(rate, "rate must be > 0"),
            Normal { mean, sd } => {
                if !mean.is_finite() {
                    return Err(bad(mean, "mean must be finite"));
                }
                positive(sd, "standard deviation must be > 0")
            }
            LogNormal { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(bad(mu, "mu must be finite"));
                }
                positive(sigma, "sigma must be > 0")
            }
            Weibull { shape, scale } | LogWeibull { shape, scale } => {
                positive(shape, "shape must be > 0")?;
                positive(scale, "scale must be > 0")
            }
            Pareto { shape } | LogPareto { shape } => positive(shape, "shape must be > 0"),
            ParetoGk { gamma, kappa } => {
                positive(gamma, "gamma must be > 0")?;
                positive(kappa, "kappa must be > 0")
            }
            SepParetoHalf { gamma0 } => positive(gamma0, "gamma0 must be > 0"),
            LogGamma21 | Cauchy | SepWlw | SepSqrtLog => Ok(()),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params = self.params();
        if params.is_empty() {
            return write!(f, "{}", self.name());
        }
        write!(f, "{}(", self.name())?;
        for (i, p) in params.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl FromStr for Distribution {
    type Err = DistError;

    /// Parse the text grammar `name(p1,...)`, e.g. `lognormal(0,1)`,
    /// `pareto(2)`, `cauchy`. Round-trips with `Display`.
    fn from_str(s: &str) -> Result<Self, DistError> {
        let s = s.trim();
        let (name, args): (&str, Vec<f64>) = match s.find('(') {
            None => (s, Vec::new()),
            Some(open) => {
                let name = s[..open].trim();
                let rest = &s[open + 1..];
                let close = rest
                    .rfind(')')
                    .ok_or_else(|| DistError::Malformed(s.to_string()))?;
                if !rest[close + 1..].trim().is_empty() {
                    return Err(DistError::Malformed(s.to_string()));
                }
                let inner = rest[..close].trim();
                let args = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|a| {
                            let a = a.trim();
                            a.parse::<f64>()
                                .ok()
                                .filter(|v| v.is_finite())
                                .ok_or_else(|| DistError::Malformed(s.to_string()))
                        })
                        .collect::<Result<Vec<f64>, _>>()?
                };
                (name, args)
            }
        };
        let arity = |expected: usize| -> Result<(), DistError> {
            if args.len() == expected {
                Ok(())
            } else {
                Err(DistError::WrongArity {
                    name: name.to_string(),
                    expected,
                    got: args.len(),
                })
            }
        };
        let d = match name {
            "exp" | "exponential" => {
                arity(1)?;
                Exponential { rate: args[0] }
            }
            "normal" => {
                arity(2)?;
                Normal {
                    mean: args[0],
                    sd: args[1],
                }
            }
            "lognormal" => {
                arity(2)?;
                LogNormal {
                    mu: args[0],
                    sigma: args[1],
                }
            }
            "weibull" => {
                arity(2)?;
                Weibull {
                    shape: args[0],
                    scale: args[1],
                }
            }
            "logweibull" => {
                arity(2)?;
                LogWeibull {
                    shape: args[0],
                    scale: args[1],
                }
            }
            "pareto" => {
                arity(1)?;
                Pareto { shape: args[0] }
            }
            "pareto_gk" => {
                arity(2)?;
                ParetoGk {
                    gamma: args[0],
                    kappa: args[1],
                }
            }
            "logpareto" => {
                arity(1)?;
                LogPareto { shape: args[0] }
            }
            "loggamma21" => {
                arity(0)?;
                LogGamma21
            }
            "cauchy" => {
                arity(0)?;
                Cauchy
            }
            "sep_wlw" => {
                arity(0)?;
                SepWlw
            }
            "sep_sqrtlog" => {
                arity(0)?;
                SepSqrtLog
            }
            "sep_pareto_half" => {
                arity(1)?;
                SepParetoHalf { gamma0: args[0] }
            }
            other => return Err(DistError::UnknownName(other.to_string())),
        };
        d.validate()?;
        Ok(d)
    }
}

impl serde::Serialize for Distribution {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
