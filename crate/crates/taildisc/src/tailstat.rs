//! The Hill-type tail statistic, the Hill estimator, and the rejection
//! rules built on them.
//!
//! All operations are pure functions of their inputs and safe to call
//! concurrently.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::Distribution;
use crate::special;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatError {
    #[error("sample must contain at least 2 values, got {0}")]
    SampleTooSmall(usize),
    #[error("sample contains NaN at index {0}")]
    NanInSample(usize),
    #[error("values not nondecreasing at index {0}")]
    NotSorted(usize),
    #[error("k = {k} out of range for sample size n = {n} (need 1 <= k <= n-1)")]
    KOutOfRange { k: usize, n: usize },
    #[error(
        "support violation: X_(n-k) = {value} does not exceed the reference support threshold {support_min}; \
         the statistic's theory conditions on the tail above X_(n-k)"
    )]
    SupportViolation { value: f64, support_min: f64 },
    #[error("baseline order statistic X_(n-k) = {0} is not finite")]
    NonfiniteBaseline(f64),
    #[error("Hill estimator needs a positive baseline, got X_(n-k) = {0}")]
    NonpositiveBaseline(f64),
    #[error("significance level {0} outside the open interval (0, 1)")]
    InvalidAlpha(f64),
    #[error("probability {0} outside the open interval (0, 1)")]
    InvalidProbability(f64),
}

/// A sample held in nondecreasing order. Ties are allowed and keep their
/// stable order; the statistics only read values, so ties are harmless.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sort and wrap a raw sample. Rejects NaN; infinities are kept (a
    /// super-heavy draw can genuinely overflow f64).
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatError> {
        if values.len() < 2 {
            return Err(StatError::SampleTooSmall(values.len()));
        }
        if let Some(i) = values.iter().position(|v| v.is_nan()) {
            return Err(StatError::NanInSample(i));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Wrap data that is already nondecreasing (verified).
    pub fn from_sorted(values: Vec<f64>) -> Result<Self, StatError> {
        if values.len() < 2 {
            return Err(StatError::SampleTooSmall(values.len()));
        }
        for i in 0..values.len() {
            if values[i].is_nan() {
                return Err(StatError::NanInSample(i));
            }
            if i > 0 && values[i] < values[i - 1] {
                return Err(StatError::NotSorted(i));
            }
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Kahan-Babuska (Neumaier) compensated accumulator; keeps the statistic
/// reproducible to ~1e-15 regardless of platform FMA quirks for k up to 1e6.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean log-survival gap of the top `k` order statistics over the baseline
/// `X_(n-k)`, measured in the reference distribution's tail scale:
///
/// ```text
/// R = ln(1 - F0(X_(n-k))) - (1/k) * sum of ln(1 - F0(X_(i))), i > n-k
/// ```
///
/// Under a sample whose tail matches `f0`, `k * R` is a sum of `k`
/// standard exponentials. Always nonnegative; `+inf` when a retained value
/// overflows the reference tail scale.
///
/// Errors if `k` is out of range or the baseline does not sit strictly
/// inside `f0`'s support (the theory conditions on the tail above it).
pub fn r_statistic(sample: &SortedSample, k: usize, f0: &Distribution) -> Result<f64, StatError> {
    let values = sample.values();
    let n = values.len();
    if k < 1 || k > n - 1 {
        return Err(StatError::KOutOfRange { k, n });
    }
    let q = values[n - 1 - k];
    if !q.is_finite() {
        return Err(StatError::NonfiniteBaseline(q));
    }
    let support_min = f0.support_min();
    if q <= support_min {
        return Err(StatError::SupportViolation {
            value: q,
            support_min,
        });
    }
    let wq = f0.log_survival(q);
    let mut acc = CompensatedSum::default();
    for &x in &values[n - k..] {
        // log_survival is nonincreasing, so each gap is >= 0 up to rounding
        acc.add((wq - f0.log_survival(x)).max(0.0));
    }
    Ok(acc.value() / k as f64)
}

/// Classical Hill estimator: mean log-spacing of the top `k` order
/// statistics over `X_(n-k)`.
pub fn hill_estimator(sample: &SortedSample, k: usize) -> Result<f64, StatError> {
    let values = sample.values();
    let n = values.len();
    if k < 1 || k > n - 1 {
        return Err(StatError::KOutOfRange { k, n });
    }
    let q = values[n - 1 - k];
    if !q.is_finite() {
        return Err(StatError::NonfiniteBaseline(q));
    }
    if q <= 0.0 {
        return Err(StatError::NonpositiveBaseline(q));
    }
    let lq = q.ln();
    let mut acc = CompensatedSum::default();
    for &x in &values[n - k..] {
        acc.add((x.ln() - lq).max(0.0));
    }
    Ok(acc.value() / k as f64)
}

/// Standard normal quantile: `|Phi(result) - p| <= 1e-9` (in practice
/// near machine precision), with exact odd symmetry
/// `quantile(1 - p) = -quantile(p)`.
pub fn normal_quantile(p: f64) -> Result<f64, StatError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(StatError::InvalidProbability(p));
    }
    Ok(special::normal_quantile_unchecked(p))
}

/// Which rejection rule to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// Null: the sample tail is on the light side of `f0`; reject when
    /// `R > 1 + u_{1-alpha}/sqrt(k)`.
    LightVsHeavy,
    /// Null: the sample tail is on the heavy side of `f0`; reject when
    /// `R < 1 + u_alpha/sqrt(k)`.
    HeavyVsLight,
    /// Null: the sample shares `f0`'s tail; reject when `R` leaves
    /// `(1 + u_{alpha/2}/sqrt(k), 1 + u_{1-alpha/2}/sqrt(k))`.
    TwoSided,
}

impl TestKind {
    pub const ALL: [TestKind; 3] = [
        TestKind::LightVsHeavy,
        TestKind::HeavyVsLight,
        TestKind::TwoSided,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TestKind::LightVsHeavy => "light_vs_heavy",
            TestKind::HeavyVsLight => "heavy_vs_light",
            TestKind::TwoSided => "two_sided",
        }
    }
}

impl std::fmt::Display for TestKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "light_vs_heavy" => Ok(TestKind::LightVsHeavy),
            "heavy_vs_light" => Ok(TestKind::HeavyVsLight),
            "two_sided" => Ok(TestKind::TwoSided),
            other => Err(format!(
                "unknown test kind `{other}` (expected light_vs_heavy, heavy_vs_light or two_sided)"
            )),
        }
    }
}

/// Outcome of one tail test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailTestReport {
    /// The statistic `R_{k,n}`.
    pub r: f64,
    /// Normalized statistic `sqrt(k) * (R - 1)`.
    pub z: f64,
    pub k: usize,
    pub n: usize,
    pub alpha: f64,
    pub kind: TestKind,
    /// Lower rejection threshold on the `R` scale, if the rule has one.
    pub lower: Option<f64>,
    /// Upper rejection threshold on the `R` scale, if the rule has one.
    pub upper: Option<f64>,
    pub reject: bool,
    /// Normal tail probability of `z` under the null (two-sided reports
    /// twice the smaller tail), clamped into (0, 1).
    pub p_value: f64,
}

fn clamp_p(p: f64) -> f64 {
    p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

/// Run one rejection rule. Thresholds use the exact oddness
/// `u_{1-a} = -u_a`, so mirrored rules reflect about 1 exactly.
pub fn test_tail(
    sample: &SortedSample,
    k: usize,
    f0: &Distribution,
    alpha: f64,
    kind: TestKind,
) -> Result<TailTestReport, StatError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatError::InvalidAlpha(alpha));
    }
    let r = r_statistic(sample, k, f0)?;
    let sqrt_k = (k as f64).sqrt();
    let z = sqrt_k * (r - 1.0);
    let phi_upper = special::ln_normal_sf(z).exp(); // P(Z > z)
    let phi_lower = special::ln_normal_sf(-z).exp(); // P(Z < z)
    let (lower, upper, reject, p_value) = match kind {
        TestKind::LightVsHeavy => {
            let u = -special::normal_quantile_unchecked(alpha); // u_{1-alpha}
            let hi = 1.0 + u / sqrt_k;
            (None, Some(hi), r > hi, clamp_p(phi_upper))
        }
        TestKind::HeavyVsLight => {
            let u = special::normal_quantile_unchecked(alpha); // u_alpha < 0
            let lo = 1.0 + u / sqrt_k;
            (Some(lo), None, r < lo, clamp_p(phi_lower))
        }
        TestKind::TwoSided => {
            let u = special::normal_quantile_unchecked(alpha / 2.0); // < 0
            let lo = 1.0 + u / sqrt_k;
            let hi = 1.0 - u / sqrt_k;
            (
                Some(lo),
                Some(hi),
                r < lo || r > hi,
                clamp_p(2.0 * phi_upper.min(phi_lower)),
            )
        }
    };
    Ok(TailTestReport {
        r,
        z,
        k,
        n: sample.len(),
        alpha,
        kind,
        lower,
        upper,
        reject,
        p_value,
    })
}

/// Reject the light-side null when `R` exceeds `1 + u_{1-alpha}/sqrt(k)`.
pub fn test_light_vs_heavy(
    sample: &SortedSample,
    k: usize,
    f0: &Distribution,
    alpha: f64,
) -> Result<TailTestReport, StatError> {
    test_tail(sample, k, f0, alpha, TestKind::LightVsHeavy)
}

/// Reject the heavy-side null when `R` falls below `1 + u_alpha/sqrt(k)`.
pub fn test_heavy_vs_light(
    sample: &SortedSample,
    k: usize,
    f0: &Distribution,
    alpha: f64,
) -> Result<TailTestReport, StatError> {
    test_tail(sample, k, f0, alpha, TestKind::HeavyVsLight)
}

/// Reject the simple tail null when `R` leaves the two-sided interval.
pub fn test_two_sided(
    sample: &SortedSample,
    k: usize,
    f0: &Distribution,
    alpha: f64,
) -> Result<TailTestReport, StatError> {
    test_tail(sample, k, f0, alpha, TestKind::TwoSided)
}

/// The `k = floor(5 ln n)` convenience rule. A default, never imposed.
pub fn default_k(n: usize) -> usize {
    ((5.0 * (n as f64).ln()).floor() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Distribution, RngStream};

    fn exp1() -> Distribution {
        Distribution::Exponential { rate: 1.0 }
    }

    #[test]
    fn sorted_sample_construction() {
        assert!(SortedSample::new(vec![1.0]).is_err());
        assert!(SortedSample::new(vec![1.0, f64::NAN]).is_err());
        let s = SortedSample::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[1.0, 2.0, 3.0]);
        assert!(SortedSample::from_sorted(vec![1.0, 0.5]).is_err());
        assert!(SortedSample::from_sorted(vec![1.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn r_statistic_examples() {
        // exponential reference turns R into the mean excess over the baseline
        let s = SortedSample::new(vec![1.0, 2.0, 3.0]).unwrap();
        let r = r_statistic(&s, 2, &exp1()).unwrap();
        assert!((r - 1.5).abs() < 1e-15);

        // Pareto reference: R = 1.5 ln 2 for q=2, top {4, 8}
        let s = SortedSample::new(vec![2.0, 4.0, 8.0]).unwrap();
        let f0 = Distribution::ParetoGk {
            gamma: 1.0,
            kappa: 1.0,
        };
        assert!((r_statistic(&s, 2, &f0).unwrap() - 1.0397207708399179).abs() < 1e-14);

        // single-term case
        let s = SortedSample::new(vec![2.0, 5.0]).unwrap();
        assert!((r_statistic(&s, 1, &exp1()).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn r_statistic_errors() {
        let s = SortedSample::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            r_statistic(&s, 0, &exp1()),
            Err(StatError::KOutOfRange { .. })
        ));
        assert!(matches!(
            r_statistic(&s, 3, &exp1()),
            Err(StatError::KOutOfRange { .. })
        ));

        // baseline at or below the reference support threshold
        let f0 = Distribution::Pareto { shape: 1.0 };
        let s = SortedSample::new(vec![0.9, 2.0, 3.0]).unwrap();
        match r_statistic(&s, 2, &f0) {
            Err(StatError::SupportViolation { value, support_min }) => {
                assert_eq!(value, 0.9);
                assert_eq!(support_min, 1.0);
            }
            other => panic!("expected support violation, got {other:?}"),
        }

        let s = SortedSample::new(vec![1.0, f64::INFINITY, f64::INFINITY]).unwrap();
        assert!(matches!(
            r_statistic(&s, 1, &exp1()),
            Ok(v) if v.is_infinite()
        ));
        assert!(matches!(
            r_statistic(&s, 2, &exp1()),
            Err(StatError::NonfiniteBaseline(_))
        ));
    }

    #[test]
    fn r_is_nonnegative_and_ignores_lower_values() {
        let d = Distribution::LogNormal { mu: 0.0, sigma: 1.0 };
        let f0 = Distribution::SepSqrtLog;
        let xs = d.sample(RngStream::new(3, 0), 500);
        let s = SortedSample::new(xs.clone()).unwrap();
        let r = r_statistic(&s, 50, &f0).unwrap();
        assert!(r >= 0.0);

        // perturb everything strictly below X_(n-k): R must not move
        let mut ys = s.values().to_vec();
        for y in ys.iter_mut().take(500 - 51) {
            *y *= 0.5;
        }
        let s2 = SortedSample::new(ys).unwrap();
        assert_eq!(r_statistic(&s2, 50, &f0).unwrap(), r);
    }

    #[test]
    fn hill_examples() {
        let s = SortedSample::new(vec![2.0, 4.0, 8.0]).unwrap();
        assert!((hill_estimator(&s, 2).unwrap() - 1.0397207708399179).abs() < 1e-14);

        // equal-ratio geometric values with ratio e: mean spacing (3+2+1)/3
        let e = std::f64::consts::E;
        let s = SortedSample::new(vec![1.0, e, e * e, e * e * e]).unwrap();
        assert!((hill_estimator(&s, 3).unwrap() - 2.0).abs() < 1e-12);

        let s = SortedSample::new(vec![-1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            hill_estimator(&s, 2),
            Err(StatError::NonpositiveBaseline(_))
        ));
    }

    #[test]
    fn pareto_hill_identity() {
        // R with a Pareto reference equals hill/gamma per sample, to 1e-12
        let mut rng_seed = 0u64;
        for _ in 0..20 {
            rng_seed += 1;
            let gamma = 0.2 + (rng_seed as f64 * 0.37) % 2.0;
            let kappa = 0.5 + (rng_seed as f64 * 0.11) % 3.0;
            let d = Distribution::ParetoGk { gamma, kappa };
            let xs = d.sample(RngStream::new(rng_seed, 0), 400);
            let s = SortedSample::new(xs).unwrap();
            let k = 40;
            let f0 = Distribution::ParetoGk { gamma, kappa };
            let r = r_statistic(&s, k, &f0).unwrap();
            let h = hill_estimator(&s, k).unwrap();
            assert!(
                (r - h / gamma).abs() <= 1e-12,
                "identity broke: {r} vs {}",
                h / gamma
            );
        }
    }

    #[test]
    fn monotone_invariance_under_exp_transform() {
        // exp() maps an exponential-reference problem onto a Pareto-reference
        // one; R depends on the data only through F0 values, so it is invariant
        let d = Distribution::Weibull { shape: 2.0, scale: 1.0 };
        let xs = d.sample(RngStream::new(11, 2), 300);
        let s = SortedSample::new(xs.clone()).unwrap();
        let r1 = r_statistic(&s, 30, &exp1()).unwrap();

        let ys: Vec<f64> = s.values().iter().map(|x| x.exp()).collect();
        let s2 = SortedSample::from_sorted(ys).unwrap();
        let r2 = r_statistic(&s2, 30, &Distribution::Pareto { shape: 1.0 }).unwrap();
        assert!((r1 - r2).abs() <= 1e-12, "{r1} vs {r2}");

        // same for normal -> lognormal
        let d = Distribution::Normal { mean: 0.0, sd: 1.0 };
        let xs = d.sample(RngStream::new(12, 4), 300);
        let s = SortedSample::new(xs).unwrap();
        let f0n = Distribution::Normal { mean: 0.0, sd: 1.0 };
        let r1 = r_statistic(&s, 30, &f0n).unwrap();
        let ys: Vec<f64> = s.values().iter().map(|x| x.exp()).collect();
        let s2 = SortedSample::from_sorted(ys).unwrap();
        let f0ln = Distribution::LogNormal { mu: 0.0, sigma: 1.0 };
        let r2 = r_statistic(&s2, 30, &f0ln).unwrap();
        assert!((r1 - r2).abs() <= 1e-12, "{r1} vs {r2}");
    }

    #[test]
    fn normal_quantile_contract() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((normal_quantile(0.975).unwrap() - 1.9599639845400542).abs() < 1e-9);
        assert!((normal_quantile(0.05).unwrap() + 1.6448536269514722).abs() < 1e-9);
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
        // exact odd symmetry on the reflected half
        let mut a = 0.5_f64;
        while a < 1.0 {
            let b = 1.0 - a; // exact by Sterbenz
            assert_eq!(
                normal_quantile(b).unwrap(),
                -normal_quantile(a).unwrap(),
                "symmetry at {a}"
            );
            a += 0.007;
        }
    }

    fn synthetic_with_r(r: f64, k: usize) -> SortedSample {
        // exponential reference, baseline 1.0, all top values at 1 + r
        let mut v = vec![1.0];
        v.extend(std::iter::repeat(1.0 + r).take(k));
        SortedSample::from_sorted(v).unwrap()
    }

    #[test]
    fn light_vs_heavy_examples() {
        let s = synthetic_with_r(1.5, 100);
        let rep = test_light_vs_heavy(&s, 100, &exp1(), 0.05).unwrap();
        assert!((rep.upper.unwrap() - 1.1644853626951472).abs() < 1e-7);
        assert!(rep.reject);
        assert!((rep.z - 5.0).abs() < 1e-9);

        let s = synthetic_with_r(1.0, 50);
        let rep = test_light_vs_heavy(&s, 50, &exp1(), 0.2).unwrap();
        assert!(!rep.reject, "R = 1 sits below any positive margin");

        let s = synthetic_with_r(1.2, 25);
        let rep = test_light_vs_heavy(&s, 25, &exp1(), 0.05).unwrap();
        assert!((rep.upper.unwrap() - 1.3289707253902945).abs() < 1e-7);
        assert!(!rep.reject);
    }

    #[test]
    fn heavy_vs_light_examples() {
        let s = synthetic_with_r(0.8, 100);
        let rep = test_heavy_vs_light(&s, 100, &exp1(), 0.05).unwrap();
        assert!((rep.lower.unwrap() - 0.8355146373048527).abs() < 1e-7);
        assert!(!rep.reject);

        let s = synthetic_with_r(0.5, 100);
        let rep = test_heavy_vs_light(&s, 100, &exp1(), 0.05).unwrap();
        assert!(rep.reject);
    }

    #[test]
    fn mirror_property() {
        // heavy-side rule at R mirrors the light-side rule at 2 - R, with
        // thresholds reflected about 1 exactly
        for &(r, k) in &[(0.7, 10), (0.9, 40), (1.05, 7), (1.4, 100)] {
            let heavy = test_heavy_vs_light(&synthetic_with_r(r, k), k, &exp1(), 0.05).unwrap();
            let light =
                test_light_vs_heavy(&synthetic_with_r(2.0 - r, k), k, &exp1(), 0.05).unwrap();
            assert_eq!(heavy.reject, light.reject, "at R = {r}, k = {k}");
            assert_eq!(
                heavy.lower.unwrap() - 1.0,
                -(light.upper.unwrap() - 1.0),
                "thresholds must reflect exactly"
            );
        }
    }

    #[test]
    fn two_sided_examples() {
        for alpha in [0.01, 0.05, 0.2, 0.5] {
            let s = synthetic_with_r(1.0, 30);
            let rep = test_two_sided(&s, 30, &exp1(), alpha).unwrap();
            assert!(!rep.reject, "R = 1 is the interval center");
        }
        let s = synthetic_with_r(1.25, 100);
        let rep = test_two_sided(&s, 100, &exp1(), 0.05).unwrap();
        assert!((rep.lower.unwrap() - 0.8040036015459946).abs() < 1e-7);
        assert!((rep.upper.unwrap() - 1.1959963984540054).abs() < 1e-7);
        assert!(rep.reject);
        assert!(rep.p_value > 0.0 && rep.p_value < 1.0);
    }

    #[test]
    fn report_invariants() {
        let d = Distribution::LogPareto { shape: 1.0 };
        let xs = d.sample(RngStream::new(21, 9), 300);
        let s = SortedSample::new(xs).unwrap();
        for kind in TestKind::ALL {
            let rep = test_tail(&s, 30, &Distribution::SepSqrtLog, 0.05, kind).unwrap();
            assert!((rep.z - (30.0_f64).sqrt() * (rep.r - 1.0)).abs() <= 1e-12 * rep.z.abs().max(1.0));
            assert!(rep.p_value > 0.0 && rep.p_value < 1.0);
            assert_eq!(rep.kind, kind);
        }
        assert!(matches!(
            test_tail(&s, 30, &Distribution::SepSqrtLog, 1.0, TestKind::TwoSided),
            Err(StatError::InvalidAlpha(_))
        ));
    }

    #[test]
    fn default_k_rule() {
        assert_eq!(default_k(100), 23); // floor(5 ln 100) = floor(23.02)
        assert_eq!(default_k(5000), 42);
        assert_eq!(default_k(2), 3); // floor(5 ln 2) = 3
    }

    #[test]
    fn test_kind_round_trip() {
        for kind in TestKind::ALL {
            let s = kind.to_string();
            assert_eq!(s.parse::<TestKind>().unwrap(), kind);
        }
        assert!("sideways".parse::<TestKind>().is_err());
    }
}
