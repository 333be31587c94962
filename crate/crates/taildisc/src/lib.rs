//! Discrimination between classes of distribution tails from the top-k
//! order statistics of a sample.
//!
//! The central object is a Hill-type statistic: fix a reference ("separating")
//! distribution `F0`, take the largest `k + 1` order statistics
//! `X_(n-k) <= ... <= X_(n)` of an i.i.d. sample, and average the
//! log-survival gaps
//!
//! ```text
//! R = ln(1 - F0(X_(n-k))) - (1/k) * sum_{i=n-k+1..n} ln(1 - F0(X_(i)))
//! ```
//!
//! When the sample itself comes from `F0` (or any law sharing its tail),
//! `k * R` is a sum of `k` independent standard exponentials, so
//! `z = sqrt(k) * (R - 1)` is asymptotically standard normal. Samples with
//! tails heavier than `F0` push `R` above 1, lighter tails pull it below,
//! which yields one- and two-sided rejection rules.
//!
//! The crate provides:
//!
//! - [`distributions`]: a catalog of tail models and separating functions
//!   with numerically stable log-survival functions, quantiles, and seeded
//!   inverse-transform sampling.
//! - [`tailstat`]: the statistic, the Hill estimator, a high-accuracy normal
//!   quantile, and the three rejection rules.
//! - [`conditions`]: numerical certification of the separability conditions
//!   (B-condition, C-condition, delta-domination) on log-spaced grids.
//! - [`simulate`]: a seeded, optionally data-parallel Monte Carlo harness
//!   for rejection-rate experiments, trajectories, k-sweeps, and the two
//!   standard experiment tables.
//! - [`gof`]: Kolmogorov-Smirnov helpers used by the verification suites.
//!
//! Monte Carlo runs are deterministic: replication `r` of a cell always
//! consumes its own counter-based RNG stream, so results do not depend on
//! the number of worker threads. Parallel execution is enabled by the
//! `parallel` feature (on by default); without it the harness runs the same
//! computation sequentially.

pub mod conditions;
pub mod distributions;
pub mod gof;
pub mod simulate;
mod special;
pub mod tailstat;

pub use conditions::{ConditionReport, Grid, Tail};
pub use distributions::{DistError, Distribution, RngStream};
pub use simulate::{
    ExperimentConfig, KRule, KSweepResult, RejectionSummary, SamplingMode, SimError, TableId,
    TableResult, TrajectoryResult,
};
pub use tailstat::{SortedSample, StatError, TailTestReport, TestKind};
