//! Exact sampling and rare-event estimators for `P(Sₙ > N)`.
//!
//! Two estimators are provided:
//!
//! * [`naive_tail_estimate`] — the plain indicator average;
//! * [`bigjump_tail_estimate`] — a conditional estimator that samples
//!   `n − 1` summands and integrates the last one out analytically,
//!   conditioning on it being the largest. For heavy right tails one big
//!   jump drives the event, so this removes almost all of the variance.
//!
//! Both are reproducible: see [`stream`] for how trials map to RNG streams.
//! [`conv2_oracle`] gives a deterministic reference for `n = 2`.

mod conv;
pub mod stream;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use conv::{conv2_oracle, conv2_oracle_lower, CONV2_TOLERANCE};
pub use stream::{Moments, CHUNK_TRIALS, RNG_IDENTITY};

use crate::model::TailModel;
use crate::{Error, Result};

/// Minimum expected hit count before the naive estimator will run.
pub const MIN_EXPECTED_HITS: f64 = 10.0;

/// Left-tail weight above which the big-jump estimator warns.
pub const LEFT_SKEW_WARNING: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl EstimatorResult {
    fn from_moments(m: Moments, seed: u64, warning: Option<String>) -> Self {
        EstimatorResult {
            estimate: m.mean,
            std_error: m.std_error(),
            trials: m.count,
            seed,
            rng: RNG_IDENTITY.to_string(),
            warning,
        }
    }

    pub fn relative_std_error(&self) -> f64 {
        self.std_error / self.estimate.abs()
    }
}

/// One exact draw of `X₁`.
pub fn sample_x<R: Rng + ?Sized>(model: &TailModel, rng: &mut R) -> f64 {
    model.sample(rng)
}

/// First-order guess `n·P(X > N)` for the cost gate (capped at one).
pub fn expected_tail(model: &TailModel, n: u64, big_n: f64) -> f64 {
    (n as f64 * model.tail_upper_extended(big_n)).min(1.0)
}

fn check_args(n: u64, trials: u64, big_n: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if !big_n.is_finite() {
        return Err(Error::NonFinite(big_n));
    }
    Ok(())
}

/// Fraction of trials with `X₁ + … + Xₙ > N`.
///
/// Refuses with [`Error::CostGate`] when fewer than [`MIN_EXPECTED_HITS`]
/// hits are expected, unless `force` is set.
pub fn naive_tail_estimate(
    model: &TailModel,
    n: u64,
    big_n: f64,
    trials: u64,
    seed: u64,
    force: bool,
) -> Result<EstimatorResult> {
    check_args(n, trials, big_n)?;
    let hits = expected_tail(model, n, big_n) * trials as f64;
    if hits < MIN_EXPECTED_HITS && !force {
        return Err(Error::CostGate(format!(
            "about {hits:.2} hits expected from {trials} trials at n={n}, N={big_n}; pass force to run anyway"
        )));
    }
    let m = stream::run_trials(trials, seed, |rng| {
        let mut s = 0.0;
        for _ in 0..n {
            s += model.sample(rng);
        }
        if s > big_n {
            1.0
        } else {
            0.0
        }
    });
    Ok(EstimatorResult::from_moments(m, seed, None))
}

/// Conditional single-big-jump estimator.
///
/// Each trial draws `X₁ … X_{n−1}` with sum `S` and maximum `M` and
/// returns `n·P(X > max(N − S, M))`. By exchangeability this is unbiased
/// for `P(Sₙ > N)`; ties for the maximum have probability zero because the
/// law has no atoms, so no tie-breaking is needed. Single terms may exceed
/// one, the mean cannot.
pub fn bigjump_tail_estimate(
    model: &TailModel,
    n: u64,
    big_n: f64,
    trials: u64,
    seed: u64,
) -> Result<EstimatorResult> {
    check_args(n, trials, big_n)?;
    if n < 2 {
        return Err(Error::Domain("the big-jump estimator needs n >= 2".into()));
    }
    let warning = (model.q() >= LEFT_SKEW_WARNING).then(|| {
        format!(
            "left tail weight q = {} is close to one; the big-jump estimator gains little variance here",
            model.q()
        )
    });
    let nf = n as f64;
    let m = stream::run_trials(trials, seed, |rng| {
        let mut s = 0.0;
        let mut max = f64::NEG_INFINITY;
        for _ in 0..n - 1 {
            let x = model.sample(rng);
            s += x;
            max = max.max(x);
        }
        nf * model.tail_upper_extended((big_n - s).max(max))
    });
    Ok(EstimatorResult::from_moments(m, seed, warning))
}
