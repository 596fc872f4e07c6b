//! Deterministic two-fold convolution: `P(X₁+X₂ > N)` by quadrature.

use crate::model::TailModel;
use crate::quadrature::adaptive_integral;
use crate::{Error, Result};

/// Absolute accuracy promised by the oracle.
pub const CONV2_TOLERANCE: f64 = 1e-10;

/// `P(X₁ + X₂ > N) = ∫ f(y)·P(X > N − y) dy`.
pub fn conv2_oracle(model: &TailModel, big_n: f64) -> Result<f64> {
    let x0 = model.x0();
    let cuts = [-x0, x0, big_n - x0, big_n + x0];
    convolve(model, &cuts, big_n, |y| model.tail_upper_extended(big_n - y))
}

/// Mirrored form `P(X₁ + X₂ < −N) = ∫ f(y)·P(X < −N − y) dy`.
pub fn conv2_oracle_lower(model: &TailModel, big_n: f64) -> Result<f64> {
    let x0 = model.x0();
    let cuts = [-x0, x0, -big_n - x0, -big_n + x0];
    convolve(model, &cuts, big_n, |y| model.cdf(-big_n - y))
}

fn convolve<G: Fn(f64) -> f64>(
    model: &TailModel,
    kinks: &[f64],
    big_n: f64,
    tail: G,
) -> Result<f64> {
    if !big_n.is_finite() {
        return Err(Error::NonFinite(big_n));
    }
    // Kinks of either factor, plus a few scale points so no panel spans
    // both the bulk and the far tail.
    let scale = big_n.abs().max(1.0);
    let mut cuts: Vec<f64> = kinks.to_vec();
    cuts.extend([-4.0 * scale, -2.0 * scale, 2.0 * scale, 4.0 * scale]);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![f64::NEG_INFINITY];
    edges.extend(cuts);
    edges.push(f64::INFINITY);

    let integrand = |y: f64| model.density(y) * tail(y);
    let mut total = 0.0;
    let mut err = 0.0;
    for w in edges.windows(2) {
        let r = adaptive_integral(integrand, w[0], w[1], 1e-13)?;
        total += r.value.re;
        err += r.abs_error_estimate;
    }
    if err > CONV2_TOLERANCE {
        return Err(Error::Nonconvergence(format!(
            "two-fold convolution error estimate {err:e} exceeds {CONV2_TOLERANCE:e}"
        )));
    }
    Ok(total)
}
