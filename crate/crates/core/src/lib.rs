//! Numerical machinery for error rates in large deviations of i.i.d. sums
//! whose law lies in the domain of attraction of a non-symmetric 1-stable
//! law.
//!
//! The pipeline runs bottom-up:
//!
//! * [`model`] — the exact two-sided Pareto-type law of `X₁` and its
//!   norming sequences.
//! * [`charfn`] — closed-form characteristic function `Ψ`, the regularised
//!   symbol `Θ = (Ψ−1)/(it)`, the telescoped sum `F(t,n)` and small-`t`
//!   expansion constants.
//! * [`smoother`] — a compactly supported smoothing characteristic
//!   function `ψ_Y` (a cardinal B-spline) and tail bounds for `Y`.
//! * [`quadrature`] — Gauss–Kronrod panels, adaptive integration,
//!   log-singular inner windows and period-paired oscillatory blocks.
//! * [`inversion`] — smoothed Fourier inversion of tail probabilities and
//!   the `I = I₁ + I₂ + I₃` decomposition.
//! * [`montecarlo`] — exact samplers, naive and single-big-jump estimators
//!   and a deterministic two-fold convolution oracle.
//! * [`harness`] — experiment grids, scaling fits and report files.

pub mod charfn;
pub mod error;
pub mod harness;
pub mod inversion;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod smoother;

pub use error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;
