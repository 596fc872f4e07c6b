//! Characteristic function of the canonical law and derived symbols.
//!
//! For `t > 0` and `c = p − q` the canonical model has
//!
//! ```text
//! Ψ(t) = [cos t − t(π/2 − Si t)] + i c [sin t − t Ci t]
//! ```
//!
//! and the other half-line follows from `Ψ(−t) = conj Ψ(t)`.

mod expansion;
mod geometric;
mod oracle;
mod sici;

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::model::TailModel;
use crate::{Error, Result};

pub use expansion::{expansion_coeffs, regress_constants, ExpansionCoeffs, FittedConstants};
pub use geometric::{direct_sums, telescoped_sums, DIRECT_THRESHOLD};
pub use oracle::psi_by_quadrature;
pub use sici::sin_cos_integrals;
use sici::sici_unchecked;

/// Value and first two derivatives of a function of `t`.
///
/// A derivative is `None` where it does not exist (for `Ψ` at `t = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharFnJet {
    pub value: Complex64,
    pub d1: Option<Complex64>,
    pub d2: Option<Complex64>,
}

impl CharFnJet {
    pub fn d1_or_err(&self) -> Result<Complex64> {
        self.d1.ok_or(Error::Singular)
    }

    pub fn d2_or_err(&self) -> Result<Complex64> {
        self.d2.ok_or(Error::Singular)
    }
}

/// Applies `f(−t) = conj f(t)` to a jet computed at `|t|`.
#[inline]
fn reflect(value: Complex64, d1: Complex64, d2: Complex64, negative: bool) -> (Complex64, Complex64, Complex64) {
    if negative {
        (value.conj(), -d1.conj(), d2.conj())
    } else {
        (value, d1, d2)
    }
}

fn require_canonical(model: &TailModel) -> Result<()> {
    if model.is_canonical() {
        Ok(())
    } else {
        Err(Error::InvalidModel(
            "closed-form characteristic function needs the canonical model (x0 = 1, c1 = 0)".into(),
        ))
    }
}

/// `(Ψ, Ψ′, Ψ″)` at `t ≠ 0`, no validation.
#[inline]
pub(crate) fn psi_parts(c: f64, t: f64) -> (Complex64, Complex64, Complex64) {
    let a = t.abs();
    let (si, ci) = sici_unchecked(a);
    let (s, co) = a.sin_cos();
    let tail_si = FRAC_PI_2 - si;
    let v = Complex64::new(co - a * tail_si, c * (s - a * ci));
    let d1 = Complex64::new(-tail_si, -c * ci);
    let d2 = Complex64::new(s / a, -c * co / a);
    reflect(v, d1, d2, t < 0.0)
}

/// `Ψ` and its derivatives for the canonical model.
pub fn psi_exact(model: &TailModel, t: f64) -> Result<CharFnJet> {
    require_canonical(model)?;
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    if t == 0.0 {
        return Ok(CharFnJet { value: Complex64::new(1.0, 0.0), d1: None, d2: None });
    }
    let (v, d1, d2) = psi_parts(model.p() - model.q(), t);
    Ok(CharFnJet { value: v, d1: Some(d1), d2: Some(d2) })
}

/// Below this `|t|` the imaginary part of `Θ″` is summed as a series.
const THETA_SERIES_LIMIT: f64 = 0.5;

/// `(t sin t − 2(1 − cos t)) / t³` without cancellation.
fn theta2_im_kernel(t: f64) -> f64 {
    if t < THETA_SERIES_LIMIT {
        // Σ_{m≥2} (−1)^{m−1} (2m−2)/(2m)! · t^{2m−3}
        let t2 = t * t;
        let mut fact = 24.0; // (2m)! at m = 2
        let mut pow = t; // t^{2m−3}
        let mut sum = 0.0;
        for m in 2..14 {
            let mf = m as f64;
            let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
            sum += sign * (2.0 * mf - 2.0) / fact * pow;
            fact *= (2.0 * mf + 1.0) * (2.0 * mf + 2.0);
            pow *= t2;
        }
        sum
    } else {
        let h = (0.5 * t).sin();
        (t * t.sin() - 4.0 * h * h) / (t * t * t)
    }
}

/// `(Θ, Θ′, Θ″)` at `t ≠ 0`, no validation.
#[inline]
pub(crate) fn theta_parts(c: f64, t: f64) -> (Complex64, Complex64, Complex64) {
    let a = t.abs();
    let (si, ci) = sici_unchecked(a);
    let (s, co) = a.sin_cos();
    let h = (0.5 * a).sin();
    let one_m_cos = 2.0 * h * h;
    let a2 = a * a;
    let v = Complex64::new(c * (s / a - ci), -(-one_m_cos / a - FRAC_PI_2 + si));
    let d1 = Complex64::new(-c * s / a2, -one_m_cos / a2);
    let d2 = Complex64::new(-c * (a * co - 2.0 * s) / (a2 * a), -theta2_im_kernel(a));
    reflect(v, d1, d2, t < 0.0)
}

/// `Θ = (Ψ − 1)/(it)` and its derivatives for the canonical model.
pub fn theta_jet(model: &TailModel, t: f64) -> Result<CharFnJet> {
    require_canonical(model)?;
    if t == 0.0 {
        return Err(Error::Domain("Θ is singular at t = 0".into()));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    let (v, d1, d2) = theta_parts(model.p() - model.q(), t);
    Ok(CharFnJet { value: v, d1: Some(d1), d2: Some(d2) })
}

/// `F(t,n) = Σ_{k=1}^{n−1} (Ψ(t)^k − 1)` and `F′(t,n)`.
///
/// At `t = 0`, `F = 0` and `F′` is reported as zero (its limit along
/// `t → 0` does not exist; callers never evaluate it there).
pub fn f_jet(model: &TailModel, t: f64, n: u64) -> Result<(Complex64, Complex64)> {
    require_canonical(model)?;
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    if t == 0.0 || n == 1 {
        return Ok((zero, zero));
    }
    let (psi, d1, _) = psi_parts(model.p() - model.q(), t);
    let (f, s1) = telescoped_sums(psi, n);
    Ok((f, d1 * s1))
}

/// `|zⁿ − nz − [(z−1)·F(z,n) − (n−1)]|`, an algebraic identity that should
/// vanish up to rounding.
pub fn decomposition_residual(z: Complex64, n: u64) -> Result<f64> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain(format!("|z| = {} exceeds 1", z.norm())));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let nf = n as f64;
    let (f, _) = telescoped_sums(z, n);
    let lhs = z.powu(n as u32) - z * nf;
    let rhs = (z - 1.0) * f - (nf - 1.0);
    Ok((lhs - rhs).norm())
}
