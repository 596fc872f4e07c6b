//! `Ψ` by direct quadrature of the density. Works for every model in the
//! family (including the perturbed one) and serves as an independent check
//! on the closed form.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::model::{Side, TailModel};
use crate::quadrature::adaptive_integral_lanes;
use crate::Result;

/// Oscillation periods integrated numerically before switching to the
/// asymptotic tail expansion.
const PERIODS_BEFORE_COMPLETION: f64 = 64.0;

/// `E[e^{itX}]` by quadrature.
pub fn psi_by_quadrature(model: &TailModel, t: f64) -> Result<Complex64> {
    let x0 = model.x0();
    let slab = model.slab_mass();
    let slab_ft = if t == 0.0 { slab } else { slab * (t * x0).sin() / (t * x0) };
    let up = tail_transform(t, model.p(), 2.0 * model.c1(Side::Upper), x0)?;
    let lo = tail_transform(-t, model.q(), 2.0 * model.c1(Side::Lower), x0)?;
    Ok(Complex64::new(slab_ft, 0.0) + up + lo)
}

/// `∫_{x0}^∞ e^{isx} (a x⁻² + b x⁻³) dx`.
fn tail_transform(s: f64, a: f64, b: f64, x0: f64) -> Result<Complex64> {
    if s == 0.0 {
        return Ok(Complex64::new(a / x0 + b / (2.0 * x0 * x0), 0.0));
    }
    let f = |x: f64| {
        let (sn, cs) = (s * x).sin_cos();
        Complex64::new(cs, sn) * (a / (x * x) + b / (x * x * x))
    };
    let period = TAU / s.abs();
    let blocks = PERIODS_BEFORE_COMPLETION as usize;
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..blocks {
        let lo = x0 + j as f64 * period;
        let (v, _) = adaptive_integral_lanes(&f, lo, lo + period, 1e-16)?;
        total += v;
    }
    let x_end = x0 + blocks as f64 * period;
    total += a * power_tail(s, 2, x_end) + b * power_tail(s, 3, x_end);
    Ok(total)
}

/// `∫_X^∞ e^{isx} x^{−m} dx` by its asymptotic series
/// `−e^{isX} Σ_k (m)_k / ((is)^{k+1} X^{m+k})`, valid for `|s|X ≫ m`.
fn power_tail(s: f64, m: u32, x: f64) -> Complex64 {
    let is = Complex64::new(0.0, s);
    let (sn, cs) = (s * x).sin_cos();
    let phase = Complex64::new(cs, sn);
    let mut term = 1.0 / (is * x.powi(m as i32));
    let mut sum = term;
    for k in 0..60 {
        let next = term * ((m + k) as f64) / (is * x);
        if next.norm() >= term.norm() {
            break;
        }
        term = next;
        sum += term;
        if term.norm() < 1e-22 {
            break;
        }
    }
    -phase * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfn::psi_exact;

    #[test]
    fn closed_form_matches_density_quadrature() {
        let m = TailModel::canonical(0.7).unwrap();
        for &t in &[0.01, 0.3, -1.2, 4.0] {
            let exact = psi_exact(&m, t).unwrap().value;
            let quad = psi_by_quadrature(&m, t).unwrap();
            assert!((exact - quad).norm() < 1e-8, "t={t}: {exact} vs {quad}");
        }
    }

    #[test]
    fn perturbed_model_has_unit_mass_and_bounded_transform() {
        let m = TailModel::new(0.7, 2.0, 0.2, 0.1).unwrap();
        let at0 = psi_by_quadrature(&m, 0.0).unwrap();
        assert!((at0.re - 1.0).abs() < 1e-14);
        let v = psi_by_quadrature(&m, 0.5).unwrap();
        assert!(v.norm() <= 1.0);
    }

    #[test]
    fn power_tail_matches_quadrature() {
        let (s, x) = (0.7, 300.0);
        let f = |u: f64| {
            let (sn, cs) = (s * u).sin_cos();
            Complex64::new(cs, sn) / (u * u)
        };
        let mut brute = Complex64::new(0.0, 0.0);
        let period = TAU / s;
        for j in 0..20000 {
            let lo = x + j as f64 * period;
            brute += adaptive_integral_lanes(&f, lo, lo + period, 1e-18).unwrap().0;
        }
        let far = x + 20000.0 * period;
        brute += power_tail(s, 2, far);
        assert!((brute - power_tail(s, 2, x)).norm() < 1e-12);
    }
}
