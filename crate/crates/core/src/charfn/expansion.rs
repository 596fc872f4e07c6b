//! Small-`t` expansion constants.
//!
//! For `t > 0`,
//!
//! ```text
//! Ψ(t)  = 1 − i c t ln t + i C₀ t + C t + A(t),   A(t) = O(t² |ln t|)
//! Ψ′(t) = −i c ln t + C′ + O(t |ln t|)
//! Θ(t)  = −c ln t + C₂ + O(t |ln t|)
//! ```
//!
//! The analytic values are `c = p − q`, `C₀ = c(1 − γ)`, `C = −π/2`; the
//! complex `C′`, `C₂` are reported from regression only.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::{psi_parts, require_canonical, theta_parts};
use crate::model::TailModel;
use crate::{Error, Result, EULER_GAMMA};

/// Fitting grid: `GRID_POINTS` log-spaced values in `[T_MIN, T_MAX]`.
pub const T_MIN: f64 = 1e-8;
pub const T_MAX: f64 = 1e-2;
pub const GRID_POINTS: usize = 200;
/// Allowed disagreement between analytic and regressed constants.
pub const AGREEMENT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedConstants {
    pub one: f64,
    pub c: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C")]
    pub c_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionCoeffs {
    pub c: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "C")]
    pub c_abs: f64,
    #[serde(rename = "Cprime")]
    pub c_prime: Complex64,
    #[serde(rename = "C2")]
    pub c2: Complex64,
    pub residual_bound: f64,
    pub fitted: FittedConstants,
}

pub fn grid() -> Vec<f64> {
    let (l0, l1) = (T_MIN.ln(), T_MAX.ln());
    (0..GRID_POINTS)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// Weighted least squares; every row is divided by `weight[i]` and the
/// columns are equilibrated before the QR solve.
fn weighted_lstsq(rows: &[Vec<f64>], rhs: &[f64], weight: &[f64]) -> Result<Vec<f64>> {
    let (m, k) = (rows.len(), rows[0].len());
    let mut a = DMatrix::<f64>::zeros(m, k);
    let mut b = DVector::<f64>::zeros(m);
    for i in 0..m {
        for j in 0..k {
            a[(i, j)] = rows[i][j] / weight[i];
        }
        b[i] = rhs[i] / weight[i];
    }
    let scales: Vec<f64> = (0..k).map(|j| a.column(j).norm()).collect();
    for (j, s) in scales.iter().enumerate() {
        if *s == 0.0 {
            return Err(Error::Singular);
        }
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let qr = a.qr();
    let qtb = qr.q().transpose() * b;
    let sol = qr.r().solve_upper_triangular(&qtb).ok_or(Error::Singular)?;
    Ok((0..k).map(|j| sol[j] / scales[j]).collect())
}

/// Regresses `(1, c, C₀, C)` from the exact `Ψ` on the fitting grid:
/// real part against `{1, t}`, imaginary part against `{t ln t, t}`.
pub fn regress_constants(model: &TailModel) -> Result<FittedConstants> {
    require_canonical(model)?;
    let c = model.p() - model.q();
    let ts = grid();
    let w: Vec<f64> = ts.iter().map(|t| t * t).collect();
    let psi: Vec<Complex64> = ts.iter().map(|&t| psi_parts(c, t).0).collect();
    let re_rows: Vec<Vec<f64>> = ts.iter().map(|&t| vec![1.0, t]).collect();
    let re_rhs: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let re = weighted_lstsq(&re_rows, &re_rhs, &w)?;
    let im_rows: Vec<Vec<f64>> = ts.iter().map(|&t| vec![t * t.ln(), t]).collect();
    let im_rhs: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let im = weighted_lstsq(&im_rows, &im_rhs, &w)?;
    Ok(FittedConstants { one: re[0], c: -im[0], c0: im[1], c_abs: re[1] })
}

/// Complex constant term of `g(t) ≈ K + a·t ln t + b·t` on the grid.
fn fit_constant(ts: &[f64], g: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let rows: Vec<Vec<f64>> = ts.iter().map(|&t| vec![1.0, t * t.ln(), t]).collect();
    let w: Vec<f64> = ts.iter().map(|&t| t.sqrt()).collect();
    let vals: Vec<Complex64> = ts.iter().map(|&t| g(t)).collect();
    let re = weighted_lstsq(&rows, &vals.iter().map(|z| z.re).collect::<Vec<_>>(), &w)?;
    let im = weighted_lstsq(&rows, &vals.iter().map(|z| z.im).collect::<Vec<_>>(), &w)?;
    Ok(Complex64::new(re[0], im[0]))
}

/// Analytic constants, regression cross-check, `C′`, `C₂` and the fitted
/// remainder bound `max |A(t)| / (t² |ln t|)` over the grid.
pub fn expansion_coeffs(model: &TailModel) -> Result<ExpansionCoeffs> {
    require_canonical(model)?;
    let c = model.p() - model.q();
    let c0 = c * (1.0 - EULER_GAMMA);
    let c_abs = -FRAC_PI_2;
    let fitted = regress_constants(model)?;
    let worst = (fitted.c - c)
        .abs()
        .max((fitted.c0 - c0).abs())
        .max((fitted.c_abs - c_abs).abs())
        .max((fitted.one - 1.0).abs());
    if worst > AGREEMENT_TOL {
        return Err(Error::Nonconvergence(format!(
            "regressed expansion constants disagree with the closed form by {worst:e}"
        )));
    }
    let ts = grid();
    let residual_bound = ts
        .iter()
        .map(|&t| {
            let psi = psi_parts(c, t).0;
            (psi - expansion_value(c, c0, c_abs, t)).norm() / (t * t * t.ln().abs())
        })
        .fold(0.0, f64::max);
    let c_prime = fit_constant(&ts, |t| psi_parts(c, t).1 + Complex64::new(0.0, c * t.ln()))?;
    let c2 = fit_constant(&ts, |t| theta_parts(c, t).0 + c * t.ln())?;
    Ok(ExpansionCoeffs { c, c0, c_abs, c_prime, c2, residual_bound, fitted })
}

/// `1 − i c t ln|t| + i C₀ t + C |t|`.
pub fn expansion_value(c: f64, c0: f64, c_abs: f64, t: f64) -> Complex64 {
    let a = t.abs();
    Complex64::new(1.0 + c_abs * a, -c * t * a.ln() + c0 * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_model_has_no_log_term() {
        let e = expansion_coeffs(&TailModel::symmetric()).unwrap();
        assert_eq!(e.c, 0.0);
        assert!(e.fitted.c.abs() < AGREEMENT_TOL);
    }

    #[test]
    fn regression_reproduces_closed_form() {
        for &p in &[0.5, 0.6, 0.7, 0.9] {
            let m = TailModel::canonical(p).unwrap();
            let f = regress_constants(&m).unwrap();
            let c = p - (1.0 - p);
            assert!((f.c - c).abs() < AGREEMENT_TOL, "p={p}: {f:?}");
            assert!((f.c0 - c * (1.0 - EULER_GAMMA)).abs() < AGREEMENT_TOL, "p={p}: {f:?}");
            assert!((f.c_abs + FRAC_PI_2).abs() < AGREEMENT_TOL, "p={p}: {f:?}");
        }
    }

    #[test]
    fn residual_bound_holds_on_grid() {
        let m = TailModel::canonical(0.7).unwrap();
        let e = expansion_coeffs(&m).unwrap();
        assert!(e.c_abs < 0.0);
        assert!(e.residual_bound.is_finite() && e.residual_bound < 1.0);
        for t in grid() {
            let r = (psi_parts(e.c, t).0 - expansion_value(e.c, e.c0, e.c_abs, t)).norm();
            assert!(r <= e.residual_bound * t * t * t.ln().abs() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn negative_t_expansion_is_conjugate() {
        let (c, c0) = (0.4, 0.4 * (1.0 - EULER_GAMMA));
        for &t in &[1e-6, 1e-3] {
            let plus = expansion_value(c, c0, -FRAC_PI_2, t);
            let minus = expansion_value(c, c0, -FRAC_PI_2, -t);
            assert!((plus.conj() - minus).norm() < 1e-15);
            let psi_minus = psi_parts(c, -t).0;
            assert!((psi_minus - minus).norm() < t * t * (t.ln().abs() + 1.0));
        }
    }
}
