//! Sine and cosine integrals.
//!
//! ```text
//! Si(x) = ∫₀ˣ sin(u)/u du
//! Ci(x) = γ + ln x + ∫₀ˣ (cos u − 1)/u du
//! ```
//!
//! Power series below `SERIES_LIMIT`; above it the auxiliary functions are
//! obtained from the continued fraction of `E₁(ix)` (modified Lentz).

use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result, EULER_GAMMA};

const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 200;
const EPS: f64 = 1e-17;
const TINY: f64 = 1e-300;

/// `(Si(x), Ci(x))` for `x > 0`.
pub fn sin_cos_integrals(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Si/Ci need a finite x > 0, got {x}")));
    }
    Ok(sici_unchecked(x))
}

#[inline]
pub(crate) fn sici_unchecked(x: f64) -> (f64, f64) {
    if x <= SERIES_LIMIT {
        sici_series(x)
    } else {
        sici_continued_fraction(x)
    }
}

fn sici_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    // Si: Σ (−1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    let mut term = x; // x^{2k+1}/(2k+1)! with sign
    let mut si = x;
    // Ci − γ − ln x: Σ_{k≥1} (−1)^k x^{2k} / (2k (2k)!)
    let mut cterm = 1.0; // x^{2k}/(2k)! with sign
    let mut ci = 0.0;
    for k in 1..MAX_TERMS {
        let kk = k as f64;
        cterm *= -x2 / ((2.0 * kk - 1.0) * (2.0 * kk));
        let dc = cterm / (2.0 * kk);
        ci += dc;
        term *= -x2 / ((2.0 * kk) * (2.0 * kk + 1.0));
        let ds = term / (2.0 * kk + 1.0);
        si += ds;
        if ds.abs() < EPS * si.abs() && dc.abs() < EPS * (1.0 + ci.abs()) {
            break;
        }
    }
    (si, EULER_GAMMA + x.ln() + ci)
}

fn sici_continued_fraction(x: f64) -> (f64, f64) {
    // E₁(ix) = e^{−ix} · 1/(1+ix − 1²/(3+ix − 2²/(5+ix − …)))
    let (mut b_re, b_im) = (1.0, x);
    let (mut c_re, mut c_im) = (1.0 / TINY, 0.0);
    let (mut d_re, mut d_im) = cdiv(1.0, 0.0, b_re, b_im);
    let (mut h_re, mut h_im) = (d_re, d_im);
    for i in 2..MAX_TERMS {
        let a = -(((i - 1) * (i - 1)) as f64);
        b_re += 2.0;
        // d = 1/(a d + b)
        let (den_re, den_im) = (a * d_re + b_re, a * d_im + b_im);
        (d_re, d_im) = cdiv(1.0, 0.0, den_re, den_im);
        // c = b + a/c
        let (ac_re, ac_im) = cdiv(a, 0.0, c_re, c_im);
        c_re = b_re + ac_re;
        c_im = b_im + ac_im;
        let del_re = c_re * d_re - c_im * d_im;
        let del_im = c_re * d_im + c_im * d_re;
        let new_re = h_re * del_re - h_im * del_im;
        h_im = h_re * del_im + h_im * del_re;
        h_re = new_re;
        if (del_re - 1.0).abs() + del_im.abs() < 1e-16 {
            break;
        }
    }
    let (cs, sn) = (x.cos(), x.sin());
    // h · (cos x − i sin x)
    let e_re = h_re * cs + h_im * sn;
    let e_im = h_im * cs - h_re * sn;
    (FRAC_PI_2 + e_im, -e_re)
}

#[inline]
fn cdiv(a_re: f64, a_im: f64, b_re: f64, b_im: f64) -> (f64, f64) {
    let den = b_re * b_re + b_im * b_im;
    ((a_re * b_re + a_im * b_im) / den, (a_im * b_re - a_re * b_im) / den)
}
