//! Compactly supported smoothing window `ψ_Y`.
//!
//! `ψ_Y` is the `k`-fold self-convolution of the triangle supported on
//! `(−ε/k, ε/k)`, renormalised to `ψ_Y(0) = 1`. Equivalently, with
//! `w = ε/k`, `ψ_Y(t) = M_{2k}(t/w) / M_{2k}(0)` where `M_{2k}` is the
//! centred cardinal B-spline of order `2k`. The variable `Y` therefore has
//! density
//!
//! ```text
//! f_Y(x) = w / (2π M_{2k}(0)) · (sin(xw/2) / (xw/2))^{2k}
//! ```
//!
//! which is nonnegative with tails `O(x^{−2k})`, so `E|Y|^a < ∞` for
//! every `a < 2k − 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::CharFnJet;
use crate::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.5;
pub const DEFAULT_K: u32 = 4;
pub const DEFAULT_MOMENT_ORDER: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmootherParams {
    pub epsilon: f64,
    pub k: u32,
    pub a: f64,
}

impl Default for SmootherParams {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, k: DEFAULT_K, a: DEFAULT_MOMENT_ORDER }
    }
}

/// Immutable smoother description with precomputed piece polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherSpec {
    epsilon: f64,
    k: u32,
    a: f64,
    width: f64,
    /// `pieces[j][l]`: coefficient of `s^l` of `M_{2k}` on `y = x + k ∈ [j, j+1]`,
    /// `s = y − j`, already divided by `M_{2k}(0)`.
    pieces: Vec<Vec<f64>>,
    centre: f64,
    tail_constant: f64,
}

impl SmootherSpec {
    pub fn new(epsilon: f64, k: u32, a: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("smoother epsilon must lie in (0, 1), got {epsilon}")));
        }
        if k < 2 || k > 12 {
            return Err(Error::Config(format!("smoother order k must lie in 2..=12, got {k}")));
        }
        if !(a > 2.0) {
            return Err(Error::Config(format!("moment order a must exceed 2, got {a}")));
        }
        if !(2.0 * k as f64 - 1.0 > a) {
            return Err(Error::Config(format!(
                "Y has finite moments only below order {}; a = {a} needs a larger k",
                2 * k - 1
            )));
        }
        let m = 2 * k as usize;
        let raw = bspline_pieces(m);
        let centre = eval_poly(&raw[k as usize], 0.0);
        let pieces = raw
            .into_iter()
            .take(k as usize)
            .map(|p| p.into_iter().map(|c| c / centre).collect())
            .collect();
        let width = epsilon / k as f64;
        // f_Y(x) ≤ C x^{−2k} with C = w/(2π M(0)) · (2/w)^{2k}; two tails.
        let c_tail = width / (2.0 * PI * centre) * (2.0 / width).powi(m as i32);
        let tail_constant = 2.0 * c_tail / (m as f64 - 1.0);
        Ok(Self { epsilon, k, a, width, pieces, centre, tail_constant })
    }

    pub fn from_params(p: &SmootherParams) -> Result<Self> {
        Self::new(p.epsilon, p.k, p.a)
    }

    pub fn params(&self) -> SmootherParams {
        SmootherParams { epsilon: self.epsilon, k: self.k, a: self.a }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn moment_order(&self) -> f64 {
        self.a
    }

    /// `K` in `P(|Y| > z) ≤ K z^{1−2k}`.
    pub fn tail_constant(&self) -> f64 {
        self.tail_constant
    }

    /// Interior knots of the window on `(0, ε)`.
    pub fn breakpoints(&self) -> Vec<f64> {
        (1..self.k).map(|j| j as f64 * self.width).collect()
    }

    /// `(ψ, ψ′, ψ″)` as reals.
    #[inline]
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let at = t.abs();
        if at >= self.epsilon {
            return (0.0, 0.0, 0.0);
        }
        // Work at x = −|t|/w ≤ 0, i.e. y = k − |t|/w ∈ (0, k].
        let y = self.k as f64 - at / self.width;
        // At an integer y the piece below (larger |t|) is used.
        let mut j = y.ceil() as usize;
        j = j.saturating_sub(1).min(self.k as usize - 1);
        let s = y - j as f64;
        let p = &self.pieces[j];
        let (v, dy, dyy) = eval_poly_jet(p, s);
        // dy/dt = −sign(t)/w.
        if at == 0.0 {
            return (1.0, 0.0, dyy / (self.width * self.width));
        }
        let sign = if t > 0.0 { -1.0 } else { 1.0 };
        (v, sign * dy / self.width, dyy / (self.width * self.width))
    }

    pub fn density(&self, x: f64) -> f64 {
        let m = 2 * self.k as i32;
        let h = 0.5 * x * self.width;
        let sinc = if h.abs() < 1e-8 { 1.0 - h * h / 6.0 } else { h.sin() / h };
        self.width / (2.0 * PI * self.centre) * sinc.powi(m)
    }

    /// Rigorous bound on `P(|Y| > z)`.
    pub fn tail_bound(&self, z: f64) -> f64 {
        (self.tail_constant * z.powi(1 - 2 * self.k as i32)).min(1.0)
    }
}

/// Centred cardinal B-spline `M_m` on `y = x + m/2 ∈ [j, j+1]` as a polynomial
/// in `s = y − j`, for `j = 0..m`.
fn bspline_pieces(m: usize) -> Vec<Vec<f64>> {
    let deg = m - 1;
    let binom = |n: usize, r: usize| -> f64 {
        let mut v = 1.0;
        for i in 0..r {
            v = v * (n - i) as f64 / (i + 1) as f64;
        }
        v
    };
    let fact: f64 = (1..=deg).map(|i| i as f64).product();
    (0..m)
        .map(|j| {
            let mut coef = vec![0.0; m];
            for i in 0..=j {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let ci = sign * binom(m, i) / fact;
                let shift = (j - i) as f64;
                // (s + shift)^deg = Σ_l C(deg,l) s^l shift^{deg−l}
                for (l, c) in coef.iter_mut().enumerate() {
                    *c += ci * binom(deg, l) * shift.powi((deg - l) as i32);
                }
            }
            coef
        })
        .collect()
}

fn eval_poly(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * s + x)
}

fn eval_poly_jet(c: &[f64], s: f64) -> (f64, f64, f64) {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &x in c.iter().rev() {
        d2 = d2 * s + 2.0 * d1;
        d1 = d1 * s + v;
        v = v * s + x;
    }
    (v, d1, d2)
}

/// `ψ_Y` and its derivatives as a jet.
pub fn smoother_jet(spec: &SmootherSpec, t: f64) -> CharFnJet {
    let (v, d1, d2) = spec.eval(t);
    CharFnJet {
        value: Complex64::new(v, 0.0),
        d1: Some(Complex64::new(d1, 0.0)),
        d2: Some(Complex64::new(d2, 0.0)),
    }
}

pub fn smoother_density(spec: &SmootherSpec, x: f64) -> f64 {
    spec.density(x)
}

/// Upper bound on `P(|Y| > z)`; the exponent is `2k − 1`.
pub fn smoother_tail_budget(spec: &SmootherSpec, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("tail budget needs z > 0, got {z}")));
    }
    Ok(spec.tail_bound(z))
}
