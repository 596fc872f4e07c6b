//! Period-paired integration of `∫_{π/M}^{ε} e^{−itM} g(t) dt` and the
//! log-singular inner window `[−π/M, π/M]`.
//!
//! With `σ = tM` the outer domain is `[π, εM]`. Blocks
//! `J_k = ∫_{(2k−1)π}^{(2k+1)π}` are evaluated after folding the second
//! half-period onto the first:
//!
//! ```text
//! J_k = (1/M) ∫_{(2k−1)π}^{2kπ} e^{−iσ} [g(σ/M) − g((σ+π)/M)] dσ
//! ```
//!
//! so each block only sees a first difference of `g`, which is where the
//! `O(1/k²)` decay of the blocks comes from. The leftover piece beyond the
//! last full block is integrated directly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::gk::gk15;
use super::{Lane, QuadResult, Rotate};
use crate::charfn::psi_parts;
use crate::model::TailModel;
use crate::smoother::SmootherSpec;
use crate::{Error, Result};

/// Blocks evaluated per parallel task.
const CHUNK: usize = 256;
/// Inner-window substitution range: `t = h e^{−u}`, `u ∈ [0, INNER_U]`.
const INNER_U: usize = 48;

/// Summary of `|J_k|·k²` over the produced blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockDecay {
    pub blocks: usize,
    pub max_scaled: f64,
    pub median_scaled: f64,
    /// `max_k |J_k| k²` over the first ten blocks.
    pub head_constant: f64,
}

impl BlockDecay {
    pub fn max_over_median(&self) -> f64 {
        if self.median_scaled > 0.0 {
            self.max_scaled / self.median_scaled
        } else if self.max_scaled == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    }

    fn from_norms(norms: &[f64]) -> Option<Self> {
        if norms.is_empty() {
            return None;
        }
        let mut scaled: Vec<f64> =
            norms.iter().enumerate().map(|(i, v)| v * ((i + 1) as f64).powi(2)).collect();
        let head_constant = scaled.iter().take(10).cloned().fold(0.0, f64::max);
        let max_scaled = scaled.iter().cloned().fold(0.0, f64::max);
        scaled.sort_by(f64::total_cmp);
        let mid = scaled.len() / 2;
        let median_scaled =
            if scaled.len() % 2 == 1 { scaled[mid] } else { 0.5 * (scaled[mid - 1] + scaled[mid]) };
        Some(Self { blocks: norms.len(), max_scaled, median_scaled, head_constant })
    }
}

/// Output of the generic block engine.
#[derive(Debug, Clone)]
pub struct OscResult<T> {
    pub value: T,
    /// Component-wise error estimate.
    pub lane_error: T,
    pub abs_error: f64,
    pub periods: usize,
    /// `|J_k|` per full block, in order.
    pub block_norms: Vec<f64>,
    pub decay: Option<BlockDecay>,
}

#[inline]
fn phase(sigma: f64) -> Complex64 {
    let (s, c) = sigma.sin_cos();
    Complex64::new(c, -s)
}

/// Integrates `f` over `[a, b]` with one GK15 panel per smooth piece.
fn split_panels<T: Lane, F: Fn(f64) -> T>(f: &F, a: f64, b: f64, cuts: &mut Vec<f64>) -> (T, T) {
    cuts.retain(|&c| c > a && c < b);
    cuts.sort_by(f64::total_cmp);
    let mut lo = a;
    let mut value = T::zero();
    let mut err = T::zero();
    for hi in cuts.iter().copied().chain(std::iter::once(b)) {
        let p = gk15(f, lo, hi);
        value = value + p.kronrod;
        // Add a rounding allowance alongside the truncation estimate.
        err = err + p.error_lane() + p.kronrod.abs_parts().scale(8.0 * f64::EPSILON);
        lo = hi;
    }
    (value, err)
}

/// `∫_{π/M}^{hi} e^{−itM} g(t) dt` by paired blocks.
///
/// `kinks` lists points in `t` where `g` loses smoothness (for instance the
/// breakpoints of a spline window); panels are split there.
pub fn oscillatory_blocks<T, G>(g: &G, freq: f64, hi: f64, kinks: &[f64]) -> Result<OscResult<T>>
where
    T: Rotate,
    G: Fn(f64) -> T + Sync,
{
    if !(freq > 0.0) || !freq.is_finite() {
        return Err(Error::Domain(format!("oscillation frequency must be positive, got {freq}")));
    }
    let sigma_end = hi * freq;
    if !(PI < sigma_end) {
        return Err(Error::FrequencyDomain { lower: PI / freq, epsilon: hi });
    }
    let inv_m = 1.0 / freq;
    let full = ((sigma_end - PI) / (2.0 * PI)).floor() as usize;
    let kink_sigma: Vec<f64> = kinks.iter().map(|k| k * freq).collect();

    let block = |k: usize| -> (T, T) {
        let a = (2 * k - 1) as f64 * PI;
        let paired = |s: f64| (g(s * inv_m) - g((s + PI) * inv_m)).rotate(phase(s));
        let mut cuts: Vec<f64> = Vec::new();
        for &ks in &kink_sigma {
            if ks > a && ks < a + 2.0 * PI {
                cuts.push(ks);
                cuts.push(ks - PI);
            }
        }
        let (v, e) = split_panels(&paired, a, a + PI, &mut cuts);
        (v.scale(inv_m), e.scale(inv_m))
    };
    let blocks: Vec<(T, T)> = if full > CHUNK {
        let ks: Vec<usize> = (1..=full).collect();
        ks.par_chunks(CHUNK).flat_map_iter(|c| c.iter().map(|&k| block(k)).collect::<Vec<_>>()).collect()
    } else {
        (1..=full).map(block).collect()
    };

    let mut value = T::zero();
    let mut lane_error = T::zero();
    let mut norms = Vec::with_capacity(blocks.len());
    for (v, e) in &blocks {
        if !v.is_finite() {
            return Err(Error::NonFinite(hi));
        }
        value = value + *v;
        lane_error = lane_error + *e;
        norms.push(v.norm());
    }
    cauchy_check(&blocks)?;

    // Leftover [(2K+1)π, εM], at most one period, in half-period panels.
    let direct = |s: f64| g(s * inv_m).rotate(phase(s));
    let mut a = (2 * full + 1) as f64 * PI;
    while a < sigma_end {
        let b = (a + PI).min(sigma_end);
        let mut cuts = kink_sigma.clone();
        let (v, e) = split_panels(&direct, a, b, &mut cuts);
        if !v.is_finite() {
            return Err(Error::NonFinite(b * inv_m));
        }
        value = value + v.scale(inv_m);
        lane_error = lane_error + e.scale(inv_m);
        a = b;
    }
    let decay = BlockDecay::from_norms(&norms);
    let abs_error = lane_error.norm();
    Ok(OscResult { value, lane_error, abs_error, periods: full, block_norms: norms, decay })
}

/// Cauchy-type test on the paired series: block increments must not grow.
/// The largest block of the final quarter may not exceed ten times the
/// largest block of the first half (plus the accumulated error estimate).
fn cauchy_check<T: Lane>(blocks: &[(T, T)]) -> Result<()> {
    if blocks.len() < 8 {
        return Ok(());
    }
    let half = blocks.len() / 2;
    let head = blocks[..half].iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
    let late = blocks[3 * blocks.len() / 4..].iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
    let slack: f64 = blocks.iter().map(|(_, e)| e.norm()).sum();
    if late > 10.0 * head + slack {
        return Err(Error::Nonconvergence(format!(
            "paired blocks grow: late block {late:e} against early maximum {head:e}"
        )));
    }
    Ok(())
}

/// `∫_0^h f(t) dt` via `t = h e^{−u}`; returns `(value, lane error)`.
pub fn inner_window_half<T, F>(f: &F, h: f64) -> Result<(T, T)>
where
    T: Lane,
    F: Fn(f64) -> T,
{
    let mapped = |u: f64| {
        let e = (-u).exp();
        f(h * e).scale(h * e)
    };
    let mut value = T::zero();
    let mut err = T::zero();
    let mut last = T::zero();
    for j in 0..INNER_U {
        let p = gk15(&mapped, j as f64, (j + 1) as f64);
        if !p.kronrod.is_finite() {
            return Err(Error::NonFinite(h * (-(j as f64)).exp()));
        }
        value = value + p.kronrod;
        err = err + p.error_lane();
        last = p.kronrod;
    }
    // What is left below t = h e^{−U} is no larger than the last panel.
    Ok((value, err + last.abs_parts()))
}

/// `∫_{−h}^{h} f(t) dt` with `h = π/M`, for lanes.
pub fn inner_window_lanes<T, F>(f: &F, freq: f64) -> Result<(T, T)>
where
    T: Lane,
    F: Fn(f64) -> T,
{
    if !(freq > 0.0) {
        return Err(Error::Domain(format!("M must be positive, got {freq}")));
    }
    let h = PI / freq;
    let (r, er) = inner_window_half(f, h)?;
    let neg = |t: f64| f(-t);
    let (l, el) = inner_window_half(&neg, h)?;
    Ok((r + l, er + el))
}

/// `∫_{−π/M}^{π/M} f(t) dt` for integrands with at most a `log|t|`
/// singularity at the origin.
pub fn inner_window_integral<F>(f: F, freq: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64,
{
    let (v, e) = inner_window_lanes(&f, freq)?;
    Ok(QuadResult { value: v, abs_error_estimate: e.norm(), periods_used: 0, block_decay: None })
}

/// Window factor of an oscillatory integrand.
#[derive(Debug, Clone, PartialEq)]
pub enum Window {
    /// `ψ ≡ 1` on `[π/M, epsilon]`.
    Unit { epsilon: f64 },
    /// A smoothing window; the upper limit is its support edge.
    Smoother(SmootherSpec),
}

impl Window {
    pub fn epsilon(&self) -> f64 {
        match self {
            Window::Unit { epsilon } => *epsilon,
            Window::Smoother(s) => s.epsilon(),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Window::Unit { .. } => Vec::new(),
            Window::Smoother(s) => s.breakpoints(),
        }
    }

    #[inline]
    fn value(&self, t: f64) -> f64 {
        match self {
            Window::Unit { .. } => 1.0,
            Window::Smoother(s) => s.eval(t).0,
        }
    }
}

/// `∫_{π/M}^{ε} e^{−itM} t^{−1} (log t)^r ψ(t) Ψ(t)^m dt`.
#[derive(Debug, Clone)]
pub struct OscillandSpec {
    pub freq: f64,
    pub r: u32,
    pub m: u32,
    pub window: Window,
    pub model: TailModel,
}

impl OscillandSpec {
    pub fn integrand(&self, t: f64) -> Complex64 {
        let c = self.model.p() - self.model.q();
        let mut v = Complex64::new(self.window.value(t) * t.ln().powi(self.r as i32) / t, 0.0);
        if self.m > 0 {
            v *= psi_parts(c, t).0.powu(self.m);
        }
        v
    }
}

pub fn oscillatory_log_integral(spec: &OscillandSpec) -> Result<QuadResult> {
    if spec.m > 0 && !spec.model.is_canonical() {
        return Err(Error::InvalidModel("Ψ powers need the canonical model".into()));
    }
    let eps = spec.window.epsilon();
    if !(PI / spec.freq < eps) {
        return Err(Error::FrequencyDomain { lower: PI / spec.freq, epsilon: eps });
    }
    let g = |t: f64| spec.integrand(t);
    let kinks = spec.window.breakpoints();
    let r = oscillatory_blocks(&g, spec.freq, eps, &kinks)?;
    Ok(QuadResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        periods_used: r.periods,
        block_decay: r.decay,
    })
}
