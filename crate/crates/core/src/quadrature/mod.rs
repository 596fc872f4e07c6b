//! Numerical integration.
//!
//! * [`adaptive_integral`] — globally adaptive Gauss–Kronrod on finite or
//!   (semi-)infinite intervals.
//! * [`inner_window_integral`] — `∫_{−π/M}^{π/M} f(t) dt` for integrands with
//!   integrable `log`-type singularities at the origin.
//! * [`oscillatory_log_integral`] and the generic [`oscillatory_blocks`] —
//!   `∫ e^{−itM} g(t) dt` over `π/M ≤ |t| ≤ ε`, by half-period pairing.
//!
//! All engines are generic over [`Lane`] so several integrands sharing the
//! same nodes can be accumulated in one pass.

mod adaptive;
mod gk;
mod oscillatory;

use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::Serialize;

pub use adaptive::{adaptive_integral, adaptive_integral_lanes};
pub use gk::{gk15, Panel};
pub use oscillatory::{
    inner_window_half, inner_window_integral, inner_window_lanes, oscillatory_blocks, oscillatory_log_integral,
    BlockDecay, OscResult, OscillandSpec, Window,
};

/// A vector space element that the quadrature engines can accumulate.
pub trait Lane: Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(self, s: f64) -> Self;
    /// A norm used for error control (max over components).
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
    /// Component-wise absolute values (`|re| + i|im|` for complex parts).
    fn abs_parts(self) -> Self;
}

/// Lanes that can be multiplied by a complex phase.
pub trait Rotate: Lane {
    fn rotate(self, z: Complex64) -> Self;
}

impl Lane for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn abs_parts(self) -> Self {
        self.abs()
    }
}

impl Lane for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn abs_parts(self) -> Self {
        Complex64::new(self.re.abs(), self.im.abs())
    }
}

impl Rotate for Complex64 {
    fn rotate(self, z: Complex64) -> Self {
        self * z
    }
}

/// `L` complex integrands evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lanes<const L: usize>(pub [Complex64; L]);

impl<const L: usize> Add for Lanes<L> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const L: usize> Sub for Lanes<L> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

impl<const L: usize> Lane for Lanes<L> {
    fn zero() -> Self {
        Lanes([Complex64::new(0.0, 0.0); L])
    }
    fn scale(mut self, s: f64) -> Self {
        for a in &mut self.0 {
            *a *= s;
        }
        self
    }
    fn norm(self) -> f64 {
        self.0.iter().map(|z| Lane::norm(*z)).fold(0.0, f64::max)
    }
    fn is_finite(self) -> bool {
        self.0.iter().all(|z| Lane::is_finite(*z))
    }
    fn abs_parts(mut self) -> Self {
        for a in &mut self.0 {
            *a = Lane::abs_parts(*a);
        }
        self
    }
}

impl<const L: usize> Rotate for Lanes<L> {
    fn rotate(mut self, z: Complex64) -> Self {
        for a in &mut self.0 {
            *a *= z;
        }
        self
    }
}

impl<const L: usize> Lanes<L> {
    /// Per-lane norm, used to report per-lane error estimates.
    pub fn norms(&self) -> [f64; L] {
        let mut out = [0.0; L];
        for (o, z) in out.iter_mut().zip(self.0) {
            *o = Lane::norm(z);
        }
        out
    }
}

/// Result of a scalar integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    /// Number of full oscillation periods covered by paired blocks (0 for
    /// non-oscillatory engines).
    pub periods_used: usize,
    pub block_decay: Option<BlockDecay>,
}
