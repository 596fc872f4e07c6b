//! The law of `X₁`: power tails `p/x + c₁⁺/x²` on the right and
//! `q/x + c₁⁻/x²` on the left beyond the onset `x₀`, with a uniform slab on
//! `[−x₀, x₀]` carrying whatever mass the tails leave over.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const UNDERFLOW: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    p: f64,
    q: f64,
    x0: f64,
    c1_plus: f64,
    c1_minus: f64,
}

impl TailModel {
    /// Canonical model: `x₀ = 1`, no second-order terms, no interior mass.
    pub fn canonical(p: f64) -> Result<Self> {
        Self::new(p, 1.0, 0.0, 0.0)
    }

    pub fn symmetric() -> Self {
        Self::canonical(0.5).expect("p = 1/2 is valid")
    }

    pub fn new(p: f64, x0: f64, c1_plus: f64, c1_minus: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidModel(format!("p = {p} must lie in (0, 1)")));
        }
        if !(x0 >= 1.0) || !x0.is_finite() {
            return Err(Error::InvalidModel(format!("x0 = {x0} must be >= 1")));
        }
        if !c1_plus.is_finite() || !c1_minus.is_finite() {
            return Err(Error::InvalidModel("c1 coefficients must be finite".into()));
        }
        let q = 1.0 - p;
        // p/x² + 2c/x³ ≥ 0 for all x > x₀  ⇔  p + 2c/x₀ ≥ 0 (worst case at x₀ when c < 0).
        if p + 2.0 * c1_plus / x0 < 0.0 || q + 2.0 * c1_minus / x0 < 0.0 {
            return Err(Error::InvalidModel(format!(
                "x0 = {x0} too small: tail density goes negative for c1 = ({c1_plus}, {c1_minus})"
            )));
        }
        let model = Self { p, q, x0, c1_plus, c1_minus };
        if model.slab_mass() < -1e-15 {
            return Err(Error::InvalidModel(format!(
                "tails carry more than unit mass (interior mass {})",
                model.slab_mass()
            )));
        }
        Ok(model)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn c1(&self, side: Side) -> f64 {
        match side {
            Side::Upper => self.c1_plus,
            Side::Lower => self.c1_minus,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.x0 == 1.0 && self.c1_plus == 0.0 && self.c1_minus == 0.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.p == self.q && self.c1_plus == self.c1_minus
    }

    /// Mass of the uniform slab on `[−x₀, x₀]`.
    pub fn slab_mass(&self) -> f64 {
        let m = 1.0 - (self.p + self.q) / self.x0 - (self.c1_plus + self.c1_minus) / (self.x0 * self.x0);
        if m.abs() < 1e-15 {
            0.0
        } else {
            m
        }
    }

    fn weight(&self, side: Side) -> f64 {
        match side {
            Side::Upper => self.p,
            Side::Lower => self.q,
        }
    }

    /// `P(X₁ > x)` (upper) or `P(X₁ < −x)` (lower) for `x ≥ x₀`.
    pub fn tail_prob(&self, side: Side, x: f64) -> Result<f64> {
        if !(x >= self.x0) {
            return Err(Error::Domain(format!("tail_prob needs x >= x0 = {}, got {x}", self.x0)));
        }
        let v = self.weight(side) / x + self.c1(side) / (x * x);
        if v < UNDERFLOW {
            return Err(Error::Underflow(v));
        }
        Ok(v)
    }

    /// `P(X₁ > x)` for every real `x`.
    pub fn tail_upper_extended(&self, x: f64) -> f64 {
        if x > self.x0 {
            // Direct form; 1 − cdf would cancel for large x.
            self.p / x + self.c1_plus / (x * x)
        } else {
            1.0 - self.cdf(x)
        }
    }

    /// `P(X₁ ≤ x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let x0 = self.x0;
        if x < -x0 {
            let y = -x;
            self.q / y + self.c1_minus / (y * y)
        } else if x <= x0 {
            let left = self.q / x0 + self.c1_minus / (x0 * x0);
            left + self.slab_mass() * (x + x0) / (2.0 * x0)
        } else {
            1.0 - (self.p / x + self.c1_plus / (x * x))
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let x0 = self.x0;
        if x > x0 {
            self.p / (x * x) + 2.0 * self.c1_plus / (x * x * x)
        } else if x < -x0 {
            let y = -x;
            self.q / (y * y) + 2.0 * self.c1_minus / (y * y * y)
        } else {
            self.slab_mass() / (2.0 * x0)
        }
    }

    /// Inverse CDF of the canonical model.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::Domain(format!("quantile needs u in (0, 1), got {u}")));
        }
        if !self.is_canonical() {
            return Err(Error::Domain(
                "closed-form quantile exists only for the canonical model".into(),
            ));
        }
        Ok(if u < self.q { -self.q / u } else { self.p / (1.0 - u) })
    }

    /// `E[X₁ 1{|X₁| ≤ a}]`. The slab is symmetric and contributes nothing.
    pub fn truncated_mean(&self, a: f64) -> Result<f64> {
        if !(a >= self.x0) {
            return Err(Error::Domain(format!("truncated_mean needs a >= x0 = {}, got {a}", self.x0)));
        }
        let log_part = (self.p - self.q) * (a / self.x0).ln();
        let second = 2.0 * (self.c1_plus - self.c1_minus) * (1.0 / self.x0 - 1.0 / a);
        Ok(log_part + second)
    }

    pub fn norming(&self, n: u64) -> Result<NormingSequences> {
        if n == 0 {
            return Err(Error::Domain("norming needs n >= 1".into()));
        }
        let a_n = n as f64;
        // Below the tail onset only the (centred) slab is truncated in.
        let b_n = if a_n >= self.x0 { a_n * self.truncated_mean(a_n)? } else { 0.0 };
        Ok(NormingSequences { a_n, b_n })
    }

    /// One exact draw: inverse CDF for the canonical model, otherwise a
    /// region pick followed by rejection against a Pareto envelope.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.is_canonical() {
            let u = open_unit(rng);
            return if u < self.q { -self.q / u } else { self.p / (1.0 - u) };
        }
        let x0 = self.x0;
        let right = self.p / x0 + self.c1_plus / (x0 * x0);
        let left = self.q / x0 + self.c1_minus / (x0 * x0);
        let u = open_unit(rng);
        if u < right {
            x0 * self.sample_tail_ratio(rng, Side::Upper)
        } else if u < right + left {
            -x0 * self.sample_tail_ratio(rng, Side::Lower)
        } else {
            x0 * (2.0 * open_unit(rng) - 1.0)
        }
    }

    fn sample_tail_ratio<R: Rng + ?Sized>(&self, rng: &mut R, side: Side) -> f64 {
        let w = self.weight(side);
        let c = self.c1(side);
        let ceiling = w + 2.0 * c.max(0.0) / self.x0;
        loop {
            // Pareto(1) on (1, ∞) scaled by x₀ proposes density ∝ 1/x².
            let r = 1.0 / open_unit(rng);
            let x = self.x0 * r;
            if open_unit(rng) * ceiling <= w + 2.0 * c / x {
                return r;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormingSequences {
    pub a_n: f64,
    pub b_n: f64,
}

/// Uniform draw on the open interval `(0, 1)` from 53 random bits.
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn tail_prob_examples() {
        let m = TailModel::canonical(0.7).unwrap();
        assert!(close(m.tail_prob(Side::Upper, 100.0).unwrap(), 0.007, 1e-15));
        let s = TailModel::symmetric();
        assert_eq!(s.tail_prob(Side::Upper, 1.0).unwrap(), 0.5);
        let pert = TailModel::new(0.7, 2.0, 0.2, 0.0).unwrap();
        assert!(close(pert.tail_prob(Side::Upper, 10.0).unwrap(), 0.072, 1e-15));
        assert!(matches!(m.tail_prob(Side::Upper, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn tiny_tails_underflow() {
        let m = TailModel::canonical(0.7).unwrap();
        assert!(matches!(m.tail_prob(Side::Upper, 1e305), Err(Error::Underflow(_))));
    }

    #[test]
    fn density_examples() {
        let m = TailModel::canonical(0.7).unwrap();
        assert!(close(m.density(2.0), 0.175, 1e-15));
        assert_eq!(m.density(0.5), 0.0);
        assert!(close(m.density(-2.0), 0.075, 1e-15));
    }

    #[test]
    fn quantile_examples() {
        let m = TailModel::canonical(0.7).unwrap();
        let just_below = 0.3 - 1e-15;
        assert!(close(m.quantile(just_below).unwrap(), -1.0, 1e-12));
        assert!(close(m.quantile(0.993).unwrap(), 100.0, 1e-10));
        let s = TailModel::symmetric();
        assert_eq!(s.quantile(0.25).unwrap(), -2.0);
        assert!(m.quantile(0.0).is_err());
        assert!(m.quantile(1.0).is_err());
    }

    #[test]
    fn truncated_mean_and_norming() {
        let m = TailModel::canonical(0.7).unwrap();
        assert!(close(m.truncated_mean(std::f64::consts::E).unwrap(), 0.4, 1e-15));
        assert_eq!(TailModel::symmetric().truncated_mean(1000.0).unwrap(), 0.0);
        let nb = m.norming(100).unwrap();
        assert_eq!(nb.a_n, 100.0);
        assert!(close(nb.b_n, 0.4 * 100.0 * 100f64.ln(), 1e-14));
        assert!((nb.b_n - 184.207).abs() < 1e-3);
        let sym = TailModel::symmetric().norming(1_000_000).unwrap();
        assert_eq!((sym.a_n, sym.b_n), (1e6, 0.0));
        let one = m.norming(1).unwrap();
        assert_eq!((one.a_n, one.b_n), (1.0, 0.0));
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(TailModel::canonical(0.0).is_err());
        assert!(TailModel::canonical(1.0).is_err());
        assert!(TailModel::new(0.5, 0.5, 0.0, 0.0).is_err());
        // density p/x² + 2c/x³ negative just past x₀ = 1 when c = −1.
        assert!(TailModel::new(0.7, 1.0, -1.0, 0.0).is_err());
        // tails heavier than unit mass
        assert!(TailModel::new(0.7, 1.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn cdf_is_continuous_and_total() {
        let m = TailModel::new(0.6, 3.0, 0.5, -0.4).unwrap();
        let x0 = m.x0();
        for &x in &[x0, -x0] {
            assert!((m.cdf(x + 1e-12) - m.cdf(x - 1e-12)).abs() < 1e-10);
        }
        assert!(m.cdf(-1e12) < 1e-11);
        assert!(1.0 - m.cdf(1e12) < 1e-11);
    }
}
