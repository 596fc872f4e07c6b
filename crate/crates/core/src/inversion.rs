//! Smoothed Fourier inversion of tail probabilities.
//!
//! For a real random variable `Z` with characteristic function `φ` and an
//! independent smoothing variable `Y` (characteristic function `ψ`,
//! supported on `(−ε, ε)`), the inversion formula
//!
//! ```text
//! P(Z + Y > M) = 1/2 + (1/π) ∫_0^ε Im(e^{−itM} ψ(t) φ(t)) / t dt
//! ```
//!
//! needs no truncation. Combined with `Ψⁿ − nΨ = (Ψ−1)F − (n−1)` it gives
//!
//! ```text
//! P(Sₙ + Y > N) = n·P(X₁ + Y > N) − (n−1)·P(Y > N) + I(N)/(2π),
//! I(N) = ∫_{−ε}^{ε} e^{−itN} Θ(t) ψ(t) F(t,n) dt,
//! ```
//!
//! and one integration by parts splits `I(N) = I₁ + I₂ + I₃` into the
//! `ψ′`, `Θ′` and `F′` terms. Every integrand shares the nodes of one
//! oscillatory pass, so all six quantities are accumulated together.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charfn::{psi_parts, telescoped_sums, theta_parts};
use crate::model::{Side, TailModel};
use crate::quadrature::{inner_window_half, oscillatory_blocks, BlockDecay, Lanes};
use crate::smoother::SmootherSpec;
use crate::{Error, Result};

/// Default for the range-condition indicator `n (log N)² / N < RANGE_RATIO_MAX`.
pub const RANGE_RATIO_MAX: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FarMode {
    /// Integrate both endpoints `N` and `N + g`.
    Exact,
    /// Drop the `N + g` endpoint and charge its size to the error bar.
    #[default]
    Budgeted,
}

/// What to do when the smoothing budget fails at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BudgetPolicy {
    #[default]
    Enforce,
    /// Compute anyway and report the violation in the result.
    Record,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    X1,
    Sn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Near,
    Far,
}

/// Shift and error scales of the smoothing budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceBudget {
    pub a: f64,
    pub z_n: f64,
    pub y_n: f64,
    /// Bound on `P(|Y| > z_N)`.
    pub tail_bound: f64,
    pub shift_ok: bool,
    pub tail_ok: bool,
}

impl ToleranceBudget {
    pub fn new(spec: &SmootherSpec, big_n: f64) -> Self {
        let a = spec.moment_order();
        let z_n = big_n.powf(2.0 / a);
        let y_n = big_n.powf(-(2.0 - 2.0 / a));
        let tail_bound = spec.tail_bound(z_n);
        Self { a, z_n, y_n, tail_bound, shift_ok: z_n < 0.1 * big_n, tail_ok: tail_bound < 0.1 * y_n }
    }

    pub fn holds(&self) -> bool {
        self.shift_ok && self.tail_ok
    }
}

#[derive(Debug, Clone)]
pub struct InversionConfig {
    pub n: u64,
    pub big_n: f64,
    pub g: f64,
    pub spec: SmootherSpec,
    pub model: TailModel,
    pub far_mode: FarMode,
    pub budget_policy: BudgetPolicy,
    pub range_ratio_max: f64,
}

impl InversionConfig {
    /// Validates `g ≥ N²`, `N > b_n`, the canonical model and `|Ψ| < 1` on
    /// `(0, ε]`.
    pub fn new(
        n: u64,
        big_n: f64,
        g: f64,
        spec: SmootherSpec,
        model: TailModel,
        far_mode: FarMode,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !(big_n > 0.0 && big_n.is_finite()) {
            return Err(Error::Domain(format!("threshold N must be positive and finite, got {big_n}")));
        }
        if !(g >= big_n * big_n) {
            return Err(Error::Domain(format!("far offset g = {g} is below N² = {}", big_n * big_n)));
        }
        if !model.is_canonical() {
            return Err(Error::InvalidModel("inversion needs the canonical model".into()));
        }
        let b_n = model.norming(n)?.b_n;
        if !(big_n > b_n) {
            return Err(Error::Domain(format!("threshold N = {big_n} does not exceed b_n = {b_n}")));
        }
        if !(PI / big_n < spec.epsilon()) {
            return Err(Error::FrequencyDomain { lower: PI / big_n, epsilon: spec.epsilon() });
        }
        let c = model.p() - model.q();
        for i in 1..=1000 {
            let t = spec.epsilon() * i as f64 / 1000.0;
            if psi_parts(c, t).0.norm() >= 1.0 {
                return Err(Error::Domain(format!("|Ψ| reaches 1 at t = {t} inside the window")));
            }
        }
        Ok(Self {
            n,
            big_n,
            g,
            spec,
            model,
            far_mode,
            budget_policy: BudgetPolicy::Enforce,
            range_ratio_max: RANGE_RATIO_MAX,
        })
    }

    pub fn with_budget_policy(mut self, policy: BudgetPolicy) -> Self {
        self.budget_policy = policy;
        self
    }

    pub fn budget(&self) -> ToleranceBudget {
        ToleranceBudget::new(&self.spec, self.big_n)
    }

    /// `n (log N)² / N`.
    pub fn range_ratio(&self) -> f64 {
        self.n as f64 * self.big_n.ln().powi(2) / self.big_n
    }

    pub fn in_range(&self) -> bool {
        self.range_ratio() < self.range_ratio_max
    }

    fn check_budget(&self) -> Result<ToleranceBudget> {
        let b = self.budget();
        if !b.holds() && self.budget_policy == BudgetPolicy::Enforce {
            return Err(Error::BudgetViolation(format!(
                "N = {}: z_N/N = {:.3e} (need < 0.1), tail bound / y_N = {:.3e} (need < 0.1)",
                self.big_n,
                b.z_n / self.big_n,
                b.tail_bound / b.y_n
            )));
        }
        Ok(b)
    }

    /// Size charged for dropping the `N + g` endpoint of a tail probability
    /// of `Z = S_w`.
    fn far_charge(&self, w: u64) -> f64 {
        let far = self.big_n + self.g;
        let wf = w as f64;
        2.0 * wf / far + wf * wf * far.ln().powi(2) / (far * far) + self.spec.tail_bound(0.5 * far)
    }

    fn far_charge_i(&self) -> f64 {
        let far = self.big_n + self.g;
        let nf = self.n as f64;
        nf * nf * far.ln().powi(2) / (far * far)
    }
}

/// A real quantity with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Everything one oscillatory pass produces at a single endpoint `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointValues {
    pub m: f64,
    /// `P(X₁ + Y > M)`.
    pub p_x_smoothed: Estimate,
    /// `P(Sₙ + Y > M)` straight from `ψΨⁿ`.
    pub p_s_direct: Estimate,
    pub i_total: Estimate,
    pub i1: Estimate,
    pub i2: Estimate,
    pub i3: Estimate,
    pub periods: usize,
    pub block_decay: Option<BlockDecay>,
}

impl EndpointValues {
    pub fn decomposition_mismatch(&self) -> f64 {
        (self.i1.value + self.i2.value + self.i3.value - self.i_total.value).abs()
    }

    pub fn decomposition_allowance(&self) -> f64 {
        10.0 * (self.i1.error + self.i2.error + self.i3.error + self.i_total.error)
    }

    /// `P(Sₙ + Y > M)` through `I(M)`, with `P(Y > M)` dropped.
    pub fn p_s_via_i(&self, n: u64, spec: &SmootherSpec) -> Estimate {
        let nf = n as f64;
        let value = nf * self.p_x_smoothed.value + self.i_total.value / (2.0 * PI);
        let dropped = (nf - 1.0) * 0.5 * spec.tail_bound(self.m);
        let error = nf * self.p_x_smoothed.error + self.i_total.error / (2.0 * PI) + dropped;
        Estimate { value, error }
    }
}

/// Evaluates all integrands at endpoint `M`.
pub fn endpoint_values(model: &TailModel, spec: &SmootherSpec, n: u64, m: f64) -> Result<EndpointValues> {
    if !model.is_canonical() {
        return Err(Error::InvalidModel("inversion needs the canonical model".into()));
    }
    let c = model.p() - model.q();
    // Lanes: ψΨ/t, ψΨⁿ/t, ΘψF, Θψ′F, Θ′ψF, ΘψF′ (all at t > 0).
    let lanes = |t: f64| -> Lanes<6> {
        let (w, w1, _) = spec.eval(t);
        let (psi, dpsi, _) = psi_parts(c, t);
        let base = psi * (w / t);
        let pow_n = if n == 1 { psi } else { psi.powu(n as u32) };
        if n == 1 {
            let z = Complex64::new(0.0, 0.0);
            return Lanes([base, pow_n * (w / t), z, z, z, z]);
        }
        let (th, dth, _) = theta_parts(c, t);
        let (f, s1) = telescoped_sums(psi, n);
        let fp = dpsi * s1;
        Lanes([base, pow_n * (w / t), th * f * w, th * f * w1, dth * f * w, th * fp * w])
    };
    let kinks = spec.breakpoints();
    let outer = oscillatory_blocks(&lanes, m, spec.epsilon(), &kinks)?;
    // Inner window: only the imaginary part of the first two lanes is used
    // (their real part is not integrable at 0).
    let inner_f = |t: f64| -> Lanes<6> {
        let (s, co) = (t * m).sin_cos();
        let ph = Complex64::new(co, -s);
        let mut l = lanes(t);
        for (i, z) in l.0.iter_mut().enumerate() {
            *z *= ph;
            if i < 2 {
                z.re = 0.0;
            }
        }
        l
    };
    let (inner, inner_err) = inner_window_half(&inner_f, PI / m)?;
    let mut value = inner;
    for (i, z) in value.0.iter_mut().enumerate() {
        if i < 2 {
            z.re = 0.0;
        }
    }
    let value = value + outer.value;
    let err = inner_err + outer.lane_error;
    let (v, e) = (value.0, err.0);
    let gp = |i: usize| Estimate {
        value: 0.5 + v[i].im / PI,
        error: e[i].im / PI,
    };
    let by_parts = |i: usize| Estimate { value: 2.0 * v[i].im / m, error: 2.0 * e[i].im / m };
    Ok(EndpointValues {
        m,
        p_x_smoothed: gp(0),
        p_s_direct: gp(1),
        i_total: Estimate { value: 2.0 * v[2].re, error: 2.0 * e[2].re },
        i1: by_parts(3),
        i2: by_parts(4),
        i3: by_parts(5),
        periods: outer.periods,
        block_decay: outer.decay,
    })
}

/// `P(N < Z + Y ≤ N + g)` (exact mode) or `P(Z + Y > N)` with the far
/// endpoint charged to the error (budgeted mode).
pub fn smoothed_interval_prob(cfg: &InversionConfig, kind: Kind) -> Result<Estimate> {
    cfg.check_budget()?;
    let w = match kind {
        Kind::X1 => 1,
        Kind::Sn => cfg.n,
    };
    let pick = |e: &EndpointValues| match kind {
        Kind::X1 => e.p_x_smoothed,
        Kind::Sn => e.p_s_direct,
    };
    let near = pick(&endpoint_values(&cfg.model, &cfg.spec, w, cfg.big_n)?);
    match cfg.far_mode {
        FarMode::Exact => {
            let far = pick(&endpoint_values(&cfg.model, &cfg.spec, w, cfg.big_n + cfg.g)?);
            Ok(Estimate { value: near.value - far.value, error: near.error + far.error })
        }
        FarMode::Budgeted => Ok(Estimate { value: near.value, error: near.error + cfg.far_charge(w) }),
    }
}

/// `I = I(N) − I(N+g)`; budgeted mode keeps only `I(N)`.
pub fn integral_i(cfg: &InversionConfig) -> Result<Estimate> {
    cfg.check_budget()?;
    let near = endpoint_values(&cfg.model, &cfg.spec, cfg.n, cfg.big_n)?.i_total;
    match cfg.far_mode {
        FarMode::Exact => {
            let far = endpoint_values(&cfg.model, &cfg.spec, cfg.n, cfg.big_n + cfg.g)?.i_total;
            Ok(Estimate { value: near.value - far.value, error: near.error + far.error })
        }
        FarMode::Budgeted => Ok(Estimate { value: near.value, error: near.error + cfg.far_charge_i() }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub i1: Estimate,
    pub i2: Estimate,
    pub i3: Estimate,
    pub i_total: Estimate,
    pub mismatch: f64,
    pub allowed: f64,
}

/// `(I₁, I₂, I₃)` at one endpoint, checked against `I(endpoint)`.
pub fn i_decomposition(cfg: &InversionConfig, endpoint: Endpoint) -> Result<Decomposition> {
    let m = match endpoint {
        Endpoint::Near => cfg.big_n,
        Endpoint::Far => cfg.big_n + cfg.g,
    };
    let e = endpoint_values(&cfg.model, &cfg.spec, cfg.n, m)?;
    decomposition_of(&e)
}

fn decomposition_of(e: &EndpointValues) -> Result<Decomposition> {
    let mismatch = e.decomposition_mismatch();
    let allowed = e.decomposition_allowance();
    if mismatch > allowed {
        return Err(Error::DecompositionMismatch { mismatch, allowed });
    }
    Ok(Decomposition { i1: e.i1, i2: e.i2, i3: e.i3, i_total: e.i_total, mismatch, allowed })
}

/// One `(n, N, g)` cell of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPoint {
    pub n: u64,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub g: f64,
    pub p_x1_exact: f64,
    pub p_x1_smoothed: f64,
    pub p_sn_inv: f64,
    pub p_sn_inv_err: f64,
    /// `P(Sₙ + Y > N)` from `ψΨⁿ` directly, as a cross-check.
    pub p_sn_direct: f64,
    pub p_sn_mc: Option<f64>,
    pub p_sn_mc_err: Option<f64>,
    pub delta: f64,
    pub ratio_log: f64,
    pub ratio_plain: f64,
    /// `|Δ| N² / n²`, used for the symmetric model.
    pub ratio_sym: f64,
    pub i_near: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i1_ratio: f64,
    pub i2_ratio: f64,
    pub i3_ratio: f64,
    pub decomposition_mismatch: f64,
    pub decomposition_allowed: f64,
    pub block_decay_max_over_median: Option<f64>,
    pub periods: usize,
    pub budget: ToleranceBudget,
    pub budget_ok: bool,
    pub range_ratio: f64,
    pub in_range: bool,
    pub discordant: bool,
    /// Exact mode only: `P(N < Sₙ + Y ≤ N + g)` and `I(N) − I(N+g)`.
    pub interval_prob_sn: Option<f64>,
    pub i_interval: Option<f64>,
}

/// `Δ = P(Sₙ > N)_inv − n·P(X₁ > N)` with its error bar and diagnostics.
pub fn deviation_delta(cfg: &InversionConfig) -> Result<ExperimentPoint> {
    let budget = cfg.check_budget()?;
    let n = cfg.n;
    let nf = n as f64;
    let big_n = cfg.big_n;
    let near = endpoint_values(&cfg.model, &cfg.spec, n, big_n)?;
    let dec = decomposition_of(&near)?;
    let p_x1_exact = cfg.model.tail_prob(Side::Upper, big_n)?;
    let p_s = near.p_s_via_i(n, &cfg.spec);
    let delta = p_s.value - nf * p_x1_exact;
    let error = p_s.error + budget.y_n + nf * budget.y_n + nf * nf / (big_n * big_n);
    let (interval_prob_sn, i_interval) = match cfg.far_mode {
        FarMode::Exact => {
            let far = endpoint_values(&cfg.model, &cfg.spec, n, big_n + cfg.g)?;
            let far_s = far.p_s_via_i(n, &cfg.spec);
            (Some(p_s.value - far_s.value), Some(near.i_total.value - far.i_total.value))
        }
        FarMode::Budgeted => (None, None),
    };
    let ln_n = big_n.ln();
    let n2 = nf * nf;
    let a = budget.a;
    Ok(ExperimentPoint {
        n,
        big_n,
        g: cfg.g,
        p_x1_exact,
        p_x1_smoothed: near.p_x_smoothed.value,
        p_sn_inv: p_s.value,
        p_sn_inv_err: error,
        p_sn_direct: near.p_s_direct.value,
        p_sn_mc: None,
        p_sn_mc_err: None,
        delta,
        ratio_log: delta.abs() * big_n * big_n / (n2 * ln_n * ln_n),
        ratio_plain: delta.abs() * big_n.powf(2.0 - 2.0 / a) / nf,
        ratio_sym: delta.abs() * big_n * big_n / n2,
        i_near: near.i_total.value,
        i1: dec.i1.value,
        i2: dec.i2.value,
        i3: dec.i3.value,
        i1_ratio: dec.i1.value.abs() * big_n * big_n / n2,
        i2_ratio: dec.i2.value.abs() * big_n * big_n / (n2 * ln_n),
        i3_ratio: dec.i3.value.abs() * big_n * big_n / (n2 * ln_n * ln_n),
        decomposition_mismatch: dec.mismatch,
        decomposition_allowed: dec.allowed,
        block_decay_max_over_median: near.block_decay.map(|d| d.max_over_median()),
        periods: near.periods,
        budget,
        budget_ok: budget.holds(),
        range_ratio: cfg.range_ratio(),
        in_range: cfg.in_range(),
        discordant: false,
        interval_prob_sn,
        i_interval,
    })
}

impl ExperimentPoint {
    /// Attaches a Monte Carlo estimate and sets the discordance flag:
    /// `|inv − mc| > inv_err + 4·mc_std`.
    pub fn attach_mc(&mut self, estimate: f64, std_error: f64) {
        self.p_sn_mc = Some(estimate);
        self.p_sn_mc_err = Some(std_error);
        self.discordant = (self.p_sn_inv - estimate).abs() > self.p_sn_inv_err + 4.0 * std_error;
    }
}
