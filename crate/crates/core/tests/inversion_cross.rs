//! Cross-checks of the inversion pipeline against independent references.

use std::f64::consts::PI;

use heavytail_ld::charfn::{f_jet, theta_jet};
use heavytail_ld::inversion::{
    deviation_delta, i_decomposition, integral_i, smoothed_interval_prob, BudgetPolicy, Endpoint,
    FarMode, InversionConfig, Kind,
};
use heavytail_ld::model::TailModel;
use heavytail_ld::montecarlo::{conv2_oracle, CONV2_TOLERANCE};
use heavytail_ld::quadrature::inner_window_integral;
use heavytail_ld::smoother::SmootherSpec;
use num_complex::Complex64;

fn m7() -> TailModel {
    TailModel::canonical(0.7).unwrap()
}

fn spec() -> SmootherSpec {
    SmootherSpec::new(0.5, 4, 3.5).unwrap()
}

#[test]
fn inner_window_matches_dense_trapezoid() {
    let (n, big_n) = (16u64, 1e3);
    let model = m7();
    let s = spec();
    // Θ·F → 0 at the origin (F vanishes faster than Θ blows up).
    let f = |t: f64| {
        if t == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let theta = theta_jet(&model, t).unwrap().value;
        let (fv, _) = f_jet(&model, t, n).unwrap();
        Complex64::from_polar(1.0, -t * big_n) * theta * s.eval(t).0 * fv
    };
    let r = inner_window_integral(f, big_n).unwrap();

    let h = PI / big_n;
    let pts = 1_000_000usize;
    let step = 2.0 * h / pts as f64;
    let mut acc = (f(-h) + f(h)) * 0.5;
    for i in 1..pts {
        acc += f(-h + i as f64 * step);
    }
    let trap = acc * step;
    assert!((r.value - trap).norm() < 1e-8, "{:?} vs {trap}", r.value);
}

#[test]
fn pair_interval_matches_convolution() {
    let (big_n, g) = (200.0, 4e4);
    let cfg = InversionConfig::new(2, big_n, g, spec(), m7(), FarMode::Exact)
        .unwrap()
        .with_budget_policy(BudgetPolicy::Record);
    let r = smoothed_interval_prob(&cfg, Kind::Sn).unwrap();
    let exact = conv2_oracle(&m7(), big_n).unwrap() - conv2_oracle(&m7(), big_n + g).unwrap();
    let b = cfg.budget();
    let n2 = 4.0 / (big_n * big_n);
    let allowed = r.error + b.y_n + 2.0 * b.y_n + n2 + 2.0 * CONV2_TOLERANCE;
    assert!((r.value - exact).abs() < allowed, "{} vs {exact} (allowed {allowed})", r.value);
}

#[test]
fn exact_and_budgeted_far_modes_agree() {
    for &big_n in &[300.0, 1e3] {
        let make = |mode| {
            InversionConfig::new(16, big_n, big_n * big_n, spec(), m7(), mode)
                .unwrap()
                .with_budget_policy(BudgetPolicy::Record)
        };
        let exact = deviation_delta(&make(FarMode::Exact)).unwrap();
        let budgeted = deviation_delta(&make(FarMode::Budgeted)).unwrap();
        let interval = exact.interval_prob_sn.unwrap();
        assert!(
            (interval - budgeted.p_sn_inv).abs() <= budgeted.p_sn_inv_err,
            "N={big_n}: {interval} vs {} ± {}",
            budgeted.p_sn_inv,
            budgeted.p_sn_inv_err
        );
        let ie = integral_i(&make(FarMode::Exact)).unwrap();
        let ib = integral_i(&make(FarMode::Budgeted)).unwrap();
        assert!((ie.value - ib.value).abs() <= ib.error, "{ie:?} vs {ib:?}");
    }
}

#[test]
fn decomposition_sums_to_the_endpoint_integral() {
    let cfg = InversionConfig::new(16, 1e3, 1e6, spec(), m7(), FarMode::Budgeted)
        .unwrap()
        .with_budget_policy(BudgetPolicy::Record);
    let d = i_decomposition(&cfg, Endpoint::Near).unwrap();
    let sum = d.i1.value + d.i2.value + d.i3.value;
    assert!((sum - d.i_total.value).abs() < 1e-8);
    assert!(d.mismatch <= d.allowed);
    let far = i_decomposition(&cfg, Endpoint::Far).unwrap();
    assert!(far.mismatch <= far.allowed);
}

#[test]
fn single_summand_delta_vanishes_within_budget() {
    let cfg = InversionConfig::new(1, 1e4, 1e8, spec(), m7(), FarMode::Budgeted).unwrap();
    let p = deviation_delta(&cfg).unwrap();
    assert!(p.delta.abs() <= p.p_sn_inv_err, "{p:?}");
}

#[test]
fn symmetric_correction_is_bounded_without_log() {
    let cfg = InversionConfig::new(16, 1e3, 1e6, spec(), TailModel::symmetric(), FarMode::Budgeted)
        .unwrap()
        .with_budget_policy(BudgetPolicy::Record);
    let i = integral_i(&cfg).unwrap();
    let ratio = i.value.abs() * 1e6 / 256.0;
    assert!(ratio.is_finite() && ratio < 1.0, "{ratio}");
}
