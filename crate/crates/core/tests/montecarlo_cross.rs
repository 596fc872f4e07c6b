use heavytail_ld::model::TailModel;
use heavytail_ld::montecarlo::{bigjump_tail_estimate, naive_tail_estimate, EstimatorResult};

fn m7() -> TailModel {
    TailModel::canonical(0.7).unwrap()
}

fn agree(a: &EstimatorResult, b: &EstimatorResult, k: f64) -> bool {
    (a.estimate - b.estimate).abs() <= k * a.std_error.hypot(b.std_error)
}

#[test]
fn naive_and_bigjump_agree_on_a_grid() {
    let mut seed = 100;
    for &n in &[2u64, 4, 8] {
        for &big_n in &[20.0, 60.0, 200.0] {
            seed += 1;
            let naive = naive_tail_estimate(&m7(), n, big_n, 2_000_000, seed, false).unwrap();
            let big = bigjump_tail_estimate(&m7(), n, big_n, 200_000, seed + 1000).unwrap();
            assert!(agree(&naive, &big, 4.0), "n={n} N={big_n}: {naive:?} vs {big:?}");
        }
    }
}

#[test]
fn bigjump_reduces_variance_tenfold() {
    let (n, big_n, trials) = (16, 1e5, 1_000_000);
    let naive = naive_tail_estimate(&m7(), n, big_n, trials, 5, false).unwrap();
    let big = bigjump_tail_estimate(&m7(), n, big_n, trials, 6).unwrap();
    assert!(
        naive.relative_std_error() >= 10.0 * big.relative_std_error(),
        "naive {} vs bigjump {}",
        naive.relative_std_error(),
        big.relative_std_error()
    );
    assert!(agree(&naive, &big, 4.0));
}

/// 10⁹ naive trials; run with `cargo test -- --ignored`.
#[test]
#[ignore = "slow: 10^9 naive trials"]
fn bigjump_matches_large_naive_run() {
    let naive = naive_tail_estimate(&m7(), 16, 1e5, 1_000_000_000, 7, false).unwrap();
    let big = bigjump_tail_estimate(&m7(), 16, 1e5, 1_000_000, 8).unwrap();
    assert!(agree(&naive, &big, 4.0), "{naive:?} vs {big:?}");
}

#[test]
fn heavier_right_tail_gives_larger_estimate() {
    let light = bigjump_tail_estimate(&TailModel::canonical(0.3).unwrap(), 4, 50.0, 400_000, 3).unwrap();
    let sym = bigjump_tail_estimate(&TailModel::symmetric(), 4, 50.0, 400_000, 1).unwrap();
    let heavy = bigjump_tail_estimate(&m7(), 4, 50.0, 400_000, 4).unwrap();
    assert!(light.estimate < sym.estimate && sym.estimate < heavy.estimate);
}
