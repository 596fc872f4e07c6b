use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::gk::{gk15, Panel};
use super::{Lane, QuadResult};
use crate::{Error, Result};

/// Subdivision limit for the adaptive engine.
pub const MAX_SUBDIVISIONS: usize = 4000;

struct Item<T> {
    a: f64,
    b: f64,
    panel: Panel<T>,
    err: f64,
}

impl<T> PartialEq for Item<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Item<T> {}
impl<T> PartialOrd for Item<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Item<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// `∫_lo^hi f(x) dx` for real `f`; either limit may be infinite.
///
/// The integral is accepted once the summed error estimate is below
/// `max(tol, 1e-13·|value|)`.
pub fn adaptive_integral<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let (v, e) = adaptive_integral_lanes(&f, lo, hi, tol)?;
    Ok(QuadResult {
        value: Complex64::new(v, 0.0),
        abs_error_estimate: e,
        periods_used: 0,
        block_decay: None,
    })
}

/// Lane-generic version of [`adaptive_integral`]; returns `(value, error)`.
pub fn adaptive_integral_lanes<T, F>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(T, f64)>
where
    T: Lane,
    F: Fn(f64) -> T,
{
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain("integration limits are NaN".into()));
    }
    if lo == hi {
        return Ok((T::zero(), 0.0));
    }
    if lo > hi {
        let (v, e) = adaptive_integral_lanes(f, hi, lo, tol)?;
        return Ok((v.scale(-1.0), e));
    }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => adapt(f, lo, hi, tol),
        (true, false) => {
            // x = lo + s/(1−s)
            let g = |s: f64| {
                let r = 1.0 / (1.0 - s);
                f(lo + s * r).scale(r * r)
            };
            adapt(&g, 0.0, 1.0, tol)
        }
        (false, true) => {
            let g = |s: f64| {
                let r = 1.0 / (1.0 - s);
                f(hi - s * r).scale(r * r)
            };
            adapt(&g, 0.0, 1.0, tol)
        }
        (false, false) => {
            let (v1, e1) = adaptive_integral_lanes(f, f64::NEG_INFINITY, 0.0, 0.5 * tol)?;
            let (v2, e2) = adaptive_integral_lanes(f, 0.0, f64::INFINITY, 0.5 * tol)?;
            Ok((v1 + v2, e1 + e2))
        }
    }
}

fn adapt<T, F>(f: &F, a: f64, b: f64, tol: f64) -> Result<(T, f64)>
where
    T: Lane,
    F: Fn(f64) -> T,
{
    let first = gk15(f, a, b);
    check_finite(first.kronrod, a, b)?;
    let mut heap = BinaryHeap::new();
    let mut total = first.kronrod;
    let mut err_sum = first.error();
    heap.push(Item { a, b, err: err_sum, panel: first });
    let mut count = 1usize;
    loop {
        let target = tol.max(1e-13 * total.norm());
        if err_sum <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-14 * (worst.a.abs() + worst.b.abs()) {
            // Cannot split further: keep the panel and stop refining it.
            heap.push(Item { err: 0.0, ..worst });
            err_sum = heap.iter().map(|i| i.err).sum();
            if heap.iter().all(|i| i.err == 0.0) {
                break;
            }
            continue;
        }
        if count >= MAX_SUBDIVISIONS {
            return Err(Error::MaxDepth(count, err_sum));
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        check_finite(left.kronrod, worst.a, mid)?;
        check_finite(right.kronrod, mid, worst.b)?;
        total = total - worst.panel.kronrod + left.kronrod + right.kronrod;
        let (el, er) = (left.error(), right.error());
        err_sum += el + er - worst.err;
        heap.push(Item { a: worst.a, b: mid, panel: left, err: el });
        heap.push(Item { a: mid, b: worst.b, panel: right, err: er });
        count += 1;
        if count % 64 == 0 {
            // Re-sum to shed floating drift in the running totals.
            total = heap.iter().fold(T::zero(), |acc, i| acc + i.panel.kronrod);
            err_sum = heap.iter().map(|i| i.err).sum();
        }
    }
    let total = heap.iter().fold(T::zero(), |acc, i| acc + i.panel.kronrod);
    let err = heap.iter().map(|i| i.panel.error()).sum();
    Ok((total, err))
}

fn check_finite<T: Lane>(v: T, a: f64, b: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(0.5 * (a + b)))
    }
}
