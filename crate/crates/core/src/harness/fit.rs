//! Scaling-law fits over a finished grid.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Minimum usable points per `n`-slice.
pub const MIN_SLICE_POINTS: usize = 4;

/// What the fit needs from one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingSample {
    pub n: u64,
    pub big_n: f64,
    pub delta: f64,
    pub in_range: bool,
    pub discordant: bool,
}

impl ScalingSample {
    /// `|Δ| N² / (n² (ln N)²)`, or `|Δ| N² / n²` for the symmetric law.
    pub fn normalized_ratio(&self, symmetric: bool) -> f64 {
        let n2 = (self.n as f64).powi(2);
        let base = self.delta.abs() * self.big_n * self.big_n / n2;
        if symmetric {
            base
        } else {
            base / self.big_n.ln().powi(2)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceFit {
    pub n: u64,
    pub points: usize,
    /// OLS slope of `ln|Δ|` against `ln N`.
    pub slope: f64,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub symmetric: bool,
    pub slices: Vec<SliceFit>,
    pub ratio_max: f64,
    pub ratio_median: f64,
    pub ratio_max_over_median: f64,
    pub points_used: usize,
    pub excluded_discordant: usize,
    pub excluded_out_of_range: usize,
    pub excluded_zero_delta: usize,
}

/// Median of a non-empty slice (the mean of the middle pair for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

/// Per-slice slopes and the spread of the normalised ratio.
///
/// Only in-range, concordant points with `Δ ≠ 0` are used; the others are
/// counted. Every slice needs [`MIN_SLICE_POINTS`] usable points.
pub fn fit_scaling(samples: &[ScalingSample], symmetric: bool) -> Result<ScalingSummary> {
    let mut excluded_discordant = 0;
    let mut excluded_out_of_range = 0;
    let mut excluded_zero_delta = 0;
    let mut used = Vec::new();
    for s in samples {
        if !s.in_range {
            excluded_out_of_range += 1;
        } else if s.discordant {
            excluded_discordant += 1;
        } else if s.delta == 0.0 || !s.delta.is_finite() {
            excluded_zero_delta += 1;
        } else {
            used.push(*s);
        }
    }

    let mut ns: Vec<u64> = samples.iter().map(|s| s.n).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::InsufficientPoints("the report has no points".into()));
    }
    let mut slices = Vec::new();
    for n in ns {
        let pts: Vec<&ScalingSample> = used.iter().filter(|s| s.n == n).collect();
        if pts.len() < MIN_SLICE_POINTS {
            return Err(Error::InsufficientPoints(format!(
                "n = {n} has {} usable points, need {MIN_SLICE_POINTS}",
                pts.len()
            )));
        }
        let xs: Vec<f64> = pts.iter().map(|s| s.big_n.ln()).collect();
        let ys: Vec<f64> = pts.iter().map(|s| s.delta.abs().ln()).collect();
        let (intercept, slope) = ols(&xs, &ys);
        slices.push(SliceFit { n, points: pts.len(), slope, intercept });
    }

    let ratios: Vec<f64> = used.iter().map(|s| s.normalized_ratio(symmetric)).collect();
    let ratio_max = ratios.iter().copied().fold(0.0, f64::max);
    let ratio_median = median(&ratios);
    Ok(ScalingSummary {
        symmetric,
        slices,
        ratio_max,
        ratio_median,
        ratio_max_over_median: ratio_max / ratio_median,
        points_used: used.len(),
        excluded_discordant,
        excluded_out_of_range,
        excluded_zero_delta,
    })
}
