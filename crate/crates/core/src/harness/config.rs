//! Experiment configuration, read from TOML.
//!
//! Every section is optional and falls back to the defaults below; unknown
//! keys are rejected. A complete file looks like:
//!
//! ```toml
//! [model]
//! p = 0.7            # right-tail weight; q = 1 − p (may be given, must match)
//!
//! [smoother]
//! epsilon = 0.5      # half-width of the frequency window
//! k = 4              # B-spline order
//! a = 3.5            # moment order of Y
//!
//! [grid]
//! n = [16, 32, 64, 128, 256]
//! multipliers = [20.0, 40.0, 80.0, 160.0]   # N = K·n·(ln n)^log_power
//! log_power = 3
//! out_of_range = true                       # add the arm N = K·n
//! out_of_range_multiplier = 5.0
//! g_factor = 1.0                            # g = g_factor·N², needs ≥ 1
//! far_mode = "budgeted"                     # or "exact"
//! range_ratio_max = 0.2
//!
//! [mc]
//! estimator = "bigjump"                     # "naive", "bigjump" or "none"
//! trials = 200000
//! seed = 1
//! force = false
//!
//! [output]
//! dir = "out"
//!
//! [run]
//! workers = 0                               # 0 = one per core
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::inversion::{FarMode, RANGE_RATIO_MAX};
use crate::model::TailModel;
use crate::smoother::{SmootherSpec, DEFAULT_EPSILON, DEFAULT_K, DEFAULT_MOMENT_ORDER};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    pub x0: f64,
    pub c1_plus: f64,
    pub c1_minus: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { p: 0.7, q: None, x0: 1.0, c1_plus: 0.0, c1_minus: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmootherSection {
    pub epsilon: f64,
    pub k: u32,
    pub a: f64,
}

impl Default for SmootherSection {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON, k: DEFAULT_K, a: DEFAULT_MOMENT_ORDER }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: Vec<u64>,
    pub multipliers: Vec<f64>,
    pub log_power: i32,
    pub out_of_range: bool,
    pub out_of_range_multiplier: f64,
    pub g_factor: f64,
    pub far_mode: FarMode,
    pub range_ratio_max: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n: vec![16, 32, 64, 128, 256],
            multipliers: vec![20.0, 40.0, 80.0, 160.0],
            log_power: 3,
            out_of_range: true,
            out_of_range_multiplier: 5.0,
            g_factor: 1.0,
            far_mode: FarMode::Budgeted,
            range_ratio_max: RANGE_RATIO_MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorChoice {
    Naive,
    Bigjump,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub estimator: EstimatorChoice,
    pub trials: u64,
    pub seed: u64,
    pub force: bool,
}

impl Default for McSection {
    fn default() -> Self {
        Self { estimator: EstimatorChoice::Bigjump, trials: 200_000, seed: 1, force: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub workers: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub model: ModelSection,
    pub smoother: SmootherSection,
    pub grid: GridSection,
    pub mc: McSection,
    pub output: OutputSection,
    pub run: RunSection,
}

/// Which part of the grid a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// `N = K·n·(ln n)^power`, where the range condition is expected.
    Main,
    /// `N = K·n`, kept to show where the bound degrades; never asserted.
    OutOfRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: u64,
    pub big_n: f64,
    pub g: f64,
    pub arm: Arm,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn model(&self) -> Result<TailModel> {
        let m = &self.model;
        TailModel::new(m.p, m.x0, m.c1_plus, m.c1_minus).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn smoother(&self) -> Result<SmootherSpec> {
        let s = &self.smoother;
        SmootherSpec::new(s.epsilon, s.k, s.a).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        if let Some(q) = self.model.q {
            if (q - model.q()).abs() > 1e-12 {
                return Err(Error::Config(format!("q = {q} must equal 1 − p = {}", model.q())));
            }
        }
        if !model.is_canonical() {
            return Err(Error::Config(
                "the inversion pipeline needs the canonical model (x0 = 1, c1 = 0)".into(),
            ));
        }
        self.smoother()?;
        let g = &self.grid;
        if g.n.iter().any(|&n| n < 2) {
            return Err(Error::Config("grid n values must be at least 2".into()));
        }
        if g.multipliers.iter().chain(std::iter::once(&g.out_of_range_multiplier)).any(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::Config("grid multipliers must be positive".into()));
        }
        if !(g.g_factor >= 1.0 && g.g_factor.is_finite()) {
            return Err(Error::Config(format!("g_factor = {} must be >= 1 (g >= N²)", g.g_factor)));
        }
        if !(g.range_ratio_max > 0.0) {
            return Err(Error::Config("range_ratio_max must be positive".into()));
        }
        if self.mc.estimator != EstimatorChoice::None && self.mc.trials == 0 {
            return Err(Error::Config("mc.trials must be positive".into()));
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.model().map(|m| m.is_symmetric()).unwrap_or(false)
    }

    /// Grid cells in report order: by `n`, main arm by multiplier, then
    /// the out-of-range arm.
    pub fn cells(&self) -> Vec<Cell> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            let nf = n as f64;
            for &k in &g.multipliers {
                let big_n = k * nf * nf.ln().powi(g.log_power);
                out.push(Cell { n, big_n, g: g.g_factor * big_n * big_n, arm: Arm::Main });
            }
            if g.out_of_range {
                let big_n = g.out_of_range_multiplier * nf;
                out.push(Cell { n, big_n, g: g.g_factor * big_n * big_n, arm: Arm::OutOfRange });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.cells().len(), 25);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ExperimentConfig::from_toml_str("[model]\np = 0.7\nr = 1\n").unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        assert!(ExperimentConfig::from_toml_str("[nonsense]\n").is_err());
    }

    #[test]
    fn inconsistent_q_is_rejected() {
        assert!(ExperimentConfig::from_toml_str("[model]\np = 0.7\nq = 0.4\n").is_err());
        assert!(ExperimentConfig::from_toml_str("[model]\np = 0.7\nq = 0.3\n").is_ok());
    }

    #[test]
    fn far_offset_must_cover_n_squared() {
        assert!(ExperimentConfig::from_toml_str("[grid]\ng_factor = 0.5\n").is_err());
    }

    #[test]
    fn cells_follow_the_rule() {
        let c = ExperimentConfig::from_toml_str(
            "[grid]\nn = [16]\nmultipliers = [20.0]\n",
        )
        .unwrap();
        let cells = c.cells();
        assert_eq!(cells.len(), 2);
        let expect = 20.0 * 16.0 * 16f64.ln().powi(3);
        assert!((cells[0].big_n - expect).abs() < 1e-9);
        assert_eq!(cells[0].g, cells[0].big_n * cells[0].big_n);
        assert_eq!((cells[1].big_n, cells[1].arm), (80.0, Arm::OutOfRange));
        let main_only = ExperimentConfig::from_toml_str("[grid]\nout_of_range = false\n").unwrap();
        assert!(main_only.cells().iter().all(|c| c.arm == Arm::Main));
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
    }
}
