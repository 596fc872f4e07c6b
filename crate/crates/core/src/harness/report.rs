//! Report rows and the files written from them.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{Arm, Cell};
use super::fit::ScalingSummary;
use crate::inversion::ExperimentPoint;
use crate::montecarlo::EstimatorResult;
use crate::Result;

/// Bumped whenever a column is added, removed, renamed or reordered.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const CSV_COLUMNS: [&str; 19] = [
    "n",
    "N",
    "g",
    "P_X1",
    "P_Sn_inv",
    "P_Sn_inv_err",
    "P_Sn_mc",
    "P_Sn_mc_err",
    "delta",
    "ratio_log",
    "ratio_plain",
    "I1_ratio",
    "I2_ratio",
    "I3_ratio",
    "zN",
    "yN",
    "in_range",
    "discordant",
    "error",
];

/// One evaluated grid cell. Failures are kept in `error` rather than
/// aborting the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub cell: Cell,
    pub p_x1_exact: f64,
    pub z_n: f64,
    pub y_n: f64,
    pub in_range: bool,
    pub point: Option<ExperimentPoint>,
    pub mc: Option<EstimatorResult>,
    pub error: Option<String>,
}

impl Row {
    pub fn discordant(&self) -> bool {
        self.point.as_ref().is_some_and(|p| p.discordant)
    }

    fn csv_record(&self) -> Vec<String> {
        let f = |x: f64| format!("{x:e}");
        let opt = |x: Option<f64>| x.map(f).unwrap_or_default();
        let p = self.point.as_ref();
        vec![
            self.cell.n.to_string(),
            f(self.cell.big_n),
            f(self.cell.g),
            f(self.p_x1_exact),
            opt(p.map(|p| p.p_sn_inv)),
            opt(p.map(|p| p.p_sn_inv_err)),
            opt(p.and_then(|p| p.p_sn_mc)),
            opt(p.and_then(|p| p.p_sn_mc_err)),
            opt(p.map(|p| p.delta)),
            opt(p.map(|p| p.ratio_log)),
            opt(p.map(|p| p.ratio_plain)),
            opt(p.map(|p| p.i1_ratio)),
            opt(p.map(|p| p.i2_ratio)),
            opt(p.map(|p| p.i3_ratio)),
            f(self.z_n),
            f(self.y_n),
            self.in_range.to_string(),
            self.discordant().to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

/// `max / median` of one recorded ratio over the main arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSpread {
    pub max: f64,
    pub median: f64,
    pub max_over_median: f64,
}

impl RatioSpread {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        let median = super::fit::median(values);
        Some(Self { max, median, max_over_median: max / median })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub p: f64,
    pub q: f64,
    /// `c = p − q`; zero selects the symmetric ratio.
    pub c: f64,
    pub symmetric: bool,
    pub epsilon: f64,
    pub k: u32,
    pub a: f64,
    pub rng: String,
    pub seed: u64,
    pub cells: usize,
    pub failed_cells: usize,
    pub in_range_cells: usize,
    pub discordant_cells: usize,
    /// Budget chain held at every successfully evaluated main-arm cell.
    pub budget_ok_main_arm: bool,
    /// Decomposition closure held at every successfully evaluated cell.
    pub decomposition_closed: bool,
    pub i1_ratio: Option<RatioSpread>,
    pub i2_ratio: Option<RatioSpread>,
    pub i3_ratio: Option<RatioSpread>,
    pub fit: Option<ScalingSummary>,
    pub fit_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl Report {
    pub fn main_arm(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.cell.arm == Arm::Main)
    }

    pub fn any_discordant(&self) -> bool {
        self.rows.iter().any(Row::discordant)
    }

    /// The grid as CSV text. The first line names the schema; the second,
    /// present only when `timestamp` is given, records when it was written.
    pub fn to_csv(&self, timestamp: Option<&str>) -> Result<String> {
        let mut out = format!("# heavytail-ld grid, csv schema {CSV_SCHEMA_VERSION}\n");
        if let Some(ts) = timestamp {
            out.push_str(&format!("# generated {ts}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.csv_record())?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }

    /// `ln N` against `ln |Δ|` for one `n`, ready for gnuplot.
    pub fn slice_data(&self, n: u64) -> String {
        let mut out = format!("# n = {n}\n# ln_N\tln_abs_delta\tin_range\n");
        for row in self.rows.iter().filter(|r| r.cell.n == n) {
            if let Some(p) = &row.point {
                if p.delta != 0.0 {
                    out.push_str(&format!(
                        "{:e}\t{:e}\t{}\n",
                        row.cell.big_n.ln(),
                        p.delta.abs().ln(),
                        u8::from(row.in_range)
                    ));
                }
            }
        }
        out
    }

    /// Writes `grid.csv`, `summary.json` and one `delta_n{n}.dat` per `n`
    /// into `dir`, returning the paths.
    pub fn write_to(&self, dir: &Path, timestamp: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let stamp = timestamp.then(|| chrono::Utc::now().to_rfc3339());
        let mut written = Vec::new();

        let csv_path = dir.join("grid.csv");
        fs::write(&csv_path, self.to_csv(stamp.as_deref())?)?;
        written.push(csv_path);

        let json_path = dir.join("summary.json");
        let mut value = serde_json::to_value(&self.summary)?;
        if let Some(ts) = &stamp {
            value["generated"] = serde_json::Value::String(ts.clone());
        }
        let mut f = fs::File::create(&json_path)?;
        serde_json::to_writer_pretty(&mut f, &value)?;
        f.write_all(b"\n")?;
        written.push(json_path);

        let mut ns: Vec<u64> = self.rows.iter().map(|r| r.cell.n).collect();
        ns.dedup();
        for n in ns {
            let path = dir.join(format!("delta_n{n}.dat"));
            fs::write(&path, self.slice_data(n))?;
            written.push(path);
        }
        Ok(written)
    }
}
