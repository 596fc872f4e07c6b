//! Experiment grids: evaluate `Δ` over `(n, N)` cells, cross-check each
//! against Monte Carlo, fit the scaling law and write the report files.

pub mod config;
pub mod fit;
pub mod report;

use rayon::prelude::*;

pub use config::{Arm, Cell, EstimatorChoice, ExperimentConfig};
pub use fit::{fit_scaling, ScalingSample, ScalingSummary, SliceFit};
pub use report::{RatioSpread, Report, Row, Summary, CSV_COLUMNS, CSV_SCHEMA_VERSION};

use crate::inversion::{deviation_delta, BudgetPolicy, InversionConfig, ToleranceBudget};
use crate::model::TailModel;
use crate::montecarlo::{bigjump_tail_estimate, naive_tail_estimate, RNG_IDENTITY};
use crate::smoother::SmootherSpec;
use crate::{Error, Result};

/// Seed for cell `index`, so cells draw from unrelated streams.
pub fn cell_seed(master: u64, index: usize) -> u64 {
    master ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Evaluates every cell of the grid. Only configuration problems are
/// errors; anything that goes wrong inside a cell lands in its row.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let model = config.model()?;
    let spec = config.smoother()?;
    let cells = config.cells();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<Row> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(i, cell)| evaluate_cell(config, &model, &spec, cell, i))
            .collect()
    });

    let summary = summarize(config, &model, &spec, &rows);
    Ok(Report { rows, summary })
}

fn evaluate_cell(
    config: &ExperimentConfig,
    model: &TailModel,
    spec: &SmootherSpec,
    cell: &Cell,
    index: usize,
) -> Row {
    let budget = ToleranceBudget::new(spec, cell.big_n);
    let range_ratio = cell.n as f64 * cell.big_n.ln().powi(2) / cell.big_n;
    let mut row = Row {
        cell: *cell,
        p_x1_exact: model.tail_upper_extended(cell.big_n),
        z_n: budget.z_n,
        y_n: budget.y_n,
        in_range: range_ratio < config.grid.range_ratio_max,
        point: None,
        mc: None,
        error: None,
    };
    // The out-of-range arm sits where the budget cannot hold; it is
    // evaluated for evidence only.
    let policy = match cell.arm {
        Arm::Main => BudgetPolicy::Enforce,
        Arm::OutOfRange => BudgetPolicy::Record,
    };
    let point = InversionConfig::new(cell.n, cell.big_n, cell.g, spec.clone(), *model, config.grid.far_mode)
        .map(|c| {
            let mut c = c.with_budget_policy(policy);
            c.range_ratio_max = config.grid.range_ratio_max;
            c
        })
        .and_then(|c| deviation_delta(&c));
    let mut point = match point {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(format!("inversion: {e}"));
            return row;
        }
    };

    let mc = &config.mc;
    let seed = cell_seed(mc.seed, index);
    let estimate = match mc.estimator {
        EstimatorChoice::None => None,
        EstimatorChoice::Naive => {
            Some(naive_tail_estimate(model, cell.n, cell.big_n, mc.trials, seed, mc.force))
        }
        EstimatorChoice::Bigjump => {
            Some(bigjump_tail_estimate(model, cell.n, cell.big_n, mc.trials, seed))
        }
    };
    match estimate {
        Some(Ok(r)) => {
            point.attach_mc(r.estimate, r.std_error);
            row.mc = Some(r);
        }
        Some(Err(e)) => row.error = Some(format!("monte carlo: {e}")),
        None => {}
    }
    row.point = Some(point);
    row
}

fn summarize(config: &ExperimentConfig, model: &TailModel, spec: &SmootherSpec, rows: &[Row]) -> Summary {
    let symmetric = model.is_symmetric();
    let main: Vec<_> = rows
        .iter()
        .filter(|r| r.cell.arm == Arm::Main)
        .filter_map(|r| r.point.as_ref())
        .collect();
    let spread = |f: fn(&crate::inversion::ExperimentPoint) -> f64| {
        RatioSpread::of(&main.iter().map(|p| f(p)).collect::<Vec<_>>())
    };
    let samples: Vec<ScalingSample> = rows
        .iter()
        .filter(|r| r.cell.arm == Arm::Main)
        .filter_map(|r| {
            r.point.as_ref().map(|p| ScalingSample {
                n: r.cell.n,
                big_n: r.cell.big_n,
                delta: p.delta,
                in_range: r.in_range,
                discordant: p.discordant,
            })
        })
        .collect();
    let (fit, fit_error) = if samples.is_empty() {
        (None, Some("no evaluated main-arm cells".to_string()))
    } else {
        match fit_scaling(&samples, symmetric) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let params = spec.params();
    Summary {
        schema_version: CSV_SCHEMA_VERSION,
        p: model.p(),
        q: model.q(),
        c: model.p() - model.q(),
        symmetric,
        epsilon: params.epsilon,
        k: params.k,
        a: params.a,
        rng: RNG_IDENTITY.to_string(),
        seed: config.mc.seed,
        cells: rows.len(),
        failed_cells: rows.iter().filter(|r| r.error.is_some()).count(),
        in_range_cells: rows.iter().filter(|r| r.in_range).count(),
        discordant_cells: rows.iter().filter(|r| r.discordant()).count(),
        budget_ok_main_arm: main.iter().all(|p| p.budget_ok),
        decomposition_closed: rows
            .iter()
            .filter_map(|r| r.point.as_ref())
            .all(|p| p.decomposition_mismatch <= p.decomposition_allowed),
        i1_ratio: spread(|p| p.i1_ratio),
        i2_ratio: spread(|p| p.i2_ratio),
        i3_ratio: spread(|p| p.i3_ratio),
        fit,
        fit_error,
    }
}
