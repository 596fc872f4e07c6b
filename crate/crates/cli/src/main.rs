use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use heavytail_ld::charfn::{expansion_coeffs, f_jet, psi_exact, theta_jet};
use heavytail_ld::harness::{run_experiment, ExperimentConfig};
use heavytail_ld::inversion::{deviation_delta, BudgetPolicy, FarMode, InversionConfig};
use heavytail_ld::model::TailModel;
use heavytail_ld::montecarlo::{bigjump_tail_estimate, conv2_oracle, naive_tail_estimate};
use heavytail_ld::quadrature::{oscillatory_log_integral, OscillandSpec, Window};
use heavytail_ld::smoother::{SmootherSpec, DEFAULT_EPSILON, DEFAULT_K, DEFAULT_MOMENT_ORDER};
use heavytail_ld::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DISCORDANT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "heavytail-ld", version, about = "Large-deviation error rates for heavy-tailed sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an experiment grid and write CSV, JSON and gnuplot files.
    Run(RunArgs),
    /// Characteristic-function values.
    #[command(subcommand)]
    Charfn(CharfnCommand),
    /// Oscillatory quadrature kernels.
    #[command(subcommand)]
    Quad(QuadCommand),
    /// Smoothed inversion of one (n, N, g) cell.
    Invert(InvertArgs),
    /// Monte Carlo estimators and the two-fold convolution oracle.
    Mc {
        #[arg(value_enum)]
        estimator: McKind,
        #[command(flatten)]
        args: McArgs,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so repeated runs are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
    /// Exit with status 3 if any cell is discordant.
    #[arg(long)]
    strict: bool,
    /// Overrides `[run] workers`.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug, Clone, Copy)]
struct ModelArgs {
    /// Right-tail weight of the canonical model.
    #[arg(long, default_value_t = 0.7)]
    p: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<TailModel, Error> {
        TailModel::canonical(self.p)
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct SmootherArgs {
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: u32,
    #[arg(long, default_value_t = DEFAULT_MOMENT_ORDER)]
    a: f64,
}

impl SmootherArgs {
    fn spec(&self) -> Result<SmootherSpec, Error> {
        SmootherSpec::new(self.epsilon, self.k, self.a)
    }
}

#[derive(Subcommand, Debug)]
enum CharfnCommand {
    /// Ψ, Θ and F at one frequency.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Summand count for F(t, n).
        #[arg(long, default_value_t = 16)]
        n: u64,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Small-frequency expansion constants, analytic and regressed.
    Coeffs {
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum WindowKind {
    Unit,
    Smoother,
}

#[derive(Subcommand, Debug)]
enum QuadCommand {
    /// ∫ e^{−itM} t^{−1} (log t)^r ψ(t) Ψ(t)^m dt over [π/M, ε] by paired blocks.
    Lemtec {
        #[arg(long = "M")]
        big_m: f64,
        #[arg(long, default_value_t = 0)]
        r: u32,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, value_enum, default_value_t = WindowKind::Smoother)]
        window: WindowKind,
        #[command(flatten)]
        smoother: SmootherArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum FarModeArg {
    Exact,
    Budgeted,
}

#[derive(Args, Debug)]
struct InvertArgs {
    #[arg(long)]
    n: u64,
    #[arg(long = "N")]
    big_n: f64,
    /// Far offset; defaults to N².
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, value_enum, default_value_t = FarModeArg::Budgeted)]
    far_mode: FarModeArg,
    /// Record a failing smoothing budget instead of refusing the cell.
    #[arg(long)]
    record_budget: bool,
    #[command(flatten)]
    smoother: SmootherArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum McKind {
    Naive,
    Bigjump,
    Conv2,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long, default_value_t = 2)]
    n: u64,
    #[arg(long = "N", allow_hyphen_values = true)]
    big_n: f64,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run the naive estimator even when too few hits are expected.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    model: ModelArgs,
}

fn run(args: RunArgs) -> Result<u8, Error> {
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    if let Some(w) = args.workers {
        cfg.run.workers = w;
    }
    let report = run_experiment(&cfg)?;
    let files = report.write_to(&cfg.output.dir, !args.no_timestamp)?;
    let discordant = report.any_discordant();
    print_json(&json!({
        "files": files,
        "cells": report.summary.cells,
        "failed_cells": report.summary.failed_cells,
        "discordant_cells": report.summary.discordant_cells,
    }));
    Ok(if discordant && args.strict { EXIT_DISCORDANT } else { 0 })
}

fn charfn(cmd: CharfnCommand) -> Result<Value, Error> {
    match cmd {
        CharfnCommand::Eval { t, n, model } => {
            let m = model.model()?;
            let psi = psi_exact(&m, t)?;
            let (theta, f) = if t != 0.0 {
                let (f, f1) = f_jet(&m, t, n)?;
                (Some(theta_jet(&m, t)?), Some(json!({ "F": f, "F_prime": f1 })))
            } else {
                (None, None)
            };
            Ok(json!({ "p": m.p(), "t": t, "n": n, "psi": psi, "theta": theta, "F": f }))
        }
        CharfnCommand::Coeffs { model } => {
            let m = model.model()?;
            Ok(serde_json::to_value(expansion_coeffs(&m)?)?)
        }
    }
}

fn quad(cmd: QuadCommand) -> Result<Value, Error> {
    let QuadCommand::Lemtec { big_m, r, m, window, smoother, model } = cmd;
    let window = match window {
        WindowKind::Unit => Window::Unit { epsilon: smoother.epsilon },
        WindowKind::Smoother => Window::Smoother(smoother.spec()?),
    };
    let spec = OscillandSpec { freq: big_m, r, m, window, model: model.model()? };
    let q = oscillatory_log_integral(&spec)?;
    Ok(json!({
        "M": big_m,
        "r": r,
        "m": m,
        "value": q.value,
        "abs_error_estimate": q.abs_error_estimate,
        "periods_used": q.periods_used,
        "block_decay": q.block_decay,
        "block_decay_max_over_median": q.block_decay.map(|d| d.max_over_median()),
    }))
}

fn invert(args: InvertArgs) -> Result<Value, Error> {
    let far_mode = match args.far_mode {
        FarModeArg::Exact => FarMode::Exact,
        FarModeArg::Budgeted => FarMode::Budgeted,
    };
    let g = args.g.unwrap_or(args.big_n * args.big_n);
    let policy = if args.record_budget { BudgetPolicy::Record } else { BudgetPolicy::Enforce };
    let cfg = InversionConfig::new(args.n, args.big_n, g, args.smoother.spec()?, args.model.model()?, far_mode)?
        .with_budget_policy(policy);
    Ok(serde_json::to_value(deviation_delta(&cfg)?)?)
}

fn mc(kind: McKind, a: McArgs) -> Result<Value, Error> {
    let m = a.model.model()?;
    match kind {
        McKind::Naive => Ok(serde_json::to_value(naive_tail_estimate(&m, a.n, a.big_n, a.trials, a.seed, a.force)?)?),
        McKind::Bigjump => Ok(serde_json::to_value(bigjump_tail_estimate(&m, a.n, a.big_n, a.trials, a.seed)?)?),
        McKind::Conv2 => Ok(json!({ "N": a.big_n, "p": m.p(), "probability": conv2_oracle(&m, a.big_n)? })),
    }
}

fn print_json(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    // A closed pipe (e.g. `| head`) is not worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Charfn(cmd) => charfn(cmd).map(|v| {
            print_json(&v);
            0
        }),
        Command::Quad(cmd) => quad(cmd).map(|v| {
            print_json(&v);
            0
        }),
        Command::Invert(args) => invert(args).map(|v| {
            print_json(&v);
            0
        }),
        Command::Mc { estimator, args } => mc(estimator, args).map(|v| {
            print_json(&v);
            0
        }),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_uppercase_threshold_flags() {
        let cli = Cli::try_parse_from(["heavytail-ld", "invert", "--n", "16", "--N", "1000", "--far-mode", "exact"]).unwrap();
        match cli.command {
            Command::Invert(a) => {
                assert_eq!((a.n, a.big_n), (16, 1000.0));
                assert!(matches!(a.far_mode, FarModeArg::Exact));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_errors_map_to_exit_two() {
        assert_eq!(exit_code_for(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code_for(&Error::Singular), EXIT_FAILURE);
    }

    #[test]
    fn conv2_reports_probability() {
        let a = McArgs { n: 2, big_n: -1e6, trials: 1, seed: 1, force: false, model: ModelArgs { p: 0.7 } };
        let v = mc(McKind::Conv2, a).unwrap();
        assert!((v["probability"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn charfn_eval_at_zero_has_unit_value() {
        let v = charfn(CharfnCommand::Eval { t: 0.0, n: 4, model: ModelArgs { p: 0.7 } }).unwrap();
        assert_eq!(v["psi"]["value"][0].as_f64(), Some(1.0));
        assert!(v["theta"].is_null());
    }

    #[test]
    fn missing_config_is_a_config_error() {
        let args = RunArgs {
            config: PathBuf::from("/nonexistent/config.toml"),
            out: None,
            no_timestamp: true,
            strict: false,
            workers: None,
        };
        assert!(matches!(run(args), Err(Error::Config(_))));
    }
}
