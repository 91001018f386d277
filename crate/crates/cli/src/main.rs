//! Batch front end: runs solver, transform, verification, integrability and
//! convergence tasks from a JSON configuration and writes CSV/JSON artifacts
//! plus a gnuplot script.

mod config;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{preset, RunConfig, PRESET_NAMES};
use tasks::EXIT_CONFIG;

#[derive(Parser)]
#[command(
    name = "nls",
    version,
    about = "Variable-coefficient nonlinear Schrödinger toolkit"
)]
struct Args {
    /// Path to a JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,

    /// Name of a built-in configuration (see --list-presets).
    #[arg(long)]
    preset: Option<String>,

    /// Output directory (overrides the config's output_dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Relative tolerance override for pass/fail decisions.
    #[arg(long)]
    tolerance: Option<f64>,

    /// Seed for randomized sweeps.
    #[arg(long)]
    seed: Option<u64>,

    /// List built-in preset names and exit.
    #[arg(long)]
    list_presets: bool,
}

fn load_config(args: &Args) -> Result<RunConfig, tasks::Failure> {
    if let Some(name) = &args.preset {
        return preset(name, args.seed.unwrap_or(7)).map_err(tasks::Failure::from);
    }
    let path = args.config.as_ref().ok_or_else(|| tasks::Failure {
        code: EXIT_CONFIG,
        message: "one of --config or --preset is required".into(),
    })?;
    let text = std::fs::read_to_string(path).map_err(|e| tasks::Failure {
        code: EXIT_CONFIG,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    RunConfig::from_json(&text).map_err(tasks::Failure::from)
}

fn main() -> ExitCode {
    let args = Args::parse();

    if args.list_presets {
        for name in PRESET_NAMES {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }

    let mut cfg = match load_config(&args) {
        Ok(cfg) => cfg,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }

    let out_dir = match args
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
    {
        Some(dir) => dir,
        None => {
            eprintln!("error: no output directory (use --out or set output_dir)");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    match tasks::run(&cfg, &out_dir, args.tolerance) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
