//! `simulate`: command-line front end for the cooperative-jamming simulator.
//!
//! Settings come from an optional flat JSON file (`--config`) and are then
//! overridden by any flags given on the command line.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cojam::harness::{self, HarnessError, RunConfig};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    SweepGdof,
    SweepError,
    MeasureOutage,
    MinDistance,
    Leakage,
    VerifyPower,
}

impl Cmd {
    fn name(self) -> &'static str {
        match self {
            Cmd::SweepGdof => "sweep-gdof",
            Cmd::SweepError => "sweep-error",
            Cmd::MeasureOutage => "measure-outage",
            Cmd::MinDistance => "min-distance",
            Cmd::Leakage => "leakage",
            Cmd::VerifyPower => "verify-power",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Cooperative-jamming interference channel simulator")]
struct Args {
    command: Cmd,
    /// Flat JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cross/direct strength ratio, exact: `3/4` or `0.75`.
    #[arg(long, num_args = 1..)]
    alpha: Vec<String>,
    /// Direct-link exponents `m` (P = 2^{2m}).
    #[arg(long, num_args = 1..)]
    m: Vec<u32>,
    /// GDoF back-off ε, exact rational (default 1/10).
    #[arg(long)]
    epsilon: Option<String>,
    /// Amplitude constant γ in (0, 1/(8√2)].
    #[arg(long)]
    gamma: Option<f64>,
    /// Outage threshold scale δ.
    #[arg(long)]
    delta: Option<f64>,
    /// Monte Carlo trials per point.
    #[arg(long)]
    trials: Option<u64>,
    /// Gain samples per point (outage, min-distance, verify-power).
    #[arg(long)]
    samples: Option<u64>,
    /// Cells per axis for the gain-square measure estimate.
    #[arg(long)]
    grid: Option<u64>,
    /// Master seed (required).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Write 0 in the wall_ms column so reruns are byte-identical.
    #[arg(long)]
    no_timing: bool,
}

fn merged_config(args: &Args) -> Result<RunConfig, HarnessError> {
    let mut map = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(HarnessError::Config(format!("{}: config must be a JSON object", path.display()))),
                Err(e) => return Err(HarnessError::Config(format!("{}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    map.insert("command".into(), args.command.name().into());
    if !args.alpha.is_empty() {
        map.insert("alpha".into(), args.alpha.iter().cloned().map(Value::from).collect());
    }
    if !args.m.is_empty() {
        map.insert("m".into(), args.m.iter().copied().map(Value::from).collect());
    }
    let mut set = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            map.insert(key.into(), v);
        }
    };
    set("epsilon", args.epsilon.clone().map(Value::from));
    set("gamma", args.gamma.map(Value::from));
    set("delta", args.delta.map(Value::from));
    set("trials", args.trials.map(Value::from));
    set("samples", args.samples.map(Value::from));
    set("grid", args.grid.map(Value::from));
    set("seed", args.seed.map(Value::from));
    set("out", args.out.clone().map(Value::from));
    set("workers", args.workers.map(Value::from));
    if args.no_timing {
        set("timing", Some(Value::Bool(false)));
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| HarnessError::Config(format!("config: {e}")))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match merged_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(2);
        }
    };
    match harness::run_to_file(&config) {
        Ok(output) => {
            for w in &output.warnings {
                eprintln!("simulate: {w}");
            }
            if config.out.is_none() {
                print!("{}", output.body);
            }
            ExitCode::SUCCESS
        }
        Err(e @ HarnessError::Invalid(_)) => {
            eprintln!("simulate: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("simulate: {e}");
            ExitCode::FAILURE
        }
    }
}
