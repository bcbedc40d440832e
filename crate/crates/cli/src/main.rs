//! `rescomp`: experiment runner for competition-based resilient consensus.

mod commands;
mod config;
mod failure;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use commands::{Run, RunDir};
use config::ExperimentConfig;
use failure::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "rescomp", version, about = "Resilient consensus experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error and derivative curves over lambda, one per noise level.
    Curve(Common),
    /// Optimal lambda as the number of adversaries grows.
    SweepM(Common),
    /// Collaboration/competition split of the error.
    Decompose(Common),
    /// Average worst-case metrics of random regular graphs by degree.
    DegreeSweep(Common),
    /// Greedy edge removal and matching pruning.
    Greedy(Common),
    /// Consensus, FJ and W-MSR on the same corrupted priors.
    Compare(Common),
    /// Built-in numerical self-checks.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory [default: rescomp-out/<subcommand>]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

type Handler = fn(Run) -> Outcome<Value>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_line());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Outcome<()> {
    let (name, handler, args): (&str, Handler, Common) = match command {
        Command::Curve(a) => ("curve", commands::curve, a),
        Command::SweepM(a) => ("sweep-m", commands::sweep_m, a),
        Command::Decompose(a) => ("decompose", commands::decompose, a),
        Command::DegreeSweep(a) => ("degree-sweep", commands::degree_sweep_cmd, a),
        Command::Greedy(a) => ("greedy", commands::greedy, a),
        Command::Compare(a) => ("compare", commands::compare, a),
        Command::Validate(a) => return validate(a),
    };
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    let cfg = ExperimentConfig::parse(&text, base)?;
    execute(name, handler, &cfg, Some(&text), args.out, args.seed)
}

fn validate(a: ValidateArgs) -> Outcome<()> {
    let (cfg, text) = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            (ExperimentConfig::parse(&text, base)?, Some(text))
        }
        None => (ExperimentConfig::default(), None),
    };
    execute(
        "validate",
        commands::validate,
        &cfg,
        text.as_deref(),
        a.out,
        a.seed,
    )
}

fn execute(
    name: &str,
    handler: Handler,
    cfg: &ExperimentConfig,
    text: Option<&str>,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Outcome<()> {
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let out = out.unwrap_or_else(|| Path::new("rescomp-out").join(name));
    let mut dir = RunDir::create(&out)?;
    if let Some(text) = text {
        dir.write_text("config.json", text)?;
    }
    let results = handler(Run {
        cfg,
        seed,
        dir: &mut dir,
    })?;
    let summary = json!({
        "command": name,
        "seed": seed,
        "outputs": dir.written(),
        "results": results,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let pretty = serde_json::to_string_pretty(&summary)?;
    dir.write_text("summary.json", &(pretty + "\n"))?;
    println!("{}", out.join("summary.json").display());
    Ok(())
}
