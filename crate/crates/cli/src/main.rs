// src/main.rs
//
// smectic — configuration-driven experiments over the smectic energy
// toolkit. Each experiment reads one JSON config, runs deterministically
// for a fixed seed, and writes CSV/JSON artifacts plus a hashed manifest.
//
//   smectic <experiment> --config <path> [--out <dir>] [--force] [--seed N]
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 IO error.

use std::fmt;
use std::path::PathBuf;

mod config;
mod experiments;
mod output;

use config::Experiment;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

const USAGE: &str = "usage: smectic <experiment> --config <path> [--out <dir>] [--force] [--seed N]

experiments:
  profile         solve the 1D transition profile; emit (t, g, g') and the
                  energy/jump-cost comparison
  cube            descend from the blended transition ansatz on a cube and
                  report the energy bracket
  dislocation     evaluate the Hopf-Cole edge dislocation field and its
                  BPS residuals and plateaus
  entropy-check   randomized rotation-family identities and the frame sweep
                  of the jump cost
  identity-suite  seeded refinement studies of the discrete identities
  minimize        general clamped gradient descent with compactness
                  diagnostics

flags:
  --config <path>  JSON experiment configuration (required)
  --out <dir>      output directory (default: config \"out\", else out/<experiment>)
  --force          overwrite a directory that already holds a manifest
  --seed N         override the config seed
  SMECTIC_THREADS  caps worker parallelism (environment variable)";

struct Args {
    experiment: Experiment,
    config: PathBuf,
    out: Option<PathBuf>,
    force: bool,
    seed: Option<u64>,
}

fn parse_args(argv: &[String]) -> Result<Option<Args>, CliError> {
    if argv.is_empty() || argv[0] == "--help" || argv[0] == "-h" {
        return Ok(None);
    }
    let experiment = Experiment::from_name(&argv[0]).ok_or_else(|| {
        let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        CliError::Config(format!(
            "unknown experiment \"{}\"; expected one of {}",
            argv[0],
            names.join(" | ")
        ))
    })?;

    let mut config = None;
    let mut out = None;
    let mut force = false;
    let mut seed = None;
    let mut it = argv[1..].iter();
    while let Some(arg) = it.next() {
        match arg.as_str() {
            "--config" => {
                let value = it.next().ok_or_else(|| {
                    CliError::Config("--config requires a path".into())
                })?;
                config = Some(PathBuf::from(value));
            }
            "--out" => {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Config("--out requires a directory".into()))?;
                out = Some(PathBuf::from(value));
            }
            "--force" => force = true,
            "--seed" => {
                let value = it
                    .next()
                    .ok_or_else(|| CliError::Config("--seed requires an integer".into()))?;
                seed = Some(value.parse().map_err(|_| {
                    CliError::Config(format!("--seed must be a nonnegative integer (got {value})"))
                })?);
            }
            other => {
                return Err(CliError::Config(format!("unknown flag \"{other}\"")));
            }
        }
    }
    let config = config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    Ok(Some(Args {
        experiment,
        config,
        out,
        force,
        seed,
    }))
}

fn run(argv: &[String]) -> Result<(), CliError> {
    let Some(args) = parse_args(argv)? else {
        println!("{USAGE}");
        return Ok(());
    };

    let cfg = config::parse_config(&args.config, args.experiment)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.experiment.name()));

    let (artifacts, run_error) = match experiments::run_experiment(&cfg, seed) {
        Ok(artifacts) => (artifacts, None),
        Err(e) => (Vec::new(), Some(e)),
    };
    let error_text = run_error.as_ref().map(|e| e.to_string());
    let emitted = output::emit_outputs(
        cfg.experiment.name(),
        seed,
        error_text.as_deref(),
        &artifacts,
        &out_dir,
        args.force,
    );

    match (run_error, emitted) {
        // A failed run still leaves its partial manifest; the run failure
        // is the one reported.
        (Some(run_err), _) => Err(run_err),
        (None, Err(io_err)) => Err(io_err),
        (None, Ok(())) => {
            println!(
                "{}: {} artifacts in {}",
                cfg.experiment.name(),
                artifacts.len() + 1,
                out_dir.display()
            );
            Ok(())
        }
    }
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
