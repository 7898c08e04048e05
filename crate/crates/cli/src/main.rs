//! `helikin` batch front end.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.

mod commands;
mod config;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use commands::CliError;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "helikin",
    version,
    about = "Monopole harmonics, Berry-phase form factors and helicity spectra",
    args_override_self = true
)]
struct Cli {
    /// key=value file applied before the command-line flags
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,
    /// Seed for randomized geometry
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    out: Format,
    /// Write results here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<String>,
    /// Also write the effective configuration as a key=value file
    #[arg(long, global = true, value_name = "PATH")]
    save_config: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Orthonormality and eigen-residuals of monopole harmonics
    Harmonics(commands::HarmonicsArgs),
    /// Monopole flux through spheres and the equator holonomy
    Flux(commands::FluxArgs),
    /// Tetrahedron cocycle quantization over random tetrahedra
    Cocycle(commands::CocycleArgs),
    /// First Chern number of the section bundles
    Chern(commands::ChernArgs),
    /// Form factors for random momentum pairs
    Formfactor(commands::FormFactorArgs),
    /// Finite-difference helicity oscillator against the analytic levels
    Oscillator(commands::OscillatorArgs),
    /// Momentum-space hydrogen levels or helicity splittings
    Hydrogen(commands::HydrogenArgs),
    /// Reduced invariant suite
    Selftest(commands::SelftestArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Harmonics(_) => "harmonics",
            Command::Flux(_) => "flux",
            Command::Cocycle(_) => "cocycle",
            Command::Chern(_) => "chern",
            Command::Formfactor(_) => "formfactor",
            Command::Oscillator(_) => "oscillator",
            Command::Hydrogen(_) => "hydrogen",
            Command::Selftest(_) => "selftest",
        }
    }

    fn args_json(&self) -> Value {
        let v = match self {
            Command::Harmonics(a) => serde_json::to_value(a),
            Command::Flux(a) => serde_json::to_value(a),
            Command::Cocycle(a) => serde_json::to_value(a),
            Command::Chern(a) => serde_json::to_value(a),
            Command::Formfactor(a) => serde_json::to_value(a),
            Command::Oscillator(a) => serde_json::to_value(a),
            Command::Hydrogen(a) => serde_json::to_value(a),
            Command::Selftest(a) => serde_json::to_value(a),
        };
        v.unwrap_or(Value::Null)
    }
}

/// Flat effective configuration: globals then subcommand flags. `None`
/// options are dropped so the rendered file parses back.
fn effective_config(cli: &Cli) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("seed".into(), json!(cli.seed));
    map.insert(
        "out".into(),
        serde_json::to_value(cli.out).unwrap_or(Value::Null),
    );
    if let Value::Object(args) = cli.command.args_json() {
        for (k, v) in args {
            if !v.is_null() {
                map.insert(k, v);
            }
        }
    }
    Value::Object(map)
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HELIKIN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Validation(format!(
            "HELIKIN_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot size thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let table = match &cli.command {
        Command::Harmonics(a) => commands::harmonics(a),
        Command::Flux(a) => commands::flux(a),
        Command::Cocycle(a) => commands::cocycle(a, cli.seed),
        Command::Chern(a) => commands::chern(a),
        Command::Formfactor(a) => commands::formfactor(a, cli.seed),
        Command::Oscillator(a) => commands::oscillator(a),
        Command::Hydrogen(a) => commands::hydrogen(a),
        Command::Selftest(a) => commands::selftest(a, cli.seed),
    }?;

    let config = effective_config(cli);
    if let Some(path) = &cli.save_config {
        std::fs::write(path, config::render(&config))
            .map_err(|e| CliError::Validation(format!("cannot write {path}: {e}")))?;
    }
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "config": config,
    });
    let io_err = |e: io::Error| CliError::Validation(format!("cannot write output: {e}"));
    let mut sink: Box<dyn Write> = match &cli.output {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).map_err(|e| {
                CliError::Validation(format!("cannot create {path}: {e}"))
            })?))
        }
        None => Box::new(io::stdout().lock()),
    };
    match cli.out {
        Format::Csv => table.write_csv(&mut sink).map_err(io_err)?,
        Format::Json => table.write_json(&mut sink, meta).map_err(io_err)?,
    }
    sink.flush().map_err(io_err)?;

    if let Command::Selftest(_) = cli.command {
        let failed = table
            .rows
            .iter()
            .filter(|r| r.last() == Some(&output::Cell::Bool(false)))
            .count();
        if failed > 0 {
            return Err(CliError::NonConvergence(format!(
                "{failed} self-test check(s) failed"
            )));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(EXIT_VALIDATION),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(CliError::NonConvergence(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NONCONVERGENCE)
        }
    }
}
