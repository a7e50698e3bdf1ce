//! `dumbbell`: reproducible runs of the spectral toolkit from JSON configs.
//!
//! Every command writes its files plus `manifest.json` (the fully resolved
//! configuration) into the output directory. Exit codes: 0 success,
//! 2 invalid configuration or parameters, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{parse, Common, CounterexampleConfig, FemConfig, LimitConfig, MeshConfig, SweepConfig};

#[derive(Parser)]
#[command(name = "dumbbell", version, about = "Steklov spectra of thin-tube dumbbells and their 1D limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One-dimensional limit problems and characteristic roots.
    Limit(Flags),
    /// Steklov / Neumann FEM spectra of a dumbbell, disk or rectangle.
    Fem(Flags),
    /// Width sweep with rate fits and eigenfunction comparison.
    Sweep(Flags),
    /// The mu_1 |Omega| < sigma_1 P(Omega) dumbbell.
    Counterexample(Flags),
    /// Mesh export only.
    Mesh(Flags),
}

#[derive(Args)]
struct Flags {
    /// JSON config; omitted keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `out`; default `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (overrides the config's `threads`).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed recorded in the manifest (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<dumbbell::Error> for Failure {
    fn from(e: dumbbell::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

/// Collects output files in memory; [`Output::finish`] writes them in
/// insertion order followed by the manifest.
pub struct Output {
    files: Vec<(String, String)>,
    notes: serde_json::Map<String, serde_json::Value>,
}

impl Output {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            notes: serde_json::Map::new(),
        }
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    /// Extra manifest entry.
    pub fn note(&mut self, key: &str, value: serde_json::Value) {
        self.notes.insert(key.to_string(), value);
    }

    fn finish<T: Serialize>(self, dir: &Path, command: &str, common: &Common, config: &T) -> Result<(), Failure> {
        let io = |e: std::io::Error| Failure::Validation(format!("cannot write to {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        for (name, contents) in &self.files {
            std::fs::write(dir.join(name), contents).map_err(io)?;
        }
        #[derive(Serialize)]
        struct Manifest<'a, T> {
            tool: &'a str,
            version: &'a str,
            command: &'a str,
            seed: u64,
            threads: Option<usize>,
            settings: &'a dumbbell::NumericSettings,
            config: &'a T,
            files: Vec<&'a str>,
            #[serde(skip_serializing_if = "serde_json::Map::is_empty")]
            notes: &'a serde_json::Map<String, serde_json::Value>,
        }
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: common.seed,
            threads: common.threads,
            settings: &common.settings,
            config,
            files: self.files.iter().map(|(n, _)| n.as_str()).collect(),
            notes: &self.notes,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Numerical(e.to_string()))?;
        std::fs::write(dir.join("manifest.json"), text + "\n").map_err(io)?;
        Ok(())
    }
}

fn configure_threads(threads: Option<usize>) -> Result<(), Failure> {
    match threads {
        Some(0) => Err(Failure::Validation("threads must be at least 1".into())),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Numerical(format!("thread pool: {e}"))),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (name, flags) = match &cli.command {
        Command::Limit(f) => ("limit", f),
        Command::Fem(f) => ("fem", f),
        Command::Sweep(f) => ("sweep", f),
        Command::Counterexample(f) => ("counterexample", f),
        Command::Mesh(f) => ("mesh", f),
    };
    let text = match &flags.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let text = text.as_deref();

    fn resolve(mut common: Common, flags: &Flags) -> Result<(Common, PathBuf), Failure> {
        if let Some(out) = &flags.out {
            common.out = Some(out.clone());
        }
        if flags.threads.is_some() {
            common.threads = flags.threads;
        }
        if let Some(seed) = flags.seed {
            common.seed = seed;
        }
        configure_threads(common.threads)?;
        let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("out"));
        Ok((common, dir))
    }

    let mut out = Output::new();
    match &cli.command {
        Command::Limit(_) => {
            let (common, cfg): (Common, LimitConfig) = parse(text)?;
            let (common, dir) = resolve(common, flags)?;
            commands::limit(&cfg, &mut out)?;
            out.finish(&dir, name, &common, &cfg)
        }
        Command::Fem(_) => {
            let (common, cfg): (Common, FemConfig) = parse(text)?;
            let (common, dir) = resolve(common, flags)?;
            commands::fem(&cfg, &common.settings, &mut out)?;
            out.finish(&dir, name, &common, &cfg)
        }
        Command::Sweep(_) => {
            let (common, cfg): (Common, SweepConfig) = parse(text)?;
            let (common, dir) = resolve(common, flags)?;
            // a sweep that stops early still writes its partial report
            let result = commands::sweep_cmd(&cfg, &common.settings, &mut out);
            if !out.files.is_empty() {
                out.finish(&dir, name, &common, &cfg)?;
            }
            result
        }
        Command::Counterexample(_) => {
            let (common, cfg): (Common, CounterexampleConfig) = parse(text)?;
            let (common, dir) = resolve(common, flags)?;
            commands::counterexample(&cfg, &common.settings, &mut out)?;
            out.finish(&dir, name, &common, &cfg)
        }
        Command::Mesh(_) => {
            let (common, cfg): (Common, MeshConfig) = parse(text)?;
            let (common, dir) = resolve(common, flags)?;
            commands::mesh(&cfg, &mut out)?;
            out.finish(&dir, name, &common, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dumbbell: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
