//! Command-line driver: simulations, norm inspection of stored fields and the
//! experiment suite.
//!
//! Exit codes: 0 on success (including experiments whose checks fail), 2 for
//! configuration or input errors, 3 when the blow-up guard trips (partial
//! output is still written), 1 for anything else.

pub mod commands;
pub mod config;
pub mod field_io;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ep_core::SpaceKind;
use thiserror::Error;

use config::Config;
use output::{output_dir, write_json, Manifest};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Blowup(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Blowup(_) => 3,
            CliError::Other(_) => 1,
        }
    }
}

impl From<ep_core::Error> for CliError {
    fn from(e: ep_core::Error) -> Self {
        use ep_core::Error as E;
        match e {
            E::BlowupDetected { .. } => CliError::Blowup(e.to_string()),
            E::InvalidGrid(_)
            | E::InvalidParameter(_)
            | E::UnderResolved(_)
            | E::CflViolation { .. }
            | E::DimensionMismatch { .. }
            | E::AxisOutOfRange { .. }
            | E::GridMismatch => CliError::Config(e.to_string()),
            E::InsufficientIterates { .. } => CliError::Other(e.into()),
        }
    }
}

impl From<field_io::FieldIoError> for CliError {
    fn from(e: field_io::FieldIoError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ep-spectra", version, about = "Euler-Poincare solver and function-space experiments")]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate from an initial datum and record norms along the way.
    Simulate(SimulateArgs),
    /// Print norms and the dyadic spectrum of a stored field.
    Norms(NormsArgs),
    /// Run one of the numerical experiments.
    Experiment(ExperimentArgs),
}

/// Options shared by `simulate` and `experiment`; each overrides the
/// same-named key of the config file.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// `key = value` file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (default `$EP_SPECTRA_OUT/<command>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tfinal: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    /// Initial datum: zero, smooth, lacunary, fn<n>, gn<n> or a field file.
    #[arg(long)]
    pub init: Option<String>,
    /// Any other key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct NormsArgs {
    /// Field file to inspect.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Summability index (`q` for Besov, `r` for Triebel-Lizorkin).
    #[arg(long, default_value_t = 2.0)]
    pub index: f64,
    #[arg(long, value_enum, default_value_t = NormKind::Tl)]
    pub kind: NormKind,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormKind {
    Besov,
    Tl,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Nonuniform,
    #[value(alias = "short-time")]
    Prop31,
    Picard,
    Contdep,
    Rllimit,
}

impl ExperimentName {
    fn label(self) -> &'static str {
        match self {
            ExperimentName::Nonuniform => "nonuniform",
            ExperimentName::Prop31 => "prop31",
            ExperimentName::Picard => "picard",
            ExperimentName::Contdep => "contdep",
            ExperimentName::Rllimit => "rllimit",
        }
    }
}

fn build_config(common: &CommonArgs) -> Result<Config, CliError> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let flags: [(&str, Option<String>); 8] = [
        ("d", common.d.map(|v| v.to_string())),
        ("s", common.s.map(|v| v.to_string())),
        ("p", common.p.map(|v| v.to_string())),
        ("r", common.r.map(|v| v.to_string())),
        ("dt", common.dt.map(|v| v.to_string())),
        ("tfinal", common.tfinal.map(|v| v.to_string())),
        ("nx", common.nx.map(|v| v.to_string())),
        ("init", common.init.clone()),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v);
        }
    }
    for a in &common.set {
        cfg.apply_assignment(a)?;
    }
    Ok(cfg)
}

/// Runs a config-driven command, then writes the resolved config and the
/// manifest whatever the outcome, except for configuration errors.
fn run_with_manifest(
    label: &str,
    common: &CommonArgs,
    args: &[String],
    threads: usize,
    body: impl FnOnce(&mut Config, &std::path::Path, &mut Vec<String>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let start = Instant::now();
    let mut cfg = build_config(common)?;
    let out = output_dir(common.out.as_deref(), label);
    let mut outputs = Vec::new();
    let result = body(&mut cfg, &out, &mut outputs);
    if matches!(result, Err(CliError::Config(_))) {
        return result;
    }
    commands::write_resolved(&cfg, &out, &mut outputs)?;
    outputs.push("manifest.json".into());
    let manifest = Manifest {
        tool: "ep-spectra",
        version: env!("CARGO_PKG_VERSION"),
        command: label.to_string(),
        args: args.to_vec(),
        config: cfg.resolved().clone(),
        threads,
        status: match &result {
            Ok(()) => "ok".into(),
            Err(CliError::Blowup(_)) => "blowup".into(),
            Err(e) => format!("error: {e}"),
        },
        wall_time_seconds: start.elapsed().as_secs_f64(),
        outputs,
    };
    write_json(&out.join("manifest.json"), &manifest)?;
    eprintln!("wrote {}", out.display());
    result
}

fn dispatch(cli: Cli, args: &[String]) -> Result<(), CliError> {
    let threads = rayon::current_num_threads();
    match cli.command {
        Command::Simulate(a) => run_with_manifest("simulate", &a.common, args, threads, commands::simulate),
        Command::Experiment(a) => {
            let name = a.name;
            run_with_manifest(name.label(), &a.common, args, threads, |cfg, out, outputs| {
                commands::experiment(name, cfg, out, outputs)
            })
        }
        Command::Norms(a) => {
            let kind = match a.kind {
                NormKind::Besov => SpaceKind::Besov,
                NormKind::Tl => SpaceKind::TriebelLizorkin,
            };
            let req = commands::NormsRequest { input: &a.input, s: a.s, p: a.p, index: a.index, kind };
            print!("{}", commands::norms_report(&req)?);
            Ok(())
        }
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let printable: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let result = match cli.threads {
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli, &printable)),
            Err(e) => Err(CliError::Other(e.into())),
        },
        None => dispatch(cli, &printable),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
