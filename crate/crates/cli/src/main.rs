//! `ati`: photoelectron spectra and total ionization rates from JSON configs.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};

use crate::commands::SweepKey;
use crate::config::{Formula, ModeKey, Polarization, RunConfig};
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "ati", version, about = "Relativistic above-threshold ionization spectra and rates")]
struct Cli {
    /// Worker threads for the channel grids (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Differential probability on an (N, theta, phi) grid.
    Spectrum(RunArgs),
    /// Total rate by every applicable method.
    Rate(RunArgs),
    /// Saddle data and closed-form rate over a list of values.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        vary: SweepKey,
        #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Oracle and identity suites.
    Selftest {
        #[arg(long)]
        json: bool,
        /// Adds a constant to every generalized Bessel value (fault injection).
        #[arg(long, hide = true, default_value_t = 0.0)]
        inject_bessel_error: f64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(short, long)]
    config: PathBuf,
    #[command(flatten)]
    overrides: Overrides,
}

/// Flags overriding keys of the config file.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long)]
    photon_energy_ev: Option<f64>,
    #[arg(long)]
    intensity_xi: Option<f64>,
    #[arg(long)]
    peak_field_v_per_cm: Option<f64>,
    #[arg(long, value_enum)]
    polarization: Option<Polarization>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    z_a: Option<u32>,
    #[arg(long)]
    binding_energy_ev: Option<f64>,
    #[arg(long)]
    theta_points: Option<usize>,
    #[arg(long)]
    phi_points: Option<usize>,
    /// "auto" or "lo,hi".
    #[arg(long)]
    n_range: Option<String>,
    #[arg(long, value_enum)]
    mode: Option<ModeKey>,
    #[arg(short, long)]
    output_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    formula: Option<Formula>,
}

impl Overrides {
    fn into_map(self) -> Result<Map<String, Value>, CliError> {
        let mut m = Map::new();
        let mut put = |k: &str, v: Value| {
            m.insert(k.to_string(), v);
        };
        if let Some(v) = self.photon_energy_ev {
            put("photon_energy_ev", v.into());
        }
        if let Some(v) = self.intensity_xi {
            put("intensity_xi", v.into());
        }
        if let Some(v) = self.peak_field_v_per_cm {
            put("peak_field_v_per_cm", v.into());
        }
        if let Some(p) = self.polarization {
            put("polarization", serde_json::to_value(p)?);
        }
        if let Some(v) = self.zeta {
            put("zeta", v.into());
        }
        if let Some(v) = self.z_a {
            put("z_a", v.into());
        }
        if let Some(v) = self.binding_energy_ev {
            put("binding_energy_ev", v.into());
        }
        if let Some(v) = self.theta_points {
            put("theta_points", v.into());
        }
        if let Some(v) = self.phi_points {
            put("phi_points", v.into());
        }
        if let Some(r) = self.n_range {
            put("n_range", parse_n_range(&r)?);
        }
        if let Some(v) = self.mode {
            put("mode", serde_json::to_value(v)?);
        }
        if let Some(p) = self.output_path {
            put("output_path", Value::String(p.to_string_lossy().into_owned()));
        }
        if let Some(f) = self.formula {
            put("formula", serde_json::to_value(f)?);
        }
        Ok(m)
    }
}

fn parse_n_range(s: &str) -> Result<Value, CliError> {
    if s.trim() == "auto" {
        return Ok(Value::String("auto".into()));
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Config(format!("--n-range: expected \"auto\" or \"lo,hi\", got {s:?}"));
    match parts.as_slice() {
        [a, b] => {
            let lo: i64 = a.parse().map_err(|_| bad())?;
            let hi: i64 = b.parse().map_err(|_| bad())?;
            Ok(Value::from(vec![lo, hi]))
        }
        _ => Err(bad()),
    }
}

fn load(run: RunArgs) -> Result<RunConfig, CliError> {
    RunConfig::load(&run.config, run.overrides.into_map()?)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Failure(e.to_string()))?;
    }
    match cli.command {
        Command::Spectrum(run) => commands::spectrum(&load(run)?)?,
        Command::Rate(run) => commands::rate(&load(run)?)?,
        Command::Sweep { run, vary, values } => commands::sweep(&load(run)?, vary, &values)?,
        Command::Selftest { json, inject_bessel_error } => {
            if !commands::selftest(json, inject_bessel_error).passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ati: {e}");
            e.exit_code()
        }
    }
}
