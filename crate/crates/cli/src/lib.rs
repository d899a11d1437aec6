//! Config-driven sweeps over the `gawqed` library.
//!
//! [`run`] reads a JSON configuration, evaluates one command over a grid and
//! writes CSV or JSON rows in grid order.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::json;
use thiserror::Error;

pub use config::{expand_symmetric, ConfigFile, Setup};
pub use output::{Table, Value};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{module}: {message}")]
    Numerical { module: &'static str, message: String },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Io(_) => 4,
        }
    }

    /// Machine-readable form written to stderr on failure.
    pub fn record(&self) -> serde_json::Value {
        match self {
            CliError::Schema(m) => json!({"error": "schema", "exit_code": 2, "message": m}),
            CliError::Numerical { module, message } => {
                json!({"error": "numerical", "exit_code": 3, "module": module, "message": message})
            }
            CliError::Io(m) => json!({"error": "io", "exit_code": 4, "message": m}),
        }
    }
}

pub(crate) fn numerical<E: fmt::Display>(module: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::Numerical {
        module,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Characteristics,
    Spectrum,
    Loci,
    Fano,
    EitClassify,
    EitSpectrum,
    MasterSweep,
    InelasticSpectrum,
    OracleCheck,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::Characteristics,
        Command::Spectrum,
        Command::Loci,
        Command::Fano,
        Command::EitClassify,
        Command::EitSpectrum,
        Command::MasterSweep,
        Command::InelasticSpectrum,
        Command::OracleCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Characteristics => "characteristics",
            Command::Spectrum => "spectrum",
            Command::Loci => "loci",
            Command::Fano => "fano",
            Command::EitClassify => "eit-classify",
            Command::EitSpectrum => "eit-spectrum",
            Command::MasterSweep => "master-sweep",
            Command::InelasticSpectrum => "inelastic-spectrum",
            Command::OracleCheck => "oracle-check",
        }
    }

    /// Sweep variables the command accepts; the first is its default.
    pub fn sweep_vars(self) -> &'static [SweepVar] {
        match self {
            Command::Characteristics | Command::Loci | Command::Fano | Command::EitClassify => &[SweepVar::Phi],
            Command::Spectrum | Command::EitSpectrum | Command::MasterSweep => &[SweepVar::DeltaA],
            Command::InelasticSpectrum => &[SweepVar::Nu],
            Command::OracleCheck => &[],
        }
    }

    /// Grid used when no sweep is given; `None` evaluates a single point.
    pub fn default_sweep(self) -> Option<Sweep> {
        match self {
            Command::Spectrum | Command::EitSpectrum | Command::MasterSweep => Some(Sweep {
                var: SweepVar::DeltaA,
                start: -6.0,
                stop: 6.0,
                points: 1201,
            }),
            Command::InelasticSpectrum => Some(Sweep {
                var: SweepVar::Nu,
                start: -5.0,
                stop: 5.0,
                points: 501,
            }),
            _ => None,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Schema(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    DeltaA,
    Phi,
    /// Frequency offset from the drive, for emission spectra.
    Nu,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::DeltaA => "delta_a",
            SweepVar::Phi => "phi",
            SweepVar::Nu => "nu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Sweep {
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64)
            .collect()
    }
}

impl FromStr for Sweep {
    type Err = CliError;

    /// `VAR:START:STOP:POINTS`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| CliError::Schema(format!("sweep {s:?}: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        let [var, start, stop, points] = parts[..] else {
            return Err(bad("expected VAR:START:STOP:POINTS"));
        };
        let var = match var {
            "delta_a" => SweepVar::DeltaA,
            "phi" => SweepVar::Phi,
            "nu" => SweepVar::Nu,
            _ => return Err(bad("variable must be delta_a, phi or nu")),
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("start and stop must be numbers"));
        let (start, stop) = (num(start)?, num(stop)?);
        let points = points.trim().parse::<usize>().map_err(|_| bad("points must be a positive integer"))?;
        if points < 2 {
            return Err(bad("points must be at least 2"));
        }
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(bad("need finite start < stop"));
        }
        Ok(Sweep {
            var,
            start,
            stop,
            points,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Schema(format!("unknown format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    /// Required by every command except `oracle-check`.
    pub config_path: Option<PathBuf>,
    pub command: Command,
    pub sweep: Option<Sweep>,
    /// φ sweep wrapped around a `delta_a` sweep for two-dimensional maps.
    pub outer: Option<Sweep>,
    /// Standard output when unset.
    pub out: Option<PathBuf>,
    /// Defaults to JSON for single verdicts and reports, CSV otherwise.
    pub format: Option<Format>,
    /// Worker threads; all cores when unset.
    pub jobs: Option<usize>,
    /// Random configurations drawn by `oracle-check`.
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl RunSpec {
    pub fn new(command: Command) -> Self {
        Self {
            config_path: None,
            command,
            sweep: None,
            outer: None,
            out: None,
            format: None,
            jobs: None,
            samples: 100,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Oracle tolerance from `GAWQED_TOL`, falling back to the default.
pub fn tolerance_from_env() -> Result<f64, CliError> {
    match std::env::var("GAWQED_TOL") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::Schema(format!("GAWQED_TOL must be a positive number, got {s:?}"))),
        },
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

/// Rows of a finished command. `failure` is set when the command produced a
/// report but its check did not pass (`oracle-check`).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
}

/// Evaluates the command without writing anything.
pub fn evaluate(spec: &RunSpec) -> Result<Outcome, CliError> {
    if let Some(s) = &spec.sweep {
        if !spec.command.sweep_vars().contains(&s.var) {
            let allowed: Vec<&str> = spec.command.sweep_vars().iter().map(|v| v.name()).collect();
            return Err(CliError::Schema(format!(
                "{} cannot sweep {} (allowed: {})",
                spec.command,
                s.var.name(),
                if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
            )));
        }
    }
    if let Some(o) = &spec.outer {
        let inner_is_delta = spec.sweep.is_some_and(|s| s.var == SweepVar::DeltaA);
        let supported = matches!(spec.command, Command::Spectrum | Command::EitSpectrum | Command::MasterSweep);
        if o.var != SweepVar::Phi || !inner_is_delta || !supported {
            return Err(CliError::Schema(
                "two sweeps need phi (outer) and delta_a (inner) with spectrum, eit-spectrum or master-sweep".into(),
            ));
        }
    }
    if spec.jobs == Some(0) {
        return Err(CliError::Schema("jobs must be at least 1".into()));
    }
    let setup = match &spec.config_path {
        Some(path) => Some(ConfigFile::load(path)?.validate()?),
        None if spec.command == Command::OracleCheck => None,
        None => return Err(CliError::Schema(format!("{} needs --config", spec.command))),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.jobs {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| commands::dispatch(spec, setup.as_ref()))
}

/// Runs the command and writes its output.
pub fn run(spec: &RunSpec) -> Result<(), CliError> {
    let Outcome { table, failure } = evaluate(spec)?;
    let format = spec.format.unwrap_or(if table.record { Format::Json } else { Format::Csv });
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &spec.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            write_table(&table, format, &mut w).map_err(io)?;
            w.flush().map_err(io)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            write_table(&table, format, &mut w).map_err(io)?;
        }
    }
    failure.map_or(Ok(()), Err)
}

fn write_table(table: &Table, format: Format, w: &mut impl Write) -> std::io::Result<()> {
    match format {
        Format::Csv => table.write_csv(w),
        Format::Json => table.write_json(w),
    }
}
