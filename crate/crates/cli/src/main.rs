use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gawqed_cli::{run, tolerance_from_env, CliError, Command, Format, RunSpec, Sweep, SweepVar};

/// Scattering, Fano, EIT and master-equation sweeps for two giant atoms.
#[derive(Debug, Parser)]
#[command(name = "gawqed", version)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// characteristics, spectrum, loci, fano, eit-classify, eit-spectrum,
    /// master-sweep, inelastic-spectrum or oracle-check.
    #[arg(long)]
    command: String,
    /// VAR:START:STOP:POINTS with VAR one of delta_a, phi, nu. Give it twice
    /// (phi and delta_a) for a two-dimensional map.
    #[arg(long)]
    sweep: Vec<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Random configurations for oracle-check.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn spec_from(args: Args) -> Result<RunSpec, CliError> {
    let mut spec = RunSpec::new(args.command.parse::<Command>()?);
    spec.config_path = args.config;
    let sweeps = args.sweep.iter().map(|s| s.parse::<Sweep>()).collect::<Result<Vec<_>, _>>()?;
    match sweeps[..] {
        [] => {}
        [s] => spec.sweep = Some(s),
        [a, b] => {
            let (outer, inner) = if a.var == SweepVar::Phi { (a, b) } else { (b, a) };
            spec.outer = Some(outer);
            spec.sweep = Some(inner);
        }
        _ => return Err(CliError::Schema("at most two --sweep flags".into())),
    }
    spec.out = args.out;
    spec.format = args.format.as_deref().map(str::parse::<Format>).transpose()?;
    spec.jobs = args.jobs;
    spec.samples = args.samples;
    spec.seed = args.seed;
    spec.tolerance = tolerance_from_env()?;
    Ok(spec)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Schema(e.to_string().trim_end().to_string());
            eprintln!("{}", err.record());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match spec_from(args).and_then(|s| run(&s)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
