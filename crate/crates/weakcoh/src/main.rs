use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakcoh::audit::{self, AuditSpec, Property};
use weakcoh::diagnose::{diagnose, MeasurementChoice};
use weakcoh::error::{CliError, Result};
use weakcoh::figure::{self, Family, SweepSpec};
use weakcoh::io::{emit, read_state};
use weakcoh::survey::{self, Stream, SurveySpec};

#[derive(Parser)]
#[command(name = "weakcoh", version, about = "Hellinger coherence under weak and projective measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherence sweep over the Bell-diagonal or Werner family, as CSV.
    Figure1 {
        #[arg(long, value_enum)]
        family: Family,
        /// `min:max:samples`; defaults to the whole physical region with 200 samples.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, default_value = "1,2,3,50")]
        x_values: String,
        /// Local dimension of the Werner state.
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coherence, correlation and uncertainty for one state and measurement, as JSON.
    Coherence {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        phi: Option<String>,
        /// Comma-separated `d_a²` generator parameters (for `d_a > 2`).
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["theta", "phi"])]
        generator: Option<String>,
        #[arg(long, default_value_t = 1)]
        split: usize,
        #[arg(long)]
        x: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property audit; exits 1 if an asserting property is violated.
    Audit {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "2x2")]
        dims: String,
        #[arg(long, value_enum, value_delimiter = ',')]
        properties: Option<Vec<Property>>,
        #[arg(long, default_value = "0.1:10")]
        x_range: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hold rates of the uncertainty bound over random triples, as JSON.
    Theorem3Survey {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "generic")]
        stream: Stream,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A real number, optionally written as a fraction such as `-1/3`.
fn real(s: &str) -> Result<f64> {
    let bad = || CliError::Usage(format!("expected a number, got `{s}`"));
    let v = match s.split_once('/') {
        Some((n, d)) => n.trim().parse::<f64>().map_err(|_| bad())? / d.trim().parse::<f64>().map_err(|_| bad())?,
        None => s.trim().parse::<f64>().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn reals(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(real).collect()
}

fn parse_range(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, n] => {
            let n = n.trim().parse().map_err(|_| CliError::Usage(format!("bad sample count in `{s}`")))?;
            Ok((real(lo)?, real(hi)?, n))
        }
        _ => Err(CliError::Usage(format!("--range expects min:max:samples, got `{s}`"))),
    }
}

fn parse_pair(s: &str, sep: char, flag: &str) -> Result<(String, String)> {
    s.split_once(sep)
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .ok_or_else(|| CliError::Usage(format!("{flag} expects a{sep}b, got `{s}`")))
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Figure1 { family, range, x_values, d, out } => {
            let (lo, hi) = family.domain();
            let (min, max, samples) = match range {
                Some(r) => parse_range(&r)?,
                None => (lo, hi, 200),
            };
            let spec = SweepSpec { family, min, max, samples, x_values: reals(&x_values)?, werner_d: d };
            let rows = figure::sweep(&spec)?;
            emit(out.as_ref(), &figure::to_csv(&spec, &rows))?;
        }
        Command::Coherence { state, theta, phi, generator, split, x, out } => {
            let rho = read_state(&state)?;
            let choice = match (generator, theta, phi) {
                (Some(g), _, _) => MeasurementChoice::Generator(reals(&g)?),
                (None, None, None) => MeasurementChoice::Computational,
                (None, t, p) => MeasurementChoice::Bloch {
                    theta: t.as_deref().map(real).transpose()?.unwrap_or(0.0),
                    phi: p.as_deref().map(real).transpose()?.unwrap_or(0.0),
                },
            };
            let report = diagnose(&rho, &choice, split, real(&x)?)?;
            emit(out.as_ref(), &json(&report)?)?;
        }
        Command::Audit { trials, seed, dims, properties, x_range, out } => {
            let (a, b) = parse_pair(&dims, 'x', "--dims")?;
            let dim = |s: &str| s.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad dimension `{s}`")));
            let (lo, hi) = parse_pair(&x_range, ':', "--x-range")?;
            let spec = AuditSpec::new(
                trials,
                seed,
                (dim(&a)?, dim(&b)?),
                (real(&lo)?, real(&hi)?),
                properties.unwrap_or_else(|| Property::ALL.to_vec()),
            );
            let report = audit::run(&spec)?;
            emit(out.as_ref(), &json(&report)?)?;
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Theorem3Survey { trials, seed, stream, d, out } => {
            let report = survey::run(&SurveySpec { trials, seed, stream, dim: d })?;
            emit(out.as_ref(), &json(&report)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
