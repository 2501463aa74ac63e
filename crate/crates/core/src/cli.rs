//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 data
//! error, 3 convergence or certificate failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::dataset::Dataset;
use crate::dea::{self, Orientation};
use crate::error::{Error, Result};
use crate::improve;
use crate::io::{self as dio, RunConfig};
use crate::sections::{self, SectionKind, SectionSpec};
use crate::synth::{self, SynthSpec};
use crate::terminal;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "dea-frontier", version, about = "DEA frontier analysis and improvement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Input,
    Output,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Input => Orientation::Input,
            OrientationArg::Output => Orientation::Output,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Efficiency scores and slacks in one orientation.
    Eff {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "input")]
        orientation: OrientationArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Efficiency class of every unit.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Terminal units and their terminal directions.
    Terminal {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-dimensional frontier section through a unit.
    Section {
        #[arg(long)]
        input: PathBuf,
        /// Id of the unit the section passes through.
        #[arg(long)]
        base: String,
        /// S1 (two inputs), S2 (two outputs) or S3 (input, output).
        #[arg(long)]
        kind: String,
        /// Section axes, as `x1,x2` or `1,2`.
        #[arg(long)]
        axes: String,
        #[arg(long)]
        samples: Option<usize>,
        /// Append every unit projected onto the section axes.
        #[arg(long)]
        annex: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Insert artificial units and certify the improved frontier.
    Improve {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Generate a synthetic dataset.
    Synth {
        #[arg(long)]
        units: usize,
        #[arg(long, default_value_t = 3)]
        inputs: usize,
        #[arg(long, default_value_t = 3)]
        outputs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Data(Error),
    Convergence(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
        Err(Failure::Convergence(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONVERGENCE
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => dio::write_text(path, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn config_or_default(path: Option<&Path>) -> Result<RunConfig> {
    path.map(dio::load_config).transpose().map(Option::unwrap_or_default)
}

/// Parses `x1,x2`, `y1,y2`, `x1,y1` or bare `1,2` into zero-based axes.
fn parse_axes(text: &str, kind: SectionKind) -> std::result::Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("--axes expects two comma-separated axes, got `{text}`"));
    }
    let expected = match kind {
        SectionKind::S1 => ['x', 'x'],
        SectionKind::S2 => ['y', 'y'],
        SectionKind::S3 => ['x', 'y'],
    };
    let mut out = [0usize; 2];
    for (slot, (part, want)) in parts.iter().zip(expected).enumerate() {
        let digits = match part.strip_prefix(|c: char| c.is_ascii_alphabetic()) {
            Some(rest) if part.starts_with(want) => rest,
            Some(_) => return Err(format!("axis `{part}` does not fit section {kind}")),
            None => part,
        };
        let k: usize = digits.parse().map_err(|_| format!("bad axis `{part}`"))?;
        if k == 0 {
            return Err(format!("axes are numbered from 1, got `{part}`"));
        }
        out[slot] = k - 1;
    }
    Ok((out[0], out[1]))
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Eff { input, orientation, out } => {
            let ds = dio::load_csv(&input)?;
            let evals = dea::evaluate_all(&ds, dea::ZERO_TOL)?;
            emit(out.as_deref(), &dio::efficiency_report(&ds, &evals, orientation.into())?)?;
        }
        Command::Classify { input, out } => {
            let ds = dio::load_csv(&input)?;
            let evals = dea::evaluate_all(&ds, dea::ZERO_TOL)?;
            emit(out.as_deref(), &dio::classification_report(&ds, &evals, dea::ZERO_TOL)?)?;
        }
        Command::Terminal { input, out } => {
            let ds = dio::load_csv(&input)?;
            let report = terminal::find_terminal_units(&ds)?;
            emit(out.as_deref(), &dio::terminal_report(&report)?)?;
        }
        Command::Section { input, base, kind, axes, samples, annex, config, out } => {
            let kind: SectionKind = kind.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let (first, second) = parse_axes(&axes, kind).map_err(Failure::Usage)?;
            let cfg = config_or_default(config.as_deref())?;
            let samples = samples.or(cfg.samples).unwrap_or(64);
            let ds = dio::load_csv(&input)?;
            let j = ds
                .index_of(&base)
                .ok_or_else(|| Error::input(format!("no unit with id `{base}`")))?;
            let spec = SectionSpec::through_unit(&ds, j, kind, first, second);
            let mut poly = sections::section_polyline(&ds, &spec, samples)?;
            if annex {
                sections::attach_annex(&ds, &spec, &mut poly);
            }
            emit(out.as_deref(), &poly.to_text())?;
        }
        Command::Improve { input, config, out_dir } => {
            let cfg = config_or_default(config.as_deref())?;
            let input = input
                .or(cfg.input.clone())
                .ok_or_else(|| Failure::Usage("improve needs --input or an `input` config key".into()))?;
            let out_dir = out_dir
                .or(cfg.output.clone())
                .ok_or_else(|| Failure::Usage("improve needs --out-dir or an `output` config key".into()))?;
            let ds = dio::load_csv(&input)?;
            return improve_to(&ds, &cfg, &out_dir);
        }
        Command::Synth { units, inputs, outputs, seed, rho, config, out } => {
            let cfg = config_or_default(config.as_deref())?;
            let mut spec = SynthSpec::with_defaults(units, inputs, outputs, seed.or(cfg.seed).unwrap_or(1));
            if let Some(rho) = rho.or(cfg.rho) {
                spec.rho = rho;
            }
            let ds = synth::generate_synthetic(&spec)?;
            let out = out.or(cfg.output);
            let mut buf = Vec::new();
            dio::write_csv(&ds, &mut buf, None)?;
            emit(out.as_deref(), &String::from_utf8(buf).expect("csv output is utf-8"))?;
        }
    }
    Ok(())
}

fn improve_to(ds: &Dataset, cfg: &RunConfig, out_dir: &Path) -> Outcome {
    match improve::improve_frontier(ds, &cfg.params) {
        Ok(result) => {
            dio::write_improvement(&result, out_dir)?;
            let kept = result.kept().count();
            let cert = &result.certificate;
            println!("kept {kept} artificial units; outputs in {}", out_dir.display());
            if cert.holds() {
                println!("certificate holds");
                Ok(())
            } else {
                Err(Failure::Convergence(format!(
                    "certificate fails: broken [{}], terminal [{}], residual weak [{}]",
                    cert.broken.join(","),
                    cert.terminal_originals.join(","),
                    cert.residual_weak.join(",")
                )))
            }
        }
        Err(Error::Convergence { part, broken, partial }) => {
            if let Some(partial) = partial {
                dio::write_improvement(&partial, out_dir)?;
            }
            Err(Failure::Convergence(format!(
                "part {part} did not converge; still broken: {}; partial outputs in {}",
                broken.join(","),
                out_dir.display()
            )))
        }
        Err(e) => Err(Failure::Data(e)),
    }
}
