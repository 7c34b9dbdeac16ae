//! Command-line front end: argument parsing, problem files and output.

pub mod commands;
pub mod input;
pub mod output;

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use commands::{
    Backend, CheckMode, CheckOpts, Common, Format, Outcome, RunMode, Scenario, Source, WorkMode, WorkOpts,
};
use input::Problem;

#[derive(Debug, Parser)]
#[command(name = "corrcat", version, about = "Single-shot thermodynamics with correlated catalysts")]
pub struct Cli {
    /// Problem file (JSON).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Built-in problem instead of a file.
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<ScenarioArg>,
    /// Grid spec, e.g. `0+0.5+1+inf`, `lin:-2:4:61+burg`, `standard`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha_grid: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "float")]
    pub backend: BackendArg,
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report entropies in bits.
    #[arg(long, global = true)]
    pub bits: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioArg {
    Qubit,
    Fig3,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BackendArg {
    Float,
    Rational,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CheckModeArg {
    Thermo,
    Trumping,
    Correlated,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WorkModeArg {
    NoCatalyst,
    WithJoint,
    Extraction,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RunModeArg {
    State,
    Formation,
    Extraction,
}

#[derive(Debug, clap::Args)]
pub struct WorkArgs {
    /// Allowed shortfall of the work bit gap, in energy units.
    #[arg(long, default_value_t = 0.01)]
    pub delta_gap: f64,
    /// Trace-distance error of the output.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    /// Bound on the catalyst-system mutual information.
    #[arg(long, default_value_t = 0.3)]
    pub eps_corr: f64,
    /// Sink as `m/n`: uniform on m of n levels.
    #[arg(long)]
    pub sink: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub sink_eps: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rényi entropies and free energies on a grid.
    Entropy,
    /// Feasibility of `p → q`. Exit 0 feasible, 2 infeasible.
    Check {
        #[arg(long, value_enum, default_value = "thermo")]
        mode: CheckModeArg,
        /// Work-bit gap of the qubit scenario, units of kT.
        #[arg(long, default_value_t = 0.26)]
        delta: f64,
        #[arg(long, default_value_t = 0.3)]
        eps_corr: f64,
        /// Also materialize a catalyst.
        #[arg(long)]
        explicit: bool,
    },
    /// Minimal work of formation, or extractable work.
    Minwork {
        #[arg(long, value_enum, default_value = "no-catalyst")]
        mode: WorkModeArg,
        #[command(flatten)]
        work: WorkArgs,
    },
    /// Data behind the figures: fig3 or fig5.
    Figure {
        name: String,
        #[arg(long, default_value_t = 0.26)]
        delta: f64,
    },
    /// Build and verify a protocol.
    Run {
        #[arg(long, value_enum, default_value = "state")]
        mode: RunModeArg,
        #[arg(long, default_value_t = 0.26)]
        delta: f64,
        #[command(flatten)]
        work: WorkArgs,
    },
}

fn parse_sink(s: &str) -> Result<(u64, u64)> {
    let Some((m, n)) = s.split_once('/') else { bail!("sink must be m/n") };
    Ok((m.trim().parse()?, n.trim().parse()?))
}

fn work_opts(w: &WorkArgs, mode: WorkMode) -> Result<WorkOpts> {
    Ok(WorkOpts {
        mode,
        delta_gap: w.delta_gap,
        epsilon: w.epsilon,
        eps_corr: w.eps_corr,
        sink: w.sink.as_deref().map(parse_sink).transpose()?,
        sink_eps: w.sink_eps,
    })
}

impl Cli {
    fn source(&self) -> Result<Source> {
        match (&self.input, self.scenario) {
            (Some(_), Some(_)) => bail!("give either --input or --scenario"),
            (Some(p), None) => Ok(Source::File(Problem::load(p)?)),
            (None, Some(ScenarioArg::Qubit)) => Ok(Source::Scenario(Scenario::Qubit)),
            (None, Some(ScenarioArg::Fig3)) => Ok(Source::Scenario(Scenario::Fig3)),
            (None, None) => bail!("no input: use --input FILE or --scenario"),
        }
    }

    fn common(&self) -> Common {
        Common {
            alpha_grid: self.alpha_grid.clone(),
            backend: match self.backend {
                BackendArg::Float => Backend::Float,
                BackendArg::Rational => Backend::Rational,
            },
            tolerance: self.tolerance,
            seed: self.seed,
            format: match self.format {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            },
            bits: self.bits,
        }
    }

    pub fn execute(&self) -> Result<Outcome> {
        let c = self.common();
        match &self.command {
            Command::Entropy => commands::entropy(&self.source()?, &c),
            Command::Check { mode, delta, eps_corr, explicit } => {
                let o = CheckOpts {
                    mode: match mode {
                        CheckModeArg::Thermo => CheckMode::Thermo,
                        CheckModeArg::Trumping => CheckMode::Trumping,
                        CheckModeArg::Correlated => CheckMode::Correlated,
                    },
                    delta: *delta,
                    eps_corr: *eps_corr,
                    explicit: *explicit,
                };
                commands::check(&self.source()?, &o, &c)
            }
            Command::Minwork { mode, work } => {
                let m = match mode {
                    WorkModeArg::NoCatalyst => WorkMode::NoCatalyst,
                    WorkModeArg::WithJoint => WorkMode::WithJoint,
                    WorkModeArg::Extraction => WorkMode::Extraction,
                };
                commands::minwork(&self.source()?, &work_opts(work, m)?, &c)
            }
            Command::Figure { name, delta } => commands::figure(name, *delta, &c),
            Command::Run { mode, delta, work } => {
                let m = match mode {
                    RunModeArg::State => RunMode::State,
                    RunModeArg::Formation => RunMode::Formation,
                    RunModeArg::Extraction => RunMode::Extraction,
                };
                commands::run(&self.source()?, m, &work_opts(work, WorkMode::NoCatalyst)?, *delta, &c)
            }
        }
    }
}

/// Parses `args`, runs the command and writes its output; returns the exit
/// code.
pub fn main_with<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { commands::EXIT_ERROR } else { commands::EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match cli.execute() {
        Ok(o) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &o.text).map_err(anyhow::Error::from),
                None => stdout.write_all(o.text.as_bytes()).map_err(anyhow::Error::from),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e:#}");
                return commands::EXIT_ERROR;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            commands::EXIT_ERROR
        }
    }
}
