//! `amas-mc`: strategic model checking of asynchronous multi-agent systems.
//!
//! Exit status is 0 on success, 1 when a checked property is violated and 2
//! on usage or input errors. The JSON report goes to stdout and a short
//! human-readable summary to stderr.

mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use amas_core::por::C1Mode;
use amas_core::{Execution, FairnessKind, ModelKind, OutcomeMode};
use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "amas-mc", version, about = "Strategic model checker for asynchronous multi-agent systems")]
struct Cli {
    /// Worker threads for strategy search; 1 runs sequentially.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Seed for randomized commands. AMAS_MC_SEED takes precedence.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a global model and print its states and transitions.
    Compose {
        #[arg(long, default_value = "iis")]
        model: ModelKind,
        /// Model file, or a bundled name (conference, voting, voting_explicit, chains:K:LEN).
        source: String,
    },
    /// Add ε-loops where some joint selection blocks, and list them.
    Undeadlock { source: String },
    /// List the memoryless strategies of a coalition.
    EnumerateStrategies {
        #[arg(long, value_delimiter = ',', default_value = "")]
        coalition: Vec<String>,
        /// Print at most this many strategies.
        #[arg(long, default_value_t = 100)]
        limit: u64,
        source: String,
    },
    /// Show the outcome graph of one strategy.
    Outcome {
        #[command(flatten)]
        sem: SemanticsArgs,
        #[arg(long, value_delimiter = ',', default_value = "")]
        coalition: Vec<String>,
        /// Position of the strategy in enumeration order.
        #[arg(long, conflicts_with = "strategy")]
        strategy_index: Option<u64>,
        /// JSON table `{agent: {local state: [events]}}`.
        #[arg(long, value_name = "FILE")]
        strategy: Option<String>,
        source: String,
    },
    /// Decide formulas at a state.
    Check {
        #[command(flatten)]
        sem: SemanticsArgs,
        #[command(flatten)]
        formulas: FormulaArgs,
        /// Accept witnesses whose outcome is empty.
        #[arg(long)]
        no_nonempty_requirement: bool,
        /// Let ε serve as a fairness witness event.
        #[arg(long)]
        epsilon_witness: bool,
        source: String,
    },
    /// Apply partial-order reduction to an undeadlocked model.
    Reduce {
        #[command(flatten)]
        por: PorArgs,
        #[arg(long, default_value = "undeadlocked")]
        model: ModelKind,
        source: String,
    },
    /// Check that reduction preserves every formula's verdict.
    VerifyReduction {
        #[command(flatten)]
        por: PorArgs,
        /// Also search for stutter-inequivalent paths up to this lasso length.
        #[arg(long, value_name = "N")]
        stutter_bound: Option<usize>,
        source: String,
    },
    /// Reproduce the documented facts of every bundled model.
    Selftest,
    /// Print a random, validation-clean system.
    Generate {
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 4)]
        events: usize,
        #[arg(long, default_value_t = 2)]
        sync_degree: usize,
        /// Print the system source instead of a JSON report.
        #[arg(long)]
        raw: bool,
    },
}

#[derive(Debug, Args)]
struct SemanticsArgs {
    #[arg(long, default_value = "iis")]
    model: ModelKind,
    /// Outcome semantics: plain or el (opponent-reactive).
    #[arg(long, default_value = "plain")]
    semantics: OutcomeMode,
    #[arg(long, default_value = "none")]
    fairness: FairnessKind,
    /// Global state name such as `000`; defaults to the initial state.
    #[arg(long)]
    state: Option<String>,
}

#[derive(Debug, Args)]
struct FormulaArgs {
    /// A formula; may be repeated.
    #[arg(long = "formula", value_name = "FORMULA")]
    inline: Vec<String>,
    /// One formula per line; `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    formula_file: Option<String>,
}

#[derive(Debug, Args)]
struct PorArgs {
    #[command(flatten)]
    formulas: FormulaArgs,
    /// Agents the reduction must respect, in addition to those in the formulas.
    #[arg(long, value_delimiter = ',')]
    coalition: Vec<String>,
    /// Propositions the reduction must respect, in addition to those in the formulas.
    #[arg(long, value_delimiter = ',')]
    props: Vec<String>,
    #[arg(long, default_value = "exact")]
    c1_mode: C1Mode,
}

/// What a command hands back to `main`.
struct Outcome {
    report: RunReport,
    summary: String,
    violated: bool,
}

fn execution(jobs: Option<usize>) -> Result<Execution> {
    match jobs {
        Some(0) => anyhow::bail!("--jobs must be positive"),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot start the worker pool")?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => {
            eprintln!("warning: built without the `parallel` feature; --jobs is ignored");
            Ok(Execution::Sequential)
        }
        None => Ok(Execution::default()),
    }
}

fn seed(flag: Option<u64>) -> Result<Option<u64>> {
    match std::env::var("AMAS_MC_SEED") {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("AMAS_MC_SEED=`{v}` is not a number"))?)),
        Err(_) => Ok(flag),
    }
}

fn run(cli: Cli, argv: Vec<String>) -> Result<Outcome> {
    let exec = execution(cli.jobs)?;
    let seed = seed(cli.seed)?;
    let report = RunReport::new(argv);
    use commands as c;
    match cli.command {
        Command::Compose { model, source } => c::compose(report, &source, model),
        Command::Undeadlock { source } => c::undeadlock(report, &source),
        Command::EnumerateStrategies {
            coalition,
            limit,
            source,
        } => c::enumerate(report, &source, &coalition, limit),
        Command::Outcome {
            sem,
            coalition,
            strategy_index,
            strategy,
            source,
        } => c::outcome(report, &source, &sem, &coalition, strategy_index, strategy.as_deref()),
        Command::Check {
            sem,
            formulas,
            no_nonempty_requirement,
            epsilon_witness,
            source,
        } => c::check(
            report,
            &source,
            &sem,
            &formulas,
            !no_nonempty_requirement,
            epsilon_witness,
            exec,
        ),
        Command::Reduce { por, model, source } => c::reduce(report, &source, &por, model),
        Command::VerifyReduction {
            por,
            stutter_bound,
            source,
        } => c::verify_reduction(report, &source, &por, stutter_bound, exec),
        Command::Selftest => c::selftest(report, exec),
        Command::Generate {
            agents,
            states,
            events,
            sync_degree,
            raw,
        } => c::generate(report, seed.unwrap_or(0), agents, states, events, sync_degree, raw),
    }
}

/// Writes the report to stdout. A closed pipe is not an error worth a panic.
fn emit(report: &RunReport) {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let timing = cli.timing;
    let start = Instant::now();
    match run(cli, argv.clone()) {
        Ok(Outcome {
            mut report,
            summary,
            violated,
        }) => {
            if timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            if !report.result.is_null() {
                emit(&report);
            }
            eprintln!("{summary}");
            if violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let mut report = RunReport::new(argv);
            report.result = serde_json::json!({ "error": format!("{e:#}") });
            emit(&report);
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
