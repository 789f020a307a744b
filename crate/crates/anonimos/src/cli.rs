//! The `anonimos` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anonimos_core::anonymize::{export_model, AnonymizeError};
use anonimos_core::constraints::Margin;
use anonimos_core::metrics::{build_report, MetricsError, RunProvenance};
use anonimos_core::{
    anonymize, AnonymizeOptions, ConstraintMode, CostTolerance, Directedness, SourceSelection,
    WeightedGraph,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::edge_list::{parse_edge_list, write_edge_list};
use crate::lp_format::{export_lp_text, DEFAULT_PREFIX};
use crate::report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NOT_PRESERVED: i32 = 4;

/// Output graphs keep every bit of the solved weights.
const OUTPUT_PRECISION: usize = 17;

#[derive(Debug, Parser)]
#[command(
    name = "anonimos",
    version,
    about = "Anonymize edge weights while keeping shortest-path trees intact",
    after_help = "Exit codes: 0 ok, 1 I/O or unreadable input, 2 infeasible or unverified, \
                  3 invalid configuration or topology mismatch, 4 trees not preserved (verify)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for new weights and write the anonymized graph.
    Anonymize(RunArgs),
    /// Write the LP that `anonymize` would solve first.
    ExportLp(RunArgs),
    /// Check that the anonymized graph keeps every selected tree (exit 4 if not).
    Verify(CompareArgs),
    /// Report anonymity metrics between two graphs without the preservation gate.
    Metrics(CompareArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Sssp,
    Apsp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Constraints {
    Trace,
    Optimality,
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Source vertex for single-source mode.
    #[arg(long, conflicts_with = "sources")]
    source: Option<usize>,
    /// `sssp` (one source, default 0) or `apsp` (every vertex).
    #[arg(long, value_enum, conflicts_with = "sources")]
    mode: Option<Mode>,
    /// Comma-separated list of sources.
    #[arg(long, value_delimiter = ',')]
    sources: Option<Vec<usize>>,
}

impl SourceArgs {
    fn selection(&self) -> Result<SourceSelection, Failure> {
        match (self.mode, self.source, &self.sources) {
            (Some(Mode::Apsp), Some(_), _) => Err(Failure::config(
                "--source cannot be combined with --mode apsp",
            )),
            (Some(Mode::Apsp), None, _) => Ok(SourceSelection::All),
            (_, _, Some(list)) => Ok(SourceSelection::Subset(list.clone())),
            (_, source, None) => Ok(SourceSelection::Single(source.unwrap_or(0))),
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Input edge list.
    #[arg(short, long)]
    input: PathBuf,
    /// Output file: the anonymized edge list, or the LP text for `export-lp`.
    #[arg(short, long)]
    output: PathBuf,
    /// Treat edges as directed arcs.
    #[arg(long)]
    directed: bool,
    #[command(flatten)]
    sources: SourceArgs,
    #[arg(long, value_enum, default_value = "optimality")]
    constraints: Constraints,
    /// Strictness margin: each preserved comparison wins by at least this much.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    delta: f64,
    /// Weight box `L,U` [default: 1,1000].
    #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true)]
    bounds: Option<(f64, f64)>,
    /// Keep every shortest-path cost within ±e of the original.
    ///
    /// Unless --bounds is given, the default box is widened to
    /// [min(1, w_min·max(1−ê, 0.001)), max(1000, max D + e)], where ê is e
    /// divided by the smallest positive distance and D ranges over the
    /// preserved distances.
    #[arg(
        long,
        conflicts_with = "relative_epsilon",
        allow_negative_numbers = true
    )]
    epsilon: Option<f64>,
    /// Like --epsilon, with tolerance r·D for a path of cost D.
    #[arg(long, allow_negative_numbers = true)]
    relative_epsilon: Option<f64>,
    /// Number of random objectives; the verified result with the smallest |tau| wins.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bucket width for k-anonymity.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    bucket: f64,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Original edge list.
    #[arg(short, long)]
    input: PathBuf,
    /// Anonymized edge list to compare against the original.
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    directed: bool,
    #[command(flatten)]
    sources: SourceArgs,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    bucket: f64,
    /// Recorded in the report.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (l, u) = s
        .split_once(',')
        .ok_or_else(|| format!("expected L,U, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(l)?, num(u)?))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Failure::new(EXIT_CONFIG, message)
    }
}

fn directedness(directed: bool) -> Directedness {
    if directed {
        Directedness::Directed
    } else {
        Directedness::Undirected
    }
}

fn read_graph(path: &Path, directed: bool) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    parse_edge_list(&text, directedness(directed))
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn options(args: &RunArgs) -> Result<AnonymizeOptions, Failure> {
    let (lower, upper) = args.bounds.unwrap_or((1.0, 1000.0));
    let cost = match (args.epsilon, args.relative_epsilon) {
        (Some(e), _) => Some(CostTolerance::Absolute(e)),
        (None, Some(r)) => Some(CostTolerance::Relative(r)),
        (None, None) => None,
    };
    if !(args.bucket > 0.0 && args.bucket.is_finite()) {
        return Err(Failure::config(format!(
            "bucket must be > 0, got {}",
            args.bucket
        )));
    }
    let options = AnonymizeOptions {
        sources: args.sources.selection()?,
        mode: match args.constraints {
            Constraints::Trace => ConstraintMode::Trace,
            Constraints::Optimality => ConstraintMode::Optimality,
        },
        delta: args.delta,
        lower,
        upper,
        cost,
        widen_bounds: args.bounds.is_none(),
        rounds: args.rounds,
        seed: args.seed,
    };
    options
        .validate()
        .map_err(|e| Failure::config(e.to_string()))?;
    Ok(options)
}

fn anonymize_error(err: AnonymizeError, report: &mut Report) -> Failure {
    match &err {
        AnonymizeError::Infeasible {
            violated,
            out_of_bounds,
        } => {
            report.status = "infeasible".into();
            report.violated = violated.iter().map(|p| p.to_string()).collect();
            report.warnings.extend(
                out_of_bounds
                    .iter()
                    .map(|e| format!("original weight of edge {e} lies outside the bounds")),
            );
            Failure::new(EXIT_INFEASIBLE, err.to_string())
        }
        AnonymizeError::Unverified {
            delta_used,
            failed_sources,
        } => {
            report.status = "unverified".into();
            report.delta_used = Some(*delta_used);
            report.failed_sources = failed_sources.clone();
            Failure::new(EXIT_INFEASIBLE, err.to_string())
        }
        AnonymizeError::Solver(_) => {
            report.status = "solver_failure".into();
            Failure::new(EXIT_INFEASIBLE, err.to_string())
        }
        AnonymizeError::InvalidConfig(_) | AnonymizeError::Constraint(_) => {
            report.status = "invalid_config".into();
            Failure::config(err.to_string())
        }
    }
}

fn run_anonymize(args: &RunArgs) -> Result<(), Failure> {
    let graph = read_graph(&args.input, args.directed)?;
    let options = options(args)?;
    let mut report = Report::new("ok", args.seed, args.bucket);
    report.rounds_used = Some(args.rounds);
    let outcome = match anonymize(&graph, &options) {
        Ok(outcome) => outcome,
        Err(err) => {
            let failure = anonymize_error(err, &mut report);
            if let Some(path) = &args.report {
                write_file(path, &report.to_json())?;
            }
            return Err(failure);
        }
    };
    let provenance = RunProvenance {
        rounds_used: outcome.rounds_used,
        delta_used: outcome.delta_used,
        seed: args.seed,
    };
    let metrics = build_report(
        &graph,
        &outcome.graph,
        &outcome.sources,
        args.bucket,
        Some(provenance),
    )
    .map_err(|e| Failure::config(e.to_string()))?;
    let mut report = report.with_metrics(&metrics);
    report.margin = Some(
        match outcome.margin {
            Margin::Uniform(_) => "uniform",
            Margin::Anchored(_) => "anchored",
        }
        .into(),
    );
    report.lower_bound = Some(outcome.lower);
    report.upper_bound = Some(outcome.upper);
    report.constraint_rows = Some(outcome.row_count);
    report.warnings = outcome.warnings.clone();
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    write_file(
        &args.output,
        &write_edge_list(&outcome.graph, OUTPUT_PRECISION),
    )?;
    if let Some(path) = &args.report {
        write_file(path, &report.to_json())?;
    }
    Ok(())
}

fn run_export_lp(args: &RunArgs) -> Result<(), Failure> {
    let graph = read_graph(&args.input, args.directed)?;
    let options = options(args)?;
    let model = export_model(&graph, &options)
        .map_err(|e| anonymize_error(e, &mut Report::new("", 0, 1.0)))?;
    write_file(&args.output, &export_lp_text(&model, DEFAULT_PREFIX))
}

fn run_compare(args: &CompareArgs, gate: bool) -> Result<(), Failure> {
    let original = read_graph(&args.input, args.directed)?;
    let anonymized = read_graph(&args.output, args.directed)?;
    let sources = args
        .sources
        .selection()?
        .resolve(original.vertex_count())
        .map_err(|e| Failure::config(e.to_string()))?;
    let metrics =
        build_report(&original, &anonymized, &sources, args.bucket, None).map_err(|e| match e {
            MetricsError::TopologyMismatch => Failure::config("graphs differ in topology"),
            other => Failure::config(other.to_string()),
        })?;
    let preserved = metrics.verdicts.iter().all(|&(_, ok)| ok);
    let status = if preserved {
        "preserved"
    } else {
        "not_preserved"
    };
    let report = Report::new(status, args.seed, args.bucket).with_metrics(&metrics);
    match &args.report {
        Some(path) => write_file(path, &report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    if gate && !preserved {
        let failed: Vec<String> = metrics
            .verdicts
            .iter()
            .filter(|&&(_, ok)| !ok)
            .map(|(s, _)| s.to_string())
            .collect();
        return Err(Failure::new(
            EXIT_NOT_PRESERVED,
            format!("trees not preserved for sources {}", failed.join(",")),
        ));
    }
    Ok(())
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Anonymize(a) => run_anonymize(a),
        Command::ExportLp(a) => run_export_lp(a),
        Command::Verify(a) => run_compare(a, true),
        Command::Metrics(a) => run_compare(a, false),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
