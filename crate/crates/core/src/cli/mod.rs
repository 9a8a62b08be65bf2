//! Command-line surface.
//!
//! Every subcommand reads one JSON document (`--in <path>` or `--in -` for
//! stdin) and writes one [`RunReport`]. Exit codes: 0 for any definitive
//! outcome, including precondition violations; 2 for unusable input; 3 for
//! internal failures.

pub mod emit;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::io::{Read, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::fixpoint_engine::{condensing_preflight, iterate_common, iterate_single, FixpointRun, PreflightOptions};
use crate::game_solver::{intersect_sections, solve_game, GameOutcome};
use crate::noncompactness::{alpha_k_with, FiniteSet, DEFAULT_BUDGET, DEFAULT_EXACT_THRESHOLD};
use crate::ordered_space::OrderedSpace;
use crate::setmaps::{isotone_check, weakly_isotone_check, Direction, MultiMap, SetRelation};

use self::input::{GameInput, IntersectInput, MultimapInput, MultimapProblem, SetInput, SetProblemSet};
pub use self::report::{Outcome, RunReport, SubcommandName};

#[derive(Debug, Parser)]
#[command(name = "conefix", version, about = "Common fixed points on cone-ordered spaces and saddle points of grid games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate S and T (or S alone) to a certified common fixed point.
    Fixpoint(TraceArgs),
    /// Solve a zero-sum grid game and certify its saddle point.
    Game(GameArgs),
    /// Find a point of Q ∩ Q' from section predicates.
    Intersect(TraceArgs),
    /// Budgeted measure of noncompactness of a finite set or box union.
    Mnc(MncArgs),
    /// Check order and condensing hypotheses of a multimap pair without iterating.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Input JSON path, or `-` for stdin.
    #[arg(long = "in", value_name = "PATH")]
    input: String,
    /// Report path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Echoed in the report; no computation is randomized.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Write the iteration trace as CSV.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GameArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Write a payoff heatmap with saddle cells outlined.
    #[arg(long, value_name = "PATH")]
    heatmap: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MncArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Partition budget; overrides the input document.
    #[arg(long)]
    k: Option<usize>,
    /// Largest set size solved exactly.
    #[arg(long)]
    exact_threshold: Option<usize>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Partition budget of the condensing preflight.
    #[arg(long)]
    k: Option<usize>,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
        }
    }
}

/// Errors raised while running a well-formed problem.
fn runtime_failure(e: Error) -> std::result::Result<String, Failure> {
    match e {
        Error::InvalidOptions(_) => Err(Failure::Input(e.to_string())),
        Error::WindowTooLarge { .. } | Error::NegativeInput(_) | Error::NonMonotoneSequence(_) => {
            Err(Failure::Internal(e.to_string()))
        }
        other => Ok(other.to_string()),
    }
}

fn input_error(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

fn to_value<T: Serialize>(v: &T) -> std::result::Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Internal(format!("serialization failed: {e}")))
}

struct Output {
    outcome: Outcome,
    results: Value,
    hypotheses: Value,
    files: Vec<(PathBuf, String)>,
}

impl Output {
    fn new(outcome: Outcome, results: Value, hypotheses: Value) -> Self {
        Output { outcome, results, hypotheses, files: Vec::new() }
    }

    fn precondition(message: String) -> Self {
        Output::new(Outcome::PreconditionViolation, json!({ "error": message }), Value::Null)
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match catch_unwind(AssertUnwindSafe(|| execute(cli, stdin, stdout))) {
        Ok(Ok(())) => 0,
        Ok(Err(f)) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
        Err(_) => {
            let _ = writeln!(stderr, "error: internal panic");
            3
        }
    }
}

fn io_args(cmd: &Command) -> &IoArgs {
    match cmd {
        Command::Fixpoint(a) | Command::Intersect(a) => &a.io,
        Command::Game(a) => &a.io,
        Command::Mnc(a) => &a.io,
        Command::Check(a) => &a.io,
    }
}

fn execute(cli: Cli, stdin: &mut dyn Read, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let io = io_args(&cli.command);
    let raw = read_input(&io.input, stdin)?;
    let name = match cli.command {
        Command::Fixpoint(_) => SubcommandName::Fixpoint,
        Command::Game(_) => SubcommandName::Game,
        Command::Intersect(_) => SubcommandName::Intersect,
        Command::Mnc(_) => SubcommandName::Mnc,
        Command::Check(_) => SubcommandName::Check,
    };
    let mut report = RunReport::new(name, &raw, io.seed);
    let started = Instant::now();
    let out = match &cli.command {
        Command::Fixpoint(a) => fixpoint(&raw, a.trace.as_ref())?,
        Command::Game(a) => game(&raw, a)?,
        Command::Intersect(a) => intersect(&raw, a.trace.as_ref())?,
        Command::Mnc(a) => mnc(&raw, a)?,
        Command::Check(a) => check(&raw, a.k)?,
    };
    report.timing_ms = started.elapsed().as_secs_f64() * 1e3;
    report.outcome = out.outcome;
    report.results = out.results;
    report.hypotheses = out.hypotheses;

    for (path, body) in &out.files {
        std::fs::write(path, body).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    }
    let text = report.to_json();
    match &io.out {
        Some(path) if path.as_os_str() != "-" => std::fs::write(path, text)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        _ => stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| Failure::Internal(format!("cannot write report: {e}"))),
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> std::result::Result<Vec<u8>, Failure> {
    if path == "-" {
        let mut buf = Vec::new();
        stdin
            .read_to_end(&mut buf)
            .map_err(|e| Failure::Input(format!("cannot read stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))
    }
}

/// Deserializes with the JSON path of the first offending value in the message.
fn parse_document<T: DeserializeOwned>(raw: &[u8]) -> std::result::Result<T, Failure> {
    let mut de = serde_json::Deserializer::from_slice(raw);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Failure::Input(format!("invalid input at `{path}`: {}", e.into_inner()))
    })?;
    de.end().map_err(|e| Failure::Input(format!("invalid input: {e}")))?;
    Ok(value)
}

#[derive(Serialize)]
struct IsotonicityCount {
    relation: SetRelation,
    direction: Direction,
    violations: usize,
}

fn weak_isotonicity(
    space: &OrderedSpace,
    s: &MultiMap,
    t: &MultiMap,
    samples: &FiniteSet,
) -> crate::Result<Vec<IsotonicityCount>> {
    let mut out = Vec::new();
    for relation in [SetRelation::All, SetRelation::Dhage] {
        for direction in [Direction::Increasing, Direction::Decreasing] {
            let violations = weakly_isotone_check(space, s, t, samples.points(), direction, relation)?.len();
            out.push(IsotonicityCount { relation, direction, violations });
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct RunSummary<'a> {
    status: crate::TerminalStatus,
    accepted: bool,
    point: &'a crate::Point,
    iterations: usize,
    monotone: bool,
    direction: Option<Direction>,
    tol: f64,
    residual_s: &'a crate::MeasureValue,
    residual_t: &'a crate::MeasureValue,
    audit_failures: Vec<usize>,
}

fn run_summary(run: &FixpointRun) -> RunSummary<'_> {
    let c = &run.certificate;
    RunSummary {
        status: run.trace.status,
        accepted: c.accepted,
        point: &c.point,
        iterations: c.iterations,
        monotone: c.monotone,
        direction: run.trace.direction,
        tol: c.tol,
        residual_s: &c.residual_s,
        residual_t: &c.residual_t,
        audit_failures: run.trace.audit_failures(),
    }
}

fn fixpoint(raw: &[u8], trace: Option<&PathBuf>) -> std::result::Result<Output, Failure> {
    let p: MultimapProblem = parse_document::<MultimapInput>(raw)?.build().map_err(input_error)?;
    let attempt = || -> crate::Result<Output> {
        let (run, t) = match &p.t {
            Some(t) => (iterate_common(&p.space, &p.s, t, &p.x0, &p.options)?, t),
            None => (iterate_single(&p.space, &p.s, &p.x0, &p.options)?, &p.s),
        };
        let visited = FiniteSet::new(run.trace.points())?;
        let hypotheses = json!({
            "samples": visited.len(),
            "weak_isotonicity": to_json(&weak_isotonicity(&p.space, &p.s, t, &visited)?),
            "preflight": to_json(&run.preflight),
        });
        let mut results = to_json(&run_summary(&run));
        results["single_map"] = json!(p.t.is_none());
        let outcome = if run.converged() { Outcome::FixedPointFound } else { Outcome::NoConvergence };
        let mut out = Output::new(outcome, results, hypotheses);
        if let Some(path) = trace {
            out.files.push((path.clone(), emit::trace_csv(&run.trace, &p.space)));
        }
        Ok(out)
    };
    finish(attempt())
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn finish(r: crate::Result<Output>) -> std::result::Result<Output, Failure> {
    match r {
        Ok(o) => Ok(o),
        Err(e) => runtime_failure(e).map(Output::precondition),
    }
}

fn game(raw: &[u8], args: &GameArgs) -> std::result::Result<Output, Failure> {
    let (game, start, opts) = parse_document::<GameInput>(raw)?.build().map_err(input_error)?;
    let report = match solve_game(&game, start, &opts) {
        Ok(r) => r,
        Err(e) => return runtime_failure(e).map(Output::precondition),
    };
    let outcome = match report.outcome {
        GameOutcome::SaddleFound => Outcome::SaddleFound,
        GameOutcome::NoConvergence => Outcome::NoConvergence,
        GameOutcome::HypothesesNotSatisfied => Outcome::HypothesesNotSatisfied,
    };
    let mut results = to_value(&report)?;
    let hypotheses = results
        .as_object_mut()
        .and_then(|m| m.remove("hypotheses"))
        .unwrap_or(Value::Null);
    results["run"] = to_value(&run_summary(&report.run))?;
    results["options"] = to_value(&opts)?;
    let mut out = Output::new(outcome, results, hypotheses);
    if let Some(path) = &args.trace {
        out.files.push((path.clone(), emit::trace_csv(&report.run.trace, game.space().joint())));
    }
    if let Some(path) = &args.heatmap {
        out.files.push((path.clone(), emit::heatmap_svg(&game, &report)));
    }
    Ok(out)
}

fn intersect(raw: &[u8], trace: Option<&PathBuf>) -> std::result::Result<Output, Failure> {
    let (sets, opts) = parse_document::<IntersectInput>(raw)?.build().map_err(input_error)?;
    let report = match intersect_sections(&sets, &opts) {
        Ok(r) => r,
        Err(e) => return runtime_failure(e).map(Output::precondition),
    };
    let outcome = if report.point.is_some() { Outcome::FixedPointFound } else { Outcome::NoConvergence };
    let mut results = to_value(&report)?;
    let violations = results
        .as_object_mut()
        .and_then(|m| m.remove("hypothesis3_violations"))
        .unwrap_or(Value::Null);
    results["run"] = to_value(&run_summary(&report.run))?;
    let mut out = Output::new(outcome, results, json!({ "hypothesis3_violations": violations }));
    if let Some(path) = trace {
        out.files.push((path.clone(), emit::trace_csv(&report.run.trace, sets.space().joint())));
    }
    Ok(out)
}

#[derive(Serialize)]
struct MncValue {
    seminorm: String,
    alpha: f64,
    heuristic: bool,
    diam: f64,
}

fn mnc(raw: &[u8], args: &MncArgs) -> std::result::Result<Output, Failure> {
    let p = parse_document::<SetInput>(raw)?.build().map_err(input_error)?;
    let k = args.k.or(p.k).unwrap_or(DEFAULT_BUDGET);
    let threshold = args.exact_threshold.or(p.exact_threshold).unwrap_or(DEFAULT_EXACT_THRESHOLD);
    if k == 0 {
        return Err(Failure::Input("budget k must be at least 1".into()));
    }
    let (finite, boxes) = match &p.set {
        SetProblemSet::Finite(f) => (f.clone(), None),
        SetProblemSet::Boxes(b) => (b.discretize(), Some(b)),
    };
    let values: Vec<MncValue> = p
        .space
        .seminorms()
        .iter()
        .map(|sn| {
            let a = alpha_k_with(&finite, sn, k, threshold);
            MncValue {
                seminorm: sn.id.clone(),
                alpha: a.value,
                heuristic: a.heuristic,
                diam: boxes.map_or_else(|| finite.diam(sn), |b| b.diam(sn)),
            }
        })
        .collect();
    let results = json!({
        "k": k,
        "exact_threshold": threshold,
        "size": finite.len(),
        "discretized": boxes.is_some(),
        "values": to_value(&values)?,
    });
    Ok(Output::new(Outcome::Completed, results, Value::Null))
}

#[derive(Serialize)]
struct IsotoneCount<'a> {
    map: &'a str,
    direction: Direction,
    violations: usize,
}

fn check(raw: &[u8], k: Option<usize>) -> std::result::Result<Output, Failure> {
    let p: MultimapProblem = parse_document::<MultimapInput>(raw)?.build().map_err(input_error)?;
    let pf = PreflightOptions {
        k: k.or(p.options.preflight.map(|o| o.k)).unwrap_or(DEFAULT_BUDGET),
        ..p.options.preflight.unwrap_or_default()
    };
    if pf.k == 0 {
        return Err(Failure::Input("budget k must be at least 1".into()));
    }
    let attempt = || -> crate::Result<Output> {
        let t = p.t.as_ref().unwrap_or(&p.s);
        let samples = FiniteSet::new(p.samples.clone())?;
        let weak = weak_isotonicity(&p.space, &p.s, t, &samples)?;
        let mut isotone = Vec::new();
        let maps: Vec<&MultiMap> = if p.t.is_some() { vec![&p.s, t] } else { vec![&p.s] };
        for m in maps {
            for direction in [Direction::Increasing, Direction::Decreasing] {
                let violations = isotone_check(&p.space, m, samples.points(), direction)?.len();
                isotone.push(IsotoneCount { map: m.name(), direction, violations });
            }
        }
        let seed = FiniteSet::singleton(p.x0.clone());
        let preflight = p
            .space
            .seminorms()
            .iter()
            .map(|sn| condensing_preflight(&p.s, t, &seed, pf.k, sn, pf.rounds, pf.cap))
            .collect::<crate::Result<Vec<_>>>()?;
        let hypotheses = json!({
            "samples": samples.len(),
            "weak_isotonicity": to_json(&weak),
            "isotone": to_json(&isotone),
            "preflight": to_json(&preflight),
        });
        let results = json!({
            "single_map": p.t.is_none(),
            "weakly_isotone": weak.iter().any(|w| w.violations == 0),
        });
        Ok(Output::new(Outcome::Completed, results, hypotheses))
    };
    finish(attempt())
}
