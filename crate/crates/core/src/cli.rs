//! The `partrace` command line.
//!
//! Exit codes are the machine contract: 0 SAFE, 1 UNSAFE, 2 UNKNOWN,
//! 3 usage or input error, 4 verdict differs from `--expect` (or, for
//! `bench`, some run was incorrect).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::bench::{bench_sweep, gen_family, load_suite, BenchRecord, Expected, Family, SweepConfig};
use crate::engine::{verify, EventLog, Limits, Outcome};
use crate::feasibility::{Backend, BackendConfig, Delayed};
use crate::lang::compile;

/// Overrides the solver command of the default backend; `--backend` wins.
pub const SOLVER_ENV: &str = "PARTRACE_SMT_SOLVER";

pub const EXIT_SAFE: i32 = 0;
pub const EXIT_UNSAFE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "partrace", version, about = "Trace abstraction with parallel refinement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify one program.
    Verify(VerifyArgs),
    /// Sweep a suite of programs over several worker counts.
    Bench(BenchArgs),
    /// Print a synthetic program.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    /// Feasibility backend: `builtin` or `smtlib:<command>`.
    #[arg(long)]
    pub backend: Option<BackendConfig>,
    /// Wall-time budget of one trace selection.
    #[arg(long, default_value_t = 5000)]
    pub search_budget_ms: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_refinements: usize,
    /// Wall-time limit of one verification run.
    #[arg(long)]
    pub timeout_s: Option<f64>,
    /// Sleep this long before every feasibility check (emulates an
    /// expensive solver).
    #[arg(long, default_value_t = 0)]
    pub check_delay_ms: u64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub program: PathBuf,
    /// Worker threads; 0 runs the sequential engine.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Write a one-row stats CSV.
    #[arg(long)]
    pub stats_csv: Option<PathBuf>,
    /// Write assignment/result events as JSON lines.
    #[arg(long)]
    pub event_log: Option<PathBuf>,
    /// Write the counterexample of an UNSAFE verdict.
    #[arg(long)]
    pub emit_witness: Option<PathBuf>,
    /// Exit with 4 unless the verdict is this one.
    #[arg(long)]
    pub expect: Option<Expected>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Suite file: `<path> <safe|unsafe|any> [label]` per line.
    pub suite: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4")]
    pub workers: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub repetitions: usize,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Write one row per run.
    #[arg(long)]
    pub stats_csv: Option<PathBuf>,
    /// Write the per-task median speedups.
    #[arg(long)]
    pub summary_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// branches, loops or mixed.
    pub family: Family,
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Plant one reachable assertion violation.
    #[arg(long)]
    pub bug: bool,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl EngineArgs {
    pub fn limits(&self) -> Limits {
        Limits {
            timeout: self.timeout_s.map(Duration::from_secs_f64),
            max_refinements: self.max_refinements,
            search_budget: Duration::from_millis(self.search_budget_ms),
            ..Limits::default()
        }
    }

    /// The flag if given, else the solver named in the environment, else
    /// the builtin backend.
    pub fn backend_config(&self, env: Option<String>) -> BackendConfig {
        match (&self.backend, env) {
            (Some(b), _) => b.clone(),
            (None, Some(cmd)) if !cmd.trim().is_empty() => BackendConfig::SmtLib(cmd),
            _ => BackendConfig::Builtin,
        }
    }

    pub fn backend(&self, limits: &Limits) -> Arc<dyn Backend> {
        let per_check = limits.timeout.unwrap_or(Duration::from_secs(60));
        let inner = self
            .backend_config(std::env::var(SOLVER_ENV).ok())
            .build(limits.solver, per_check);
        if self.check_delay_ms == 0 {
            inner
        } else {
            Arc::new(Delayed {
                inner,
                delay: Duration::from_millis(self.check_delay_ms),
            })
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Gen(a) => cmd_gen(&a),
    };
    result.unwrap_or_else(|msg| {
        eprintln!("partrace: {msg}");
        EXIT_ERROR
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, String> {
    let source = fs::read_to_string(&args.program)
        .map_err(|e| format!("{}: {e}", args.program.display()))?;
    let program = compile(&source).map_err(|e| format!("{}:{e}", args.program.display()))?;
    let limits = args.engine.limits();
    let backend = args.engine.backend(&limits);
    let mut log = match &args.event_log {
        Some(p) => EventLog::to_writer(create(p)?),
        None => EventLog::discard(),
    };
    let v = verify(&program, args.workers, backend, &limits, &mut log);
    drop(log);

    println!("{}", v.outcome);
    if let Outcome::Unsafe { trace, witness } = &v.outcome {
        println!("trace: {trace}");
        println!("model: {witness}");
        if let Some(p) = &args.emit_witness {
            let mut w = create(p)?;
            writeln!(w, "# counterexample for {}", args.program.display())
                .and_then(|_| writeln!(w, "trace: {trace}"))
                .and_then(|_| writeln!(w, "model: {witness}"))
                .and_then(|_| w.flush())
                .map_err(|e| format!("{}: {e}", p.display()))?;
        }
    }
    let s = &v.stats;
    println!(
        "refinements: {}  traces checked: {}  wasted: {}  final states: {}  wall time: {:.3}s",
        s.refinements,
        s.traces_checked,
        s.wasted_results,
        s.final_abstraction_states,
        s.wall_time.as_secs_f64()
    );

    let label = v.outcome.label();
    if let Some(p) = &args.stats_csv {
        let record = BenchRecord {
            label: args
                .program
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned()),
            workers: args.workers,
            verdict: label.into(),
            wall_time: s.wall_time.as_secs_f64(),
            traces_checked: s.traces_checked,
            refinements: s.refinements,
            wasted_results: s.wasted_results,
            correct: args.expect.unwrap_or(Expected::Any).matches(label),
        };
        let mut out = csv::Writer::from_writer(create(p)?);
        out.serialize(&record)
            .and_then(|_| out.flush().map_err(Into::into))
            .map_err(|e| format!("{}: {e}", p.display()))?;
    }

    if let Some(e) = args.expect.filter(|e| !e.matches(label)) {
        eprintln!("partrace: expected {e}, got {label}");
        return Ok(EXIT_MISMATCH);
    }
    Ok(match v.outcome {
        Outcome::Safe => EXIT_SAFE,
        Outcome::Unsafe { .. } => EXIT_UNSAFE,
        Outcome::Unknown(_) => EXIT_UNKNOWN,
    })
}

fn cmd_bench(args: &BenchArgs) -> Result<i32, String> {
    if args.repetitions == 0 {
        return Err("--repetitions must be at least 1".into());
    }
    let tasks = load_suite(&args.suite)?;
    let limits = args.engine.limits();
    let cfg = SweepConfig {
        worker_counts: args.workers.clone(),
        repetitions: args.repetitions,
        backend: args.engine.backend(&limits),
        limits,
    };
    let report = bench_sweep(&tasks, &cfg);
    if let Some(p) = &args.stats_csv {
        report
            .write_csv(create(p)?)
            .map_err(|e| format!("{}: {e}", p.display()))?;
    }
    if let Some(p) = &args.summary_csv {
        report
            .write_summary_csv(create(p)?)
            .map_err(|e| format!("{}: {e}", p.display()))?;
    }
    println!("{report}");
    let all_correct = report.records.iter().all(|r| r.correct);
    Ok(if all_correct { 0 } else { EXIT_MISMATCH })
}

fn cmd_gen(args: &GenArgs) -> Result<i32, String> {
    if args.n == 0 {
        return Err("n must be at least 1".into());
    }
    let text = gen_family(args.family, args.n, args.seed, args.bug);
    match &args.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()))?,
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string())?,
    }
    Ok(0)
}
