//! Worker-count sweeps over a suite of tasks.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::engine::{verify, EventLog, Limits, Outcome};
use crate::feasibility::Backend;
use crate::lang::compile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Safe,
    Unsafe,
    Any,
}

impl Expected {
    pub fn matches(self, verdict: &str) -> bool {
        match self {
            Expected::Any => true,
            Expected::Safe => verdict == "SAFE",
            Expected::Unsafe => verdict == "UNSAFE",
        }
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Safe => "safe",
            Expected::Unsafe => "unsafe",
            Expected::Any => "any",
        })
    }
}

impl FromStr for Expected {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "safe" => Ok(Expected::Safe),
            "unsafe" => Ok(Expected::Unsafe),
            "any" => Ok(Expected::Any),
            _ => Err(format!("expected verdict must be safe, unsafe or any, not `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskProgram {
    Path(PathBuf),
    Inline(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSpec {
    pub label: String,
    pub program: TaskProgram,
    pub expected: Expected,
}

impl TaskSpec {
    pub fn inline(label: impl Into<String>, source: impl Into<String>, expected: Expected) -> Self {
        TaskSpec {
            label: label.into(),
            program: TaskProgram::Inline(source.into()),
            expected,
        }
    }

    fn source(&self) -> Result<String, String> {
        match &self.program {
            TaskProgram::Inline(s) => Ok(s.clone()),
            TaskProgram::Path(p) => {
                fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
            }
        }
    }
}

/// Reads a suite file: one task per line, `<path> <safe|unsafe|any>
/// [label]`. Blank lines and `#` comments are skipped; relative paths are
/// resolved against the suite file's directory; the label defaults to the
/// file stem.
pub fn load_suite(path: &Path) -> Result<Vec<TaskSpec>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_suite(&text, base).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse_suite(text: &str, base: &Path) -> Result<Vec<TaskSpec>, String> {
    let mut tasks = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (program, expected, label) = match fields[..] {
            [p, e] => (p, e, None),
            [p, e, l] => (p, e, Some(l)),
            _ => return Err(format!("line {}: expected `<path> <verdict> [label]`", n + 1)),
        };
        let expected = expected.parse().map_err(|e| format!("line {}: {e}", n + 1))?;
        let path = base.join(program);
        let label = label.map(str::to_string).unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| program.to_string())
        });
        tasks.push(TaskSpec {
            label,
            program: TaskProgram::Path(path),
            expected,
        });
    }
    Ok(tasks)
}

/// One run of one task at one worker count.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub label: String,
    pub workers: usize,
    pub verdict: String,
    /// Seconds.
    pub wall_time: f64,
    pub traces_checked: usize,
    pub refinements: usize,
    pub wasted_results: usize,
    pub correct: bool,
}

/// Median wall time of one task at one worker count, and its speedup over
/// the one-worker configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpeedupRow {
    pub label: String,
    pub workers: usize,
    pub median_wall_time: f64,
    pub speedup: Option<f64>,
}

pub struct SweepConfig {
    pub worker_counts: Vec<usize>,
    pub repetitions: usize,
    pub limits: Limits,
    pub backend: Arc<dyn Backend>,
}

#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SpeedupRow>,
}

fn run_one(task: &TaskSpec, workers: usize, cfg: &SweepConfig) -> BenchRecord {
    let record = |verdict: String, wall_time: f64, stats: Option<&crate::engine::RunStats>| {
        BenchRecord {
            label: task.label.clone(),
            workers,
            correct: task.expected.matches(&verdict),
            verdict,
            wall_time,
            traces_checked: stats.map_or(0, |s| s.traces_checked),
            refinements: stats.map_or(0, |s| s.refinements),
            wasted_results: stats.map_or(0, |s| s.wasted_results),
        }
    };
    let program = match task.source().and_then(|s| compile(&s).map_err(|e| e.to_string())) {
        Ok(p) => p,
        Err(_) => return record("UNKNOWN".into(), 0.0, None),
    };
    let v = verify(
        &program,
        workers,
        Arc::clone(&cfg.backend),
        &cfg.limits,
        &mut EventLog::discard(),
    );
    let label = match &v.outcome {
        Outcome::Unknown(_) => "UNKNOWN",
        o => o.label(),
    };
    record(label.into(), v.stats.wall_time.as_secs_f64(), Some(&v.stats))
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Runs every task at every worker count, `repetitions` times each,
/// strictly one run at a time. The wall time covers verification only.
pub fn bench_sweep(tasks: &[TaskSpec], cfg: &SweepConfig) -> SweepReport {
    assert!(cfg.repetitions >= 1, "at least one repetition");
    let mut report = SweepReport::default();
    for task in tasks {
        let mut medians = Vec::new();
        for &workers in &cfg.worker_counts {
            let mut times = Vec::new();
            for _ in 0..cfg.repetitions {
                let r = run_one(task, workers, cfg);
                times.push(r.wall_time);
                report.records.push(r);
            }
            medians.push((workers, median(&mut times)));
        }
        let base = medians.iter().find(|(w, _)| *w == 1).map(|(_, t)| *t);
        for (workers, t) in medians {
            report.summary.push(SpeedupRow {
                label: task.label.clone(),
                workers,
                median_wall_time: t,
                speedup: base.filter(|_| t > 0.0).map(|b| b / t),
            });
        }
    }
    report
}

impl SweepReport {
    pub fn write_csv(&self, w: impl io::Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_summary_csv(&self, w: impl io::Write) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.summary {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn speedup(&self, label: &str, workers: usize) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.label == label && r.workers == workers)
            .and_then(|r| r.speedup)
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<24} {:>7} {:>12} {:>8}", "task", "workers", "median (s)", "speedup")?;
        for r in &self.summary {
            let s = r.speedup.map_or("-".into(), |s| format!("{s:.2}"));
            writeln!(
                f,
                "{:<24} {:>7} {:>12.3} {:>8}",
                r.label, r.workers, r.median_wall_time, s
            )?;
        }
        let correct = self.records.iter().filter(|r| r.correct).count();
        write!(f, "{correct}/{} runs correct", self.records.len())
    }
}
