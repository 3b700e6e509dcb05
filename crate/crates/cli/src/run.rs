//! Task execution and the run report.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use hsconvex_core::classes::{check_class, SamplingPlan, Verdict, VerdictStatus};
use hsconvex_core::means::{
    map_validity_region, margins_strictly_decreasing, proposition1_check_with, ValidityPoint,
    PROPOSITION,
};
use hsconvex_core::theorems::{verify, InequalityReport, InequalityVerdict};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, SweepSpec, Task, TaskKind};

pub const TOOL: &str = "hsconvex";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Theorem,
    ClassCheck,
    Means,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskEntry {
    pub index: usize,
    pub name: String,
    pub kind: EntryKind,
    /// Theorem id, class description, or the means statement name.
    pub subject: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<InequalityReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl TaskEntry {
    /// `HOLDS`, `VIOLATED`, `INCONCLUSIVE`, `NO_VIOLATION_FOUND` or `ERROR`.
    pub fn verdict_label(&self) -> String {
        if let Some(r) = &self.report {
            r.verdict.to_string()
        } else if let Some(v) = &self.class_verdict {
            v.status.to_string()
        } else {
            "ERROR".into()
        }
    }

    pub fn is_violated(&self) -> bool {
        self.report
            .as_ref()
            .is_some_and(|r| r.verdict == InequalityVerdict::Violated)
            || self
                .class_verdict
                .as_ref()
                .is_some_and(Verdict::is_violated)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub name: String,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub points: Vec<ValidityPoint>,
    pub margins_strictly_decreasing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub no_violation_found: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub config_digest: String,
    pub seed: u64,
    pub tasks: Vec<TaskEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<SweepEntry>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<f64>,
}

impl RunReport {
    /// Drops every wall-clock field so that reports can be compared bytewise.
    pub fn strip_timing(&mut self) {
        self.wall_clock_ms = None;
        for t in &mut self.tasks {
            t.wall_clock_ms = None;
        }
    }

    pub fn has_errors(&self) -> bool {
        self.summary.errors > 0
    }

    pub fn has_violations(&self) -> bool {
        self.tasks.iter().any(TaskEntry::is_violated)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    pub timing: bool,
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for task `index` under global seed `seed`; independent of scheduling.
pub fn task_seed(seed: u64, index: usize) -> u64 {
    mix(seed ^ mix(index as u64))
}

enum Outcome {
    Report(InequalityReport),
    Class(Verdict),
}

fn execute(task: &Task, seed: u64, sampling: &SamplingPlan) -> Result<Outcome, String> {
    let plan = SamplingPlan { seed, ..*sampling };
    match &task.kind {
        TaskKind::Theorem { id, scenario } => {
            let mut sc = (**scenario).clone();
            sc.plan.seed = seed;
            verify(*id, &sc)
                .map(Outcome::Report)
                .map_err(|e| e.to_string())
        }
        TaskKind::Class { f, spec, interval } => check_class(f, spec, *interval, &plan)
            .map(Outcome::Class)
            .map_err(|e| e.to_string()),
        TaskKind::Means { a, b, s } => proposition1_check_with(*a, *b, *s, &plan)
            .map(Outcome::Report)
            .map_err(|e| e.to_string()),
    }
}

fn run_task(index: usize, task: &Task, cfg: &RunConfig, timing: bool) -> TaskEntry {
    let seed = task_seed(cfg.seed, index);
    let (kind, subject) = match &task.kind {
        TaskKind::Theorem { id, .. } => (EntryKind::Theorem, id.name().to_string()),
        TaskKind::Class { spec, interval, .. } => {
            (EntryKind::ClassCheck, format!("{spec} on {interval}"))
        }
        TaskKind::Means { .. } => (EntryKind::Means, PROPOSITION.to_string()),
    };
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| execute(task, seed, &cfg.sampling)))
        .unwrap_or_else(|_| Err("task panicked".into()));
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut entry = TaskEntry {
        index,
        name: task.name.clone(),
        kind,
        subject,
        seed,
        report: None,
        class_verdict: None,
        error: None,
        wall_clock_ms: timing.then_some(elapsed),
    };
    match outcome {
        Ok(Outcome::Report(r)) => entry.report = Some(r),
        Ok(Outcome::Class(v)) => entry.class_verdict = Some(v),
        Err(e) => entry.error = Some(e),
    }
    entry
}

fn run_sweep(spec: &SweepSpec) -> SweepEntry {
    match map_validity_region(spec.a, spec.b, &spec.s_grid) {
        Ok(points) => SweepEntry {
            name: spec.name.clone(),
            a: spec.a,
            b: spec.b,
            margins_strictly_decreasing: margins_strictly_decreasing(&points),
            points,
            error: None,
        },
        Err(e) => SweepEntry {
            name: spec.name.clone(),
            a: spec.a,
            b: spec.b,
            points: Vec::new(),
            margins_strictly_decreasing: false,
            error: Some(e.to_string()),
        },
    }
}

fn summarize(tasks: &[TaskEntry]) -> Summary {
    let mut s = Summary::default();
    for t in tasks {
        if let Some(r) = &t.report {
            match r.verdict {
                InequalityVerdict::Holds => s.holds += 1,
                InequalityVerdict::Violated => s.violated += 1,
                InequalityVerdict::Inconclusive => s.inconclusive += 1,
            }
        } else if let Some(v) = &t.class_verdict {
            match v.status {
                VerdictStatus::Violated => s.violated += 1,
                VerdictStatus::NoViolationFound => s.no_violation_found += 1,
            }
        } else {
            s.errors += 1;
        }
    }
    s
}

/// Runs every task. Entries come back in config order whatever the thread
/// count, and a failing task only marks its own entry.
pub fn run(cfg: &RunConfig, opts: &RunOptions) -> Result<RunReport, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build()?;
    let start = Instant::now();
    let tasks: Vec<TaskEntry> = pool.install(|| {
        cfg.tasks
            .par_iter()
            .enumerate()
            .map(|(i, t)| run_task(i, t, cfg, opts.timing))
            .collect()
    });
    let sweeps = cfg.sweeps.iter().map(run_sweep).collect();
    let summary = summarize(&tasks);
    Ok(RunReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        config_digest: cfg.digest.clone(),
        seed: cfg.seed,
        tasks,
        sweeps,
        summary,
        wall_clock_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}
