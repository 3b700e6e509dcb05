use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use hsconvex_cli::{emit_report, load_config, parse_config, run, Format, RunConfig, RunOptions};
use hsconvex_core::classes::ClassId;
use hsconvex_core::theorems::TheoremId;
use serde_json::json;

/// Exit status when a task errored.
const EXIT_TASK_ERROR: u8 = 1;
/// Exit status for unusable input (bad config, unwritable output).
const EXIT_INPUT: u8 = 2;
/// Exit status for a VIOLATED verdict under `--fail-on-violated`.
const EXIT_VIOLATED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "hsconvex",
    version,
    about = "Numerical checks of Hermite-Hadamard type inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// json, csv or table; overrides the config's output format
    #[arg(long)]
    format: Option<Format>,
    /// Output file; overrides the config's output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Global seed; overrides the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    jobs: Option<usize>,
    /// Leave wall-clock fields out of the report
    #[arg(long)]
    no_timing: bool,
    /// Exit with status 3 if any verdict is VIOLATED
    #[arg(long)]
    fail_on_violated: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task in a config file
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Evaluate theorems in their proof-normalized form where one exists
        #[arg(long)]
        proof_normalized: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sample a function for membership in a convexity class
    CheckClass {
        /// Function of x
        #[arg(long)]
        f: String,
        /// HS1, HS2, H_CONVEX, S_CONVEX_2, P_FUNCTION, GODUNOVA_LEVIN or ORDINARY_CONVEX
        #[arg(long)]
        class: ClassId,
        /// Weight function of t
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Vec<f64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the identric mean with a power of the geometric mean
    Means {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, conflicts_with = "s_grid")]
        s: Option<f64>,
        /// Comma-separated exponents
        #[arg(long, value_delimiter = ',')]
        s_grid: Option<Vec<f64>>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the supported theorem ids
    ListTheorems,
}

fn execute(mut cfg: RunConfig, args: &RunArgs) -> anyhow::Result<u8> {
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let opts = RunOptions {
        jobs: args.jobs,
        timing: !args.no_timing,
    };
    let report = run(&cfg, &opts).context("cannot start worker threads")?;
    let format = args.format.unwrap_or(cfg.output.format);
    let path = args.out.as_deref().or(cfg.output.path.as_deref());
    emit_report(&report, format, path)?;
    for t in report.tasks.iter().filter(|t| t.error.is_some()) {
        eprintln!(
            "error in task {} ({}): {}",
            t.name,
            t.subject,
            t.error.as_deref().unwrap_or_default()
        );
    }
    Ok(if report.has_errors() {
        EXIT_TASK_ERROR
    } else if args.fail_on_violated && report.has_violations() {
        EXIT_VIOLATED
    } else {
        0
    })
}

fn main_inner(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Verify {
            config,
            proof_normalized,
            run,
        } => {
            let mut cfg = load_config(&config)?;
            if proof_normalized {
                cfg.force_proof_normalized();
            }
            execute(cfg, &run)
        }
        Command::CheckClass {
            f,
            class,
            h,
            s,
            interval,
            run,
        } => {
            let mut check =
                json!({"name": "check-class", "f": f, "class": class, "interval": interval});
            if let Some(h) = h {
                check["h"] = json!(h);
            }
            if let Some(s) = s {
                check["s"] = json!(s);
            }
            let cfg = parse_config(&json!({ "class_checks": [check] }).to_string())?;
            execute(cfg, &run)
        }
        Command::Means {
            a,
            b,
            s,
            s_grid,
            run,
        } => {
            let mut check = json!({"name": "means", "a": a, "b": b});
            match (s, s_grid) {
                (_, Some(grid)) => check["s_grid"] = json!(grid),
                (s, None) => check["s"] = json!(s.unwrap_or(1.0)),
            }
            let cfg = parse_config(&json!({ "means_checks": [check] }).to_string())?;
            execute(cfg, &run)
        }
        Command::ListTheorems => {
            let width = TheoremId::ALL
                .iter()
                .map(|id| id.name().len())
                .max()
                .unwrap_or(0);
            for id in TheoremId::ALL {
                let marker = if id.has_proof_variant() {
                    " [proof variant]"
                } else {
                    ""
                };
                println!("{:<width$}  {}{marker}", id.name(), id.summary());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
