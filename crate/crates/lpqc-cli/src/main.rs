//! Command-line front end for the lpqc workbench.
//!
//! Exit codes: 0 on success, 2 when a budget cut the work short and the
//! output is flagged partial, 1 on any error.

mod bundle;
mod commands;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::{
    AnalyzeFlags, DistanceFlags, DistanceModeArg, Outcome, ScreenFlags, SideArg, SimulateFlags,
};
use workspace::WorkspaceConfig;

#[derive(Parser)]
#[command(
    name = "lpqc",
    version,
    about = "Design workbench for quasi-cyclic lifted-product quantum LDPC codes"
)]
struct Cli {
    /// Workspace config file (default: workspace.json in the workspace
    /// directory, which is $LPQC_WORKDIR or the current directory)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads; 0 uses every core
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a base matrix to its binary parity-check matrix (alist out)
    Lift {
        /// Base matrix JSON: {"L", "m", "n", "entries": [[int|"-inf", ..], ..]}
        base: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Build a lifted-product CSS code bundle from one or two bases
    BuildLp {
        base: PathBuf,
        /// Second base for the general construction; same lift size
        base2: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Embed the full check and logical matrices in the bundle
        #[arg(long)]
        full: bool,
    },
    /// Full report on a code bundle: partitions, girth, distances
    Analyze {
        code: PathBuf,
        /// Also run the exact search up to this weight
        #[arg(long, value_name = "W")]
        w_max: Option<u32>,
        #[arg(long, value_name = "OPS")]
        exact_budget: Option<u64>,
        /// Estimator iterations
        #[arg(long, value_name = "N")]
        iterations: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Search a base matrix for row/column partition certificates
    Rcpc {
        base: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Quantum minimum-distance search on a code bundle
    Distance {
        code: PathBuf,
        #[arg(long, value_enum, default_value = "estimate")]
        mode: DistanceModeArg,
        /// Exact mode: stop once all weights up to W are exhausted
        #[arg(long, value_name = "W")]
        w_max: Option<u32>,
        /// Estimate mode: iteration count
        #[arg(long, value_name = "N")]
        iterations: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Exact mode: operation budget
        #[arg(long, value_name = "OPS")]
        budget: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Exhaustively screen all canonical base matrices of one shape
    Screen {
        #[arg(long = "L", value_name = "INT")]
        lift_size: u32,
        #[arg(long, value_name = "INT")]
        m: usize,
        #[arg(long, value_name = "INT")]
        n: usize,
        /// Distance threshold (default: m+n, the stabilizer weight)
        #[arg(long, value_name = "D")]
        threshold: Option<u32>,
        /// Prove each d_q verdict by exact search instead of estimating
        #[arg(long)]
        exact_dq: bool,
        /// Estimator iterations per candidate (default 400)
        #[arg(long, value_name = "N")]
        iterations: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "OPS")]
        exact_budget: Option<u64>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        candidates: Option<PathBuf>,
    },
    /// Filter and rank a screened candidate list
    Refine {
        #[arg(long, value_name = "FILE")]
        candidates: PathBuf,
        #[arg(long, default_value_t = 0, value_name = "G")]
        girth_min: u32,
        #[arg(long, default_value_t = 0, value_name = "D")]
        dq_target: u32,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Monte-Carlo logical error rate under independent bit flips
    Simulate {
        #[arg(long, value_name = "FILE")]
        code: PathBuf,
        /// Single physical error rate
        #[arg(long)]
        p: Option<f64>,
        /// Linear sweep start:end:steps
        #[arg(long, value_name = "A:B:STEPS")]
        p_sweep: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100, value_name = "N")]
        bp_iters: u32,
        /// Ordered-statistics order; patterns grow as 2^order
        #[arg(long, default_value_t = 10, value_name = "ORDER")]
        osd: u32,
        /// Use normalized min-sum with this factor instead of sum-product
        #[arg(long, value_name = "FACTOR")]
        min_sum: Option<f64>,
        #[arg(long, value_enum, default_value = "x")]
        side: SideArg,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<Outcome> {
    let config = WorkspaceConfig::load(cli.config.as_deref())?;
    let jobs = cli.jobs.unwrap_or(config.jobs);
    if jobs > 0 {
        // a second initialization in-process is harmless; first wins
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Lift { base, out } => commands::cmd_lift(&config, &base, out),
        Command::BuildLp {
            base,
            base2,
            out,
            full,
        } => commands::cmd_build_lp(&config, &base, base2.as_deref(), out, full),
        Command::Analyze {
            code,
            w_max,
            exact_budget,
            iterations,
            seed,
            out,
        } => commands::cmd_analyze(
            &config,
            &code,
            AnalyzeFlags {
                w_max,
                exact_budget,
                iterations,
                seed,
                out,
            },
        ),
        Command::Rcpc { base, out } => commands::cmd_rcpc(&config, &base, out),
        Command::Distance {
            code,
            mode,
            w_max,
            iterations,
            seed,
            budget,
            out,
        } => commands::cmd_distance(
            &config,
            &code,
            DistanceFlags {
                mode,
                w_max,
                iterations,
                seed,
                budget,
                out,
            },
        ),
        Command::Screen {
            lift_size,
            m,
            n,
            threshold,
            exact_dq,
            iterations,
            seed,
            exact_budget,
            out,
            candidates,
        } => commands::cmd_screen(
            &config,
            ScreenFlags {
                lift_size,
                rows: m,
                cols: n,
                threshold,
                exact_dq,
                iterations,
                seed,
                exact_budget,
                out,
                candidates,
            },
        ),
        Command::Refine {
            candidates,
            girth_min,
            dq_target,
            out,
        } => commands::cmd_refine(&config, &candidates, girth_min, dq_target, out),
        Command::Simulate {
            code,
            p,
            p_sweep,
            trials,
            seed,
            bp_iters,
            osd,
            min_sum,
            side,
            out,
        } => commands::cmd_simulate(
            &config,
            &code,
            SimulateFlags {
                p,
                p_sweep,
                trials,
                seed,
                bp_iters,
                osd,
                min_sum,
                side,
                out,
            },
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
