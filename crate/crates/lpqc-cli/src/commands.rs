//! The eight subcommands. Each returns `Outcome::Partial` when a budget
//! cut the work short and the written report says so; hard failures
//! bubble up as errors.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use lpqc::alist::write_alist;
use lpqc::base::{tanner_girth, QcBaseMatrix, GIRTH_CAP};
use lpqc::css::CssCode;
use lpqc::decoder::{simulate, BpVariant, DecoderConfig, ErrorSide, SimulationReport};
use lpqc::distance::{
    classical_min_distance, quantum_distance_estimate, quantum_min_distance_exact_with_budget,
    rcpc_distance_check_with_budget, DistanceError, DistanceMode, DistanceReport,
    RcpcDistanceReport,
};
use lpqc::product::{
    build_general, build_symmetric, verify_orthogonality_binary, verify_orthogonality_exponent,
};
use lpqc::rcpc::{find_col_partition, find_row_partition, RcpcCertificate};
use lpqc::screen::{
    refine_candidates, screen, write_candidates_csv, CandidateRecord, DqMethod, ScreenOptions,
    DEFAULT_SCREEN_ITERATIONS,
};

use crate::bundle::{self, build_bundle, LoadedCode};
use crate::workspace::{to_json, write_output, WorkspaceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// A budget stopped part of the work; the output is flagged.
    Partial,
}

fn read_base(path: &Path) -> Result<QcBaseMatrix> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading base {}", path.display()))?;
    // serde_json reports line and column in its message
    serde_json::from_str(&text).with_context(|| format!("parsing base {}", path.display()))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string())
}

fn distance_note(report: &DistanceReport) -> String {
    match report.mode {
        DistanceMode::Exact => "exact".to_string(),
        DistanceMode::Estimate => match report.seed {
            Some(seed) => format!(
                "estimated ({} iterations, seed {seed})",
                report
                    .budget
                    .iterations
                    .map_or_else(|| "?".to_string(), |i| i.to_string())
            ),
            None => "estimated".to_string(),
        },
    }
}

pub fn cmd_lift(config: &WorkspaceConfig, base_path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let base = read_base(base_path)?;
    let h = base.lift();
    let n = h.cols();
    let k = n - h.rank();
    let classical = classical_min_distance(&h);

    let out_path = config.resolve_out(out, &format!("{}.alist", stem(base_path)));
    write_output(&out_path, &write_alist(&h))?;

    println!(
        "[{n},{k},{}] d_c {}",
        classical.value,
        distance_note(&classical)
    );
    println!("wrote {}", out_path.display());
    Ok(Outcome::Complete)
}

pub fn cmd_build_lp(
    config: &WorkspaceConfig,
    base_path: &Path,
    base2_path: Option<&Path>,
    out: Option<PathBuf>,
    full: bool,
) -> Result<Outcome> {
    let base1 = read_base(base_path)?;
    let pair = match base2_path {
        Some(p) => build_general(&base1, &read_base(p)?)?,
        None => build_symmetric(&base1),
    };
    if !verify_orthogonality_binary(&pair) || !verify_orthogonality_exponent(&pair) {
        bail!("internal error: lifted product violates orthogonality; this is a construction bug");
    }
    let code = CssCode::from_lp_pair(&pair)?;
    let bundle = build_bundle(&pair, &code, full);

    let out_path = config.resolve_out(out, &format!("{}.code.json", stem(base_path)));
    write_output(&out_path, &to_json(&bundle)?)?;

    println!("{}", code.parameter_string(None));
    println!("wrote {}", out_path.display());
    Ok(Outcome::Complete)
}

#[derive(Serialize)]
struct AnalyzeReport {
    parameters: String,
    n: usize,
    k: usize,
    #[serde(rename = "L")]
    lift_size: u32,
    symmetric: bool,
    /// Base matrix had to be canonicalized for the partition search;
    /// certificate indices refer to the canonical form.
    canonicalized: bool,
    base_girth: Option<u32>,
    tanner_girth: Option<u32>,
    /// Two-row bases always admit a partition, so the distance is known
    /// to collapse to at most n+2 before any search runs.
    m2_guarantee: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    rcpc: Option<RcpcDistanceReport>,
    quantum_estimate: DistanceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantum_exact: Option<DistanceReport>,
    /// Some exact search was refused or cut short by the budget.
    partial: bool,
}

pub struct AnalyzeFlags {
    pub w_max: Option<u32>,
    pub exact_budget: Option<u64>,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn cmd_analyze(config: &WorkspaceConfig, code_path: &Path, flags: AnalyzeFlags) -> Result<Outcome> {
    let LoadedCode { bundle, pair, code } = bundle::load(code_path)?;
    let exact_budget = flags.exact_budget.unwrap_or(config.exact_budget);
    let iterations = flags.iterations.unwrap_or(config.estimate_iterations);
    let seed = flags.seed.unwrap_or(config.seed);

    let mut partial = false;
    let mut canonicalized = false;
    let rcpc = if bundle.symmetric {
        let source = &pair.source.0;
        let canonical;
        let target = if source.is_canonical() {
            source
        } else {
            canonicalized = true;
            canonical = source.canonicalize()?;
            &canonical
        };
        let report = rcpc_distance_check_with_budget(target, exact_budget)?;
        if report.certificate.is_some() && report.quantum_exact.is_none() {
            partial = true;
        }
        Some(report)
    } else {
        None
    };

    let quantum_estimate = quantum_distance_estimate(&code, iterations, seed);
    let quantum_exact = match flags.w_max {
        Some(w_max) => match quantum_min_distance_exact_with_budget(&code, w_max, exact_budget) {
            Ok(report) => Some(report),
            Err(DistanceError::BudgetExceeded { estimated, budget }) => {
                eprintln!(
                    "exact search to weight {w_max} needs ~{estimated} operations, budget is {budget}; skipped"
                );
                partial = true;
                None
            }
            Err(e) => return Err(e.into()),
        },
        None => rcpc.as_ref().and_then(|r| r.quantum_exact.clone()),
    };

    let report = AnalyzeReport {
        parameters: code.parameter_string(None),
        n: code.n_qubits(),
        k: code.k_logical(),
        lift_size: pair.source.0.lift_size(),
        symmetric: bundle.symmetric,
        canonicalized,
        base_girth: pair.source.0.girth()?,
        tanner_girth: tanner_girth(&pair.lift_x(), GIRTH_CAP),
        m2_guarantee: bundle.symmetric && pair.source.0.rows() == 2,
        rcpc,
        quantum_estimate,
        quantum_exact,
        partial,
    };

    print_analyze(&report);
    let out_path = config.resolve_out(flags.out, &format!("{}.report.json", stem(code_path)));
    write_output(&out_path, &to_json(&report)?)?;
    println!("wrote {}", out_path.display());
    Ok(if partial { Outcome::Partial } else { Outcome::Complete })
}

fn girth_cell(g: Option<u32>) -> String {
    g.map_or_else(|| format!(">{GIRTH_CAP}"), |v| v.to_string())
}

fn print_analyze(report: &AnalyzeReport) {
    println!("parameters      {}", report.parameters);
    println!(
        "construction    {} lifted product, L={}",
        if report.symmetric { "symmetric" } else { "general" },
        report.lift_size
    );
    println!("base girth      {}", girth_cell(report.base_girth));
    println!("tanner girth    {}", girth_cell(report.tanner_girth));
    if report.m2_guarantee {
        println!("note            two-row base: distance at most n+2 by construction");
    }
    if let Some(rcpc) = &report.rcpc {
        println!("d_c             {} ({})", rcpc.classical.value, distance_note(&rcpc.classical));
        match &rcpc.certificate {
            Some(cert) => {
                println!("rcpc            {} partition {}", axis_name(cert), pairs_text(cert));
                println!("stabilizer wt   {}", rcpc.stabilizer_weight);
                if let Some(bound) = rcpc.collapse_bound {
                    let witness = match &rcpc.bound_witness {
                        Some(w) => format!(", verified logical of weight {}", w.weight()),
                        None => String::new(),
                    };
                    println!("d_q bound       <= {bound}{witness}");
                }
            }
            None => println!("rcpc            none (exhaustive pairing search)"),
        }
    }
    println!(
        "d_q estimate    {} ({})",
        report.quantum_estimate.value,
        distance_note(&report.quantum_estimate)
    );
    match &report.quantum_exact {
        Some(exact) => println!("d_q exact       {}", exact.value),
        None if report.partial => println!("d_q exact       skipped (budget)"),
        None => {}
    }
}

fn axis_name(cert: &RcpcCertificate) -> &'static str {
    match cert.axis {
        lpqc::rcpc::RcpcAxis::Row => "row",
        lpqc::rcpc::RcpcAxis::Column => "column",
    }
}

fn pairs_text(cert: &RcpcCertificate) -> String {
    let pairs = cert
        .pairs
        .iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect::<Vec<_>>()
        .join(" ");
    let sums = cert
        .common_sum
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",");
    format!("{pairs} with common sum [{sums}]")
}

pub fn cmd_rcpc(config: &WorkspaceConfig, base_path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let base = read_base(base_path)?;
    let target = if base.is_canonical() {
        base
    } else {
        println!("input canonicalized; indices refer to the canonical form");
        base.canonicalize()?
    };
    let row = find_row_partition(&target)?;
    let col = find_col_partition(&target)?;
    let stabilizer_weight = target.rows() + target.cols();

    for (name, cert) in [("row", &row), ("column", &col)] {
        match cert {
            Some(c) => println!("{name} partition: {}", pairs_text(c)),
            None => println!("{name} partition: none"),
        }
    }
    let preferred = row.as_ref().or(col.as_ref());
    match preferred {
        Some(cert) => {
            println!("distance collapses to at most {stabilizer_weight} (stabilizer weight)");
            let out_path = config.resolve_out(out, &format!("{}.cert.json", stem(base_path)));
            write_output(&out_path, &to_json(cert)?)?;
            println!("wrote {}", out_path.display());
        }
        None => println!("no partitioning constraint; the bound does not apply"),
    }
    Ok(Outcome::Complete)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DistanceModeArg {
    Estimate,
    Exact,
}

pub struct DistanceFlags {
    pub mode: DistanceModeArg,
    pub w_max: Option<u32>,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct BudgetRefusal {
    budget_exceeded: BudgetDetail,
}

#[derive(Serialize)]
struct BudgetDetail {
    estimated: u64,
    budget: u64,
    w_max: u32,
}

pub fn cmd_distance(config: &WorkspaceConfig, code_path: &Path, flags: DistanceFlags) -> Result<Outcome> {
    let LoadedCode { code, .. } = bundle::load(code_path)?;
    let out_path = config.resolve_out(flags.out, &format!("{}.distance.json", stem(code_path)));

    let report = match flags.mode {
        DistanceModeArg::Estimate => quantum_distance_estimate(
            &code,
            flags.iterations.unwrap_or(config.estimate_iterations),
            flags.seed.unwrap_or(config.seed),
        ),
        DistanceModeArg::Exact => {
            let w_max = flags
                .w_max
                .context("exact mode needs --w-max, the weight at which the search may stop")?;
            let budget = flags.budget.unwrap_or(config.exact_budget);
            match quantum_min_distance_exact_with_budget(&code, w_max, budget) {
                Ok(report) => report,
                Err(DistanceError::BudgetExceeded { estimated, budget }) => {
                    let refusal = BudgetRefusal {
                        budget_exceeded: BudgetDetail { estimated, budget, w_max },
                    };
                    write_output(&out_path, &to_json(&refusal)?)?;
                    println!(
                        "exact search to weight {w_max} needs ~{estimated} operations, budget is {budget}"
                    );
                    println!("wrote {}", out_path.display());
                    return Ok(Outcome::Partial);
                }
                Err(e) => return Err(e.into()),
            }
        }
    };

    println!("d_q {} ({})", report.value, distance_note(&report));
    if let Some(witness) = &report.witness {
        println!("witness weight {}", witness.weight());
    }
    write_output(&out_path, &to_json(&report)?)?;
    println!("wrote {}", out_path.display());
    Ok(Outcome::Complete)
}

pub struct ScreenFlags {
    pub lift_size: u32,
    pub rows: usize,
    pub cols: usize,
    pub threshold: Option<u32>,
    pub exact_dq: bool,
    pub iterations: Option<u64>,
    pub seed: Option<u64>,
    pub exact_budget: Option<u64>,
    pub out: Option<PathBuf>,
    pub candidates: Option<PathBuf>,
}

pub fn cmd_screen(config: &WorkspaceConfig, flags: ScreenFlags) -> Result<Outcome> {
    let dq = if flags.exact_dq {
        DqMethod::Exact {
            budget: flags.exact_budget.unwrap_or(config.exact_budget),
        }
    } else {
        DqMethod::Estimate {
            iterations: flags.iterations.unwrap_or(DEFAULT_SCREEN_ITERATIONS),
            seed: flags.seed.unwrap_or(config.seed),
        }
    };
    let options = ScreenOptions {
        threshold: flags.threshold,
        dq,
    };
    let (report, candidates) = screen(flags.lift_size, flags.rows, flags.cols, &options)?;

    println!(
        "L={} {}x{}: total {} | rcpc {} | d_c>{}: {} | certificate-free: {} | d_q>{} ({}): {}",
        report.lift_size,
        report.rows,
        report.cols,
        report.total,
        report.rcpc_count,
        report.threshold,
        report.dc_gt_threshold,
        report.certificate_free_dc_count,
        report.threshold,
        match report.dq_mode {
            DistanceMode::Exact => "exact".to_string(),
            DistanceMode::Estimate => format!(
                "estimate, {} iterations",
                report.dq_iterations.unwrap_or(0)
            ),
        },
        report.dq_gt_threshold,
    );
    if report.dq_unresolved > 0 {
        println!("unresolved under budget: {}", report.dq_unresolved);
    }

    let out_path = config.resolve_out(flags.out, "screen-report.json");
    write_output(&out_path, &to_json(&report)?)?;
    let candidates_path = config.resolve_out(flags.candidates, "candidates.csv");
    let mut csv = Vec::new();
    write_candidates_csv(&mut csv, &candidates)?;
    write_output(&candidates_path, &String::from_utf8(csv).expect("csv is ascii"))?;
    println!("wrote {}", out_path.display());
    println!("wrote {} ({} candidates)", candidates_path.display(), candidates.len());

    Ok(if report.incomplete || report.dq_unresolved > 0 {
        Outcome::Partial
    } else {
        Outcome::Complete
    })
}

pub fn cmd_refine(
    config: &WorkspaceConfig,
    candidates_path: &Path,
    girth_min: u32,
    dq_target: u32,
    out: Option<PathBuf>,
) -> Result<Outcome> {
    let file = fs::File::open(candidates_path)
        .with_context(|| format!("opening {}", candidates_path.display()))?;
    let records = lpqc::screen::read_candidates_csv(BufReader::new(file))?;
    let kept: Vec<CandidateRecord> = refine_candidates(&records, girth_min, dq_target);

    println!(
        "kept {} of {} candidates (girth >= {girth_min}, d_q evidence >= {dq_target})",
        kept.len(),
        records.len()
    );
    let out_path = config.resolve_out(out, "refined.csv");
    let mut csv = Vec::new();
    write_candidates_csv(&mut csv, &kept)?;
    write_output(&out_path, &String::from_utf8(csv).expect("csv is ascii"))?;
    println!("wrote {}", out_path.display());
    Ok(Outcome::Complete)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SideArg {
    X,
    Z,
}

pub struct SimulateFlags {
    pub p: Option<f64>,
    pub p_sweep: Option<String>,
    pub trials: u64,
    pub seed: Option<u64>,
    pub bp_iters: u32,
    pub osd: u32,
    pub min_sum: Option<f64>,
    pub side: SideArg,
    pub out: Option<PathBuf>,
}

/// `start:end:steps` to an inclusive linear grid, rounded to keep the
/// printed points readable.
fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, end, steps] = parts[..] else {
        bail!("--p-sweep wants start:end:steps, got {text:?}");
    };
    let start: f64 = start.parse().context("sweep start")?;
    let end: f64 = end.parse().context("sweep end")?;
    let steps: usize = steps.parse().context("sweep steps")?;
    if steps == 0 {
        bail!("--p-sweep needs at least one step");
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    Ok((0..steps)
        .map(|i| {
            let p = start + (end - start) * i as f64 / (steps - 1) as f64;
            (p * 1e10).round() / 1e10
        })
        .collect())
}

fn csv_float(x: f64) -> String {
    format!("{x}")
}

pub fn cmd_simulate(config: &WorkspaceConfig, code_path: &Path, flags: SimulateFlags) -> Result<Outcome> {
    let LoadedCode { code, .. } = bundle::load(code_path)?;
    let ps = match (&flags.p, &flags.p_sweep) {
        (Some(p), None) => vec![*p],
        (None, Some(sweep)) => parse_sweep(sweep)?,
        (Some(_), Some(_)) => bail!("--p and --p-sweep are mutually exclusive"),
        (None, None) => bail!("one of --p or --p-sweep is required"),
    };
    let side = match flags.side {
        SideArg::X => ErrorSide::X,
        SideArg::Z => ErrorSide::Z,
    };
    let bp_variant = match flags.min_sum {
        Some(factor) => BpVariant::NormalizedMinSum { factor },
        None => BpVariant::SumProduct,
    };

    let mut rows = String::from("p,trials,logical_errors,rate,ci_low,ci_high\n");
    for &p in &ps {
        let cfg = DecoderConfig {
            bp_iterations: flags.bp_iters,
            bp_variant,
            osd_order: flags.osd,
            channel_p: p,
            trials: flags.trials,
            seed: flags.seed.unwrap_or(config.seed),
        };
        let report: SimulationReport = simulate(&code, side, &cfg)?;
        println!(
            "p={} errors {}/{} rate {:.3e} ci [{:.3e}, {:.3e}] bp converged {}",
            csv_float(report.p),
            report.logical_errors,
            report.trials,
            report.rate,
            report.ci_low,
            report.ci_high,
            report.bp_converged,
        );
        rows.push_str(&format!(
            "{},{},{},{},{},{}\n",
            csv_float(report.p),
            report.trials,
            report.logical_errors,
            csv_float(report.rate),
            csv_float(report.ci_low),
            csv_float(report.ci_high),
        ));
    }

    let out_path = config.resolve_out(flags.out, &format!("{}.curve.csv", stem(code_path)));
    write_output(&out_path, &rows)?;
    println!("wrote {}", out_path.display());
    Ok(Outcome::Complete)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing_is_inclusive_and_validated() {
        assert_eq!(parse_sweep("0.01:0.03:3").unwrap(), vec![0.01, 0.02, 0.03]);
        assert_eq!(parse_sweep("0.05:0.1:1").unwrap(), vec![0.05]);
        assert!(parse_sweep("0.01:0.03").is_err());
        assert!(parse_sweep("0.01:0.03:0").is_err());
        assert!(parse_sweep("a:b:3").is_err());
    }

    #[test]
    fn sweep_points_are_rounded_for_printing() {
        let ps = parse_sweep("0.01:0.04:4").unwrap();
        assert_eq!(ps, vec![0.01, 0.02, 0.03, 0.04]);
        assert_eq!(csv_float(ps[2]), "0.03");
    }
}
