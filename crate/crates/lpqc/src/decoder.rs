//! Syndrome decoding and Monte-Carlo estimation of logical error rates.
//!
//! The decoder is belief propagation on the Tanner graph of one check
//! matrix, flooding schedule, with ordered-statistics post-processing
//! when message passing fails to land on the syndrome. Simulation draws
//! independent bit flips, decodes, and classifies the residual against
//! the full CSS structure, so stabilizer-equivalent corrections count as
//! successes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::css::{CssCode, VectorClass};
use crate::gf2::{BinaryMatrix, BinaryVector};

/// Message magnitudes are clamped here; beyond it tanh saturates and
/// atanh overflows.
const LLR_CLAMP: f64 = 30.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecoderError {
    #[error("syndrome has {got} bits, check matrix has {expected} rows")]
    SyndromeLength { got: usize, expected: usize },
    #[error("soft vector has {got} entries, check matrix has {expected} columns")]
    SoftLength { got: usize, expected: usize },
    #[error("syndrome is outside the column space; no estimate can satisfy it")]
    InconsistentSyndrome,
    #[error("invalid decoder configuration: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BpVariant {
    SumProduct,
    NormalizedMinSum { factor: f64 },
}

/// Which Pauli component the channel flips; the decoder reads the
/// opposite side's checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorSide {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub bp_iterations: u32,
    pub bp_variant: BpVariant,
    pub osd_order: u32,
    pub channel_p: f64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            bp_iterations: 100,
            bp_variant: BpVariant::SumProduct,
            osd_order: 10,
            channel_p: 0.01,
            trials: 10_000,
            seed: 0,
        }
    }
}

impl DecoderConfig {
    fn validate(&self) -> Result<(), DecoderError> {
        if !(self.channel_p > 0.0 && self.channel_p < 1.0) {
            return Err(DecoderError::BadConfig(format!(
                "channel_p must lie strictly between 0 and 1, got {}",
                self.channel_p
            )));
        }
        if self.trials == 0 {
            return Err(DecoderError::BadConfig("trials must be at least 1".into()));
        }
        if let BpVariant::NormalizedMinSum { factor } = self.bp_variant {
            if !(factor > 0.0 && factor <= 1.0) {
                return Err(DecoderError::BadConfig(format!(
                    "min-sum normalization must lie in (0, 1], got {factor}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualClass {
    Identity,
    Stabilizer,
    Logical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    pub converged: bool,
    pub residual_class: ResidualClass,
    pub logical_error: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub p: f64,
    pub trials: u64,
    pub logical_errors: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Trials where message passing alone satisfied the syndrome.
    pub bp_converged: u64,
    pub side: ErrorSide,
    pub seed: u64,
}

/// Check-to-variable adjacency of a parity-check matrix.
struct TannerGraph {
    checks: Vec<Vec<usize>>,
    vars: usize,
}

impl TannerGraph {
    fn new(h: &BinaryMatrix) -> Self {
        let checks = (0..h.rows())
            .map(|r| (0..h.cols()).filter(|&c| h.get(r, c)).collect())
            .collect();
        TannerGraph {
            checks,
            vars: h.cols(),
        }
    }

    fn syndrome_matches(&self, estimate: &BinaryVector, syndrome: &BinaryVector) -> bool {
        self.checks.iter().enumerate().all(|(r, vs)| {
            let parity = vs.iter().filter(|&&v| estimate.get(v)).count() % 2 == 1;
            parity == syndrome.get(r)
        })
    }
}

struct BpOutcome {
    estimate: BinaryVector,
    converged: bool,
    posterior: Vec<f64>,
}

/// Belief propagation against a target syndrome: flooding schedule, all
/// checks then all variables per iteration, stopping as soon as the hard
/// decision satisfies every check. Non-convergence is reported, not an
/// error. Panics if the syndrome length does not match the check count.
pub fn bp_decode(
    h: &BinaryMatrix,
    syndrome: &BinaryVector,
    cfg: &DecoderConfig,
) -> (BinaryVector, bool) {
    let out = bp_decode_full(&TannerGraph::new(h), syndrome, cfg);
    (out.estimate, out.converged)
}

fn bp_decode_full(graph: &TannerGraph, syndrome: &BinaryVector, cfg: &DecoderConfig) -> BpOutcome {
    assert_eq!(
        syndrome.len(),
        graph.checks.len(),
        "syndrome length must equal the check count"
    );
    let prior = ((1.0 - cfg.channel_p) / cfg.channel_p).ln();
    let n = graph.vars;

    // messages live on edges, grouped by check
    let mut var_to_check: Vec<Vec<f64>> = graph
        .checks
        .iter()
        .map(|vs| vec![prior; vs.len()])
        .collect();
    let mut check_to_var: Vec<Vec<f64>> = graph.checks.iter().map(|vs| vec![0.0; vs.len()]).collect();
    let mut posterior = vec![prior; n];
    let mut estimate = BinaryVector::zeros(n);

    let update_estimate = |posterior: &[f64], estimate: &mut BinaryVector| {
        for (v, &l) in posterior.iter().enumerate() {
            estimate.set(v, l < 0.0);
        }
    };

    update_estimate(&posterior, &mut estimate);
    if graph.syndrome_matches(&estimate, syndrome) {
        return BpOutcome {
            estimate,
            converged: true,
            posterior,
        };
    }

    let mut scratch: Vec<f64> = Vec::new();
    for _ in 0..cfg.bp_iterations {
        for (c, vs) in graph.checks.iter().enumerate() {
            let sign = if syndrome.get(c) { -1.0 } else { 1.0 };
            let deg = vs.len();
            let incoming = &var_to_check[c];
            let outgoing = &mut check_to_var[c];
            match cfg.bp_variant {
                BpVariant::SumProduct => {
                    // prefix/suffix products of tanh(L/2) give each edge
                    // the product over the other edges without division
                    scratch.clear();
                    scratch.resize(deg + 1, 1.0);
                    for i in 0..deg {
                        let t = (incoming[i].clamp(-LLR_CLAMP, LLR_CLAMP) / 2.0).tanh();
                        scratch[i + 1] = scratch[i] * t;
                    }
                    let mut suffix = 1.0;
                    for i in (0..deg).rev() {
                        let rest = scratch[i] * suffix;
                        let rest = rest.clamp(-(1.0 - 1e-12), 1.0 - 1e-12);
                        outgoing[i] = sign * 2.0 * rest.atanh();
                        let t = (incoming[i].clamp(-LLR_CLAMP, LLR_CLAMP) / 2.0).tanh();
                        suffix *= t;
                    }
                }
                BpVariant::NormalizedMinSum { factor } => {
                    let mut sign_all = sign;
                    let mut min1 = f64::INFINITY;
                    let mut min2 = f64::INFINITY;
                    let mut argmin = 0;
                    for (i, &l) in incoming.iter().enumerate() {
                        if l < 0.0 {
                            sign_all = -sign_all;
                        }
                        let a = l.abs();
                        if a < min1 {
                            min2 = min1;
                            min1 = a;
                            argmin = i;
                        } else if a < min2 {
                            min2 = a;
                        }
                    }
                    for (i, &l) in incoming.iter().enumerate() {
                        let mag = if i == argmin { min2 } else { min1 };
                        let s = sign_all * if l < 0.0 { -1.0 } else { 1.0 };
                        outgoing[i] = factor * s * mag.min(LLR_CLAMP);
                    }
                }
            }
        }

        posterior.iter_mut().for_each(|l| *l = prior);
        for (c, vs) in graph.checks.iter().enumerate() {
            for (i, &v) in vs.iter().enumerate() {
                posterior[v] += check_to_var[c][i];
            }
        }
        for (c, vs) in graph.checks.iter().enumerate() {
            for (i, &v) in vs.iter().enumerate() {
                let l = (posterior[v] - check_to_var[c][i]).clamp(-LLR_CLAMP, LLR_CLAMP);
                var_to_check[c][i] = l;
            }
        }

        update_estimate(&posterior, &mut estimate);
        if graph.syndrome_matches(&estimate, syndrome) {
            return BpOutcome {
                estimate,
                converged: true,
                posterior,
            };
        }
    }
    BpOutcome {
        estimate,
        converged: false,
        posterior,
    }
}

/// Ordered-statistics search for a syndrome-satisfying estimate of least
/// soft cost. Columns are eliminated most-suspect first, so the base
/// solution concentrates its support on the least reliable positions;
/// test patterns then flip up to `order` of the most suspect free
/// columns, two to the min(order, free) patterns in all. Order at or
/// beyond the free dimension sweeps the entire coset. The returned
/// estimate always satisfies the syndrome; an unsatisfiable syndrome is
/// an error.
pub fn osd_postprocess(
    h: &BinaryMatrix,
    syndrome: &BinaryVector,
    soft_values: &[f64],
    order: u32,
) -> Result<BinaryVector, DecoderError> {
    if syndrome.len() != h.rows() {
        return Err(DecoderError::SyndromeLength {
            got: syndrome.len(),
            expected: h.rows(),
        });
    }
    if soft_values.len() != h.cols() {
        return Err(DecoderError::SoftLength {
            got: soft_values.len(),
            expected: h.cols(),
        });
    }
    let n = h.cols();
    let mut order_of_suspicion: Vec<usize> = (0..n).collect();
    order_of_suspicion
        .sort_by(|&a, &b| soft_values[a].total_cmp(&soft_values[b]).then(a.cmp(&b)));

    // eliminate columns in suspicion order; rows carry the syndrome as a
    // trailing augmented bit
    let mut rows: Vec<BinaryVector> = (0..h.rows())
        .map(|r| {
            let mut v = BinaryVector::zeros(n + 1);
            for c in 0..n {
                if h.get(r, c) {
                    v.set(c, true);
                }
            }
            v.set(n, syndrome.get(r));
            v
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut done = 0;
    for &c in &order_of_suspicion {
        let Some(r) = (done..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(done, r);
        let pivot = rows[done].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != done && row.get(c) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(c);
        done += 1;
    }
    if rows[done..].iter().any(|r| r.get(n)) {
        return Err(DecoderError::InconsistentSyndrome);
    }

    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = order_of_suspicion
        .iter()
        .copied()
        .filter(|c| !pivot_set.contains(c))
        .collect();
    let flips = free[..free.len().min(order as usize)].to_vec();

    // base estimate: free columns zero, pivot c takes the reduced
    // syndrome bit of its row
    let solve = |rows: &[BinaryVector], flipped: &[usize]| {
        let mut e = BinaryVector::zeros(n);
        for &f in flipped {
            e.set(f, true);
        }
        for (r, &c) in pivots.iter().enumerate() {
            let mut bit = rows[r].get(n);
            for &f in flipped {
                if rows[r].get(f) {
                    bit = !bit;
                }
            }
            e.set(c, bit);
        }
        e
    };
    let cost = |e: &BinaryVector| e.support().iter().map(|&i| soft_values[i]).sum::<f64>();

    let mut best = solve(&rows, &[]);
    let mut best_cost = cost(&best);
    let mut flipped = Vec::new();
    for pattern in 1u64..(1u64 << flips.len()) {
        flipped.clear();
        flipped.extend(
            flips
                .iter()
                .enumerate()
                .filter(|&(i, _)| pattern >> i & 1 == 1)
                .map(|(_, &c)| c),
        );
        let e = solve(&rows, &flipped);
        let c = cost(&e);
        if c < best_cost {
            best_cost = c;
            best = e;
        }
    }
    Ok(best)
}

/// Wilson score interval for a binomial proportion.
#[must_use]
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One decode of one sampled error. The residual is the sampled error
/// xored with the estimate; it always has zero syndrome because the
/// estimate satisfies the measured syndrome.
fn run_trial(
    code: &CssCode,
    graph: &TannerGraph,
    check: &BinaryMatrix,
    side: ErrorSide,
    cfg: &DecoderConfig,
    trial: u64,
) -> TrialOutcome {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let n = code.n_qubits();
    let mut truth = BinaryVector::zeros(n);
    for i in 0..n {
        if rng.gen_bool(cfg.channel_p) {
            truth.set(i, true);
        }
    }
    let syndrome = check.apply(&truth).expect("error length matches the code");

    let bp = bp_decode_full(graph, &syndrome, cfg);
    let estimate = if bp.converged {
        bp.estimate
    } else {
        let soft: Vec<f64> = bp.posterior.iter().map(|l| l.abs()).collect();
        osd_postprocess(check, &syndrome, &soft, cfg.osd_order)
            .expect("a measured syndrome is always consistent")
    };

    let mut residual = truth;
    residual.xor_assign(&estimate);
    let residual_class = if residual.is_zero() {
        ResidualClass::Identity
    } else {
        let class = match side {
            ErrorSide::X => code.classify_x_vector(&residual),
            ErrorSide::Z => code.classify_z_vector(&residual),
        }
        .expect("residual length matches the code");
        match class {
            VectorClass::Stabilizer => ResidualClass::Stabilizer,
            VectorClass::Logical => ResidualClass::Logical,
            VectorClass::NotCodeword => {
                unreachable!("residual of a syndrome-satisfying estimate has zero syndrome")
            }
        }
    };
    TrialOutcome {
        converged: bp.converged,
        residual_class,
        logical_error: residual_class == ResidualClass::Logical,
    }
}

/// Monte-Carlo logical error rate on one side of the code: independent
/// bit flips with probability `channel_p`, decoded against the opposite
/// checks, the residual classified with stabilizer-equivalent estimates
/// counting as successes. Trials draw independent seeded streams, so the
/// report is identical for any parallelism.
pub fn simulate(
    code: &CssCode,
    side: ErrorSide,
    cfg: &DecoderConfig,
) -> Result<SimulationReport, DecoderError> {
    cfg.validate()?;
    let check = match side {
        ErrorSide::X => code.hz(),
        ErrorSide::Z => code.hx(),
    };
    let graph = TannerGraph::new(check);
    let (logical_errors, bp_converged) = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let outcome = run_trial(code, &graph, check, side, cfg, trial);
            (u64::from(outcome.logical_error), u64::from(outcome.converged))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let (ci_low, ci_high) = wilson_interval(logical_errors, cfg.trials, 1.96);
    Ok(SimulationReport {
        p: cfg.channel_p,
        trials: cfg.trials,
        logical_errors,
        rate: logical_errors as f64 / cfg.trials as f64,
        ci_low,
        ci_high,
        bp_converged,
        side,
        seed: cfg.seed,
    })
}
