//! Minimum-distance search, exact where the enumeration is affordable and
//! randomized everywhere else.
//!
//! Classical distances come from Gray-code enumeration of the kernel when
//! its dimension permits, otherwise from an information-set estimator.
//! Quantum distances use a weight-ascending meet-in-the-middle search over
//! anchored support sets for exact answers under a weight cap, and the
//! same information-set estimator on both kernels for upper-bound
//! witnesses beyond it. Every report states its mode; estimator output is
//! never presented as exact.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::base::QcBaseMatrix;
use crate::css::{CssCode, VectorClass};
use crate::gf2::{BinaryMatrix, BinaryVector};
use crate::product::{build_symmetric, LpBasePair};
use crate::rcpc::{
    construct_rcpc_codeword, expand_to_binary, find_col_partition, find_row_partition,
    RcpcCertificate, RcpcError,
};

/// Kernel dimension up to which classical search enumerates all 2^k
/// codewords.
pub const GRAY_ENUMERATION_CAP: usize = 24;

/// Default ceiling on subset enumerations for the exact quantum search.
pub const DEFAULT_EXACT_BUDGET: u64 = 2_000_000_000;

/// Largest syndrome table the exact search will allocate, in entries.
/// Each entry costs 16 bytes plus half again in empty slots.
pub const SYNDROME_TABLE_CAP: u64 = 80_000_000;

/// Default iteration count for the randomized estimators.
pub const DEFAULT_ESTIMATE_ITERATIONS: u64 = 10_000;

/// Reduced-row pool size for the information-set estimator; candidates
/// are all single rows, pairs, and triples drawn from the pool.
const ESTIMATOR_POOL: usize = 48;

const CLASSICAL_FALLBACK_ITERATIONS: u64 = 2_000;
const CLASSICAL_FALLBACK_SEED: u64 = 0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistanceError {
    #[error("exact search needs about {estimated} subset enumerations, over the budget of {budget}")]
    BudgetExceeded { estimated: u64, budget: u64 },
    #[error("classical codeword has {got} bits, expected {expected}")]
    EmbedLength { got: usize, expected: usize },
    #[error("code block {block} out of range ({blocks} blocks)")]
    EmbedBlock { block: usize, blocks: usize },
}

/// Outcome of a distance search. `Finite` carries a witnessed value,
/// `GreaterThan` a sound lower bound from an exhausted weight cap, and
/// `Infinite` means the search space provably holds no codewords at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceValue {
    Finite(u32),
    GreaterThan(u32),
    Infinite,
}

impl DistanceValue {
    #[must_use]
    pub fn finite(self) -> Option<u32> {
        match self {
            DistanceValue::Finite(d) => Some(d),
            _ => None,
        }
    }

    /// True when the value is known to exceed `threshold`.
    #[must_use]
    pub fn exceeds(self, threshold: u32) -> bool {
        match self {
            DistanceValue::Finite(d) => d > threshold,
            DistanceValue::GreaterThan(w) => w >= threshold,
            DistanceValue::Infinite => true,
        }
    }
}

impl std::fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistanceValue::Finite(d) => write!(f, "{d}"),
            DistanceValue::GreaterThan(w) => write!(f, ">{w}"),
            DistanceValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueRepr {
    Number(u64),
    Bound { greater_than: u64 },
    Text(String),
}

impl Serialize for DistanceValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match *self {
            DistanceValue::Finite(d) => ValueRepr::Number(u64::from(d)),
            DistanceValue::GreaterThan(w) => ValueRepr::Bound {
                greater_than: u64::from(w),
            },
            DistanceValue::Infinite => ValueRepr::Text("inf".into()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DistanceValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ValueRepr::deserialize(deserializer)? {
            ValueRepr::Number(v) if v <= u64::from(u32::MAX) => {
                Ok(DistanceValue::Finite(v as u32))
            }
            ValueRepr::Bound { greater_than: v } if v <= u64::from(u32::MAX) => {
                Ok(DistanceValue::GreaterThan(v as u32))
            }
            ValueRepr::Text(t) if t == "inf" => Ok(DistanceValue::Infinite),
            ValueRepr::Number(v) | ValueRepr::Bound { greater_than: v } => Err(
                D::Error::custom(format!("distance value {v} out of range")),
            ),
            ValueRepr::Text(t) => Err(D::Error::custom(format!(
                "unrecognized distance value {t:?}; expected a number, {{\"greater_than\": n}}, or \"inf\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    Exact,
    Estimate,
}

/// How much searching backed a report: the weight cap exhausted, the
/// randomized iterations run, or the subset enumerations planned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchBudget {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weight_cap: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub enumerations: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: DistanceValue,
    pub mode: DistanceMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<BinaryVector>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub budget: SearchBudget,
}

/// Minimum weight over the nonzero kernel of `h`. Exact via Gray-code
/// enumeration for kernel dimension up to [`GRAY_ENUMERATION_CAP`], else
/// an information-set estimate with fixed internal budget. A trivial
/// kernel reports `Infinite`.
#[must_use]
pub fn classical_min_distance(h: &BinaryMatrix) -> DistanceReport {
    let basis = h.nullspace_basis();
    let k = basis.rows();
    if k == 0 {
        return DistanceReport {
            value: DistanceValue::Infinite,
            mode: DistanceMode::Exact,
            witness: None,
            seed: None,
            budget: SearchBudget::default(),
        };
    }
    if k > GRAY_ENUMERATION_CAP {
        return classical_distance_estimate(h, CLASSICAL_FALLBACK_ITERATIONS, CLASSICAL_FALLBACK_SEED);
    }
    let rows = basis.row_vectors();
    let mut v = BinaryVector::zeros(h.cols());
    let mut best = usize::MAX;
    let mut witness = None;
    // Gray-code order flips one basis row per step, visiting every kernel
    // element exactly once
    for g in 1u64..(1u64 << k) {
        let idx = g.trailing_zeros() as usize;
        v.xor_assign(&rows[idx]);
        let w = v.weight();
        if w < best {
            best = w;
            witness = Some(v.clone());
        }
    }
    DistanceReport {
        value: DistanceValue::Finite(best as u32),
        mode: DistanceMode::Exact,
        witness,
        seed: None,
        budget: SearchBudget {
            enumerations: Some((1u64 << k) - 1),
            ..SearchBudget::default()
        },
    }
}

/// Information-set estimate of the classical minimum distance: an upper
/// bound with witness, deterministic in `(iterations, seed)` and monotone
/// non-increasing in `iterations`.
#[must_use]
pub fn classical_distance_estimate(h: &BinaryMatrix, iterations: u64, seed: u64) -> DistanceReport {
    let basis = h.nullspace_basis();
    if basis.rows() == 0 {
        return DistanceReport {
            value: DistanceValue::Infinite,
            mode: DistanceMode::Exact,
            witness: None,
            seed: None,
            budget: SearchBudget::default(),
        };
    }
    let found = randomized_min_weight(&basis, &|_| true, iterations, seed, 0);
    let (value, witness) = match found {
        Some(hit) => (DistanceValue::Finite(hit.weight), Some(hit.witness)),
        None => (DistanceValue::GreaterThan(0), None),
    };
    DistanceReport {
        value,
        mode: DistanceMode::Estimate,
        witness,
        seed: Some(seed),
        budget: SearchBudget {
            iterations: Some(iterations),
            ..SearchBudget::default()
        },
    }
}

struct EstimatorHit {
    weight: u32,
    iteration: u64,
    rank: u64,
    witness: BinaryVector,
}

/// Randomized low-weight search over the row space of `basis`. Each
/// iteration re-pivots the basis along a fresh random column order, pools
/// the lightest reduced rows, and scores every single, pair, and triple
/// from the pool that passes `is_target`. Iterations draw independent
/// ChaCha streams from one seed, so results are reproducible and any
/// execution order yields the same winner: ties break on (weight,
/// iteration, candidate rank).
fn randomized_min_weight(
    basis: &BinaryMatrix,
    is_target: &(dyn Fn(&BinaryVector) -> bool + Sync),
    iterations: u64,
    seed: u64,
    stream_offset: u64,
) -> Option<EstimatorHit> {
    // pruning floor shared across iterations; stale reads only cost extra
    // target checks, never change the winner, because ties at the final
    // weight are never pruned
    let best_seen = AtomicUsize::new(usize::MAX);
    (0..iterations)
        .into_par_iter()
        .filter_map(|iter| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(2 * iter + stream_offset);
            estimator_iteration(basis, is_target, &best_seen, &mut rng)
                .map(|(weight, rank, witness)| EstimatorHit {
                    weight,
                    iteration: iter,
                    rank,
                    witness,
                })
        })
        .min_by_key(|hit| (hit.weight, hit.iteration, hit.rank))
}

fn estimator_iteration(
    basis: &BinaryMatrix,
    is_target: &(dyn Fn(&BinaryVector) -> bool + Sync),
    best_seen: &AtomicUsize,
    rng: &mut ChaCha20Rng,
) -> Option<(u32, u64, BinaryVector)> {
    let n = basis.cols();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut rows = basis.row_vectors();
    eliminate_by_column_order(&mut rows, &order);

    let mut pool: Vec<(usize, usize)> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (r.weight(), i))
        .collect();
    pool.sort_unstable();
    pool.truncate(ESTIMATOR_POOL);
    let pool: Vec<&BinaryVector> = pool.iter().map(|&(_, i)| &rows[i]).collect();

    let mut best: Option<(u32, u64, BinaryVector)> = None;
    let mut rank = 0u64;
    let consider = |v: &BinaryVector, rank: u64, best: &mut Option<(u32, u64, BinaryVector)>| {
        let w = v.weight();
        if w == 0 || w > best_seen.load(Ordering::Relaxed) {
            return;
        }
        if let Some((bw, _, _)) = best {
            if w >= *bw as usize {
                return;
            }
        }
        if is_target(v) {
            best_seen.fetch_min(w, Ordering::Relaxed);
            *best = Some((w as u32, rank, v.clone()));
        }
    };

    for (i, &row) in pool.iter().enumerate() {
        consider(row, rank, &mut best);
        rank += 1;
        for (j, &other) in pool.iter().enumerate().skip(i + 1) {
            let mut pair = row.clone();
            pair.xor_assign(other);
            consider(&pair, rank, &mut best);
            rank += 1;
            for &third in pool.iter().skip(j + 1) {
                let mut triple = pair.clone();
                triple.xor_assign(third);
                consider(&triple, rank, &mut best);
                rank += 1;
            }
        }
    }
    best
}

/// Full reduction of `rows` pivoting along the given column order. The
/// result spans the same space; with a random order this is the
/// information-set re-randomization step.
fn eliminate_by_column_order(rows: &mut [BinaryVector], order: &[usize]) {
    let mut done = 0;
    for &c in order {
        if done == rows.len() {
            break;
        }
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
        done += 1;
    }
}

fn saturating_binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(u128::from(n - i)) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

struct LevelPlan {
    weight: u32,
    table_side: usize,
    probe_side: usize,
    cost: u64,
}

/// Anchor columns for the weight-bounded search: with a known circulant
/// size every codeword orbit has a representative whose least support
/// column is the first column of its block, so only those columns anchor
/// the enumeration; without one, every column does.
fn anchor_columns(c: &CssCode) -> Vec<usize> {
    match c.circulant_size() {
        Some(l) if l >= 1 && c.n_qubits() % l as usize == 0 => {
            (0..c.n_qubits()).step_by(l as usize).collect()
        }
        _ => (0..c.n_qubits()).collect(),
    }
}

/// Picks the cheapest split of w-1 columns into a precomputed syndrome
/// table side and an anchored probe side, within the table cap.
fn plan_level(weight: u32, n: usize, anchors: &[usize]) -> LevelPlan {
    let rest = weight as u64 - 1;
    let mut best: Option<LevelPlan> = None;
    for table_side in 0..=rest.min(4) {
        let entries = if table_side == 0 {
            0
        } else {
            saturating_binomial(n as u64 - 1, table_side)
        };
        if entries > SYNDROME_TABLE_CAP {
            continue;
        }
        let probe_side = rest - table_side;
        let probes: u64 = anchors
            .iter()
            .map(|&a| saturating_binomial((n - a - 1) as u64, probe_side))
            .fold(0u64, u64::saturating_add);
        let cost = entries.saturating_add(probes);
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(LevelPlan {
                weight,
                table_side: table_side as usize,
                probe_side: probe_side as usize,
                cost,
            });
        }
    }
    best.expect("table_side 0 is always admissible")
}

/// Exact minimum distance up to `w_max` under the default enumeration
/// budget. See [`quantum_min_distance_exact_with_budget`].
pub fn quantum_min_distance_exact(
    c: &CssCode,
    w_max: u32,
) -> Result<DistanceReport, DistanceError> {
    quantum_min_distance_exact_with_budget(c, w_max, DEFAULT_EXACT_BUDGET)
}

/// Searches weights 1..=w_max in ascending order on both the X and Z
/// sides for the lightest vector with zero syndrome that classifies as a
/// logical operator. Finding one at weight w yields an exact value w (all
/// lower weights were exhausted); finding none yields the sound lower
/// bound "d > w_max", reported in estimate mode since the true value
/// remains unknown. The enumeration cost is planned up front and the call
/// refuses to start past `budget`.
pub fn quantum_min_distance_exact_with_budget(
    c: &CssCode,
    w_max: u32,
    budget: u64,
) -> Result<DistanceReport, DistanceError> {
    if c.k_logical() == 0 {
        return Ok(DistanceReport {
            value: DistanceValue::Infinite,
            mode: DistanceMode::Exact,
            witness: None,
            seed: None,
            budget: SearchBudget {
                weight_cap: Some(w_max),
                ..SearchBudget::default()
            },
        });
    }
    let n = c.n_qubits();
    assert!(n < 1 << 16, "column packing uses 16-bit indices");
    let anchors = anchor_columns(c);
    let plans: Vec<LevelPlan> = (1..=w_max).map(|w| plan_level(w, n, &anchors)).collect();
    let estimated = plans
        .iter()
        .map(|p| p.cost)
        .fold(0u64, u64::saturating_add)
        .saturating_mul(2);
    if estimated > budget {
        return Err(DistanceError::BudgetExceeded { estimated, budget });
    }

    let report_budget = SearchBudget {
        weight_cap: Some(w_max),
        enumerations: Some(estimated),
        ..SearchBudget::default()
    };
    for plan in &plans {
        for x_side in [true, false] {
            let check = if x_side { c.hz() } else { c.hx() };
            if let Some(witness) = exact_level_search(c, x_side, check, &anchors, plan) {
                return Ok(DistanceReport {
                    value: DistanceValue::Finite(plan.weight),
                    mode: DistanceMode::Exact,
                    witness: Some(witness),
                    seed: None,
                    budget: report_budget,
                });
            }
        }
    }
    Ok(DistanceReport {
        value: DistanceValue::GreaterThan(w_max),
        mode: DistanceMode::Estimate,
        witness: None,
        seed: None,
        budget: report_budget,
    })
}

fn syndrome_hash(words: &[u64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &w in words {
        h ^= w;
        h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
        h ^= h >> 31;
    }
    // zero marks an empty table slot
    if h == 0 {
        1
    } else {
        h
    }
}

/// Flat open-addressing multimap from syndrome hashes to packed column
/// subsets. Collisions are tolerated: the caller re-verifies the actual
/// syndrome on every hit.
struct SyndromeTable {
    mask: usize,
    hashes: Vec<u64>,
    subsets: Vec<u64>,
}

impl SyndromeTable {
    fn with_capacity(entries: u64) -> Self {
        let slots = usize::try_from(entries.saturating_mul(3) / 2)
            .expect("capped by SYNDROME_TABLE_CAP")
            .next_power_of_two()
            .max(16);
        SyndromeTable {
            mask: slots - 1,
            hashes: vec![0; slots],
            subsets: vec![0; slots],
        }
    }

    fn insert(&mut self, hash: u64, packed: u64) {
        let mut i = hash as usize & self.mask;
        while self.hashes[i] != 0 {
            i = (i + 1) & self.mask;
        }
        self.hashes[i] = hash;
        self.subsets[i] = packed;
    }

    /// Calls `f` on every stored subset whose hash matches; stops early
    /// and reports true if `f` does.
    fn any_match(&self, hash: u64, mut f: impl FnMut(u64) -> bool) -> bool {
        let mut i = hash as usize & self.mask;
        while self.hashes[i] != 0 {
            if self.hashes[i] == hash && f(self.subsets[i]) {
                return true;
            }
            i = (i + 1) & self.mask;
        }
        false
    }
}

fn pack_columns(cols: &[usize]) -> u64 {
    let mut packed = 0u64;
    for (slot, &c) in cols.iter().enumerate() {
        packed |= (c as u64 + 1) << (16 * slot);
    }
    packed
}

fn unpack_columns(packed: u64, out: &mut Vec<usize>) {
    out.clear();
    let mut rest = packed;
    while rest != 0 {
        out.push((rest & 0xffff) as usize - 1);
        rest >>= 16;
    }
}

/// Enumerates k-subsets of `lo..n` in lexicographic order, maintaining
/// the running xor of their column syndromes. `f` sees the xor and the
/// chosen columns; returning true stops the walk.
fn for_each_subset(
    cols: &[BinaryVector],
    lo: usize,
    k: usize,
    acc: &mut BinaryVector,
    chosen: &mut Vec<usize>,
    f: &mut impl FnMut(&BinaryVector, &[usize]) -> bool,
) -> bool {
    if k == 0 {
        return f(acc, chosen);
    }
    let n = cols.len();
    for c in lo..=(n - k) {
        acc.xor_assign(&cols[c]);
        chosen.push(c);
        let stop = for_each_subset(cols, c + 1, k - 1, acc, chosen, &mut *f);
        chosen.pop();
        acc.xor_assign(&cols[c]);
        if stop {
            return true;
        }
    }
    false
}

/// One weight level of the exact search on one side. Builds the syndrome
/// table for the planned split, then probes every anchored support set;
/// a verified zero-syndrome combination is classified and the first
/// logical one is returned. Scan order is deterministic: anchors
/// ascending, probe subsets lexicographic, table hits in insertion order.
fn exact_level_search(
    code: &CssCode,
    x_side: bool,
    check: &BinaryMatrix,
    anchors: &[usize],
    plan: &LevelPlan,
) -> Option<BinaryVector> {
    let n = check.cols();
    let cols: Vec<BinaryVector> = (0..n).map(|j| check.column(j)).collect();
    let classify = |support: &mut Vec<usize>| -> Option<BinaryVector> {
        support.sort_unstable();
        let v = BinaryVector::from_support(n, support);
        let class = if x_side {
            code.classify_x_vector(&v)
        } else {
            code.classify_z_vector(&v)
        };
        (class == Ok(VectorClass::Logical)).then_some(v)
    };

    let table = if plan.table_side == 0 {
        None
    } else {
        let entries = saturating_binomial(n as u64 - 1, plan.table_side as u64);
        let mut table = SyndromeTable::with_capacity(entries);
        let mut acc = BinaryVector::zeros(check.rows());
        let mut chosen = Vec::new();
        for_each_subset(&cols, 1, plan.table_side, &mut acc, &mut chosen, &mut |syn, sub| {
            table.insert(syndrome_hash(syn.words()), pack_columns(sub));
            false
        });
        Some(table)
    };

    let mut result = None;
    let mut partner = Vec::new();
    let mut support = Vec::new();
    for &a in anchors {
        if n - a - 1 < plan.probe_side {
            break;
        }
        let mut acc = cols[a].clone();
        let mut chosen = Vec::new();
        let stop = for_each_subset(&cols, a + 1, plan.probe_side, &mut acc, &mut chosen, &mut |syn, probe| {
            match &table {
                None => {
                    if syn.is_zero() {
                        support.clear();
                        support.push(a);
                        support.extend_from_slice(probe);
                        if let Some(v) = classify(&mut support) {
                            result = Some(v);
                            return true;
                        }
                    }
                    false
                }
                Some(table) => table.any_match(syndrome_hash(syn.words()), |packed| {
                    unpack_columns(packed, &mut partner);
                    if partner.iter().any(|c| *c <= a || probe.contains(c)) {
                        return false;
                    }
                    // hash hit: confirm the real syndromes cancel
                    let mut verify = syn.clone();
                    for &c in &partner {
                        verify.xor_assign(&cols[c]);
                    }
                    if !verify.is_zero() {
                        return false;
                    }
                    support.clear();
                    support.push(a);
                    support.extend_from_slice(probe);
                    support.extend_from_slice(&partner);
                    if let Some(v) = classify(&mut support) {
                        result = Some(v);
                        return true;
                    }
                    false
                }),
            }
        });
        if stop {
            break;
        }
    }
    result
}

/// Randomized search for low-weight logicals on both sides: the kernel of
/// each check matrix is re-randomized per iteration and candidates count
/// only if they pair nontrivially with the opposite logical basis, which
/// is equivalent to lying outside the stabilizer row space. Reports an
/// upper-bound witness in estimate mode; deterministic in (iterations,
/// seed) and monotone non-increasing in iterations.
#[must_use]
pub fn quantum_distance_estimate(c: &CssCode, iterations: u64, seed: u64) -> DistanceReport {
    let budget = SearchBudget {
        iterations: Some(iterations),
        ..SearchBudget::default()
    };
    if c.k_logical() == 0 {
        return DistanceReport {
            value: DistanceValue::Infinite,
            mode: DistanceMode::Exact,
            witness: None,
            seed: Some(seed),
            budget,
        };
    }
    let gen_x = c.hz().nullspace_basis();
    let gen_z = c.hx().nullspace_basis();
    let logical_x = |v: &BinaryVector| !c.lz().apply(v).expect("kernel length").is_zero();
    let logical_z = |v: &BinaryVector| !c.lx().apply(v).expect("kernel length").is_zero();
    let hit_x = randomized_min_weight(&gen_x, &logical_x, iterations, seed, 0);
    let hit_z = randomized_min_weight(&gen_z, &logical_z, iterations, seed, 1);
    let best = match (hit_x, hit_z) {
        (Some(x), Some(z)) => Some(if z.weight < x.weight { z } else { x }),
        (x, z) => x.or(z),
    };
    let (value, witness) = match best {
        Some(hit) => (DistanceValue::Finite(hit.weight), Some(hit.witness)),
        None => (DistanceValue::GreaterThan(0), None),
    };
    DistanceReport {
        value,
        mode: DistanceMode::Estimate,
        witness,
        seed: Some(seed),
        budget,
    }
}

/// Places a classical codeword of ker(lift of the second source matrix)
/// into one code-part block of the lifted product, leaving the transpose
/// part empty. The embedding preserves weight and lands in the kernel of
/// the Z checks, so minimum-weight classical codewords surface as X-side
/// logical candidates of the same weight.
pub fn embed_classical_codeword(
    pair: &LpBasePair,
    codeword: &BinaryVector,
    block: usize,
) -> Result<BinaryVector, DistanceError> {
    let layout = pair.layout();
    let l = layout.lift_size as usize;
    let expected = layout.code_cells * l;
    if codeword.len() != expected {
        return Err(DistanceError::EmbedLength {
            got: codeword.len(),
            expected,
        });
    }
    if block >= layout.code_blocks {
        return Err(DistanceError::EmbedBlock {
            block,
            blocks: layout.code_blocks,
        });
    }
    let mut v = BinaryVector::zeros(layout.bit_len());
    for s in codeword.support() {
        let cell = s / l;
        let offset = (s % l) as u32;
        v.set(layout.bit_index(layout.code_col(block, cell), offset), true);
    }
    Ok(v)
}

/// Everything the distance-collapse claim needs in one record: the
/// classical distance, the partition certificate if any, an explicit
/// verified witness for the bound min(d_classical, m+n), and the exact
/// confirmation when the enumeration budget allowed one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcpcDistanceReport {
    pub classical: DistanceReport,
    pub certificate: Option<RcpcCertificate>,
    pub stabilizer_weight: u32,
    pub collapse_bound: Option<u32>,
    pub bound_witness: Option<BinaryVector>,
    pub quantum_exact: Option<DistanceReport>,
}

/// [`rcpc_distance_check_with_budget`] under the default exact budget.
pub fn rcpc_distance_check(b: &QcBaseMatrix) -> Result<RcpcDistanceReport, RcpcError> {
    rcpc_distance_check_with_budget(b, DEFAULT_EXACT_BUDGET)
}

/// Checks the distance collapse forced by a partition constraint: computes
/// the classical distance, searches for a certificate, and when one exists
/// demonstrates d <= min(d_classical, m+n) with a concrete verified
/// logical (the certificate codeword, or an embedded classical witness
/// when that is lighter). Equality is confirmed by exact search with the
/// bound as weight cap whenever the budget permits; otherwise
/// `quantum_exact` stays empty.
pub fn rcpc_distance_check_with_budget(
    b: &QcBaseMatrix,
    exact_budget: u64,
) -> Result<RcpcDistanceReport, RcpcError> {
    let classical = classical_min_distance(&b.lift());
    let certificate = match find_row_partition(b)? {
        Some(cert) => Some(cert),
        None => find_col_partition(b)?,
    };
    let stabilizer_weight = (b.rows() + b.cols()) as u32;

    let mut collapse_bound = None;
    let mut bound_witness = None;
    let mut quantum_exact = None;
    if let Some(cert) = &certificate {
        let pair = build_symmetric(b);
        let code = CssCode::from_lp_pair(&pair).expect("product pairs are orthogonal");
        let classical_d = match classical.value {
            DistanceValue::Finite(d) => d,
            _ => u32::MAX,
        };
        let bound = stabilizer_weight.min(classical_d);
        collapse_bound = Some(bound);

        let candidate = if classical_d < stabilizer_weight {
            classical
                .witness
                .as_ref()
                .and_then(|w| embed_classical_codeword(&pair, w, 0).ok())
        } else {
            construct_rcpc_codeword(b, cert)
                .ok()
                .map(|w| expand_to_binary(&w))
        };
        bound_witness = candidate
            .filter(|v| code.classify_x_vector(v) == Ok(VectorClass::Logical));
        quantum_exact = quantum_min_distance_exact_with_budget(&code, bound, exact_budget).ok();
    }

    Ok(RcpcDistanceReport {
        classical,
        certificate,
        stabilizer_weight,
        collapse_bound,
        bound_witness,
        quantum_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(l: u32, rows: &[Vec<u32>]) -> QcBaseMatrix {
        QcBaseMatrix::from_shift_rows(l, rows).unwrap()
    }

    fn lp_code(b: &QcBaseMatrix) -> CssCode {
        CssCode::from_lp_pair(&build_symmetric(b)).unwrap()
    }

    /// Four-qubit code with one weight-4 check per side: K=2, distance 2.
    fn toy_code() -> CssCode {
        let row = BinaryMatrix::from_dense(&[vec![1, 1, 1, 1]]);
        CssCode::from_pcms(row.clone(), row).unwrap()
    }

    #[test]
    fn classical_distance_known_codes() {
        let b = base(7, &[vec![1, 2, 4], vec![6, 5, 3]]);
        let report = classical_min_distance(&b.lift());
        assert_eq!(report.value, DistanceValue::Finite(6));
        assert_eq!(report.mode, DistanceMode::Exact);
        let witness = report.witness.unwrap();
        assert_eq!(witness.weight(), 6);
        assert!(b.lift().apply(&witness).unwrap().is_zero());

        let b3 = base(
            13,
            &[
                vec![0, 0, 0, 0, 0],
                vec![0, 1, 11, 8, 9],
                vec![0, 4, 5, 6, 10],
                vec![0, 10, 6, 2, 12],
            ],
        );
        assert_eq!(
            classical_min_distance(&b3.lift()).value,
            DistanceValue::Finite(16)
        );
    }

    #[test]
    fn classical_distance_estimates_when_kernel_is_large() {
        // 3x4 at L=26: kernel dimension 30 exceeds the Gray cap
        let b = base(26, &[vec![0, 0, 0, 0], vec![0, 6, 4, 10], vec![0, 8, 14, 22]]);
        let h = b.lift();
        let report = classical_min_distance(&h);
        assert_eq!(report.mode, DistanceMode::Estimate);
        assert_eq!(report.value, DistanceValue::Finite(14));
        let witness = report.witness.unwrap();
        assert_eq!(witness.weight(), 14);
        assert!(h.apply(&witness).unwrap().is_zero());
    }

    #[test]
    fn classical_distance_of_trivial_kernel_is_infinite() {
        let report = classical_min_distance(&BinaryMatrix::identity(5));
        assert_eq!(report.value, DistanceValue::Infinite);
        assert_eq!(report.mode, DistanceMode::Exact);
        assert!(report.witness.is_none());
    }

    #[test]
    fn classical_distance_matches_brute_force() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut h = BinaryMatrix::zeros(4, 8);
            for r in 0..4 {
                for c in 0..8 {
                    h.set(r, c, rng.gen_bool(0.5));
                }
            }
            let mut brute = None;
            for bits in 1u32..(1 << 8) {
                let support: Vec<usize> = (0..8).filter(|i| bits >> i & 1 == 1).collect();
                let v = BinaryVector::from_support(8, &support);
                if h.apply(&v).unwrap().is_zero() {
                    brute = Some(brute.map_or(v.weight(), |b: usize| b.min(v.weight())));
                }
            }
            let report = classical_min_distance(&h);
            match brute {
                Some(d) => assert_eq!(report.value, DistanceValue::Finite(d as u32)),
                None => assert_eq!(report.value, DistanceValue::Infinite),
            }
        }
    }

    #[test]
    fn exact_distance_of_toy_code() {
        let code = toy_code();
        let report = quantum_min_distance_exact(&code, 4).unwrap();
        assert_eq!(report.value, DistanceValue::Finite(2));
        assert_eq!(report.mode, DistanceMode::Exact);
        let w = report.witness.unwrap();
        assert_eq!(w.weight(), 2);
    }

    #[test]
    fn exact_distance_of_known_lifted_product() {
        let code = lp_code(&base(7, &[vec![1, 2, 4], vec![6, 5, 3]]));
        let report = quantum_min_distance_exact(&code, 6).unwrap();
        assert_eq!(report.value, DistanceValue::Finite(5));
        let w = report.witness.unwrap();
        assert_eq!(w.weight(), 5);
        let is_logical = code.classify_x_vector(&w) == Ok(VectorClass::Logical)
            || code.classify_z_vector(&w) == Ok(VectorClass::Logical);
        assert!(is_logical);
    }

    #[test]
    fn exhausted_cap_reports_lower_bound_in_estimate_mode() {
        let code = lp_code(&base(7, &[vec![1, 2, 4], vec![6, 5, 3]]));
        let report = quantum_min_distance_exact(&code, 4).unwrap();
        assert_eq!(report.value, DistanceValue::GreaterThan(4));
        assert_eq!(report.mode, DistanceMode::Estimate);
        assert!(report.witness.is_none());
        assert!(report.value.exceeds(4));
        assert!(!report.value.exceeds(5));
    }

    #[test]
    fn exact_search_refuses_tiny_budget() {
        let code = lp_code(&base(7, &[vec![1, 2, 4], vec![6, 5, 3]]));
        let err = quantum_min_distance_exact_with_budget(&code, 6, 100).unwrap_err();
        match err {
            DistanceError::BudgetExceeded { budget, estimated } => {
                assert_eq!(budget, 100);
                assert!(estimated > 100);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn zero_logical_code_has_infinite_distance() {
        let hx = BinaryMatrix::identity(2);
        let hz = BinaryMatrix::zeros(0, 2);
        let code = CssCode::from_pcms(hx, hz).unwrap();
        assert_eq!(code.k_logical(), 0);
        let exact = quantum_min_distance_exact(&code, 2).unwrap();
        assert_eq!(exact.value, DistanceValue::Infinite);
        let est = quantum_distance_estimate(&code, 10, 0);
        assert_eq!(est.value, DistanceValue::Infinite);
    }

    #[test]
    fn estimator_is_deterministic_and_monotone() {
        let code = lp_code(&base(7, &[vec![1, 2, 4], vec![6, 5, 3]]));
        let a = quantum_distance_estimate(&code, 300, 42);
        let b = quantum_distance_estimate(&code, 300, 42);
        assert_eq!(a, b);
        let more = quantum_distance_estimate(&code, 600, 42);
        let (DistanceValue::Finite(da), DistanceValue::Finite(dm)) = (a.value, more.value) else {
            panic!("estimator found nothing on a K=11 code");
        };
        assert!(dm <= da);
        let w = a.witness.unwrap();
        assert_eq!(w.weight() as u32, da);
    }

    #[test]
    fn estimate_agrees_with_exact_on_small_code() {
        let code = lp_code(&base(7, &[vec![1, 2, 4], vec![6, 5, 3]]));
        let est = quantum_distance_estimate(&code, 400, 7);
        assert_eq!(est.value, DistanceValue::Finite(5));
        assert_eq!(est.mode, DistanceMode::Estimate);
        let w = est.witness.unwrap();
        assert_eq!(w.weight(), 5);
    }

    #[test]
    fn estimator_finds_published_distance_on_partition_code() {
        // 4x5 at L=13 carries both partition certificates, so weight-9
        // logicals exist and the estimator should land on them
        let code = lp_code(&base(
            13,
            &[
                vec![0, 0, 0, 0, 0],
                vec![0, 1, 11, 8, 9],
                vec![0, 4, 5, 6, 10],
                vec![0, 10, 6, 2, 12],
            ],
        ));
        let report = quantum_distance_estimate(&code, 400, 3);
        assert_eq!(report.value, DistanceValue::Finite(9));
        let w = report.witness.unwrap();
        assert_eq!(w.weight(), 9);
    }

    #[test]
    fn zero_iterations_find_nothing() {
        let code = toy_code();
        let report = quantum_distance_estimate(&code, 0, 0);
        assert_eq!(report.value, DistanceValue::GreaterThan(0));
        assert!(report.witness.is_none());
    }

    #[test]
    fn embedded_classical_witness_is_logical() {
        let b = base(7, &[vec![1, 2, 4], vec![6, 5, 3]]);
        let pair = build_symmetric(&b);
        let code = CssCode::from_lp_pair(&pair).unwrap();
        let classical = classical_min_distance(&b.lift());
        let cw = classical.witness.unwrap();
        for block in 0..3 {
            let v = embed_classical_codeword(&pair, &cw, block).unwrap();
            assert_eq!(v.weight(), cw.weight());
            assert_eq!(code.classify_x_vector(&v).unwrap(), VectorClass::Logical);
            // support stays inside the code part
            assert!(v.support().iter().all(|&s| s < 9 * 7));
        }
    }

    #[test]
    fn embedding_validates_input() {
        let b = base(7, &[vec![1, 2, 4], vec![6, 5, 3]]);
        let pair = build_symmetric(&b);
        let short = BinaryVector::zeros(5);
        assert_eq!(
            embed_classical_codeword(&pair, &short, 0),
            Err(DistanceError::EmbedLength { got: 5, expected: 21 })
        );
        let ok = BinaryVector::zeros(21);
        assert_eq!(
            embed_classical_codeword(&pair, &ok, 3),
            Err(DistanceError::EmbedBlock { block: 3, blocks: 3 })
        );
    }

    #[test]
    fn collapse_check_on_small_partition_code() {
        let b = base(7, &[vec![1, 2, 4], vec![6, 5, 3]]).canonicalize().unwrap();
        let report = rcpc_distance_check(&b).unwrap();
        assert_eq!(report.classical.value, DistanceValue::Finite(6));
        assert_eq!(report.stabilizer_weight, 5);
        assert_eq!(report.collapse_bound, Some(5));
        assert!(report.certificate.is_some());
        let witness = report.bound_witness.unwrap();
        assert_eq!(witness.weight(), 5);
        let exact = report.quantum_exact.unwrap();
        assert_eq!(exact.value, DistanceValue::Finite(5));
    }

    #[test]
    fn collapse_check_skips_exact_when_budget_is_tight() {
        let b = base(26, &[vec![0, 0, 0, 0], vec![0, 6, 4, 10], vec![0, 8, 14, 22]]);
        let report = rcpc_distance_check_with_budget(&b, 1_000).unwrap();
        assert_eq!(report.collapse_bound, Some(7));
        assert_eq!(report.certificate.as_ref().unwrap().pairs, vec![(0, 3), (1, 2)]);
        let witness = report.bound_witness.unwrap();
        assert_eq!(witness.weight(), 7);
        assert!(report.quantum_exact.is_none());
    }

    #[test]
    fn collapse_check_without_certificate_reports_classical_only() {
        let b = base(24, &[vec![0, 0, 0, 0], vec![0, 1, 3, 7], vec![0, 9, 16, 5]]);
        let report = rcpc_distance_check_with_budget(&b, 1_000_000).unwrap();
        assert!(report.certificate.is_none());
        assert_eq!(report.collapse_bound, None);
        assert!(report.bound_witness.is_none());
        assert!(report.quantum_exact.is_none());
        assert_eq!(report.classical.value, DistanceValue::Finite(20));
    }

    #[test]
    fn collapse_check_rejects_non_canonical_input() {
        let b = base(7, &[vec![1, 2, 4], vec![6, 5, 3]]);
        assert_eq!(rcpc_distance_check(&b), Err(RcpcError::NotCanonical));
    }

    #[test]
    fn report_json_round_trips() {
        let report = DistanceReport {
            value: DistanceValue::Finite(5),
            mode: DistanceMode::Exact,
            witness: Some(BinaryVector::from_support(10, &[1, 4, 7])),
            seed: None,
            budget: SearchBudget {
                weight_cap: Some(6),
                iterations: None,
                enumerations: Some(12345),
            },
        };
        let json = serde_json::to_string(&report).unwrap();
        let back: DistanceReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        for value in [
            DistanceValue::Finite(7),
            DistanceValue::GreaterThan(7),
            DistanceValue::Infinite,
        ] {
            let json = serde_json::to_string(&value).unwrap();
            let back: DistanceValue = serde_json::from_str(&json).unwrap();
            assert_eq!(back, value);
        }
        assert_eq!(serde_json::to_string(&DistanceValue::Infinite).unwrap(), "\"inf\"");
        assert_eq!(
            serde_json::to_string(&DistanceValue::GreaterThan(7)).unwrap(),
            "{\"greater_than\":7}"
        );
        assert_eq!(DistanceValue::GreaterThan(7).to_string(), ">7");
    }

    #[test]
    fn value_threshold_semantics() {
        assert!(DistanceValue::Finite(8).exceeds(7));
        assert!(!DistanceValue::Finite(7).exceeds(7));
        assert!(DistanceValue::GreaterThan(7).exceeds(7));
        assert!(!DistanceValue::GreaterThan(6).exceeds(7));
        assert!(DistanceValue::Infinite.exceeds(1_000_000));
        assert_eq!(DistanceValue::Finite(3).finite(), Some(3));
        assert_eq!(DistanceValue::Infinite.finite(), None);
    }
}
