//! Exhaustive screening of canonical base matrices.
//!
//! For a given circulant size the canonical form fixes the first row and
//! column at Shift(0), so the search space is every assignment of the
//! remaining (m-1)(n-1) shifts. The screen counts, per matrix, three
//! nested filters: a partition certificate on either axis, classical
//! distance above the stabilizer weight, and quantum distance evidence
//! above it. Matrices passing all three are the degenerate-code
//! candidates and are kept with their supporting data.
//!
//! The report separates two numbers that are easy to conflate. The
//! certificate-free count is combinatorial: matrices whose classical
//! distance clears the threshold and that no partition certificate
//! disqualifies. The quantum count then checks each of those against the
//! code itself, and it is strictly smaller whenever low-weight logicals
//! arise through structures no certificate describes. A certificate is
//! sufficient for the distance to collapse, never necessary.
//!
//! Work is split into fixed-size index chunks merged in index order, so
//! the report and the candidate list are identical for any thread count.

use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{QcBaseMatrix, GIRTH_CAP};
use crate::css::CssCode;
use crate::distance::{
    classical_min_distance, quantum_distance_estimate, quantum_min_distance_exact_with_budget,
    DistanceError, DistanceMode, DistanceValue,
};
use crate::product::build_symmetric;
use crate::rcpc::{find_col_partition, find_row_partition, RcpcAxis};

/// Estimator iterations per matrix in the default quantum pass.
pub const DEFAULT_SCREEN_ITERATIONS: u64 = 400;

const CHUNK: u64 = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScreenError {
    #[error("lift size must be at least 2, got {0}")]
    LiftTooSmall(u32),
    #[error("base matrices need at least one row and column")]
    EmptyShape,
    #[error("{lift_size}^{free_entries} canonical matrices overflow the index space")]
    SearchSpaceTooLarge { lift_size: u32, free_entries: u32 },
    #[error("candidate record {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
}

/// The canonical matrices for one (L, m, n) cell, in index order. Index
/// digits are base-L, little-endian, filling the free entries row-major.
#[derive(Debug, Clone)]
pub struct CanonicalEnumeration {
    lift_size: u32,
    rows: usize,
    cols: usize,
    total: u64,
    next: u64,
}

impl CanonicalEnumeration {
    #[must_use]
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The matrix at one enumeration index. Panics if out of range.
    #[must_use]
    pub fn matrix_at(&self, index: u64) -> QcBaseMatrix {
        assert!(index < self.total, "index {index} out of {}", self.total);
        let l = u64::from(self.lift_size);
        let mut digits = index;
        let mut rows = vec![vec![0u32; self.cols]; self.rows];
        for r in 1..self.rows {
            for c in 1..self.cols {
                rows[r][c] = (digits % l) as u32;
                digits /= l;
            }
        }
        QcBaseMatrix::from_shift_rows(self.lift_size, &rows)
            .expect("canonical shifts are always in range")
    }
}

impl Iterator for CanonicalEnumeration {
    type Item = QcBaseMatrix;

    fn next(&mut self) -> Option<QcBaseMatrix> {
        if self.next == self.total {
            return None;
        }
        let b = self.matrix_at(self.next);
        self.next += 1;
        Some(b)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for CanonicalEnumeration {}

/// All canonical m x n base matrices at lift size `l`: first row and
/// column Shift(0), every other entry free. Yields L^((m-1)(n-1))
/// matrices in deterministic index order.
pub fn enumerate_canonical(
    l: u32,
    m: usize,
    n: usize,
) -> Result<CanonicalEnumeration, ScreenError> {
    if l < 2 {
        return Err(ScreenError::LiftTooSmall(l));
    }
    if m == 0 || n == 0 {
        return Err(ScreenError::EmptyShape);
    }
    let free = ((m - 1) * (n - 1)) as u32;
    let total = u64::from(l)
        .checked_pow(free)
        .ok_or(ScreenError::SearchSpaceTooLarge {
            lift_size: l,
            free_entries: free,
        })?;
    Ok(CanonicalEnumeration {
        lift_size: l,
        rows: m,
        cols: n,
        total,
        next: 0,
    })
}

/// How the quantum column is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DqMethod {
    /// Randomized witness search; the count upper-bounds the true count
    /// and converges down to it as iterations grow.
    Estimate { iterations: u64, seed: u64 },
    /// Weight-capped exhaustive search; matrices whose enumeration cost
    /// exceeds the budget are left unresolved and flag the report.
    Exact { budget: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScreenOptions {
    /// Distance threshold; defaults to the stabilizer weight m+n.
    pub threshold: Option<u32>,
    pub dq: DqMethod,
}

impl Default for ScreenOptions {
    fn default() -> Self {
        ScreenOptions {
            threshold: None,
            dq: DqMethod::Estimate {
                iterations: DEFAULT_SCREEN_ITERATIONS,
                seed: 0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub lift_size: u32,
    pub rows: usize,
    pub cols: usize,
    pub threshold: u32,
    pub total: u64,
    pub rcpc_count: u64,
    pub dc_gt_threshold: u64,
    /// Matrices counted in dc_gt_threshold that carry no partition
    /// certificate: the pool the quantum filter actually examines. This
    /// is an upper bound on dq_gt_threshold; the gap is matrices whose
    /// quantum distance collapses without a certificate forcing it.
    pub certificate_free_dc_count: u64,
    pub dq_gt_threshold: u64,
    pub dq_mode: DistanceMode,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dq_iterations: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dq_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dq_exact_budget: Option<u64>,
    /// Matrices the exact method could not afford; always 0 in estimate
    /// mode.
    pub dq_unresolved: u64,
    /// True when dq_unresolved > 0: the dq count is a partial result.
    pub incomplete: bool,
    /// True when every classical distance came from full enumeration
    /// rather than the estimator fallback.
    pub dc_all_exact: bool,
}

/// One matrix that survived the full filter pipeline, with the evidence
/// that put it there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    /// Row-major shift values of the canonical base matrix.
    pub entries: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rcpc: Option<RcpcAxis>,
    pub d_c: u32,
    pub d_q: DistanceValue,
    pub d_q_mode: DistanceMode,
    /// Base-code girth; None means no cycle within [`GIRTH_CAP`].
    pub girth: Option<u32>,
}

struct ChunkResult {
    rcpc: u64,
    dc: u64,
    dc_free: u64,
    dq: u64,
    unresolved: u64,
    dc_estimated: u64,
    candidates: Vec<CandidateRecord>,
}

/// Screens every canonical matrix for one (L, m, n) cell. Counts
/// partition certificates over the whole enumeration, classical distance
/// above the threshold over the whole enumeration, and quantum evidence
/// above the threshold only on certificate-free matrices that passed the
/// classical filter (a certificate pins the quantum distance at or below
/// the stabilizer weight, and a light classical codeword embeds as an
/// equally light logical). Returns the report and the surviving
/// candidates in enumeration order.
pub fn screen(
    l: u32,
    m: usize,
    n: usize,
    options: &ScreenOptions,
) -> Result<(SearchReport, Vec<CandidateRecord>), ScreenError> {
    let enumeration = enumerate_canonical(l, m, n)?;
    let total = enumeration.total();
    let threshold = options.threshold.unwrap_or((m + n) as u32);

    let chunks = total.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(total);
            let mut out = ChunkResult {
                rcpc: 0,
                dc: 0,
                dc_free: 0,
                dq: 0,
                unresolved: 0,
                dc_estimated: 0,
                candidates: Vec::new(),
            };
            for index in lo..hi {
                let b = enumeration.matrix_at(index);
                screen_one(&b, threshold, options.dq, &mut out);
            }
            out
        })
        .collect();

    let mut report = SearchReport {
        lift_size: l,
        rows: m,
        cols: n,
        threshold,
        total,
        rcpc_count: 0,
        dc_gt_threshold: 0,
        certificate_free_dc_count: 0,
        dq_gt_threshold: 0,
        dq_mode: match options.dq {
            DqMethod::Estimate { .. } => DistanceMode::Estimate,
            DqMethod::Exact { .. } => DistanceMode::Exact,
        },
        dq_iterations: match options.dq {
            DqMethod::Estimate { iterations, .. } => Some(iterations),
            DqMethod::Exact { .. } => None,
        },
        dq_seed: match options.dq {
            DqMethod::Estimate { seed, .. } => Some(seed),
            DqMethod::Exact { .. } => None,
        },
        dq_exact_budget: match options.dq {
            DqMethod::Estimate { .. } => None,
            DqMethod::Exact { budget } => Some(budget),
        },
        dq_unresolved: 0,
        incomplete: false,
        dc_all_exact: true,
    };
    let mut candidates = Vec::new();
    for part in results {
        report.rcpc_count += part.rcpc;
        report.dc_gt_threshold += part.dc;
        report.certificate_free_dc_count += part.dc_free;
        report.dq_gt_threshold += part.dq;
        report.dq_unresolved += part.unresolved;
        report.dc_all_exact &= part.dc_estimated == 0;
        candidates.extend(part.candidates);
    }
    report.incomplete = report.dq_unresolved > 0;
    Ok((report, candidates))
}

fn screen_one(b: &QcBaseMatrix, threshold: u32, dq: DqMethod, out: &mut ChunkResult) {
    let certificate_axis = find_row_partition(b)
        .expect("enumerated matrices are canonical")
        .map(|c| c.axis)
        .or_else(|| {
            find_col_partition(b)
                .expect("enumerated matrices are canonical")
                .map(|c| c.axis)
        });
    if certificate_axis.is_some() {
        out.rcpc += 1;
    }

    let classical = classical_min_distance(&b.lift());
    if classical.mode == DistanceMode::Estimate {
        out.dc_estimated += 1;
    }
    if !classical.value.exceeds(threshold) {
        return;
    }
    out.dc += 1;
    if certificate_axis.is_some() {
        return;
    }
    out.dc_free += 1;

    let code = CssCode::from_lp_pair(&build_symmetric(b)).expect("products are orthogonal");
    let quantum = match dq {
        DqMethod::Estimate { iterations, seed } => {
            quantum_distance_estimate(&code, iterations, seed)
        }
        DqMethod::Exact { budget } => {
            match quantum_min_distance_exact_with_budget(&code, threshold, budget) {
                Ok(report) => report,
                Err(DistanceError::BudgetExceeded { .. }) => {
                    out.unresolved += 1;
                    return;
                }
                Err(e) => panic!("exact search on a screened matrix: {e}"),
            }
        }
    };
    if !quantum.value.exceeds(threshold) {
        return;
    }
    out.dq += 1;
    out.candidates.push(CandidateRecord {
        entries: b
            .entries()
            .iter()
            .map(|e| e.shift_value().expect("canonical matrices are fully connected"))
            .collect(),
        rcpc: certificate_axis,
        d_c: classical
            .value
            .finite()
            .expect("a passing classical filter carries a witness"),
        d_q: quantum.value,
        d_q_mode: match dq {
            // an exhausted weight cap proves the threshold claim even
            // though the value itself stays open
            DqMethod::Exact { .. } => DistanceMode::Exact,
            DqMethod::Estimate { .. } => quantum.mode,
        },
        girth: b.girth().expect("canonical matrices have checks and bits"),
    });
}

/// Comparable evidence level: the weight some verified logical is known
/// to reach, or one past the exhausted cap.
fn evidence(v: DistanceValue) -> u64 {
    match v {
        DistanceValue::Finite(d) => u64::from(d),
        DistanceValue::GreaterThan(w) => u64::from(w) + 1,
        DistanceValue::Infinite => u64::MAX,
    }
}

/// Filters candidates to certificate-free matrices with girth at least
/// `girth_min` and distance evidence at least `dq_target`, ranked best
/// first by evidence, then girth, then entry tuple.
#[must_use]
pub fn refine_candidates(
    candidates: &[CandidateRecord],
    girth_min: u32,
    dq_target: u32,
) -> Vec<CandidateRecord> {
    let mut picked: Vec<CandidateRecord> = candidates
        .iter()
        .filter(|c| c.rcpc.is_none())
        .filter(|c| c.girth.unwrap_or(u32::MAX) >= girth_min)
        .filter(|c| evidence(c.d_q) >= u64::from(dq_target))
        .cloned()
        .collect();
    picked.sort_by(|a, b| {
        evidence(b.d_q)
            .cmp(&evidence(a.d_q))
            .then(b.girth.unwrap_or(u32::MAX).cmp(&a.girth.unwrap_or(u32::MAX)))
            .then(a.entries.cmp(&b.entries))
    });
    picked
}

fn axis_label(rcpc: Option<RcpcAxis>) -> &'static str {
    match rcpc {
        Some(RcpcAxis::Row) => "row",
        Some(RcpcAxis::Column) => "col",
        None => "none",
    }
}

fn mode_label(mode: DistanceMode) -> &'static str {
    match mode {
        DistanceMode::Exact => "exact",
        DistanceMode::Estimate => "estimate",
    }
}

/// Writes the candidate store: a header line, then one row per
/// candidate with semicolon-joined shifts.
pub fn write_candidates_csv(
    mut w: impl Write,
    candidates: &[CandidateRecord],
) -> io::Result<()> {
    writeln!(w, "entries,rcpc,d_c,d_q,d_q_mode,girth")?;
    for c in candidates {
        let entries = c
            .entries
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(";");
        let girth = match c.girth {
            Some(g) => g.to_string(),
            None => format!(">{GIRTH_CAP}"),
        };
        writeln!(
            w,
            "{entries},{},{},{},{},{girth}",
            axis_label(c.rcpc),
            c.d_c,
            c.d_q,
            mode_label(c.d_q_mode),
        )?;
    }
    Ok(())
}

/// Reads a candidate store written by [`write_candidates_csv`].
pub fn read_candidates_csv(r: impl BufRead) -> Result<Vec<CandidateRecord>, ScreenError> {
    let malformed = |line: usize, reason: &str| ScreenError::MalformedRecord {
        line,
        reason: reason.to_string(),
    };
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| malformed(i + 1, &e.to_string()))?;
        if i == 0 {
            if line.trim() != "entries,rcpc,d_c,d_q,d_q_mode,girth" {
                return Err(malformed(1, "unrecognized header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 6 {
            return Err(malformed(i + 1, "expected 6 fields"));
        }
        let entries = fields[0]
            .split(';')
            .map(|s| s.parse::<u32>())
            .collect::<Result<Vec<u32>, _>>()
            .map_err(|_| malformed(i + 1, "bad shift value"))?;
        let rcpc = match fields[1] {
            "row" => Some(RcpcAxis::Row),
            "col" => Some(RcpcAxis::Column),
            "none" => None,
            _ => return Err(malformed(i + 1, "rcpc must be row, col or none")),
        };
        let d_c = fields[2]
            .parse::<u32>()
            .map_err(|_| malformed(i + 1, "bad d_c"))?;
        let d_q = if fields[3] == "inf" {
            DistanceValue::Infinite
        } else if let Some(rest) = fields[3].strip_prefix('>') {
            DistanceValue::GreaterThan(
                rest.parse().map_err(|_| malformed(i + 1, "bad d_q bound"))?,
            )
        } else {
            DistanceValue::Finite(
                fields[3].parse().map_err(|_| malformed(i + 1, "bad d_q"))?,
            )
        };
        let d_q_mode = match fields[4] {
            "exact" => DistanceMode::Exact,
            "estimate" => DistanceMode::Estimate,
            _ => return Err(malformed(i + 1, "mode must be exact or estimate")),
        };
        let girth = if let Some(rest) = fields[5].strip_prefix('>') {
            let cap: u32 = rest.parse().map_err(|_| malformed(i + 1, "bad girth bound"))?;
            if cap != GIRTH_CAP {
                return Err(malformed(i + 1, "girth bound disagrees with the cap"));
            }
            None
        } else {
            Some(fields[5].parse().map_err(|_| malformed(i + 1, "bad girth"))?)
        };
        out.push(CandidateRecord {
            entries,
            rcpc,
            d_c,
            d_q,
            d_q_mode,
            girth,
        });
    }
    Ok(out)
}

/// Rebuilds a base matrix from a candidate's entry tuple.
pub fn candidate_matrix(
    record: &CandidateRecord,
    l: u32,
    m: usize,
    n: usize,
) -> Result<QcBaseMatrix, ScreenError> {
    if record.entries.len() != m * n {
        return Err(ScreenError::MalformedRecord {
            line: 0,
            reason: format!("{} entries cannot fill {m}x{n}", record.entries.len()),
        });
    }
    let rows: Vec<Vec<u32>> = record.entries.chunks(n).map(<[u32]>::to_vec).collect();
    QcBaseMatrix::from_shift_rows(l, &rows).map_err(|e| ScreenError::MalformedRecord {
        line: 0,
        reason: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::CpmExponent;

    #[test]
    fn enumeration_covers_the_canonical_space() {
        let e = enumerate_canonical(2, 2, 2).unwrap();
        assert_eq!(e.total(), 2);
        let all: Vec<QcBaseMatrix> = e.collect();
        assert_eq!(all.len(), 2);
        for b in &all {
            assert!(b.is_canonical());
        }
        assert_eq!(all[0].get(1, 1), CpmExponent::Shift(0));
        assert_eq!(all[1].get(1, 1), CpmExponent::Shift(1));

        assert_eq!(enumerate_canonical(4, 3, 4).unwrap().total(), 4096);
        assert_eq!(enumerate_canonical(7, 3, 4).unwrap().total(), 117_649);
    }

    #[test]
    fn enumeration_index_is_row_major_little_endian() {
        let e = enumerate_canonical(5, 3, 4).unwrap();
        // digit k scales by 5^k over free cells (1,1),(1,2),(1,3),(2,1)...
        let b = e.matrix_at(2 + 3 * 5 + 4 * 125);
        assert_eq!(b.get(1, 1), CpmExponent::Shift(2));
        assert_eq!(b.get(1, 2), CpmExponent::Shift(3));
        assert_eq!(b.get(1, 3), CpmExponent::Shift(0));
        assert_eq!(b.get(2, 1), CpmExponent::Shift(4));
        assert_eq!(b.get(0, 2), CpmExponent::Shift(0));
    }

    #[test]
    fn enumeration_rejects_bad_shapes() {
        assert_eq!(
            enumerate_canonical(1, 3, 4).unwrap_err(),
            ScreenError::LiftTooSmall(1)
        );
        assert_eq!(
            enumerate_canonical(2, 0, 4).unwrap_err(),
            ScreenError::EmptyShape
        );
        assert!(matches!(
            enumerate_canonical(u32::MAX, 100, 100).unwrap_err(),
            ScreenError::SearchSpaceTooLarge { .. }
        ));
    }

    #[test]
    fn small_screens_match_published_counts() {
        let (r4, c4) = screen(4, 3, 4, &ScreenOptions::default()).unwrap();
        assert_eq!(
            (r4.total, r4.rcpc_count, r4.dc_gt_threshold, r4.dq_gt_threshold),
            (4096, 700, 0, 0)
        );
        assert_eq!(r4.certificate_free_dc_count, 0);
        assert!(c4.is_empty());
        assert!(r4.dc_all_exact);
        assert!(!r4.incomplete);
        assert_eq!(r4.threshold, 7);

        let (r5, c5) = screen(5, 3, 4, &ScreenOptions::default()).unwrap();
        assert_eq!(
            (r5.total, r5.rcpc_count, r5.dc_gt_threshold, r5.dq_gt_threshold),
            (15625, 1993, 0, 0)
        );
        assert!(c5.is_empty());
    }

    #[test]
    fn screen_is_deterministic() {
        let options = ScreenOptions::default();
        let (r1, c1) = screen(4, 3, 4, &options).unwrap();
        let (r2, c2) = screen(4, 3, 4, &options).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(c1, c2);
    }

    #[test]
    fn two_by_two_screen_has_no_survivors() {
        // m=2 forces a certificate on every matrix, so the quantum column
        // must be empty whatever the distances are
        let (report, candidates) = screen(3, 2, 2, &ScreenOptions::default()).unwrap();
        assert_eq!(report.total, 3);
        assert_eq!(report.rcpc_count, 3);
        assert_eq!(report.dq_gt_threshold, 0);
        assert!(candidates.is_empty());
    }

    #[test]
    fn refine_filters_and_ranks() {
        let mk = |entries: Vec<u32>, rcpc, d_q, girth| CandidateRecord {
            entries,
            rcpc,
            d_c: 14,
            d_q,
            d_q_mode: DistanceMode::Estimate,
            girth,
        };
        let store = vec![
            mk(vec![0, 1], None, DistanceValue::Finite(14), Some(8)),
            mk(vec![0, 2], None, DistanceValue::Finite(14), Some(6)),
            mk(vec![0, 3], None, DistanceValue::Finite(16), Some(8)),
            mk(vec![0, 4], None, DistanceValue::Finite(12), Some(8)),
            mk(vec![0, 5], Some(RcpcAxis::Row), DistanceValue::Finite(14), Some(8)),
            mk(vec![0, 6], None, DistanceValue::GreaterThan(13), Some(8)),
            mk(vec![0, 7], None, DistanceValue::Finite(14), None),
        ];
        let refined = refine_candidates(&store, 8, 14);
        let picked: Vec<&[u32]> = refined.iter().map(|c| c.entries.as_slice()).collect();
        // evidence 16 first; GreaterThan(13) counts as evidence 14; the
        // uncapped girth sorts above girth 8; the certificate row and the
        // low-distance and low-girth rows are gone
        assert_eq!(
            picked,
            vec![
                &[0u32, 3][..],
                &[0u32, 7][..],
                &[0u32, 1][..],
                &[0u32, 6][..]
            ]
        );
        assert!(refine_candidates(&store, 4, 0).len() == store.len() - 1);
        assert!(refine_candidates(&[], 8, 14).is_empty());
    }

    #[test]
    fn candidate_csv_round_trips() {
        let store = vec![
            CandidateRecord {
                entries: vec![0, 0, 0, 0, 0, 1, 2, 3, 0, 5, 9, 14],
                rcpc: None,
                d_c: 20,
                d_q: DistanceValue::Finite(20),
                d_q_mode: DistanceMode::Estimate,
                girth: Some(8),
            },
            CandidateRecord {
                entries: vec![0, 0, 0, 0],
                rcpc: Some(RcpcAxis::Column),
                d_c: 9,
                d_q: DistanceValue::GreaterThan(7),
                d_q_mode: DistanceMode::Exact,
                girth: None,
            },
        ];
        let mut buf = Vec::new();
        write_candidates_csv(&mut buf, &store).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("entries,rcpc,d_c,d_q,d_q_mode,girth\n"));
        assert!(text.contains("0;0;0;0;0;1;2;3;0;5;9;14,none,20,20,estimate,8"));
        assert!(text.contains("0;0;0;0,col,9,>7,exact,>12"));
        let back = read_candidates_csv(buf.as_slice()).unwrap();
        assert_eq!(back, store);
    }

    #[test]
    fn candidate_csv_rejects_garbage() {
        let bad_header = "a,b,c\n";
        assert!(matches!(
            read_candidates_csv(bad_header.as_bytes()).unwrap_err(),
            ScreenError::MalformedRecord { line: 1, .. }
        ));
        let bad_row = "entries,rcpc,d_c,d_q,d_q_mode,girth\n0;1,diagonal,9,9,estimate,6\n";
        assert!(matches!(
            read_candidates_csv(bad_row.as_bytes()).unwrap_err(),
            ScreenError::MalformedRecord { line: 2, .. }
        ));
    }

    #[test]
    fn candidate_matrix_rebuild() {
        let record = CandidateRecord {
            entries: vec![0, 0, 0, 0, 0, 1, 2, 3, 0, 5, 9, 14],
            rcpc: None,
            d_c: 20,
            d_q: DistanceValue::Finite(20),
            d_q_mode: DistanceMode::Estimate,
            girth: Some(8),
        };
        let b = candidate_matrix(&record, 24, 3, 4).unwrap();
        assert!(b.is_canonical());
        assert_eq!(b.get(2, 3), CpmExponent::Shift(14));
        assert!(candidate_matrix(&record, 24, 2, 4).is_err());
    }
}
