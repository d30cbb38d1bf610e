//! Quasi-cyclic base matrices in circulant-exponent form.
//!
//! A base matrix is a small grid whose entry `Shift(s)` stands for the L x L
//! identity with every row cyclically shifted down by `s` positions (the
//! classic circulant permutation matrix, "alpha^s"), and whose entry `NegInf`
//! stands for the L x L zero block. Lifting expands the grid into the actual
//! binary parity-check matrix.

use std::collections::HashMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf2::BinaryMatrix;

/// Cycle lengths above this are never searched for; the codes this crate
/// screens only need girth 4, 6 and 8 distinguished.
pub const GIRTH_CAP: u32 = 12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaseError {
    #[error("lift size must be at least 1, got {0}")]
    LiftSizeTooSmall(u32),
    #[error("base matrix needs at least one row and one column")]
    EmptyMatrix,
    #[error("entry grid has {got} cells, expected {rows}x{cols}")]
    ShapeMismatch { got: usize, rows: usize, cols: usize },
    #[error("shift {value} out of range for lift size {lift_size}")]
    ShiftOutOfRange { value: u32, lift_size: u32 },
    #[error("operation needs a fully connected matrix, found -inf at ({row},{col})")]
    NotFullyConnected { row: usize, col: usize },
    #[error("Tanner graph is empty (lifted matrix has no ones)")]
    EmptyTannerGraph,
    #[error("girth routes disagree: graph search {graph_route:?}, walk condition {walk_route:?}")]
    GirthRouteMismatch {
        graph_route: Option<u32>,
        walk_route: Option<u32>,
    },
}

/// Exponent of a circulant permutation matrix: a shift in [0, L) or the
/// zero block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CpmExponent {
    NegInf,
    Shift(u32),
}

impl CpmExponent {
    #[must_use]
    pub fn is_finite(self) -> bool {
        matches!(self, CpmExponent::Shift(_))
    }

    #[must_use]
    pub fn shift_value(self) -> Option<u32> {
        match self {
            CpmExponent::NegInf => None,
            CpmExponent::Shift(s) => Some(s),
        }
    }

    /// Exponent of the transposed block: (L - s) mod L; the zero block is
    /// its own transpose.
    #[must_use]
    pub fn conjugate(self, lift_size: u32) -> Self {
        match self {
            CpmExponent::NegInf => CpmExponent::NegInf,
            CpmExponent::Shift(s) => CpmExponent::Shift((lift_size - s) % lift_size),
        }
    }
}

impl fmt::Display for CpmExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CpmExponent::NegInf => write!(f, "-inf"),
            CpmExponent::Shift(s) => write!(f, "{s}"),
        }
    }
}

impl Serialize for CpmExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CpmExponent::NegInf => serializer.serialize_str("-inf"),
            CpmExponent::Shift(s) => serializer.serialize_u32(*s),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ExponentRepr {
    Number(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for CpmExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ExponentRepr::deserialize(deserializer)? {
            ExponentRepr::Number(v) if (0..=i64::from(u32::MAX)).contains(&v) => {
                Ok(CpmExponent::Shift(v as u32))
            }
            ExponentRepr::Number(v) => Err(D::Error::custom(format!(
                "exponent {v} out of range; use \"-inf\" for the zero block"
            ))),
            ExponentRepr::Text(t) if t == "-inf" => Ok(CpmExponent::NegInf),
            ExponentRepr::Text(t) => Err(D::Error::custom(format!(
                "unrecognized exponent {t:?}; expected an integer or \"-inf\""
            ))),
        }
    }
}

/// (a - b) mod L; the zero block absorbs everything.
#[must_use]
pub fn exponent_difference(a: CpmExponent, b: CpmExponent, lift_size: u32) -> CpmExponent {
    match (a, b) {
        (CpmExponent::Shift(x), CpmExponent::Shift(y)) => {
            CpmExponent::Shift((x + lift_size - y) % lift_size)
        }
        _ => CpmExponent::NegInf,
    }
}

/// True iff every finite shift value occurs an even number of times; zero
/// blocks are ignored. This is exactly the condition under which two lifted
/// rows with this difference vector are orthogonal.
#[must_use]
pub fn has_even_multiplicity(v: &[CpmExponent]) -> bool {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for e in v {
        if let CpmExponent::Shift(s) = e {
            *counts.entry(*s).or_insert(0) += 1;
        }
    }
    counts.values().all(|c| c % 2 == 0)
}

/// An m x n grid of circulant exponents under a fixed lift size L.
#[derive(Clone, PartialEq, Eq)]
pub struct QcBaseMatrix {
    lift_size: u32,
    rows: usize,
    cols: usize,
    entries: Vec<CpmExponent>,
}

impl QcBaseMatrix {
    pub fn new(
        lift_size: u32,
        rows: usize,
        cols: usize,
        entries: Vec<CpmExponent>,
    ) -> Result<Self, BaseError> {
        if lift_size < 1 {
            return Err(BaseError::LiftSizeTooSmall(lift_size));
        }
        if rows == 0 || cols == 0 {
            return Err(BaseError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(BaseError::ShapeMismatch {
                got: entries.len(),
                rows,
                cols,
            });
        }
        for e in &entries {
            if let CpmExponent::Shift(s) = e {
                if *s >= lift_size {
                    return Err(BaseError::ShiftOutOfRange {
                        value: *s,
                        lift_size,
                    });
                }
            }
        }
        Ok(QcBaseMatrix {
            lift_size,
            rows,
            cols,
            entries,
        })
    }

    /// Build from nested rows of finite shifts.
    pub fn from_shift_rows(lift_size: u32, rows: &[Vec<u32>]) -> Result<Self, BaseError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(BaseError::ShapeMismatch {
                    got: row.len(),
                    rows: rows.len(),
                    cols,
                });
            }
            entries.extend(row.iter().map(|&s| CpmExponent::Shift(s)));
        }
        Self::new(lift_size, rows.len(), cols, entries)
    }

    pub fn from_entry_rows(
        lift_size: u32,
        rows: &[Vec<CpmExponent>],
    ) -> Result<Self, BaseError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(BaseError::ShapeMismatch {
                    got: row.len(),
                    rows: rows.len(),
                    cols,
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(lift_size, rows.len(), cols, entries)
    }

    #[must_use]
    pub fn lift_size(&self) -> u32 {
        self.lift_size
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// # Panics
    /// Panics if out of range.
    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> CpmExponent {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.entries[r * self.cols + c]
    }

    #[must_use]
    pub fn entries(&self) -> &[CpmExponent] {
        &self.entries
    }

    /// # Panics
    /// Panics if `r` is out of range.
    #[must_use]
    pub fn row_entries(&self, r: usize) -> &[CpmExponent] {
        assert!(r < self.rows, "row {r} out of range");
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    #[must_use]
    pub fn column_entries(&self, c: usize) -> Vec<CpmExponent> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    #[must_use]
    pub fn is_fully_connected(&self) -> bool {
        self.entries.iter().all(|e| e.is_finite())
    }

    fn first_neg_inf(&self) -> Option<(usize, usize)> {
        self.entries
            .iter()
            .position(|e| !e.is_finite())
            .map(|p| (p / self.cols, p % self.cols))
    }

    /// Expand every exponent into its L x L binary block. `Shift(s)` places
    /// a one at (r, (r - s) mod L) within the block; `NegInf` stays zero.
    #[must_use]
    pub fn lift(&self) -> BinaryMatrix {
        let l = self.lift_size as usize;
        let mut h = BinaryMatrix::zeros(self.rows * l, self.cols * l);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if let CpmExponent::Shift(s) = self.get(i, j) {
                    let s = s as usize;
                    for r in 0..l {
                        h.set(i * l + r, j * l + (r + l - s) % l, true);
                    }
                }
            }
        }
        h
    }

    /// Transpose with every exponent conjugated, so that lifting the result
    /// gives exactly the transpose of lifting `self`.
    #[must_use]
    pub fn conjugate_transpose(&self) -> QcBaseMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).conjugate(self.lift_size));
            }
        }
        QcBaseMatrix {
            lift_size: self.lift_size,
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// Shift-equivalent matrix whose first row and first column are all
    /// zero: subtract each row's leading entry from the row, then each
    /// resulting first-row entry from its column. Idempotent. Row and
    /// column permutations are deliberately not applied, so equivalent
    /// matrices that differ by a permutation stay distinct.
    pub fn canonicalize(&self) -> Result<QcBaseMatrix, BaseError> {
        if let Some((row, col)) = self.first_neg_inf() {
            return Err(BaseError::NotFullyConnected { row, col });
        }
        let l = self.lift_size;
        let shift = |e: CpmExponent| e.shift_value().expect("checked fully connected");
        let mut out = vec![0u32; self.entries.len()];
        for i in 0..self.rows {
            let lead = shift(self.get(i, 0));
            for j in 0..self.cols {
                out[i * self.cols + j] = (shift(self.get(i, j)) + l - lead) % l;
            }
        }
        for j in 1..self.cols {
            let lead = out[j];
            for i in 0..self.rows {
                out[i * self.cols + j] = (out[i * self.cols + j] + l - lead) % l;
            }
        }
        QcBaseMatrix::new(
            self.lift_size,
            self.rows,
            self.cols,
            out.into_iter().map(CpmExponent::Shift).collect(),
        )
    }

    #[must_use]
    pub fn is_canonical(&self) -> bool {
        if !self.is_fully_connected() {
            return false;
        }
        let zero = CpmExponent::Shift(0);
        (0..self.cols).all(|j| self.get(0, j) == zero)
            && (0..self.rows).all(|i| self.get(i, 0) == zero)
    }

    /// Girth of the lifted Tanner graph, capped at [`GIRTH_CAP`]. Computed
    /// independently by graph search on the lifted matrix and by the
    /// closed-walk exponent-sum condition on the base matrix; a
    /// disagreement is a bug and is surfaced as an error.
    pub fn girth(&self) -> Result<Option<u32>, BaseError> {
        let h = self.lift();
        if h.is_zero() {
            return Err(BaseError::EmptyTannerGraph);
        }
        let graph_route = tanner_girth(&h, GIRTH_CAP);
        let walk_route = self.walk_girth(GIRTH_CAP);
        if graph_route != walk_route {
            return Err(BaseError::GirthRouteMismatch {
                graph_route,
                walk_route,
            });
        }
        Ok(graph_route)
    }

    /// Exponent route: a cycle of length 2k exists iff some closed
    /// non-backtracking walk over base cells (i_t, j_t) -> (i_t, j_{t+1})
    /// has exponent differences summing to 0 mod L, with all cells finite.
    fn walk_girth(&self, cap: u32) -> Option<u32> {
        let l = self.lift_size;
        for k in 2..=(cap / 2) as usize {
            let row_seqs = cyclic_distinct_sequences(self.rows, k);
            let col_seqs = cyclic_distinct_sequences(self.cols, k);
            for iseq in &row_seqs {
                for jseq in &col_seqs {
                    let mut total = 0u32;
                    let mut valid = true;
                    for t in 0..k {
                        let e1 = self.get(iseq[t], jseq[t]);
                        let e2 = self.get(iseq[t], jseq[(t + 1) % k]);
                        match exponent_difference(e1, e2, l) {
                            CpmExponent::Shift(d) => total = (total + d) % l,
                            CpmExponent::NegInf => {
                                valid = false;
                                break;
                            }
                        }
                    }
                    if valid && total == 0 {
                        return Some(2 * k as u32);
                    }
                }
            }
        }
        None
    }
}

impl fmt::Debug for QcBaseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QcBaseMatrix L={} [", self.lift_size)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct BaseMatrixRepr {
    #[serde(rename = "L")]
    lift_size: u32,
    m: usize,
    n: usize,
    entries: Vec<Vec<CpmExponent>>,
}

impl Serialize for QcBaseMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let entries = (0..self.rows)
            .map(|i| self.row_entries(i).to_vec())
            .collect();
        BaseMatrixRepr {
            lift_size: self.lift_size,
            m: self.rows,
            n: self.cols,
            entries,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QcBaseMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BaseMatrixRepr::deserialize(deserializer)?;
        if repr.entries.len() != repr.m {
            return Err(D::Error::custom(format!(
                "entry grid has {} rows, header says m={}",
                repr.entries.len(),
                repr.m
            )));
        }
        for row in &repr.entries {
            if row.len() != repr.n {
                return Err(D::Error::custom(format!(
                    "entry row has {} columns, header says n={}",
                    row.len(),
                    repr.n
                )));
            }
        }
        QcBaseMatrix::from_entry_rows(repr.lift_size, &repr.entries)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// All sequences of length `k` over `0..alphabet` whose consecutive entries
/// differ, cyclically (last differs from first).
fn cyclic_distinct_sequences(alphabet: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut buf = vec![0usize; k];
    fn rec(alphabet: usize, k: usize, pos: usize, buf: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == k {
            if buf[k - 1] != buf[0] {
                out.push(buf.clone());
            }
            return;
        }
        for v in 0..alphabet {
            if pos > 0 && buf[pos - 1] == v {
                continue;
            }
            buf[pos] = v;
            rec(alphabet, k, pos + 1, buf, out);
        }
    }
    rec(alphabet, k, 0, &mut buf, &mut out);
    out
}

/// Node of a Tanner graph: one per parity-check row, one per code column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TannerNode {
    Check(usize),
    Variable(usize),
}

/// Shortest cycle length in the bipartite Tanner graph of `h`, or None if
/// every cycle is longer than `cap`.
#[must_use]
pub fn tanner_girth(h: &BinaryMatrix, cap: u32) -> Option<u32> {
    tanner_girth_with_cycle(h, cap).map(|(g, _)| g)
}

/// Shortest cycle as an ordered node list (length equals the girth); None
/// if no cycle within `cap` exists.
#[must_use]
pub fn tanner_shortest_cycle(h: &BinaryMatrix, cap: u32) -> Option<Vec<TannerNode>> {
    let nchecks = h.rows();
    tanner_girth_with_cycle(h, cap).map(|(_, cycle)| {
        cycle
            .into_iter()
            .map(|id| {
                if id < nchecks {
                    TannerNode::Check(id)
                } else {
                    TannerNode::Variable(id - nchecks)
                }
            })
            .collect()
    })
}

fn tanner_girth_with_cycle(h: &BinaryMatrix, cap: u32) -> Option<(u32, Vec<usize>)> {
    let nchecks = h.rows();
    let nvars = h.cols();
    let nnodes = nchecks + nvars;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nnodes];
    for r in 0..nchecks {
        for c in h.row(r).support() {
            adj[r].push((nchecks + c) as u32);
            adj[nchecks + c].push(r as u32);
        }
    }

    let mut best: u32 = cap + 1;
    let mut best_cycle: Vec<usize> = Vec::new();
    let mut dist = vec![-1i32; nnodes];
    let mut parent = vec![usize::MAX; nnodes];
    let mut queue = std::collections::VecDeque::new();
    let mut touched: Vec<usize> = Vec::new();

    for start in 0..nnodes {
        for &t in &touched {
            dist[t] = -1;
            parent[t] = usize::MAX;
        }
        touched.clear();
        dist[start] = 0;
        touched.push(start);
        queue.clear();
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            if dist[x] as u32 * 2 >= best {
                break;
            }
            for &y in &adj[x] {
                let y = y as usize;
                if dist[y] < 0 {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    touched.push(y);
                    queue.push_back(y);
                } else if parent[x] != y && dist[y] >= dist[x] {
                    let len = (dist[x] + dist[y] + 1) as u32;
                    if len < best {
                        best = len;
                        best_cycle = reconstruct_cycle(&parent, x, y);
                    }
                }
            }
        }
        // bipartite graphs cannot do better than a 4-cycle
        if best == 4 {
            break;
        }
    }

    if best <= cap {
        Some((best, best_cycle))
    } else {
        None
    }
}

/// Join the two BFS tree paths of the cycle-closing edge (x, y) at their
/// common root. At the true girth the paths share only the root, so the
/// result is a simple cycle.
fn reconstruct_cycle(parent: &[usize], x: usize, y: usize) -> Vec<usize> {
    let mut px = vec![x];
    while parent[*px.last().unwrap()] != usize::MAX {
        px.push(parent[*px.last().unwrap()]);
    }
    let mut py = vec![y];
    while parent[*py.last().unwrap()] != usize::MAX {
        py.push(parent[*py.last().unwrap()]);
    }
    // walk root -> x, cross the closing edge to y, walk y back down to the
    // root's child; the wraparound edge child -> root is a tree edge
    px.reverse();
    py.pop();
    px.extend(py);
    px
}
