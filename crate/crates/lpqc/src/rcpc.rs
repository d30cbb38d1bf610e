//! Row/column partition constraints on symmetric lifted products.
//!
//! A canonical base matrix whose rows (or columns) can be paired up with a
//! common modulo-L pair sum forces a logical codeword of weight m+n in the
//! symmetric lifted-product code, collapsing the quantum distance to the
//! stabilizer weight. This module finds such pairings, emits them as
//! certificates, and materializes the promised codeword in block form so
//! the claim can be checked against the actual code rather than trusted.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{CpmExponent, QcBaseMatrix};
use crate::css::{CssCode, VectorClass};
use crate::gf2::BinaryVector;
use crate::product::{build_symmetric, BlockLayout};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RcpcError {
    #[error("base matrix is not canonical; canonicalize before searching")]
    NotCanonical,
    #[error("certificate pairs do not partition the {expected} indices exactly once")]
    BadPartition { expected: usize },
    #[error("common_sum has {got} entries, expected {expected}")]
    CommonSumLength { got: usize, expected: usize },
    #[error("pair ({first}, {second}) does not sum to common_sum")]
    PairSumMismatch { first: usize, second: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RcpcAxis {
    Row,
    #[serde(rename = "col")]
    Column,
}

/// A pairing of base-matrix rows or columns whose entry-wise sums all agree
/// modulo L. Indices are zero-based; when the count is odd exactly one
/// entry is a self-pair (k, k), counted twice in its sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RcpcCertificate {
    pub axis: RcpcAxis,
    pub pairs: Vec<(usize, usize)>,
    /// The shared pair sum: one entry per column for a row pairing, one
    /// per row for a column pairing.
    pub common_sum: Vec<CpmExponent>,
}

/// (a + b) mod L; the zero block absorbs everything.
fn exponent_sum(a: CpmExponent, b: CpmExponent, lift_size: u32) -> CpmExponent {
    match (a, b) {
        (CpmExponent::Shift(x), CpmExponent::Shift(y)) => {
            CpmExponent::Shift((x + y) % lift_size)
        }
        _ => CpmExponent::NegInf,
    }
}

/// All ways to pair up 0..count: perfect matchings when the count is even,
/// otherwise every choice of one self-paired index (appended last) times
/// the matchings of the rest. Order is deterministic: the smallest free
/// index always pairs first, with partners tried in increasing order, so
/// searches report the lexicographically earliest certificate.
fn index_pairings(count: usize) -> Vec<Vec<(usize, usize)>> {
    fn matchings(rem: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        let Some((&a, rest)) = rem.split_first() else {
            out.push(acc.clone());
            return;
        };
        for &b in rest {
            let remaining: Vec<usize> = rest.iter().copied().filter(|&x| x != b).collect();
            acc.push((a, b));
            matchings(&remaining, acc, out);
            acc.pop();
        }
    }

    let mut out = Vec::new();
    let mut acc = Vec::new();
    if count % 2 == 0 {
        let idx: Vec<usize> = (0..count).collect();
        matchings(&idx, &mut acc, &mut out);
    } else {
        for lone in 0..count {
            let rest: Vec<usize> = (0..count).filter(|&x| x != lone).collect();
            let mut sub = Vec::new();
            matchings(&rest, &mut acc, &mut sub);
            for mut pairing in sub {
                pairing.push((lone, lone));
                out.push(pairing);
            }
        }
    }
    out
}

/// Shared search core: `lines` holds the shift vectors being paired (rows
/// for the row axis, columns for the column axis). Pair sums are computed
/// once up front; the pairing scan only compares precomputed vectors.
fn find_partition(
    lines: &[Vec<u32>],
    lift_size: u32,
    axis: RcpcAxis,
) -> Option<RcpcCertificate> {
    let count = lines.len();
    let mut sums = vec![Vec::new(); count * count];
    for i in 0..count {
        for j in i..count {
            sums[i * count + j] = lines[i]
                .iter()
                .zip(&lines[j])
                .map(|(&a, &b)| (a + b) % lift_size)
                .collect();
        }
    }
    for pairing in index_pairings(count) {
        let (f0, s0) = pairing[0];
        let want = &sums[f0 * count + s0];
        if pairing[1..].iter().all(|&(i, j)| &sums[i * count + j] == want) {
            return Some(RcpcCertificate {
                axis,
                pairs: pairing,
                common_sum: want.iter().map(|&s| CpmExponent::Shift(s)).collect(),
            });
        }
    }
    None
}

fn shift_lines(b: &QcBaseMatrix, by_rows: bool) -> Vec<Vec<u32>> {
    let value = |e: CpmExponent| e.shift_value().expect("canonical matrices are fully connected");
    if by_rows {
        (0..b.rows())
            .map(|i| b.row_entries(i).iter().map(|&e| value(e)).collect())
            .collect()
    } else {
        (0..b.cols())
            .map(|j| b.column_entries(j).into_iter().map(value).collect())
            .collect()
    }
}

/// Searches every pairing of the rows of a canonical matrix for a common
/// pair sum, returning the first hit in lexicographic pairing order.
pub fn find_row_partition(b: &QcBaseMatrix) -> Result<Option<RcpcCertificate>, RcpcError> {
    if !b.is_canonical() {
        return Err(RcpcError::NotCanonical);
    }
    Ok(find_partition(&shift_lines(b, true), b.lift_size(), RcpcAxis::Row))
}

/// Column-axis counterpart of [`find_row_partition`].
pub fn find_col_partition(b: &QcBaseMatrix) -> Result<Option<RcpcCertificate>, RcpcError> {
    if !b.is_canonical() {
        return Err(RcpcError::NotCanonical);
    }
    Ok(find_partition(&shift_lines(b, false), b.lift_size(), RcpcAxis::Column))
}

/// A vector over the symmetric lifted-product code written block-wise: an
/// n x n grid of cells for the code part and an m x m grid for the
/// transpose part, each cell holding at most one power of the circulant
/// generator. A finite cell expands to a single one-bit, so the binary
/// weight equals the count of finite cells regardless of L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCodeword {
    lift_size: u32,
    code_blocks: usize,
    transpose_blocks: usize,
    code: Vec<CpmExponent>,
    transpose: Vec<CpmExponent>,
}

impl BlockCodeword {
    /// All-zero codeword over an n-column, m-row symmetric product.
    ///
    /// # Panics
    /// Panics if `lift_size` is zero or a grid dimension is zero.
    #[must_use]
    pub fn new(lift_size: u32, code_blocks: usize, transpose_blocks: usize) -> Self {
        assert!(lift_size >= 1 && code_blocks >= 1 && transpose_blocks >= 1);
        BlockCodeword {
            lift_size,
            code_blocks,
            transpose_blocks,
            code: vec![CpmExponent::NegInf; code_blocks * code_blocks],
            transpose: vec![CpmExponent::NegInf; transpose_blocks * transpose_blocks],
        }
    }

    #[must_use]
    pub fn lift_size(&self) -> u32 {
        self.lift_size
    }

    #[must_use]
    pub fn code_blocks(&self) -> usize {
        self.code_blocks
    }

    #[must_use]
    pub fn transpose_blocks(&self) -> usize {
        self.transpose_blocks
    }

    #[must_use]
    pub fn layout(&self) -> BlockLayout {
        BlockLayout {
            lift_size: self.lift_size,
            code_blocks: self.code_blocks,
            code_cells: self.code_blocks,
            transpose_blocks: self.transpose_blocks,
            transpose_cells: self.transpose_blocks,
        }
    }

    /// # Panics
    /// Panics if out of range.
    #[must_use]
    pub fn code_cell(&self, block: usize, cell: usize) -> CpmExponent {
        assert!(block < self.code_blocks && cell < self.code_blocks);
        self.code[block * self.code_blocks + cell]
    }

    /// # Panics
    /// Panics if out of range.
    #[must_use]
    pub fn transpose_cell(&self, block: usize, cell: usize) -> CpmExponent {
        assert!(block < self.transpose_blocks && cell < self.transpose_blocks);
        self.transpose[block * self.transpose_blocks + cell]
    }

    /// # Panics
    /// Panics if out of range.
    pub fn set_code_cell(&mut self, block: usize, cell: usize, e: CpmExponent) {
        assert!(block < self.code_blocks && cell < self.code_blocks);
        if let CpmExponent::Shift(s) = e {
            assert!(s < self.lift_size);
        }
        self.code[block * self.code_blocks + cell] = e;
    }

    /// # Panics
    /// Panics if out of range.
    pub fn set_transpose_cell(&mut self, block: usize, cell: usize, e: CpmExponent) {
        assert!(block < self.transpose_blocks && cell < self.transpose_blocks);
        if let CpmExponent::Shift(s) = e {
            assert!(s < self.lift_size);
        }
        self.transpose[block * self.transpose_blocks + cell] = e;
    }

    /// Count of finite cells, which equals the binary expansion weight.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.code
            .iter()
            .chain(&self.transpose)
            .filter(|e| e.is_finite())
            .count()
    }

    /// Adds `s` to every finite cell modulo L. On a quasi-cyclic code this
    /// maps codewords to codewords of the same weight.
    #[must_use]
    pub fn shift(&self, s: u32) -> BlockCodeword {
        let l = self.lift_size;
        let bump = |e: &CpmExponent| match *e {
            CpmExponent::Shift(v) => CpmExponent::Shift((v + s % l) % l),
            CpmExponent::NegInf => CpmExponent::NegInf,
        };
        BlockCodeword {
            lift_size: self.lift_size,
            code_blocks: self.code_blocks,
            transpose_blocks: self.transpose_blocks,
            code: self.code.iter().map(bump).collect(),
            transpose: self.transpose.iter().map(bump).collect(),
        }
    }
}

/// Checks that `cert` is structurally sound for `b` and that every pair
/// sums to `common_sum`.
fn validate_certificate(b: &QcBaseMatrix, cert: &RcpcCertificate) -> Result<(), RcpcError> {
    let l = b.lift_size();
    let (paired, sum_len) = match cert.axis {
        RcpcAxis::Row => (b.rows(), b.cols()),
        RcpcAxis::Column => (b.cols(), b.rows()),
    };
    let mut seen = vec![false; paired];
    let mut covered = 0;
    for &(i, j) in &cert.pairs {
        if i >= paired || j >= paired {
            return Err(RcpcError::BadPartition { expected: paired });
        }
        if i == j {
            if seen[i] {
                return Err(RcpcError::BadPartition { expected: paired });
            }
            seen[i] = true;
            covered += 1;
        } else {
            if seen[i] || seen[j] {
                return Err(RcpcError::BadPartition { expected: paired });
            }
            seen[i] = true;
            seen[j] = true;
            covered += 2;
        }
    }
    if covered != paired {
        return Err(RcpcError::BadPartition { expected: paired });
    }
    if cert.common_sum.len() != sum_len {
        return Err(RcpcError::CommonSumLength {
            got: cert.common_sum.len(),
            expected: sum_len,
        });
    }
    for &(i, j) in &cert.pairs {
        for k in 0..sum_len {
            let (a, c) = match cert.axis {
                RcpcAxis::Row => (b.get(i, k), b.get(j, k)),
                RcpcAxis::Column => (b.get(k, i), b.get(k, j)),
            };
            if exponent_sum(a, c, l) != cert.common_sum[k] {
                return Err(RcpcError::PairSumMismatch { first: i, second: j });
            }
        }
    }
    Ok(())
}

/// Materializes the weight-(m+n) logical codeword a certificate promises.
///
/// Row axis with common sum u: code-part block (j, j) carries the shift
/// (L - u_j) mod L and the transpose part carries shift 0 at cell
/// (sigma(s), s) for the pairing involution sigma. Column axis with common
/// sum v: code-part block (j, tau(j)) carries shift 0 and the transpose
/// diagonal (s, s) carries v_s. These offsets make the expansion vanish
/// against both lifted parity-check matrices; the sign orientation is
/// pinned by [`expand_to_binary`] putting a finite cell's one-bit at
/// offset equal to its shift value.
pub fn construct_rcpc_codeword(
    b: &QcBaseMatrix,
    cert: &RcpcCertificate,
) -> Result<BlockCodeword, RcpcError> {
    validate_certificate(b, cert)?;
    let l = b.lift_size();
    let (m, n) = (b.rows(), b.cols());
    let mut w = BlockCodeword::new(l, n, m);
    let finite = |e: CpmExponent| e.shift_value().expect("validated sums are finite");

    let mut partner = vec![0usize; match cert.axis {
        RcpcAxis::Row => m,
        RcpcAxis::Column => n,
    }];
    for &(i, j) in &cert.pairs {
        partner[i] = j;
        partner[j] = i;
    }

    match cert.axis {
        RcpcAxis::Row => {
            for j in 0..n {
                let u = finite(cert.common_sum[j]);
                w.set_code_cell(j, j, CpmExponent::Shift((l - u % l) % l));
            }
            for s in 0..m {
                w.set_transpose_cell(partner[s], s, CpmExponent::Shift(0));
            }
        }
        RcpcAxis::Column => {
            for j in 0..n {
                w.set_code_cell(j, partner[j], CpmExponent::Shift(0));
            }
            for s in 0..m {
                let v = finite(cert.common_sum[s]);
                w.set_transpose_cell(s, s, CpmExponent::Shift(v % l));
            }
        }
    }
    Ok(w)
}

/// Expands a block codeword to its binary form: each finite cell
/// contributes a single one at bit offset equal to its shift value inside
/// the cell's L-bit span; zero cells contribute nothing.
#[must_use]
pub fn expand_to_binary(w: &BlockCodeword) -> BinaryVector {
    let layout = w.layout();
    let mut v = BinaryVector::zeros(layout.bit_len());
    for block in 0..w.code_blocks {
        for cell in 0..w.code_blocks {
            if let CpmExponent::Shift(s) = w.code_cell(block, cell) {
                v.set(layout.bit_index(layout.code_col(block, cell), s), true);
            }
        }
    }
    for block in 0..w.transpose_blocks {
        for cell in 0..w.transpose_blocks {
            if let CpmExponent::Shift(s) = w.transpose_cell(block, cell) {
                v.set(layout.bit_index(layout.transpose_col(block, cell), s), true);
            }
        }
    }
    v
}

/// Full certificate check: the pair sums must hold and the constructed
/// codeword's binary expansion must classify as a logical operator (zero
/// syndrome, outside the stabilizer row space) in the code built from the
/// symmetric lifted product of `b`. Any structural defect reports false
/// rather than an error.
#[must_use]
pub fn verify_certificate(b: &QcBaseMatrix, cert: &RcpcCertificate) -> bool {
    let Ok(w) = construct_rcpc_codeword(b, cert) else {
        return false;
    };
    let v = expand_to_binary(&w);
    let pair = build_symmetric(b);
    let Ok(code) = CssCode::from_lp_pair(&pair) else {
        return false;
    };
    matches!(code.classify_x_vector(&v), Ok(VectorClass::Logical))
        && matches!(code.classify_z_vector(&v), Ok(VectorClass::Logical))
}
