//! Dense GF(2) linear algebra on bit-packed matrices.
//!
//! Every value is immutable once built (mutators exist only for construction)
//! and every operation is a pure function, so matrices can be shared freely
//! across threads. Lifted parity-check matrices at the scales this crate
//! targets (up to ~1300 columns) stay comfortably dense.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("vector length {got} does not match expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
}

const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Bit-packed binary row vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        BinaryVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// # Panics
    /// Panics if any index is out of range.
    #[must_use]
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    /// # Panics
    /// Panics if `bits.len()` disagrees with `len`.
    #[must_use]
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Panics
    /// Panics if `i >= len`.
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    /// # Panics
    /// Panics if `i >= len`.
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// # Panics
    /// Panics on length mismatch.
    pub fn xor_assign(&mut self, other: &BinaryVector) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the overlap with `other` (the GF(2) inner product).
    ///
    /// # Panics
    /// Panics on length mismatch.
    #[must_use]
    pub fn dot(&self, other: &BinaryVector) -> bool {
        assert_eq!(self.len, other.len, "dot of unequal lengths");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    #[must_use]
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * WORD_BITS + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Index of the lowest set bit, if any.
    #[must_use]
    pub fn leading_bit(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }
}

impl std::fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    len: usize,
    support: Vec<usize>,
}

impl Serialize for BinaryVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        VectorRepr {
            len: self.len,
            support: self.support(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = VectorRepr::deserialize(deserializer)?;
        let mut v = BinaryVector::zeros(repr.len);
        for &i in &repr.support {
            if i >= repr.len {
                return Err(D::Error::custom(format!(
                    "support index {i} out of range {}",
                    repr.len
                )));
            }
            if v.get(i) {
                return Err(D::Error::custom(format!("duplicate support index {i}")));
            }
            v.set(i, true);
        }
        Ok(v)
    }
}

/// Bit-packed row-major binary matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BinaryMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BinaryMatrix {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// # Panics
    /// Panics if the rows are ragged.
    #[must_use]
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged row {i}");
            for (j, &b) in row.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// # Panics
    /// Panics if any vector length differs from `cols`.
    #[must_use]
    pub fn from_rows(rows: &[BinaryVector], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row {i} has wrong length");
            m.bits[i * m.stride..(i + 1) * m.stride].copy_from_slice(v.words());
        }
        m
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
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        self.bits[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    /// # Panics
    /// Panics if out of range.
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD_BITS);
        let w = &mut self.bits[r * self.stride + c / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// # Panics
    /// Panics if `r >= rows`.
    #[must_use]
    pub fn row(&self, r: usize) -> BinaryVector {
        assert!(r < self.rows, "row {r} out of range {}", self.rows);
        BinaryVector {
            len: self.cols,
            words: self.bits[r * self.stride..(r + 1) * self.stride].to_vec(),
        }
    }

    /// # Panics
    /// Panics if `c >= cols`.
    #[must_use]
    pub fn column(&self, c: usize) -> BinaryVector {
        assert!(c < self.cols, "column {c} out of range {}", self.cols);
        let mut v = BinaryVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    #[must_use]
    pub fn row_vectors(&self) -> Vec<BinaryVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    #[must_use]
    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let base = r * self.stride;
            for wi in 0..self.stride {
                let mut w = self.bits[base + wi];
                while w != 0 {
                    let c = wi * WORD_BITS + w.trailing_zeros() as usize;
                    t.set(c, r, true);
                    w &= w - 1;
                }
            }
        }
        t
    }

    /// GF(2) product. Entry (i,j) is the parity of the overlap of row i of
    /// `self` with column j of `other`.
    pub fn multiply(&self, other: &BinaryMatrix) -> Result<BinaryMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let base = i * self.stride;
            let obase = i * out.stride;
            for wi in 0..self.stride {
                let mut w = self.bits[base + wi];
                while w != 0 {
                    let k = wi * WORD_BITS + w.trailing_zeros() as usize;
                    let kbase = k * other.stride;
                    for ow in 0..out.stride {
                        out.bits[obase + ow] ^= other.bits[kbase + ow];
                    }
                    w &= w - 1;
                }
            }
        }
        Ok(out)
    }

    /// GF(2) row rank. The input is copied; `self` is never modified.
    #[must_use]
    pub fn rank(&self) -> usize {
        let mut elim = Eliminator::new(self.cols);
        for r in 0..self.rows {
            elim.insert(self.row(r));
        }
        elim.rank()
    }

    /// Rows form a basis of the right nullspace {v : self . v^T = 0}.
    /// Row count is always `cols - rank`.
    #[must_use]
    pub fn nullspace_basis(&self) -> BinaryMatrix {
        let (reduced, pivots) = self.row_reduce();
        let pivot_set: Vec<Option<usize>> = {
            let mut s = vec![None; self.cols];
            for (ri, &p) in pivots.iter().enumerate() {
                s[p] = Some(ri);
            }
            s
        };
        let mut basis_rows = Vec::with_capacity(self.cols - pivots.len());
        for fc in 0..self.cols {
            if pivot_set[fc].is_some() {
                continue;
            }
            let mut v = BinaryVector::zeros(self.cols);
            v.set(fc, true);
            for (ri, &p) in pivots.iter().enumerate() {
                if reduced[ri].get(fc) {
                    v.set(p, true);
                }
            }
            basis_rows.push(v);
        }
        BinaryMatrix::from_rows(&basis_rows, self.cols)
    }

    /// True iff `v` is a GF(2) combination of the rows of `self`.
    pub fn in_rowspace(&self, v: &BinaryVector) -> Result<bool, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                got: v.len(),
                expected: self.cols,
            });
        }
        let mut elim = Eliminator::new(self.cols);
        for r in 0..self.rows {
            elim.insert(self.row(r));
        }
        Ok(elim.contains(v))
    }

    /// Apply `self` to a vector: returns `self . v^T` as a vector of length `rows`.
    pub fn apply(&self, v: &BinaryVector) -> Result<BinaryVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::LengthMismatch {
                got: v.len(),
                expected: self.cols,
            });
        }
        let mut out = BinaryVector::zeros(self.rows);
        for r in 0..self.rows {
            let base = r * self.stride;
            let mut acc = 0u64;
            for (wi, w) in v.words().iter().enumerate() {
                acc ^= self.bits[base + wi] & w;
            }
            if acc.count_ones() & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Standard form `[I | A']` of the pivot rows plus the column permutation
    /// that produced it. `perm[new_col] = old_col`; the first `rank` entries
    /// are the pivot columns in elimination order.
    #[must_use]
    pub fn rref_with_column_permutation(&self) -> (BinaryMatrix, Vec<usize>) {
        let (reduced, pivots) = self.row_reduce();
        let mut perm: Vec<usize> = pivots.clone();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        perm.extend((0..self.cols).filter(|c| !pivot_set.contains(c)));
        let mut out = Self::zeros(pivots.len(), self.cols);
        for (ri, row) in reduced.iter().enumerate() {
            for (new_c, &old_c) in perm.iter().enumerate() {
                if row.get(old_c) {
                    out.set(ri, new_c, true);
                }
            }
        }
        (out, perm)
    }

    /// Reduced row echelon form. Returns the nonzero reduced rows and their
    /// pivot columns (ascending scan order, fully back-substituted).
    pub(crate) fn row_reduce(&self) -> (Vec<BinaryVector>, Vec<usize>) {
        let mut elim = Eliminator::new(self.cols);
        for r in 0..self.rows {
            elim.insert(self.row(r));
        }
        elim.into_rref()
    }
}

impl std::fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
}

impl Serialize for BinaryMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            row_support: (0..self.rows).map(|r| self.row(r).support()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinaryMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.row_support.len() != repr.rows {
            return Err(D::Error::custom(format!(
                "{} support rows, header says {}",
                repr.row_support.len(),
                repr.rows
            )));
        }
        let mut m = BinaryMatrix::zeros(repr.rows, repr.cols);
        for (r, support) in repr.row_support.iter().enumerate() {
            for &c in support {
                if c >= repr.cols {
                    return Err(D::Error::custom(format!(
                        "support index {c} out of range {} in row {r}",
                        repr.cols
                    )));
                }
                if m.get(r, c) {
                    return Err(D::Error::custom(format!(
                        "duplicate support index {c} in row {r}"
                    )));
                }
                m.set(r, c, true);
            }
        }
        Ok(m)
    }
}

/// Incremental GF(2) row reducer: feed rows one at a time, query membership.
///
/// Maintains rows in fully reduced form keyed by pivot column, so `reduce`
/// is a single sweep. Used wherever many membership tests hit one matrix.
#[derive(Clone)]
pub struct Eliminator {
    ncols: usize,
    by_pivot: Vec<Option<BinaryVector>>,
    pivot_mask: Vec<u64>,
    rank: usize,
}

impl Eliminator {
    #[must_use]
    pub fn new(ncols: usize) -> Self {
        Eliminator {
            ncols,
            by_pivot: vec![None; ncols],
            pivot_mask: vec![0; words_for(ncols)],
            rank: 0,
        }
    }

    #[must_use]
    pub fn from_matrix(m: &BinaryMatrix) -> Self {
        let mut e = Self::new(m.cols());
        for r in 0..m.rows() {
            e.insert(m.row(r));
        }
        e
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[must_use]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Reduce `v` by the stored basis in place. Afterwards `v` has no set
    /// bit at any pivot column, so a zero result means membership.
    ///
    /// # Panics
    /// Panics on length mismatch.
    pub fn reduce(&self, v: &mut BinaryVector) {
        assert_eq!(v.len(), self.ncols, "eliminator width mismatch");
        // stored rows carry exactly one pivot bit each, so every round
        // clears one pivot bit from v and never introduces another
        loop {
            let mut hit = None;
            for (wi, (vw, mw)) in v.words().iter().zip(&self.pivot_mask).enumerate() {
                let overlap = vw & mw;
                if overlap != 0 {
                    hit = Some(wi * WORD_BITS + overlap.trailing_zeros() as usize);
                    break;
                }
            }
            match hit {
                Some(p) => {
                    let row = self.by_pivot[p].as_ref().expect("masked pivot present");
                    v.xor_assign(row);
                }
                None => break,
            }
        }
    }

    /// Insert a row; returns true iff it was independent of the basis so far.
    pub fn insert(&mut self, mut v: BinaryVector) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.leading_bit() else {
            return false;
        };
        // keep stored rows fully reduced against the newcomer
        for row in self.by_pivot.iter_mut().flatten() {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.by_pivot[p] = Some(v);
        self.pivot_mask[p / WORD_BITS] |= 1 << (p % WORD_BITS);
        self.rank += 1;
        true
    }

    #[must_use]
    pub fn contains(&self, v: &BinaryVector) -> bool {
        let mut copy = v.clone();
        self.reduce(&mut copy);
        copy.is_zero()
    }

    /// Consume into RREF rows plus their pivot columns, ascending by pivot.
    pub(crate) fn into_rref(self) -> (Vec<BinaryVector>, Vec<usize>) {
        let mut rows = Vec::with_capacity(self.rank);
        let mut pivots = Vec::with_capacity(self.rank);
        for (p, slot) in self.by_pivot.into_iter().enumerate() {
            if let Some(row) = slot {
                rows.push(row);
                pivots.push(p);
            }
        }
        (rows, pivots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force rank: size of the row span is 2^rank.
    fn rank_oracle(m: &BinaryMatrix) -> usize {
        let rows = m.row_vectors();
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..1 << rows.len() {
            let mut v = BinaryVector::zeros(m.cols());
            for (i, row) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v.xor_assign(row);
                }
            }
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    fn multiply_oracle(a: &BinaryMatrix, b: &BinaryMatrix) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = false;
                for k in 0..a.cols() {
                    acc ^= a.get(i, k) & b.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    fn matrix_from_mask(rows: usize, cols: usize, mask: u32) -> BinaryMatrix {
        let mut m = BinaryMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if mask >> (r * cols + c) & 1 == 1 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    #[test]
    fn identity_multiply() {
        let i3 = BinaryMatrix::identity(3);
        assert_eq!(i3.multiply(&i3).unwrap(), i3);
    }

    #[test]
    fn multiply_dimension_mismatch() {
        let a = BinaryMatrix::zeros(2, 3);
        let b = BinaryMatrix::zeros(2, 3);
        assert!(matches!(
            a.multiply(&b),
            Err(Gf2Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn column_parity_via_all_ones_vector() {
        let a = BinaryMatrix::from_dense(&[
            vec![1, 0, 1, 1, 0, 0, 1],
            vec![0, 1, 1, 0, 0, 1, 0],
            vec![1, 1, 1, 1, 1, 1, 1],
            vec![0, 0, 0, 0, 0, 0, 0],
            vec![1, 0, 0, 0, 0, 0, 0],
        ]);
        let ones = BinaryVector::from_bits(&[1; 7]);
        let got = a.apply(&ones).unwrap();
        for r in 0..5 {
            assert_eq!(got.get(r), a.row(r).weight() % 2 == 1);
        }
    }

    #[test]
    fn rank_small_exhaustive() {
        // all matrices up to 3x3 against the span-size oracle; the full 4x4
        // sweep lives in the acceptance suite
        for rows in 1..=3usize {
            for cols in 1..=3usize {
                for mask in 0u32..1 << (rows * cols) {
                    let m = matrix_from_mask(rows, cols, mask);
                    assert_eq!(m.rank(), rank_oracle(&m), "rank mismatch on {m:?}");
                }
            }
        }
    }

    #[test]
    fn rank_zero_and_identity() {
        assert_eq!(BinaryMatrix::zeros(4, 4).rank(), 0);
        assert_eq!(BinaryMatrix::identity(5).rank(), 5);
    }

    #[test]
    fn nullspace_dimension_and_orthogonality() {
        for rows in 1..=3usize {
            for cols in 1..=3usize {
                for mask in 0u32..1 << (rows * cols) {
                    let m = matrix_from_mask(rows, cols, mask);
                    let ns = m.nullspace_basis();
                    assert_eq!(ns.rows(), cols - m.rank());
                    assert_eq!(ns.rank(), ns.rows(), "basis rows must be independent");
                    if ns.rows() > 0 {
                        let prod = m.multiply(&ns.transpose()).unwrap();
                        assert!(prod.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(BinaryMatrix::identity(3).nullspace_basis().rows(), 0);
        let rep = BinaryMatrix::from_dense(&[vec![1, 1]]);
        let ns = rep.nullspace_basis();
        assert_eq!(ns.rows(), 1);
        assert_eq!(ns.row(0), BinaryVector::from_bits(&[1, 1]));
    }

    #[test]
    fn in_rowspace_cases() {
        let a = BinaryMatrix::from_dense(&[vec![1, 1, 0]]);
        assert!(a.in_rowspace(&BinaryVector::zeros(3)).unwrap());
        assert!(!a.in_rowspace(&BinaryVector::from_bits(&[0, 1, 1])).unwrap());
        assert!(a
            .in_rowspace(&BinaryVector::from_bits(&[1, 1]))
            .is_err());
        let i2 = BinaryMatrix::identity(2);
        assert!(i2.in_rowspace(&BinaryVector::from_bits(&[1, 1])).unwrap());
    }

    #[test]
    fn in_rowspace_matches_enumeration() {
        for mask in 0u32..1 << 9 {
            let m = matrix_from_mask(3, 3, mask);
            let rows = m.row_vectors();
            for vmask in 0u32..1 << 3 {
                let v = BinaryVector::from_bits(&[
                    (vmask & 1) as u8,
                    (vmask >> 1 & 1) as u8,
                    (vmask >> 2 & 1) as u8,
                ]);
                let mut found = false;
                for combo in 0u32..1 << 3 {
                    let mut acc = BinaryVector::zeros(3);
                    for (i, row) in rows.iter().enumerate() {
                        if combo >> i & 1 == 1 {
                            acc.xor_assign(row);
                        }
                    }
                    if acc == v {
                        found = true;
                        break;
                    }
                }
                assert_eq!(m.in_rowspace(&v).unwrap(), found);
            }
        }
    }

    #[test]
    fn multiply_matches_oracle_exhaustive_2x2() {
        for amask in 0u32..16 {
            for bmask in 0u32..16 {
                let a = matrix_from_mask(2, 2, amask);
                let b = matrix_from_mask(2, 2, bmask);
                assert_eq!(a.multiply(&b).unwrap(), multiply_oracle(&a, &b));
            }
        }
    }

    #[test]
    fn rref_identity_and_forced_swap() {
        let (r, p) = BinaryMatrix::identity(4).rref_with_column_permutation();
        assert_eq!(r, BinaryMatrix::identity(4));
        assert_eq!(p, vec![0, 1, 2, 3]);

        let m = BinaryMatrix::from_dense(&[vec![0, 1], vec![0, 1]]);
        let (r, p) = m.rref_with_column_permutation();
        assert_eq!(r.rows(), 1);
        assert_eq!(p, vec![1, 0]);
        assert!(r.get(0, 0));
        assert!(!r.get(0, 1));
    }

    #[test]
    fn rref_standard_form_shape() {
        for mask in 0u32..1 << 12 {
            let m = matrix_from_mask(3, 4, mask);
            let (r, perm) = m.rref_with_column_permutation();
            let rank = m.rank();
            assert_eq!(r.rows(), rank);
            // leading block is the identity
            for i in 0..rank {
                for j in 0..rank {
                    assert_eq!(r.get(i, j), i == j, "not standard form: {m:?}");
                }
            }
            // permutation is a bijection
            let mut seen = vec![false; 4];
            for &c in &perm {
                assert!(!seen[c]);
                seen[c] = true;
            }
            // permuted original rows span the same space as r's rows
            let mut permuted = BinaryMatrix::zeros(m.rows(), m.cols());
            for i in 0..m.rows() {
                for (newc, &oldc) in perm.iter().enumerate() {
                    if m.get(i, oldc) {
                        permuted.set(i, newc, true);
                    }
                }
            }
            let elim = Eliminator::from_matrix(&permuted);
            assert_eq!(elim.rank(), rank);
            for i in 0..rank {
                assert!(elim.contains(&r.row(i)));
            }
        }
    }

    #[test]
    fn rank_invariance_under_row_ops() {
        let m = BinaryMatrix::from_dense(&[
            vec![1, 0, 1, 1],
            vec![0, 1, 1, 0],
            vec![1, 1, 0, 1],
        ]);
        let base = m.rank();
        // row permutation
        let perm = BinaryMatrix::from_rows(&[m.row(2), m.row(0), m.row(1)], 4);
        assert_eq!(perm.rank(), base);
        // row addition
        let mut r0 = m.row(0);
        r0.xor_assign(&m.row(1));
        let added = BinaryMatrix::from_rows(&[r0, m.row(1), m.row(2)], 4);
        assert_eq!(added.rank(), base);
        // column permutation
        let mut colperm = BinaryMatrix::zeros(3, 4);
        let cmap = [3, 1, 0, 2];
        for r in 0..3 {
            for c in 0..4 {
                if m.get(r, cmap[c]) {
                    colperm.set(r, c, true);
                }
            }
        }
        assert_eq!(colperm.rank(), base);
    }

    #[test]
    fn transpose_involution() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn vector_support_round_trip() {
        let v = BinaryVector::from_support(130, &[0, 63, 64, 127, 129]);
        assert_eq!(v.support(), vec![0, 63, 64, 127, 129]);
        assert_eq!(v.weight(), 5);
        assert_eq!(v.leading_bit(), Some(0));
    }

    #[test]
    fn serde_round_trips() {
        let m = BinaryMatrix::from_dense(&[vec![1, 0, 1], vec![0, 0, 0], vec![0, 1, 1]]);
        let back: BinaryMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let v = BinaryVector::from_support(70, &[0, 64, 69]);
        let back: BinaryVector = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(back, v);
        // out-of-range and duplicate support entries are rejected
        assert!(serde_json::from_str::<BinaryVector>(r#"{"len":3,"support":[3]}"#).is_err());
        assert!(serde_json::from_str::<BinaryVector>(r#"{"len":3,"support":[1,1]}"#).is_err());
    }

    #[test]
    fn eliminator_tracks_rank() {
        let mut e = Eliminator::new(4);
        assert!(e.insert(BinaryVector::from_bits(&[1, 1, 0, 0])));
        assert!(e.insert(BinaryVector::from_bits(&[0, 1, 1, 0])));
        assert!(!e.insert(BinaryVector::from_bits(&[1, 0, 1, 0])));
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&BinaryVector::from_bits(&[1, 0, 1, 0])));
        assert!(!e.contains(&BinaryVector::from_bits(&[1, 0, 0, 1])));
    }
}
