//! Lifted-product construction over the circulant algebra.
//!
//! Two classical quasi-cyclic base matrices combine into an orthogonal pair
//! of quantum parity-check base matrices
//!
//!   bx = [ B1 (x) I_{n2} | I_{m1} (x) B2* ]
//!   bz = [ I_{n1} (x) B2 | B1* (x) I_{m2} ]
//!
//! where the Kronecker products are taken block-symbolically: an identity
//! factor contributes shift 0 on its diagonal and the zero block elsewhere.
//! Everything stays in exponent form until a single lift at the end, which
//! keeps screening cheap and preserves the (block, cell) bookkeeping the
//! partition-constraint machinery needs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::base::{exponent_difference, has_even_multiplicity, CpmExponent, QcBaseMatrix};
use crate::gf2::BinaryMatrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProductError {
    #[error("circulant sizes differ: {0} vs {1}")]
    LiftSizeMismatch(u32, u32),
}

/// Column bookkeeping for a lifted-product pair. Columns split into a code
/// part addressed by (block, cell) over [n1] x [n2] and a transpose part
/// over [m1] x [m2]; each block-column expands to L bits under lifting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub lift_size: u32,
    pub code_blocks: usize,
    pub code_cells: usize,
    pub transpose_blocks: usize,
    pub transpose_cells: usize,
}

impl BlockLayout {
    #[must_use]
    pub fn block_cols(&self) -> usize {
        self.code_blocks * self.code_cells + self.transpose_blocks * self.transpose_cells
    }

    #[must_use]
    pub fn bit_len(&self) -> usize {
        self.lift_size as usize * self.block_cols()
    }

    /// # Panics
    /// Panics if out of range.
    #[must_use]
    pub fn code_col(&self, block: usize, cell: usize) -> usize {
        assert!(block < self.code_blocks && cell < self.code_cells);
        block * self.code_cells + cell
    }

    /// # Panics
    /// Panics if out of range.
    #[must_use]
    pub fn transpose_col(&self, block: usize, cell: usize) -> usize {
        assert!(block < self.transpose_blocks && cell < self.transpose_cells);
        self.code_blocks * self.code_cells + block * self.transpose_cells + cell
    }

    /// Bit position of `offset` within a block column after lifting.
    ///
    /// # Panics
    /// Panics if out of range.
    #[must_use]
    pub fn bit_index(&self, block_col: usize, offset: u32) -> usize {
        assert!(block_col < self.block_cols() && offset < self.lift_size);
        block_col * self.lift_size as usize + offset as usize
    }
}

/// The X/Z base-matrix pair produced by the lifted product, still in
/// exponent form, together with its sources.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpBasePair {
    pub bx: QcBaseMatrix,
    pub bz: QcBaseMatrix,
    /// Source matrices (b1, b2); equal for the symmetric construction.
    pub source: (QcBaseMatrix, QcBaseMatrix),
    pub symmetric: bool,
}

impl LpBasePair {
    #[must_use]
    pub fn layout(&self) -> BlockLayout {
        let (b1, b2) = (&self.source.0, &self.source.1);
        BlockLayout {
            lift_size: b1.lift_size(),
            code_blocks: b1.cols(),
            code_cells: b2.cols(),
            transpose_blocks: b1.rows(),
            transpose_cells: b2.rows(),
        }
    }

    #[must_use]
    pub fn lift_x(&self) -> BinaryMatrix {
        self.bx.lift()
    }

    #[must_use]
    pub fn lift_z(&self) -> BinaryMatrix {
        self.bz.lift()
    }
}

pub fn build_general(
    b1: &QcBaseMatrix,
    b2: &QcBaseMatrix,
) -> Result<LpBasePair, ProductError> {
    let l = b1.lift_size();
    if l != b2.lift_size() {
        return Err(ProductError::LiftSizeMismatch(l, b2.lift_size()));
    }
    let (m1, n1) = (b1.rows(), b1.cols());
    let (m2, n2) = (b2.rows(), b2.cols());
    let b1star = b1.conjugate_transpose();
    let b2star = b2.conjugate_transpose();
    let layout = BlockLayout {
        lift_size: l,
        code_blocks: n1,
        code_cells: n2,
        transpose_blocks: m1,
        transpose_cells: m2,
    };
    let cols = layout.block_cols();

    let mut bx = vec![CpmExponent::NegInf; m1 * n2 * cols];
    for i in 0..m1 {
        for t in 0..n2 {
            let row = i * n2 + t;
            for j in 0..n1 {
                bx[row * cols + layout.code_col(j, t)] = b1.get(i, j);
            }
            for s in 0..m2 {
                bx[row * cols + layout.transpose_col(i, s)] = b2star.get(t, s);
            }
        }
    }

    let mut bz = vec![CpmExponent::NegInf; n1 * m2 * cols];
    for j in 0..n1 {
        for s in 0..m2 {
            let row = j * m2 + s;
            for c in 0..n2 {
                bz[row * cols + layout.code_col(j, c)] = b2.get(s, c);
            }
            for q in 0..m1 {
                bz[row * cols + layout.transpose_col(q, s)] = b1star.get(j, q);
            }
        }
    }

    Ok(LpBasePair {
        bx: QcBaseMatrix::new(l, m1 * n2, cols, bx).expect("valid by construction"),
        bz: QcBaseMatrix::new(l, n1 * m2, cols, bz).expect("valid by construction"),
        source: (b1.clone(), b2.clone()),
        symmetric: false,
    })
}

#[must_use]
pub fn build_symmetric(b: &QcBaseMatrix) -> LpBasePair {
    let mut pair = build_general(b, b).expect("equal lift sizes");
    pair.symmetric = true;
    pair
}

/// Orthogonality checked the expensive way: lift both sides and multiply.
#[must_use]
pub fn verify_orthogonality_binary(p: &LpBasePair) -> bool {
    let hx = p.lift_x();
    let hz = p.lift_z();
    match hx.multiply(&hz.transpose()) {
        Ok(prod) => prod.is_zero(),
        Err(_) => false,
    }
}

/// Orthogonality checked row pair by row pair in exponent space: lifted
/// rows are orthogonal exactly when their exponent difference vector has
/// even multiplicity.
#[must_use]
pub fn verify_orthogonality_exponent(p: &LpBasePair) -> bool {
    if p.bx.cols() != p.bz.cols() || p.bx.lift_size() != p.bz.lift_size() {
        return false;
    }
    let l = p.bx.lift_size();
    for i in 0..p.bx.rows() {
        let rx = p.bx.row_entries(i);
        for j in 0..p.bz.rows() {
            let rz = p.bz.row_entries(j);
            let diff: Vec<CpmExponent> = rx
                .iter()
                .zip(rz)
                .map(|(&a, &b)| exponent_difference(a, b, l))
                .collect();
            if !has_even_multiplicity(&diff) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn ex1_base() -> QcBaseMatrix {
        QcBaseMatrix::from_shift_rows(7, &[vec![1, 2, 4], vec![6, 5, 3]]).unwrap()
    }

    /// Rows of space-separated exponents with "." for the zero block.
    fn grid(lift_size: u32, rows: &[&str]) -> QcBaseMatrix {
        let parsed: Vec<Vec<CpmExponent>> = rows
            .iter()
            .map(|r| {
                r.split_whitespace()
                    .map(|tok| {
                        if tok == "." {
                            CpmExponent::NegInf
                        } else {
                            CpmExponent::Shift(tok.parse().unwrap())
                        }
                    })
                    .collect()
            })
            .collect();
        QcBaseMatrix::from_entry_rows(lift_size, &parsed).unwrap()
    }

    #[test]
    fn symmetric_pair_matches_published_layout() {
        let pair = build_symmetric(&ex1_base());
        let expected_bx = grid(
            7,
            &[
                "1 . . 2 . . 4 . . 6 1 . .",
                ". 1 . . 2 . . 4 . 5 2 . .",
                ". . 1 . . 2 . . 4 3 4 . .",
                "6 . . 5 . . 3 . . . . 6 1",
                ". 6 . . 5 . . 3 . . . 5 2",
                ". . 6 . . 5 . . 3 . . 3 4",
            ],
        );
        let expected_bz = grid(
            7,
            &[
                "1 2 4 . . . . . . 6 . 1 .",
                "6 5 3 . . . . . . . 6 . 1",
                ". . . 1 2 4 . . . 5 . 2 .",
                ". . . 6 5 3 . . . . 5 . 2",
                ". . . . . . 1 2 4 3 . 4 .",
                ". . . . . . 6 5 3 . 3 . 4",
            ],
        );
        assert_eq!(pair.bx, expected_bx);
        assert_eq!(pair.bz, expected_bz);
        assert!(pair.symmetric);
    }

    #[test]
    fn example_dimensions_and_orthogonality() {
        let pair = build_symmetric(&ex1_base());
        let hx = pair.lift_x();
        let hz = pair.lift_z();
        // L(n^2+m^2) columns, L*n*m rows
        assert_eq!((hx.rows(), hx.cols()), (42, 91));
        assert_eq!((hz.rows(), hz.cols()), (42, 91));
        assert!(verify_orthogonality_binary(&pair));
        assert!(verify_orthogonality_exponent(&pair));
    }

    #[test]
    fn stabilizer_row_weights_are_m_plus_n() {
        let b =
            QcBaseMatrix::from_shift_rows(26, &[vec![0; 4], vec![0, 6, 4, 10], vec![0, 8, 14, 22]])
                .unwrap();
        let pair = build_symmetric(&b);
        for h in [pair.lift_x(), pair.lift_z()] {
            for r in 0..h.rows() {
                assert_eq!(h.row(r).weight(), 7);
            }
        }
    }

    #[test]
    fn lifted_column_weights_split_by_part() {
        let pair = build_symmetric(&ex1_base());
        let layout = pair.layout();
        let l = layout.lift_size as usize;
        for h in [pair.lift_x(), pair.lift_z()] {
            for c in 0..h.cols() {
                let expected = if c < layout.code_blocks * layout.code_cells * l {
                    2 // m checks touch each code-part qubit
                } else {
                    3 // n checks touch each transpose-part qubit
                };
                assert_eq!(h.column(c).weight(), expected, "col {c}");
            }
        }
    }

    #[test]
    fn bz_code_part_is_blockwise_base_copy() {
        let b =
            QcBaseMatrix::from_shift_rows(26, &[vec![0; 4], vec![0, 6, 4, 10], vec![0, 8, 14, 22]])
                .unwrap();
        let (m, n) = (b.rows(), b.cols());
        let pair = build_symmetric(&b);
        let layout = pair.layout();
        for j in 0..n {
            for s in 0..m {
                let row = j * m + s;
                for jj in 0..n {
                    for c in 0..n {
                        let got = pair.bz.get(row, layout.code_col(jj, c));
                        let want = if jj == j { b.get(s, c) } else { CpmExponent::NegInf };
                        assert_eq!(got, want);
                    }
                }
            }
        }
    }

    #[test]
    fn bx_transpose_part_is_blockwise_conjugate_copy() {
        let b =
            QcBaseMatrix::from_shift_rows(26, &[vec![0; 4], vec![0, 6, 4, 10], vec![0, 8, 14, 22]])
                .unwrap();
        let bstar = b.conjugate_transpose();
        let (m, n) = (b.rows(), b.cols());
        let pair = build_symmetric(&b);
        let layout = pair.layout();
        for i in 0..m {
            for t in 0..n {
                let row = i * n + t;
                for q in 0..m {
                    for s in 0..m {
                        let got = pair.bx.get(row, layout.transpose_col(q, s));
                        let want = if q == i { bstar.get(t, s) } else { CpmExponent::NegInf };
                        assert_eq!(got, want);
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_lift_size_one() {
        let b = QcBaseMatrix::from_shift_rows(1, &[vec![0]]).unwrap();
        let pair = build_general(&b, &b).unwrap();
        assert_eq!(pair.lift_x(), BinaryMatrix::from_dense(&[vec![1, 1]]));
        assert_eq!(pair.lift_z(), BinaryMatrix::from_dense(&[vec![1, 1]]));
        assert!(verify_orthogonality_binary(&pair));
        assert!(verify_orthogonality_exponent(&pair));
    }

    #[test]
    fn single_entry_lift_size_two() {
        let b = QcBaseMatrix::from_shift_rows(2, &[vec![0]]).unwrap();
        let pair = build_symmetric(&b);
        let hx = pair.lift_x();
        assert_eq!((hx.rows(), hx.cols()), (2, 4));
        assert!(verify_orthogonality_binary(&pair));
    }

    #[test]
    fn perturbed_pair_fails_both_checks() {
        let mut pair = build_symmetric(&ex1_base());
        let mut rows: Vec<Vec<CpmExponent>> = (0..pair.bx.rows())
            .map(|r| pair.bx.row_entries(r).to_vec())
            .collect();
        let bumped = match rows[0][0] {
            CpmExponent::Shift(s) => CpmExponent::Shift((s + 1) % 7),
            CpmExponent::NegInf => CpmExponent::Shift(0),
        };
        rows[0][0] = bumped;
        pair.bx = QcBaseMatrix::from_entry_rows(7, &rows).unwrap();
        assert!(!verify_orthogonality_binary(&pair));
        assert!(!verify_orthogonality_exponent(&pair));
    }

    #[test]
    fn lift_size_mismatch_rejected() {
        let a = QcBaseMatrix::from_shift_rows(3, &[vec![0]]).unwrap();
        let b = QcBaseMatrix::from_shift_rows(4, &[vec![0]]).unwrap();
        assert_eq!(
            build_general(&a, &b),
            Err(ProductError::LiftSizeMismatch(3, 4))
        );
    }

    #[test]
    fn orthogonality_checks_agree_on_random_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        for _ in 0..30 {
            let l = rng.gen_range(2..=16u32);
            let m1 = rng.gen_range(2..=4usize);
            let n1 = rng.gen_range(2..=4usize);
            let m2 = rng.gen_range(2..=4usize);
            let n2 = rng.gen_range(2..=4usize);
            let random_base = |rng: &mut ChaCha20Rng, m: usize, n: usize| {
                let entries = (0..m * n)
                    .map(|_| CpmExponent::Shift(rng.gen_range(0..l)))
                    .collect();
                QcBaseMatrix::new(l, m, n, entries).unwrap()
            };
            let b1 = random_base(&mut rng, m1, n1);
            let b2 = random_base(&mut rng, m2, n2);
            let pair = build_general(&b1, &b2).unwrap();
            assert!(verify_orthogonality_binary(&pair));
            assert!(verify_orthogonality_exponent(&pair));
        }
    }

    #[test]
    fn general_pair_block_layout_addressing() {
        let b1 = QcBaseMatrix::from_shift_rows(5, &[vec![0, 1, 2], vec![3, 4, 0]]).unwrap();
        let b2 = QcBaseMatrix::from_shift_rows(5, &[vec![1, 2], vec![0, 3], vec![4, 4]]).unwrap();
        let pair = build_general(&b1, &b2).unwrap();
        let layout = pair.layout();
        assert_eq!(layout.code_blocks, 3);
        assert_eq!(layout.code_cells, 2);
        assert_eq!(layout.transpose_blocks, 2);
        assert_eq!(layout.transpose_cells, 3);
        assert_eq!(layout.block_cols(), 12);
        assert_eq!(layout.bit_len(), 60);
        assert_eq!(pair.bx.rows(), 4); // m1 * n2
        assert_eq!(pair.bz.rows(), 9); // n1 * m2
        assert_eq!(pair.bx.cols(), 12);
        assert!(verify_orthogonality_binary(&pair));
        assert!(verify_orthogonality_exponent(&pair));
        // bit_index places offsets inside the lifted block column
        assert_eq!(layout.bit_index(0, 0), 0);
        assert_eq!(layout.bit_index(1, 3), 8);
    }
}
