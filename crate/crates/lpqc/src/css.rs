//! CSS code assembly: parameters, logical operator bases, and vector
//! classification against the stabilizer group.

use num_bigint::BigUint;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::gf2::{BinaryMatrix, BinaryVector, Eliminator};
use crate::product::LpBasePair;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CssError {
    #[error("parity checks act on different qubit counts: {0} vs {1}")]
    ColumnMismatch(usize, usize),
    #[error("parity checks not orthogonal: hx row {hx_row} anticommutes with hz row {hz_row}")]
    NotOrthogonal { hx_row: usize, hz_row: usize },
    #[error("vector length {got} does not match qubit count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("logical bases do not pair up invertibly")]
    DegeneratePairing,
    #[error("stored logical basis fails invariant: {0}")]
    InvalidLogicalBasis(&'static str),
}

/// Where a binary vector sits relative to one side of a CSS code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VectorClass {
    /// Violates at least one check of the opposing parity-check matrix.
    NotCodeword,
    /// Zero syndrome and inside the same-side stabilizer rowspace.
    Stabilizer,
    /// Zero syndrome but outside the stabilizer rowspace.
    Logical,
}

/// A CSS stabilizer code with paired logical operator bases.
///
/// Immutable after construction; the membership eliminators are built once
/// so classification is cheap.
#[derive(Clone)]
pub struct CssCode {
    hx: BinaryMatrix,
    hz: BinaryMatrix,
    n_qubits: usize,
    k_logical: usize,
    lx: BinaryMatrix,
    lz: BinaryMatrix,
    /// Set when the code is quasi-cyclic with this circulant size; the
    /// distance search uses it to restrict enumeration to shift-orbit
    /// representatives.
    circulant_size: Option<u32>,
    hx_space: Eliminator,
    hz_space: Eliminator,
}

impl CssCode {
    /// Build from an orthogonal pair of parity-check matrices, deriving K
    /// and paired logical bases.
    pub fn from_pcms(hx: BinaryMatrix, hz: BinaryMatrix) -> Result<Self, CssError> {
        if hx.cols() != hz.cols() {
            return Err(CssError::ColumnMismatch(hx.cols(), hz.cols()));
        }
        check_orthogonal(&hx, &hz)?;

        let n_qubits = hx.cols();
        let hx_space = Eliminator::from_matrix(&hx);
        let hz_space = Eliminator::from_matrix(&hz);
        let k_logical = n_qubits - hx_space.rank() - hz_space.rank();

        // logical X representatives: kernel vectors of hz that are
        // independent modulo the X-stabilizer rowspace
        let lx_raw = quotient_basis(&hz.nullspace_basis(), &hx_space);
        let lz_raw = quotient_basis(&hx.nullspace_basis(), &hz_space);
        debug_assert_eq!(lx_raw.len(), k_logical);
        debug_assert_eq!(lz_raw.len(), k_logical);

        let lx = BinaryMatrix::from_rows(&lx_raw, n_qubits);
        // change of basis on the Z side so that lz . lx^T = I_K
        let overlap = pairing_matrix(&lz_raw, &lx_raw);
        let inv = invert(&overlap).ok_or(CssError::DegeneratePairing)?;
        let lz = inv.multiply(&BinaryMatrix::from_rows(&lz_raw, n_qubits))
            .expect("dimensions agree");

        Ok(CssCode {
            hx,
            hz,
            n_qubits,
            k_logical,
            lx,
            lz,
            circulant_size: None,
            hx_space,
            hz_space,
        })
    }

    /// Build from a lifted-product pair, tagging the circulant size.
    pub fn from_lp_pair(pair: &LpBasePair) -> Result<Self, CssError> {
        let mut code = Self::from_pcms(pair.lift_x(), pair.lift_z())?;
        code.circulant_size = Some(pair.bx.lift_size());
        Ok(code)
    }

    /// Rebuild from stored components, re-checking every invariant. Used
    /// when ingesting a serialized code.
    pub fn from_parts(
        hx: BinaryMatrix,
        hz: BinaryMatrix,
        lx: BinaryMatrix,
        lz: BinaryMatrix,
        circulant_size: Option<u32>,
    ) -> Result<Self, CssError> {
        if hx.cols() != hz.cols() {
            return Err(CssError::ColumnMismatch(hx.cols(), hz.cols()));
        }
        check_orthogonal(&hx, &hz)?;
        let n_qubits = hx.cols();
        let hx_space = Eliminator::from_matrix(&hx);
        let hz_space = Eliminator::from_matrix(&hz);
        let k_logical = n_qubits - hx_space.rank() - hz_space.rank();
        if lx.rows() != k_logical || lz.rows() != k_logical {
            return Err(CssError::InvalidLogicalBasis("row count differs from K"));
        }
        if lx.cols() != n_qubits || lz.cols() != n_qubits {
            return Err(CssError::InvalidLogicalBasis("column count differs from N"));
        }
        if !hz.multiply(&lx.transpose()).expect("checked").is_zero()
            || !hx.multiply(&lz.transpose()).expect("checked").is_zero()
        {
            return Err(CssError::InvalidLogicalBasis("not in the code kernel"));
        }
        let pairing = lz.multiply(&lx.transpose()).expect("checked");
        if pairing != BinaryMatrix::identity(k_logical) {
            return Err(CssError::InvalidLogicalBasis("pairing is not the identity"));
        }
        for r in 0..k_logical {
            if hx_space.contains(&lx.row(r)) || hz_space.contains(&lz.row(r)) {
                return Err(CssError::InvalidLogicalBasis("row is a stabilizer"));
            }
        }
        Ok(CssCode {
            hx,
            hz,
            n_qubits,
            k_logical,
            lx,
            lz,
            circulant_size,
            hx_space,
            hz_space,
        })
    }

    #[must_use]
    pub fn hx(&self) -> &BinaryMatrix {
        &self.hx
    }

    #[must_use]
    pub fn hz(&self) -> &BinaryMatrix {
        &self.hz
    }

    #[must_use]
    pub fn lx(&self) -> &BinaryMatrix {
        &self.lx
    }

    #[must_use]
    pub fn lz(&self) -> &BinaryMatrix {
        &self.lz
    }

    #[must_use]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[must_use]
    pub fn k_logical(&self) -> usize {
        self.k_logical
    }

    #[must_use]
    pub fn circulant_size(&self) -> Option<u32> {
        self.circulant_size
    }

    pub fn set_circulant_size(&mut self, l: Option<u32>) {
        self.circulant_size = l;
    }

    /// Classify an X-type error/operator: syndrome under hz, membership
    /// against the X stabilizers.
    pub fn classify_x_vector(&self, v: &BinaryVector) -> Result<VectorClass, CssError> {
        self.classify(v, &self.hz, &self.hx_space)
    }

    /// Mirror image: syndrome under hx, membership against Z stabilizers.
    pub fn classify_z_vector(&self, v: &BinaryVector) -> Result<VectorClass, CssError> {
        self.classify(v, &self.hx, &self.hz_space)
    }

    fn classify(
        &self,
        v: &BinaryVector,
        syndrome_side: &BinaryMatrix,
        stabilizer_space: &Eliminator,
    ) -> Result<VectorClass, CssError> {
        if v.len() != self.n_qubits {
            return Err(CssError::LengthMismatch {
                got: v.len(),
                expected: self.n_qubits,
            });
        }
        if !syndrome_side.apply(v).expect("length checked").is_zero() {
            return Ok(VectorClass::NotCodeword);
        }
        if stabilizer_space.contains(v) {
            Ok(VectorClass::Stabilizer)
        } else {
            Ok(VectorClass::Logical)
        }
    }

    /// Total count of logical codewords, 2^(N-K) * (4^K - 1). Report-only;
    /// grows astronomically for real codes, hence a big integer.
    #[must_use]
    pub fn logical_codeword_count_formula(&self) -> BigUint {
        let n = self.n_qubits;
        let k = self.k_logical;
        let four_k = BigUint::from(1u8) << (2 * k);
        (BigUint::from(1u8) << (n - k)) * (four_k - BigUint::from(1u8))
    }

    /// Short parameter string, with distance when the caller knows it.
    #[must_use]
    pub fn parameter_string(&self, distance: Option<u32>) -> String {
        match distance {
            Some(d) => format!("[[{}, {}, {}]]", self.n_qubits, self.k_logical, d),
            None => format!("[[{}, {}, ?]]", self.n_qubits, self.k_logical),
        }
    }
}

fn check_orthogonal(hx: &BinaryMatrix, hz: &BinaryMatrix) -> Result<(), CssError> {
    let prod = hx
        .multiply(&hz.transpose())
        .expect("column counts already checked");
    if prod.is_zero() {
        return Ok(());
    }
    for r in 0..prod.rows() {
        if let Some(c) = prod.row(r).leading_bit() {
            return Err(CssError::NotOrthogonal {
                hx_row: r,
                hz_row: c,
            });
        }
    }
    unreachable!("nonzero product has a nonzero row");
}

/// Rows of `candidates` that are independent modulo the span tracked by
/// `quotient`, in row order.
fn quotient_basis(candidates: &BinaryMatrix, quotient: &Eliminator) -> Vec<BinaryVector> {
    let mut elim = quotient.clone();
    let mut out = Vec::new();
    for r in 0..candidates.rows() {
        let row = candidates.row(r);
        if elim.insert(row.clone()) {
            out.push(row);
        }
    }
    out
}

fn pairing_matrix(lz: &[BinaryVector], lx: &[BinaryVector]) -> BinaryMatrix {
    let k = lz.len();
    let mut m = BinaryMatrix::zeros(k, k);
    for (i, zi) in lz.iter().enumerate() {
        for (j, xj) in lx.iter().enumerate() {
            if zi.dot(xj) {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// Inverse of a square GF(2) matrix via elimination on [M | I]; None when
/// singular.
fn invert(m: &BinaryMatrix) -> Option<BinaryMatrix> {
    let k = m.rows();
    if m.cols() != k {
        return None;
    }
    let mut elim = Eliminator::new(2 * k);
    for i in 0..k {
        let mut row = BinaryVector::zeros(2 * k);
        for j in 0..k {
            if m.get(i, j) {
                row.set(j, true);
            }
        }
        row.set(k + i, true);
        elim.insert(row);
    }
    let (rows, pivots) = elim.into_rref();
    // invertible iff the pivots are exactly the left half
    if pivots.len() < k || pivots.iter().take(k).enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    let mut inv = BinaryMatrix::zeros(k, k);
    for (i, row) in rows.iter().take(k).enumerate() {
        for j in 0..k {
            if row.get(k + j) {
                inv.set(i, j, true);
            }
        }
    }
    Some(inv)
}

#[derive(Serialize, Deserialize)]
struct CssCodeRepr {
    n: usize,
    k: usize,
    hx: BinaryMatrix,
    hz: BinaryMatrix,
    lx: BinaryMatrix,
    lz: BinaryMatrix,
    circulant_size: Option<u32>,
}

impl Serialize for CssCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CssCodeRepr {
            n: self.n_qubits,
            k: self.k_logical,
            hx: self.hx.clone(),
            hz: self.hz.clone(),
            lx: self.lx.clone(),
            lz: self.lz.clone(),
            circulant_size: self.circulant_size,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CssCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = CssCodeRepr::deserialize(deserializer)?;
        let code = CssCode::from_parts(repr.hx, repr.hz, repr.lx, repr.lz, repr.circulant_size)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        if code.n_qubits != repr.n || code.k_logical != repr.k {
            return Err(D::Error::custom(format!(
                "stored parameters [[{}, {}]] disagree with derived [[{}, {}]]",
                repr.n, repr.k, code.n_qubits, code.k_logical
            )));
        }
        Ok(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::QcBaseMatrix;
    use crate::product::build_symmetric;

    fn ex1_code() -> CssCode {
        let b = QcBaseMatrix::from_shift_rows(7, &[vec![1, 2, 4], vec![6, 5, 3]]).unwrap();
        CssCode::from_lp_pair(&build_symmetric(&b)).unwrap()
    }

    #[test]
    fn example_parameters_and_invariants() {
        let code = ex1_code();
        assert_eq!(code.n_qubits(), 91);
        assert_eq!(code.hx().rank(), 40);
        assert_eq!(code.hz().rank(), 40);
        assert_eq!(code.k_logical(), 11);
        assert_eq!(code.circulant_size(), Some(7));

        let k = code.k_logical();
        assert_eq!(
            code.lz().multiply(&code.lx().transpose()).unwrap(),
            BinaryMatrix::identity(k)
        );
        assert!(code.hz().multiply(&code.lx().transpose()).unwrap().is_zero());
        assert!(code.hx().multiply(&code.lz().transpose()).unwrap().is_zero());
        // kernel dimension splits into stabilizers plus logicals
        assert_eq!(
            code.n_qubits() - code.hz().rank(),
            code.hx().rank() + k
        );
    }

    #[test]
    fn larger_symmetric_codes_have_published_k() {
        let b2 = QcBaseMatrix::from_shift_rows(
            26,
            &[vec![0, 0, 0, 0], vec![0, 6, 4, 10], vec![0, 8, 14, 22]],
        )
        .unwrap();
        let code = CssCode::from_lp_pair(&build_symmetric(&b2)).unwrap();
        assert_eq!((code.n_qubits(), code.k_logical()), (650, 50));

        let b3 = QcBaseMatrix::from_shift_rows(
            13,
            &[
                vec![0, 0, 0, 0, 0],
                vec![0, 1, 11, 8, 9],
                vec![0, 4, 5, 6, 10],
                vec![0, 10, 6, 2, 12],
            ],
        )
        .unwrap();
        let code = CssCode::from_lp_pair(&build_symmetric(&b3)).unwrap();
        assert_eq!((code.n_qubits(), code.k_logical()), (533, 37));
    }

    #[test]
    fn classification_cases() {
        let code = ex1_code();
        let zero = BinaryVector::zeros(91);
        assert_eq!(code.classify_x_vector(&zero).unwrap(), VectorClass::Stabilizer);
        for r in 0..code.hx().rows() {
            assert_eq!(
                code.classify_x_vector(&code.hx().row(r)).unwrap(),
                VectorClass::Stabilizer
            );
            assert_eq!(
                code.classify_z_vector(&code.hz().row(r)).unwrap(),
                VectorClass::Stabilizer
            );
        }
        for r in 0..code.k_logical() {
            assert_eq!(
                code.classify_x_vector(&code.lx().row(r)).unwrap(),
                VectorClass::Logical
            );
            assert_eq!(
                code.classify_z_vector(&code.lz().row(r)).unwrap(),
                VectorClass::Logical
            );
        }
        // weight-1 vectors violate some check in a fully connected code
        let e0 = BinaryVector::from_support(91, &[0]);
        assert_eq!(code.classify_x_vector(&e0).unwrap(), VectorClass::NotCodeword);

        let short = BinaryVector::zeros(13);
        assert!(matches!(
            code.classify_x_vector(&short),
            Err(CssError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn classification_stable_under_stabilizer_addition() {
        let code = ex1_code();
        let mut v = code.lx().row(3);
        assert_eq!(code.classify_x_vector(&v).unwrap(), VectorClass::Logical);
        v.xor_assign(&code.hx().row(7));
        v.xor_assign(&code.hx().row(20));
        assert_eq!(code.classify_x_vector(&v).unwrap(), VectorClass::Logical);

        let mut s = code.hx().row(0);
        s.xor_assign(&code.hx().row(33));
        assert_eq!(code.classify_x_vector(&s).unwrap(), VectorClass::Stabilizer);
    }

    #[test]
    fn count_formula_values() {
        // N=2, K=1: single X check [1 1], no Z checks
        let hx = BinaryMatrix::from_dense(&[vec![1, 1]]);
        let hz = BinaryMatrix::zeros(0, 2);
        let code = CssCode::from_pcms(hx, hz).unwrap();
        assert_eq!((code.n_qubits(), code.k_logical()), (2, 1));
        assert_eq!(code.logical_codeword_count_formula(), BigUint::from(6u8));

        // K=0 code has no logical codewords
        let hx = BinaryMatrix::identity(2);
        let hz = BinaryMatrix::zeros(0, 2);
        let code = CssCode::from_pcms(hx, hz).unwrap();
        assert_eq!(code.k_logical(), 0);
        assert_eq!(code.logical_codeword_count_formula(), BigUint::from(0u8));

        let big = ex1_code().logical_codeword_count_formula();
        assert_eq!(big, (BigUint::from(1u8) << 80u32) * ((BigUint::from(1u8) << 22u32) - 1u8));
    }

    #[test]
    fn rejects_bad_inputs() {
        let hx = BinaryMatrix::from_dense(&[vec![1, 1, 0]]);
        let hz = BinaryMatrix::from_dense(&[vec![1, 1]]);
        assert_eq!(
            CssCode::from_pcms(hx, hz).err(),
            Some(CssError::ColumnMismatch(3, 2))
        );

        let hx = BinaryMatrix::from_dense(&[vec![1, 1, 0]]);
        let hz = BinaryMatrix::from_dense(&[vec![1, 0, 0]]);
        assert_eq!(
            CssCode::from_pcms(hx, hz).err(),
            Some(CssError::NotOrthogonal { hx_row: 0, hz_row: 0 })
        );
    }

    #[test]
    fn from_parts_validates_and_serde_round_trips() {
        let code = ex1_code();
        let json = serde_json::to_string(&code).unwrap();
        let back: CssCode = serde_json::from_str(&json).unwrap();
        assert_eq!(back.n_qubits(), code.n_qubits());
        assert_eq!(back.k_logical(), code.k_logical());
        assert_eq!(back.lx(), code.lx());
        assert_eq!(back.lz(), code.lz());
        assert_eq!(back.circulant_size(), Some(7));

        // swapping the logical bases breaks the kernel conditions
        let swapped = CssCode::from_parts(
            code.hx().clone(),
            code.hz().clone(),
            code.lz().clone(),
            code.lx().clone(),
            None,
        );
        assert!(swapped.is_err());
    }

    #[test]
    fn invert_small_matrices() {
        let m = BinaryMatrix::from_dense(&[vec![1, 1], vec![0, 1]]);
        let inv = invert(&m).unwrap();
        assert_eq!(m.multiply(&inv).unwrap(), BinaryMatrix::identity(2));
        let singular = BinaryMatrix::from_dense(&[vec![1, 1], vec![1, 1]]);
        assert!(invert(&singular).is_none());
    }
}
