//! Design workbench for quasi-cyclic lifted-product quantum LDPC codes.
//!
//! The pipeline this crate supports, end to end:
//!
//!   1. describe a small base matrix over the cyclic group algebra
//!      ([`base::QcBaseMatrix`], entries are circulant-shift exponents),
//!   2. lift it to a binary parity-check matrix or feed a pair of copies
//!      into the lifted-product construction ([`product`]),
//!   3. wrap the two sides as a CSS code and extract logical operators
//!      ([`css::CssCode`]),
//!   4. test the base matrix for row/column partition structure that
//!      forces low-weight logicals, and build those logicals explicitly
//!      ([`rcpc`]),
//!   5. measure classical and quantum minimum distance, exactly where
//!      feasible and by randomized search otherwise ([`distance`]),
//!   6. screen whole families of base matrices for the rare ones whose
//!      distance beats the partition bound ([`screen`]),
//!   7. estimate logical error rates under iterative decoding
//!      ([`decoder`]).
//!
//! All linear algebra is dense GF(2) over bit-packed words ([`gf2`]);
//! the code sizes of interest (a few thousand bits) never warrant sparse
//! structures.

pub mod alist;
pub mod base;
pub mod css;
pub mod decoder;
pub mod distance;
pub mod gf2;
pub mod product;
pub mod rcpc;
pub mod screen;
