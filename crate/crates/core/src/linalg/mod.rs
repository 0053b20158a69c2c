//! Exact arithmetic substrate: integer matrices, normal forms, sparse
//! elimination over Q and F_p, short vectors and characteristic polynomials.

pub mod field;
pub mod lattice;
pub mod matrix;
pub mod normal_form;
pub mod poly;
pub mod sparse;

pub use field::{Coeff, Field};
pub use lattice::{short_vectors, GramForm, RationalForm};
pub use matrix::{normalize_line, vector, IntMatrix, Vector};
pub use normal_form::{hnf, snf};
pub use poly::{char_poly, Poly};
pub use sparse::SparseFieldMatrix;
