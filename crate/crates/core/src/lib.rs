//! Exact computations in the algebras `B(m,k)`: generators `x_1, ..., x_m`
//! subject to the antisymmetrized degree-`k` relations
//!
//! ```text
//! sum_{sigma in S_k} sign(sigma) x_{i_sigma(1)} ... x_{i_sigma(k)} = 0,   i_1 < ... < i_k
//! ```
//!
//! The crate rewrites words into the admissible basis, computes the
//! coefficients `G(i)` of `M_i(AX)`, and checks the extended MacMahon Master
//! Theorem and its enumerative consequences with exact rational arithmetic.
//!
//! - [`words`]: admissibility, inversions, enumeration of admissible words
//! - [`rewrite`]: relation expansion, normal forms, reversion-path coefficients
//! - [`polyring`]: sparse polynomials in `a_{ij}`, `t_i` and truncated series
//! - [`charpoly`]: characteristic coefficients of `TA` and the second factor
//! - [`identity`]: the first factor and verification of the identity
//! - [`enumerate`]: counting tables, `F_{m,k}`, permutation EGF, `N_m(l)`

pub mod charpoly;
pub mod enumerate;
pub mod error;
pub mod identity;
pub mod polyring;
pub mod rewrite;
pub mod words;

pub use charpoly::{char_coeffs, second_factor, MatrixMode, PartialPermutation, SymMatrix};
pub use enumerate::{count_admissible, f_series, CountMethod, CountTable};
pub use error::{Error, Result};
pub use identity::{
    first_factor, g_coefficient, verify_corollary, verify_master, FirstFactorSeries, MasterReport,
};
pub use polyring::{series_inverse, Poly, TruncatedSeries, VarId};
pub use rewrite::{expand_block, normal_form, path_coefficient, NCombination};
pub use words::{enumerate_admissible, AlgebraParams, Variant, Word};
