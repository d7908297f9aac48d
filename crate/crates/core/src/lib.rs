//! Exact statistics of polynomial factorizations over finite fields and of
//! cycle structures on Young subgroup cosets.

pub mod charpoly;
pub mod division_algebra;
pub mod error;
pub mod finite_field;
pub mod frobenius_stats;
pub mod parallel;
pub mod polynomial;
pub mod symmetric;
pub mod verify;
pub mod young_stats;

pub use charpoly::{CharPoly, NilSeries};
pub use division_algebra::SymbolSum;
pub use error::{Error, Result};
pub use finite_field::{FieldCtx, FieldElement};
pub use frobenius_stats::{EnsembleFilter, SigmaStructure};
pub use polynomial::{Factorization, Poly};
pub use symmetric::{Block, CosetSpec, MultiIndex, Permutation};

/// Exact rational numbers used throughout.
pub type Rational = num_rational::BigRational;
