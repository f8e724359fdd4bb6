//! Exact-arithmetic toolkit for the divisor-class computations behind the
//! two O'Grady moduli spaces of semistable sheaves: the 10-dimensional space
//! `M10` over a degree-2 K3 surface and the 6-dimensional space `M6` over a
//! principally-polarized-type abelian surface, both taken with Mukai vector
//! (2, 0, -2).
//!
//! Everything is computed over exact integers and rationals — there is no
//! floating point anywhere. The crate is layered:
//!
//! * [`exactalg`] — integer matrices, Hermite/Smith normal forms, kernels,
//!   saturation, fraction-free determinants, exact rational solving;
//! * [`abgroup`] — finitely generated abelian groups presented by relation
//!   matrices (the shape in which divisor class groups are reported);
//! * [`lattice`] — free Z-modules with integral symmetric bilinear forms,
//!   orthogonal complements and isometry checks;
//! * [`mukai`] — surface-level arithmetic: Chern characters, Mukai vectors,
//!   Euler pairings via Riemann-Roch, Hilbert polynomials, the `u`-maps into
//!   the K-theory sublattice that carries line bundles on the moduli space;
//! * [`ledger`] — the divisor-class ledger of a moduli space with symplectic
//!   resolution: pullback coefficients, Cartier subgroups, Weil class groups,
//!   factoriality indices, and the isometry between `v-perp` and the second
//!   cohomology of the resolution;
//! * [`models`] — the canned `M10`/`M6` ledgers with their intersection
//!   tables, plus the end-to-end verification suite.

pub mod abgroup;
pub mod exactalg;
pub mod lattice;
pub mod ledger;
pub mod models;
pub mod mukai;

use std::fmt;

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed};

/// Integer scalar the normal-form kernels are generic over.
///
/// `num_bigint::BigInt` is the scalar used throughout the crate (see [`Int`]);
/// `i64` also satisfies the bound and is handy in tests that stay small.
pub trait Scalar:
    Integer + Signed + FromPrimitive + Clone + fmt::Debug + fmt::Display + 'static
{
}

impl<T> Scalar for T where
    T: Integer + Signed + FromPrimitive + Clone + fmt::Debug + fmt::Display + 'static
{
}

/// Arbitrary-precision integer used by every model-facing type.
pub type Int = num_bigint::BigInt;

/// Exact rational with arbitrary-precision numerator and denominator.
/// `num_rational::Ratio` keeps values in lowest terms with positive
/// denominator, which is exactly the normalization the contracts ask for.
pub type Rat = num_rational::BigRational;

/// Integer matrix over [`Int`].
pub type ExactMatrix = exactalg::Matrix<Int>;

/// Rational matrix over [`Rat`] entries (kept in lowest terms entrywise).
pub type RatMatrix = exactalg::Matrix<Rat>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("classes live on different surfaces")]
    MixedSurfaces,
    #[error("rank must be positive, got {0}")]
    NonPositiveRank(Int),
    #[error("zero vector not allowed here")]
    ZeroVector,
    #[error("internal consistency fault: {0}")]
    Inconsistent(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for building an [`Int`] from a machine integer.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Shorthand for building a [`Rat`] from a machine integer.
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Shorthand for an exact fraction `n/d`.
pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}
