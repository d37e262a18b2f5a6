//! Numerical toolbox for Gabor systems of Hilbert-Schmidt operator fields on
//! the dual of the Heisenberg group.
//!
//! The library discretizes three spaces and the maps between them:
//! - the multiplicative group R* (log-uniform two-sheet lambda grid) with its
//!   character-dual Fourier transform ([`rstar`]),
//! - Weyl symbols of Hilbert-Schmidt operators on a periodic z-grid, with
//!   twisted translations and traces ([`symbol`]),
//! - the Gabor system { T_{e^{bp}} M_{a(2k,l,m)} G } built from both, its
//!   weight functions and coefficient maps ([`gabor`]).
//!
//! On top of those it classifies the system (orthonormal / Parseval / frame /
//! Riesz sequence) from the weight tables, cross-checked by a brute-force
//! Gram-matrix oracle and a matrix realization of the Schroedinger
//! representation ([`analysis`], [`oracle`]).
//!
//! All numerics are generic over the scalar type via [`scalar::Scalar`]
//! (implemented for `f32` and `f64`); the concrete aliases below fix the
//! default precision.

// Index loops mirror the written-out sums they implement, and `!(x > 0)`
// guards intentionally reject NaN alongside nonpositive values.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod gabor;
pub mod oracle;
pub mod preset;
pub mod report;
pub mod rstar;
pub mod run;
pub mod scalar;
pub mod symbol;

pub use error::{Error, Result};
pub use scalar::{Scalar, C};

/// Default scalar type of the command-line tools and tests.
pub type Real = f64;
/// Complex number over [`Real`].
pub type Cplx = C<Real>;

pub type RStarGrid = rstar::RStarGrid<Real>;
pub type ScalarField = rstar::ScalarField<Real>;
pub type DualScalarField = rstar::DualScalarField<Real>;
pub type SymbolGrid = symbol::SymbolGrid<Real>;
pub type OperatorField = symbol::OperatorField<Real>;
pub type DualOperatorField = symbol::DualOperatorField<Real>;
pub type GaborParams = gabor::GaborParams<Real>;
pub type WeightTable = gabor::WeightTable<Real>;
pub type GramMatrix = analysis::GramMatrix<Real>;
