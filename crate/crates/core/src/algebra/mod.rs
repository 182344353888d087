//! Exact coefficient arithmetic and sparse phase-polynomial arithmetic.
//!
//! Layering, bottom up:
//! * [`SymbolTable`] — ordered parameter symbols; the declaration order is the
//!   canonical order used for printing and normalization.
//! * [`ParamPoly`] — sparse multivariate polynomial in the parameters over Q.
//! * [`CoefFrac`] — fraction of two `ParamPoly`; the coefficient field.
//! * [`PhasePoly`] — sparse polynomial/truncated series in the phase variables
//!   x, y, z with `CoefFrac` coefficients and an explicit truncation degree.
//! * [`VectorField3`] — vector field with nilpotent linear part `(y, 0, -lambda*z)`.

mod coeffrac;
mod error;
mod maps;
mod parampoly;
mod phasepoly;
mod symbols;
mod vectorfield;

pub use coeffrac::{substitute_param_poly, CoefFrac};
pub use error::AlgebraError;
pub use maps::PolyMap3;
pub use parampoly::{PMono, ParamPoly};
pub use phasepoly::{Axis, PhaseMono, PhasePoly, EXACT};
pub use symbols::SymbolTable;
pub use vectorfield::VectorField3;

use num_bigint::BigInt;
use num_rational::BigRational;

/// Shorthand for an exact rational constant.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
