//! Exact symbolic engine for the nilpotent center problem of three-dimensional
//! polynomial vector fields.
//!
//! The systems under study have a singular point at the origin whose linear part
//! is `(y, 0, -lambda*z)` with `lambda != 0`. The engine decides monodromy of the
//! restriction to a center manifold, computes the obstruction series `Lambda_n`
//! to the existence of a formal inverse Jacobi multiplier, computes Lyapunov
//! quantities `eta_l` of the rotated one-parameter family, and corroborates
//! center/focus classifications numerically with a Poincare return map.
//!
//! All symbolic computations are exact: coefficients live in the field of
//! rational functions (fractions of multivariate polynomials over arbitrary
//! precision rationals) in the system parameters, `lambda`, `epsilon` and the
//! automatically generated kernel unknowns. Every value is immutable after
//! construction and all operations are pure functions, so independent
//! computations can run in parallel without synchronization.

pub mod algebra;
pub mod cmanifold;
pub mod homological;
pub mod ijm;
pub mod lyapunov;
pub mod monodromy;
pub mod numeric;
pub mod planar;
pub mod sysio;
#[doc(hidden)]
pub mod testutil;

pub use algebra::{
    AlgebraError, CoefFrac, ParamPoly, PhaseMono, PhasePoly, SymbolTable, VectorField3,
};
