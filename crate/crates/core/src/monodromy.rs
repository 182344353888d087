//! Monodromy of the restricted planar system: the characteristic jets
//! `F(x)`, `f(x)`, `Phi(x)` with their leading data `(a, alpha, b, beta, n)`,
//! and the three-dimensional criterion for Andreev number 2 read directly
//! off the unrestricted field.

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{
    AlgebraError, Axis, CoefFrac, PhaseMono, PhasePoly, VectorField3,
};
use crate::planar::PlanarField;

/// Verdict of the planar monodromy test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Monodromic via `beta > n-1` or `Phi` vanishing to the computed order.
    MonodromicI,
    /// Monodromic via `beta = n-1` and `b^2 + 4an < 0`.
    MonodromicII,
    NotMonodromic,
    /// Sign conditions involve unbound parameters; see the stored jets.
    UndecidedSymbolic,
}

/// Characteristic data of a planar nilpotent singular point: `y = F(x)`
/// solves the first component, `f(x)` is the second component on the curve
/// and `Phi(x)` the divergence on the curve, with leading terms
/// `f = a x^alpha + ...` and `Phi = b x^beta + ...`.
#[derive(Debug, Clone)]
pub struct AndreevData {
    pub f_curve: PhasePoly,
    pub f_jet: PhasePoly,
    pub phi_jet: PhasePoly,
    pub a: CoefFrac,
    pub alpha: u32,
    /// Leading coefficient and exponent of `Phi`; `None` when the computed
    /// jet of `Phi` vanishes (the `beta = infinity` case).
    pub b: Option<CoefFrac>,
    pub beta: Option<u32>,
    /// Degree through which `Phi` is known.
    pub phi_known_to: u32,
    /// Andreev number when `alpha = 2n - 1` is odd.
    pub andreev_number: Option<u32>,
    pub verdict: Verdict,
}

/// Monodromy errors.
#[derive(Debug, Clone, PartialEq)]
pub enum MonodromyError {
    Algebra(AlgebraError),
    /// `f` vanishes identically through the computed truncation.
    InconclusiveTruncation(u32),
}

impl std::fmt::Display for MonodromyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MonodromyError::Algebra(e) => write!(f, "{e}"),
            MonodromyError::InconclusiveTruncation(n) => {
                write!(f, "f(x) vanishes through degree {n}: inconclusive at this truncation")
            }
        }
    }
}

impl std::error::Error for MonodromyError {}

impl From<AlgebraError> for MonodromyError {
    fn from(e: AlgebraError) -> MonodromyError {
        MonodromyError::Algebra(e)
    }
}

/// Solves `y + P(x, y) = 0` as a series `y = F(x)` to degree `n` by the
/// fixed-point iteration `F <- -P(x, F)`, which gains one correct degree per
/// round because `P` has no linear part.
pub fn implicit_curve(s: &PlanarField, n: u32) -> Result<PhasePoly, MonodromyError> {
    if s.known_degree() < n {
        return Err(AlgebraError::TruncationUnderflow {
            known: s.known_degree(),
            needed: n,
        }
        .into());
    }
    let mut f = PhasePoly::zero_jet(n);
    for _ in 0..=n {
        let next = s.px().substitute_var(Axis::Y, &f, n).neg().with_trunc(n);
        if next == f {
            break;
        }
        f = next;
    }
    Ok(f)
}

fn leading_term(p: &PhasePoly) -> Option<(u32, CoefFrac)> {
    p.terms()
        .next()
        .map(|(m, c)| (m.degree(), c.clone()))
}

fn sign_of(c: &CoefFrac) -> Option<i8> {
    let r = c.as_rational()?;
    Some(if r.is_zero() {
        0
    } else if r > BigRational::zero() {
        1
    } else {
        -1
    })
}

/// Computes the full Andreev data of a planar jet known to degree `n`.
/// With symbolic parameters in the leading coefficients the verdict is
/// `UndecidedSymbolic`; the sign conditions stay available as expressions.
pub fn andreev_data(s: &PlanarField, n: u32) -> Result<AndreevData, MonodromyError> {
    let f_curve = implicit_curve(s, n)?;
    let f_jet = s.py().substitute_var(Axis::Y, &f_curve, n).with_trunc(n);
    let phi_cap = n.saturating_sub(1).min(s.known_degree().saturating_sub(1));
    let phi_jet = s
        .divergence()
        .substitute_var(Axis::Y, &f_curve, phi_cap)
        .with_trunc(phi_cap);

    let (alpha, a) = match leading_term(&f_jet) {
        Some(t) => t,
        None => return Err(MonodromyError::InconclusiveTruncation(n)),
    };
    let phi_lead = leading_term(&phi_jet);
    let (beta, b) = match &phi_lead {
        Some((e, c)) => (Some(*e), Some(c.clone())),
        None => (None, None),
    };
    let andreev_number = (alpha % 2 == 1).then_some(alpha.div_ceil(2));

    let verdict = decide(&a, alpha, andreev_number, &b, beta);
    Ok(AndreevData {
        f_curve,
        f_jet,
        phi_jet,
        a,
        alpha,
        b,
        beta,
        phi_known_to: phi_cap,
        andreev_number,
        verdict,
    })
}

fn decide(
    a: &CoefFrac,
    alpha: u32,
    andreev_number: Option<u32>,
    b: &Option<CoefFrac>,
    beta: Option<u32>,
) -> Verdict {
    let a_sign = match sign_of(a) {
        Some(s) => s,
        None => return Verdict::UndecidedSymbolic,
    };
    if a_sign >= 0 || alpha.is_multiple_of(2) {
        return Verdict::NotMonodromic;
    }
    let n = andreev_number.expect("alpha odd");
    match beta {
        None => Verdict::MonodromicI,
        Some(beta) if beta > n - 1 => Verdict::MonodromicI,
        Some(beta) if beta == n - 1 => {
            // b^2 + 4an < 0
            let b = b.as_ref().expect("beta finite");
            let disc = b.mul(b).add(
                &a.mul_rat(&BigRational::from_integer((4 * n as i64).into())),
            );
            match sign_of(&disc) {
                Some(s) if s < 0 => Verdict::MonodromicII,
                Some(_) => Verdict::NotMonodromic,
                None => Verdict::UndecidedSymbolic,
            }
        }
        Some(_) => Verdict::NotMonodromic,
    }
}

/// Which monodromy condition the restricted system satisfies, as decided by
/// the sign of `2 a200 + b110`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaCase {
    EqNMinus1,
    /// Includes the `Phi = 0` possibility.
    GtNMinus1,
    Undecided,
}

/// Verdict of the three-dimensional Andreev-number-2 criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict3 {
    Monodromic,
    NotMonodromic,
    /// `b200 != 0`: the singular point does not have Andreev number 2.
    NotAndreev2,
    Undecided,
}

/// The exact three-dimensional monodromy condition for Andreev number 2:
/// `b200 = 0` and `b101 c200 / lambda < -(2 a200 - b110)^2 / 8 - b300`,
/// with the `beta` dichotomy driven by `2 a200 + b110`.
///
/// All coefficients are read from the canonical unrestricted field; no center
/// manifold is computed. Note the sign convention on `b300`: the criterion
/// requires the leading coefficient `a` of the restricted `f(x)` to be
/// negative, so a family with `Q = b300 x^3 + ...` and all other named
/// coefficients zero is monodromic exactly when `b300 < 0`.
#[derive(Debug, Clone)]
pub struct MonodromyCondition3D {
    pub b200: CoefFrac,
    /// Left side `b101 c200 / lambda`.
    pub lhs: CoefFrac,
    /// Right side `-(2 a200 - b110)^2 / 8 - b300`.
    pub rhs: CoefFrac,
    /// `2 a200 + b110`.
    pub beta_switch: CoefFrac,
    pub beta_case: BetaCase,
    pub verdict: Verdict3,
}

pub fn andreev2_criterion_3d(x: &VectorField3) -> Result<MonodromyCondition3D, AlgebraError> {
    let c = |ax: Axis, (i, j, k): (u32, u32, u32)| x.coefficient(ax, PhaseMono::new(i, j, k));
    let a200 = c(Axis::X, (2, 0, 0));
    let b200 = c(Axis::Y, (2, 0, 0));
    let b110 = c(Axis::Y, (1, 1, 0));
    let b101 = c(Axis::Y, (1, 0, 1));
    let b300 = c(Axis::Y, (3, 0, 0));
    let c200 = c(Axis::Z, (2, 0, 0));

    let lhs = b101.mul(&c200).div(x.lambda())?;
    let two_a200_minus_b110 = a200.mul_rat(&crate::algebra::rat(2, 1)).sub(&b110);
    let rhs = two_a200_minus_b110
        .mul(&two_a200_minus_b110)
        .mul_rat(&crate::algebra::rat(-1, 8))
        .sub(&b300);
    let beta_switch = a200.mul_rat(&crate::algebra::rat(2, 1)).add(&b110);

    let beta_case = match sign_of(&beta_switch) {
        Some(0) => BetaCase::GtNMinus1,
        Some(_) => BetaCase::EqNMinus1,
        None => BetaCase::Undecided,
    };
    let verdict = match sign_of(&b200) {
        Some(0) => {
            // inequality lhs < rhs
            match (lhs.as_rational(), rhs.as_rational()) {
                (Some(l), Some(r)) => {
                    if l < r {
                        Verdict3::Monodromic
                    } else {
                        Verdict3::NotMonodromic
                    }
                }
                _ => Verdict3::Undecided,
            }
        }
        Some(_) => Verdict3::NotAndreev2,
        None => Verdict3::Undecided,
    };
    Ok(MonodromyCondition3D {
        b200,
        lhs,
        rhs,
        beta_switch,
        beta_case,
        verdict,
    })
}
