//! Polynomial center-manifold jets `z = h(x,y)`, restriction of fields and
//! multipliers to the manifold, and formal-center-manifold certification.
//!
//! The jet solves the invariance equation
//! `dh/dx (y + P) + dh/dy Q = -lambda h + R` on `z = h` order by order; the
//! degree-k block is the operator `y d/dx + lambda`, triangular with the
//! invertible diagonal `lambda`. Center manifolds are generally non-unique,
//! but every one of them shares this jet, so the graph-over-(x,y) jet is
//! well defined even when the manifold is not.


use num_rational::BigRational;

use crate::algebra::{AlgebraError, Axis, CoefFrac, PhaseMono, PhasePoly, VectorField3};
use crate::planar::PlanarField;

/// Center-manifold jet with its invariance defect at the computed order.
#[derive(Debug, Clone)]
pub struct CMJet {
    pub h: PhasePoly,
    pub degree: u32,
    pub residual: PhasePoly,
}

/// Errors specific to center-manifold computations.
#[derive(Debug, Clone, PartialEq)]
pub enum CmError {
    Algebra(AlgebraError),
    /// The candidate does not vanish on the manifold; carries the offending jet.
    NotOnManifold(String),
    /// `XM = K M` has no solution at this degree.
    FailsAtDegree(u32),
    /// The candidate's gradient at the origin is not along the z-axis.
    GradientCondition,
}

impl std::fmt::Display for CmError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmError::Algebra(e) => write!(f, "{e}"),
            CmError::NotOnManifold(jet) => {
                write!(f, "value does not vanish on the center manifold: {jet}")
            }
            CmError::FailsAtDegree(n) => {
                write!(f, "no formal center manifold factorization at degree {n}")
            }
            CmError::GradientCondition => {
                write!(f, "gradient at the origin must be parallel to (0,0,1)")
            }
        }
    }
}

impl std::error::Error for CmError {}

impl From<AlgebraError> for CmError {
    fn from(e: AlgebraError) -> CmError {
        CmError::Algebra(e)
    }
}

/// Solves the invariance equation for the degree-`n` center-manifold jet.
pub fn cm_jet(x: &VectorField3, n: u32) -> Result<CMJet, CmError> {
    let table = x.table();
    let mut h = PhasePoly::zero_jet(n);
    let lambda_inv = x.lambda().inverse()?;
    for k in 2..=n {
        // g_k = degree-k part of R(x,y,h) - dh/dx P(x,y,h) - dh/dy Q(x,y,h)
        let rbar = x.pz().substitute_var(Axis::Z, &h, k);
        let pbar = x.px().substitute_var(Axis::Z, &h, k);
        let qbar = x.py().substitute_var(Axis::Z, &h, k);
        let g = rbar
            .sub(&h.derivative(Axis::X).mul_capped(&pbar, k))
            .sub(&h.derivative(Axis::Y).mul_capped(&qbar, k))
            .homogeneous_part(k);
        // (y d/dx + lambda) h_k = g_k: lambda h_j + (j+1) h_{j+1} = g_j,
        // solved with j descending
        let mut terms = Vec::new();
        let mut h_next = CoefFrac::zero(table);
        for j in (0..=k).rev() {
            let g_j = g
                .coefficient(&PhaseMono::new(j, k - j, 0))
                .cloned()
                .unwrap_or_else(|| CoefFrac::zero(table));
            let rhs = g_j.sub(&h_next.mul_rat(&BigRational::from_integer((j as i64 + 1).into())));
            let h_j = rhs.mul(&lambda_inv);
            if !h_j.is_zero() {
                terms.push((PhaseMono::new(j, k - j, 0), h_j.clone()));
            }
            h_next = h_j;
        }
        h = h.add(&PhasePoly::from_terms(terms).with_trunc(n));
    }
    // invariance defect at truncation (zero through degree n by construction)
    let residual = invariance_defect(x, &h, n)?;
    Ok(CMJet {
        h,
        degree: n,
        residual,
    })
}

/// `dh/dx (y+P) + dh/dy Q + lambda h - R`, all evaluated on `z = h`,
/// truncated at `n`.
pub fn invariance_defect(
    x: &VectorField3,
    h: &PhasePoly,
    n: u32,
) -> Result<PhasePoly, AlgebraError> {
    let dxbar = x.dx().substitute_var(Axis::Z, h, n);
    let qbar = x.py().substitute_var(Axis::Z, h, n);
    let rbar = x.pz().substitute_var(Axis::Z, h, n);
    h.derivative(Axis::X)
        .mul_capped(&dxbar, n)
        .add(&h.derivative(Axis::Y).mul_capped(&qbar, n))
        .add(&h.scale(x.lambda()))
        .sub(&rbar)
        .require_trunc(n)
}

/// Restriction of the field to `z = h(x,y)`:
/// `(y + P(x,y,h), Q(x,y,h))` truncated at `n`.
pub fn restrict(x: &VectorField3, h: &CMJet, n: u32) -> Result<PlanarField, CmError> {
    let px = x.px().substitute_var(Axis::Z, &h.h, n).with_trunc(n);
    let py = x.py().substitute_var(Axis::Z, &h.h, n).with_trunc(n);
    Ok(PlanarField::new(x.table(), px, py)?)
}

/// Divides a multiplier vanishing on the manifold by `z - h` and restricts
/// the cofactor: `V = (z - h) W`, returns `v(x,y) = W(x,y,h(x,y))`.
pub fn factor_restrict(v: &PhasePoly, h: &CMJet, n: u32) -> Result<PhasePoly, CmError> {
    // change coordinates u = z - h: in (x, y, u) the manifold is u = 0
    let cap = n
        .min(v.trunc())
        .min(if h.h.is_zero() { u32::MAX } else { h.degree });
    let empty = crate::algebra::SymbolTable::empty();
    let shifted = v.substitute_var(Axis::Z, &PhasePoly::var(&empty, Axis::Z).add(&h.h), cap);
    // V vanishes on the manifold iff the u-free stratum vanishes
    let strata = shifted.z_strata();
    if !strata.is_empty() && !strata[0].is_zero() {
        return Err(CmError::NotOnManifold(crate::sysio::print_phase_poly(
            &strata[0],
        )));
    }
    // W in shifted coordinates is shifted/u; its value on u = 0 is the
    // coefficient stratum of u^1
    let w_on_manifold = strata.get(1).cloned().unwrap_or_else(PhasePoly::zero);
    Ok(w_on_manifold.with_trunc(cap.saturating_sub(1)))
}

/// Checks `X M = K M` formally up to degree `n`; returns the cofactor jet K.
/// Requires `M = c z + higher` with `c != 0`.
pub fn formal_cm_check(
    x: &VectorField3,
    m: &PhasePoly,
    n: u32,
) -> Result<PhasePoly, CmError> {
    let table = x.table();
    let z_coef = m
        .coefficient(&PhaseMono::new(0, 0, 1))
        .cloned()
        .unwrap_or_else(|| CoefFrac::zero(table));
    let low_ok = m.min_degree() >= 1
        && m.coefficient(&PhaseMono::new(1, 0, 0)).is_none()
        && m.coefficient(&PhaseMono::new(0, 1, 0)).is_none()
        && !z_coef.is_zero();
    if !low_ok {
        return Err(CmError::GradientCondition);
    }
    let xm = x.lie_derivative(m, n)?;
    let c_inv = z_coef.inverse()?;
    let mut k = PhasePoly::zero_jet(n.saturating_sub(1));
    // degree-(j+1) part: K_j * (c z) = [XM - K_{<j} M]_{j+1}
    for j in 0..n {
        let target_deg = j + 1;
        let known = xm
            .homogeneous_part(target_deg)
            .sub(&k.mul_capped(m, target_deg).homogeneous_part(target_deg));
        // divide by c*z: every monomial must carry z
        let mut terms = Vec::new();
        for (mono, c) in known.terms() {
            if mono.ze == 0 {
                return Err(CmError::FailsAtDegree(target_deg));
            }
            terms.push((
                PhaseMono::new(mono.xe, mono.ye, mono.ze - 1),
                c.mul(&c_inv),
            ));
        }
        k = k.add(&PhasePoly::from_terms(terms).with_trunc(n.saturating_sub(1)));
    }
    Ok(k)
}
