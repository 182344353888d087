//! The linear operator `L_n` on homogeneous degree-n polynomials in (x,y,z),
//! `L_n(p) = y dp/dx - lambda z dp/dz + lambda p`, together with the
//! solve-with-residue primitive that drives the obstruction pipeline.
//!
//! On the monomial basis the operator acts by
//! `x^j y^k z^l -> j x^(j-1) y^(k+1) z^l + lambda (1-l) x^j y^k z^l`,
//! so it preserves the z-exponent. On the stratum `l = 1` it is a nilpotent
//! shift with kernel `y^(n-1) z` and unreachable direction `x^(n-1) z`; on
//! every other stratum the diagonal `lambda (1-l)` is invertible.

use num_rational::BigRational;

use crate::algebra::{AlgebraError, CoefFrac, PhaseMono, PhasePoly};

/// Outcome of solving `L(p) + q = Lambda * x^(n-1) z`.
///
/// The particular solution never contains the kernel monomial `y^(n-1) z`;
/// that coefficient stays free and callers inject a symbolic unknown for it.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub particular: PhasePoly,
    pub lambda_coef: CoefFrac,
    pub kernel_monomial: PhaseMono,
}

/// Applies `L_n` to a homogeneous polynomial.
pub fn apply_l(p: &PhasePoly, lambda: &CoefFrac) -> Result<PhasePoly, AlgebraError> {
    if !p.is_homogeneous() {
        return Err(AlgebraError::NonHomogeneous);
    }
    let mut out = Vec::new();
    for (m, c) in p.terms() {
        if m.xe > 0 {
            out.push((
                PhaseMono::new(m.xe - 1, m.ye + 1, m.ze),
                c.mul_rat(&BigRational::from_integer(m.xe.into())),
            ));
        }
        let diag = lambda.mul_rat(&BigRational::from_integer((1i64 - m.ze as i64).into()));
        out.push((*m, c.mul(&diag)));
    }
    Ok(PhasePoly::from_terms(out))
}

/// The kernel generator `y^(n-1) z` of `L_n`.
pub fn kernel_basis(n: u32, table: &std::sync::Arc<crate::algebra::SymbolTable>) -> PhasePoly {
    assert!(n >= 1);
    PhasePoly::monomial(PhaseMono::new(0, n - 1, 1), CoefFrac::one(table))
}

/// Canonical name for the free kernel coefficient at degree `n`,
/// `v_{0,n-1,1}`: `v011`, `v021`, ... (underscored past single digits).
pub fn kernel_unknown_name(n: u32) -> String {
    let k = n - 1;
    if k < 10 {
        format!("v0{k}1")
    } else {
        format!("v0_{k}_1")
    }
}

/// Finds `p` homogeneous of degree n with `L(p) + q = Lambda * x^(n-1) z`
/// exactly. Deterministic sweep: on the stratum `l = 1` the coefficient at
/// `(j,k,1)` is cancelled by setting the p-coefficient at `(j+1,k-1,1)` to
/// `-q_{jk1}/(j+1)`, k descending; the unreachable monomial `x^(n-1) z`
/// accumulates `Lambda`. On strata `l != 1` a triangular solve against the
/// invertible diagonal `lambda (1-l)` runs with `l` ascending.
pub fn solve_modulo_residue(
    q: &PhasePoly,
    lambda: &CoefFrac,
) -> Result<SolveResult, AlgebraError> {
    if !q.is_homogeneous() {
        return Err(AlgebraError::NonHomogeneous);
    }
    let table = lambda.table();
    let n = if q.is_zero() { 1 } else { q.max_degree() };
    if n == 0 {
        // a constant block has no residue direction; the pipelines never
        // produce one
        return Err(AlgebraError::NonHomogeneous);
    }
    let mut lambda_coef = CoefFrac::zero(table);
    let mut particular = Vec::new();

    let strata = q.z_strata();
    for (l, stratum) in strata.iter().enumerate() {
        let l = l as u32;
        if stratum.is_zero() {
            continue;
        }
        let d = n - l; // planar degree within the stratum
        if l == 1 {
            // q coefficient at x^j y^(d-j) z; sweep k = d-j descending (j ascending)
            for j in 0..=d {
                let qc = stratum
                    .coefficient(&PhaseMono::new(j, d - j, 0))
                    .cloned()
                    .unwrap_or_else(|| CoefFrac::zero(table));
                if qc.is_zero() {
                    continue;
                }
                if j == d {
                    // unreachable direction x^(n-1) z
                    lambda_coef = lambda_coef.add(&qc);
                } else {
                    let p_coef = qc.mul_rat(&BigRational::new((-1).into(), (j as i64 + 1).into()));
                    particular.push((PhaseMono::new(j + 1, d - j - 1, 1), p_coef));
                }
            }
        } else {
            // triangular: (j+1) p_{j+1} + lambda(1-l) p_j = -q_j, solve j descending
            let diag = lambda.mul_rat(&BigRational::from_integer((1i64 - l as i64).into()));
            let diag_inv = diag.inverse()?;
            let mut p_next = CoefFrac::zero(table); // p_{j+1}
            for j in (0..=d).rev() {
                let qc = stratum
                    .coefficient(&PhaseMono::new(j, d - j, 0))
                    .cloned()
                    .unwrap_or_else(|| CoefFrac::zero(table));
                // lambda(1-l) p_j = -q_j - (j+1) p_{j+1}
                let rhs = qc
                    .neg()
                    .sub(&p_next.mul_rat(&BigRational::from_integer((j as i64 + 1).into())));
                let pj = rhs.mul(&diag_inv);
                if !pj.is_zero() {
                    particular.push((PhaseMono::new(j, d - j, l), pj.clone()));
                }
                p_next = pj;
            }
        }
    }
    Ok(SolveResult {
        particular: PhasePoly::from_terms(particular),
        lambda_coef,
        kernel_monomial: PhaseMono::new(0, n - 1, 1),
    })
}
