//! Lyapunov quantities of the rotated family: attach `epsilon F_1` to the
//! first component and `-epsilon x + epsilon F_2` to the second, then search
//! for a formal first integral `H = epsilon x^2 + y^2 + ...` of `X_eps`.
//!
//! The degree-2 residual vanishes identically (the linear part annihilates
//! `j^2 H`), so the first possible obstruction sits at degree 4 and is
//! reported as `eta_1`. On an even z-free degree block the solve sweeps the
//! tridiagonal system triangularly and the one unreachable monomial `x^n`
//! collects the obstruction, mirroring the `x^(n-1) z` residue of the
//! multiplier pipeline: `eta_l` is minus the defect on `x^(2l+2)`, so the
//! jet satisfies `X_eps H + sum_l eta_l x^(2l+2) = 0` exactly at truncation.
//! All quantities vanish if and only if a formal first integral exists
//! through that order, and the computed values reproduce the worked family
//! exactly under this convention.
//!
//! Everything stays symbolic in `epsilon`: the quantities are rational
//! functions of `epsilon`, `lambda`, the system parameters and (in symbolic
//! mode) the perturbation unknowns `g1_jk`, `g2_jk`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::{
    AlgebraError, Axis, CoefFrac, ParamPoly, PhaseMono, PhasePoly, SymbolTable, VectorField3,
};

pub const EPSILON: &str = "epsilon";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationMode {
    /// All perturbation coefficients fixed to zero.
    Zero,
    /// Symbolic coefficients `g1_jk`, `g2_jk` for `2 <= j+k <= D`,
    /// with `g1_02` excluded.
    Symbolic,
}

/// The one-parameter family obtained by rotating the linear part.
#[derive(Debug, Clone)]
pub struct PerturbedFamily {
    pub base: VectorField3,
    pub f1: PhasePoly,
    pub f2: PhasePoly,
    pub mode: PerturbationMode,
    pub pert_degree: u32,
    /// Perturbation unknowns actually introduced, in canonical order.
    pub unknowns: Vec<String>,
    epsilon: CoefFrac,
}

impl PerturbedFamily {
    pub fn table(&self) -> &Arc<SymbolTable> {
        self.base.table()
    }

    pub fn epsilon(&self) -> &CoefFrac {
        &self.epsilon
    }

    /// Applies the full family field `X_eps` to a jet, truncated at `cap`.
    pub fn apply(&self, h: &PhasePoly, cap: u32) -> Result<PhasePoly, AlgebraError> {
        let t = self.table();
        let x = PhasePoly::var(t, Axis::X);
        let y = PhasePoly::var(t, Axis::Y);
        let z = PhasePoly::var(t, Axis::Z);
        let dx = y
            .add(self.base.px())
            .add(&self.f1.scale(&self.epsilon));
        let dy = x
            .scale(&self.epsilon.neg())
            .add(self.base.py())
            .add(&self.f2.scale(&self.epsilon));
        let dz = z.scale(&self.base.lambda().neg()).add(self.base.pz());
        dx.mul_capped(&h.derivative(Axis::X), cap)
            .add(&dy.mul_capped(&h.derivative(Axis::Y), cap))
            .add(&dz.mul_capped(&h.derivative(Axis::Z), cap))
            .require_trunc(cap.min(h.trunc()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LyapunovError {
    Algebra(AlgebraError),
    /// Elimination met a structurally singular block at this degree.
    SingularBlock { degree: u32 },
    /// A numerator depends on perturbation unknowns: existential in g,
    /// inspect manually.
    GDependent { eta_index: u32 },
}

impl std::fmt::Display for LyapunovError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LyapunovError::Algebra(e) => write!(f, "{e}"),
            LyapunovError::SingularBlock { degree } => {
                write!(f, "structurally singular block at degree {degree}")
            }
            LyapunovError::GDependent { eta_index } => write!(
                f,
                "eta_{eta_index} numerator depends on perturbation unknowns: existential in g, inspect manually"
            ),
        }
    }
}

impl std::error::Error for LyapunovError {}

impl From<AlgebraError> for LyapunovError {
    fn from(e: AlgebraError) -> LyapunovError {
        LyapunovError::Algebra(e)
    }
}

/// Builds the rotated family. Zero mode introduces no unknowns; symbolic mode
/// introduces `g1_jk`/`g2_jk` for `2 <= j+k <= d` skipping `g1_02` (the
/// coefficient of `y^2` in the first perturbation must vanish).
pub fn build_family(
    x: &VectorField3,
    d: u32,
    mode: PerturbationMode,
) -> Result<PerturbedFamily, AlgebraError> {
    let mut table = Arc::clone(x.table());
    if table.contains(EPSILON) {
        return Err(AlgebraError::SymbolExists(EPSILON.into()));
    }
    table = SymbolTable::with_symbol(&table, EPSILON);
    let mut unknowns = Vec::new();
    let mut f1 = PhasePoly::zero();
    let mut f2 = PhasePoly::zero();
    if mode == PerturbationMode::Symbolic {
        for i in 1..=2u32 {
            for deg in 2..=d {
                for j in (0..=deg).rev() {
                    let k = deg - j;
                    if i == 1 && j == 0 && k == 2 {
                        continue; // g1_02 is constrained to zero
                    }
                    let name = format!("g{i}_{j}{k}");
                    if table.contains(&name) {
                        return Err(AlgebraError::SymbolExists(name));
                    }
                    table = SymbolTable::with_symbol(&table, &name);
                    unknowns.push(name);
                }
            }
        }
        for (i, f) in [(1u32, &mut f1), (2, &mut f2)] {
            let mut terms = Vec::new();
            for deg in 2..=d {
                for j in (0..=deg).rev() {
                    let k = deg - j;
                    if i == 1 && j == 0 && k == 2 {
                        continue;
                    }
                    terms.push((
                        PhaseMono::new(j, k, 0),
                        CoefFrac::symbol(&table, &format!("g{i}_{j}{k}")),
                    ));
                }
            }
            *f = PhasePoly::from_terms(terms);
        }
    }
    let epsilon = CoefFrac::symbol(&table, EPSILON);
    Ok(PerturbedFamily {
        base: x.with_table(&table),
        f1,
        f2,
        mode,
        pert_degree: d,
        unknowns,
        epsilon,
    })
}

/// Lyapunov quantities and the first-integral jet that produced them.
#[derive(Debug, Clone)]
pub struct EtaList {
    /// `etas[l-1]` is `eta_l`, minus the residual defect on `x^(2l+2)`.
    pub etas: Vec<CoefFrac>,
    pub h_jet: PhasePoly,
    pub order: u32,
}

impl EtaList {
    pub fn eta(&self, l: u32) -> &CoefFrac {
        &self.etas[(l - 1) as usize]
    }

    /// `sum_l eta_l x^(2l+2)`; the jet satisfies `X_eps H = -` this.
    pub fn defect_series(&self) -> PhasePoly {
        let mut acc = PhasePoly::zero();
        for (i, eta) in self.etas.iter().enumerate() {
            let deg = 2 * (i as u32 + 1) + 2;
            acc = acc.add(&PhasePoly::monomial(
                PhaseMono::new(deg, 0, 0),
                eta.clone(),
            ));
        }
        acc
    }
}

/// Computes `eta_1 .. eta_L`. Degree blocks `n = 3 .. 2L+2` are solved one
/// z-stratum at a time; within a stratum the operator
/// `x^j y^k z^l -> j x^(j-1) y^(k+1) z^l - eps k x^(j+1) y^(k-1) z^l - lambda l x^j y^k z^l`
/// is tridiagonal. On an even z-free block the equation at `x^i y^(d-i)` is
/// solved for `w_(i+1)` with `i` ascending and the kernel pinned by
/// `w_0 = 0`; the block's single unsatisfiable equation sits at `x^d` and
/// `eta_(d/2 - 1)` is minus its defect. The quantity does not depend on the
/// kernel pinning: the defect involves only the odd coefficient chain, while
/// the kernel `(eps x^2 + y^2)^(d/2)` lives on the even one.
pub fn eta_quantities(fam: &PerturbedFamily, l_max: u32) -> Result<EtaList, LyapunovError> {
    assert!(l_max >= 1, "order must be at least 1");
    let table = fam.table();
    let cap = 2 * l_max + 2;
    let eps = fam.epsilon();
    let lambda = fam.base.lambda();

    // j^2 H = eps x^2 + y^2
    let mut h = PhasePoly::from_terms([
        (PhaseMono::new(2, 0, 0), eps.clone()),
        (PhaseMono::new(0, 2, 0), CoefFrac::one(table)),
    ])
    .with_trunc(cap);
    let mut etas = Vec::new();

    let px_eff = fam.base.px().add(&fam.f1.scale(eps));
    let py_eff = fam.base.py().add(&fam.f2.scale(eps));
    let pz_eff = fam.base.pz().clone();

    for n in 3..=cap {
        let f_n = px_eff
            .mul_capped(&h.derivative(Axis::X), n)
            .add(&py_eff.mul_capped(&h.derivative(Axis::Y), n))
            .add(&pz_eff.mul_capped(&h.derivative(Axis::Z), n))
            .homogeneous_part(n);
        let strata = f_n.z_strata();
        for l in 0..=n {
            let f_l = strata
                .get(l as usize)
                .cloned()
                .unwrap_or_else(PhasePoly::zero);
            let d = n - l;
            let with_eta = l == 0 && d % 2 == 0;
            if f_l.is_zero() && !with_eta {
                continue;
            }
            let dim = d as usize + 1;
            let f_coef = |i: usize| -> CoefFrac {
                f_l.coefficient(&PhaseMono::new(i as u32, d - i as u32, 0))
                    .cloned()
                    .unwrap_or_else(|| CoefFrac::zero(table))
            };
            let sol;
            if with_eta {
                // triangular sweep: equation at x^i y^(d-i) solved for w_(i+1),
                // kernel pinned by w_0 = 0; the x^d equation is left over
                let mut w = vec![CoefFrac::zero(table); dim];
                for i in 0..d as usize {
                    let prev = if i >= 1 {
                        w[i - 1].clone()
                    } else {
                        CoefFrac::zero(table)
                    };
                    // (i+1) w_(i+1) = eps (d-i+1) w_(i-1) - F_i
                    let rhs = eps
                        .mul_rat(&BigRational::from_integer(BigInt::from(d - i as u32 + 1)))
                        .mul(&prev)
                        .sub(&f_coef(i));
                    w[i + 1] = rhs.mul_rat(&BigRational::new(1.into(), (i as i64 + 1).into()));
                }
                // defect on x^d is F_d - eps w_(d-1); the quantity is its negative
                let eta = eps.mul(&w[d as usize - 1]).sub(&f_coef(d as usize));
                etas.push(eta);
                sol = w;
            } else {
                // full solve of the invertible block
                let mut mat = vec![vec![CoefFrac::zero(table); dim]; dim];
                for (j, col) in (0..dim).map(|j| (j, j)) {
                    if j >= 1 {
                        mat[j - 1][col] =
                            CoefFrac::from_rat(table, BigRational::from_integer((j as i64).into()));
                    }
                    if j + 1 < dim {
                        let k = d - j as u32; // y-exponent of e_j
                        mat[j + 1][col] = eps
                            .mul_rat(&BigRational::from_integer(BigInt::from(k)))
                            .neg();
                    }
                    if l > 0 {
                        mat[j][col] = mat[j][col]
                            .sub(&lambda.mul_rat(&BigRational::from_integer(BigInt::from(l))));
                    }
                }
                let rhs: Vec<CoefFrac> = (0..dim).map(|i| f_coef(i).neg()).collect();
                sol = gauss_solve(table, mat, rhs)
                    .ok_or(LyapunovError::SingularBlock { degree: n })?;
            }
            let mut terms = Vec::new();
            for (j, w) in sol.iter().enumerate() {
                if !w.is_zero() {
                    terms.push((PhaseMono::new(j as u32, d - j as u32, l), w.clone()));
                }
            }
            h = h.add(&PhasePoly::from_terms(terms).with_trunc(cap));
        }
    }
    Ok(EtaList {
        etas,
        h_jet: h,
        order: l_max,
    })
}

/// Gauss-Jordan elimination with exact rational-function pivots; free columns
/// are set to zero. Returns `None` when a zero row meets a nonzero right side.
fn gauss_solve(
    table: &Arc<SymbolTable>,
    mut mat: Vec<Vec<CoefFrac>>,
    mut rhs: Vec<CoefFrac>,
) -> Option<Vec<CoefFrac>> {
    let rows = mat.len();
    let cols = if rows == 0 { 0 } else { mat[0].len() };
    let mut pivot_of_col = vec![usize::MAX; cols];
    let mut used_row = vec![false; rows];
    for col in 0..cols {
        // first unused row with a nonzero entry in this column
        let pivot = (0..rows).find(|&r| !used_row[r] && !mat[r][col].is_zero());
        let pr = match pivot {
            Some(r) => r,
            None => continue, // free column
        };
        used_row[pr] = true;
        pivot_of_col[col] = pr;
        let inv = mat[pr][col].inverse().ok()?;
        for c in 0..cols {
            mat[pr][c] = mat[pr][c].mul(&inv);
        }
        rhs[pr] = rhs[pr].mul(&inv);
        for r in 0..rows {
            if r != pr && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in 0..cols {
                    let delta = mat[pr][c].mul(&factor);
                    mat[r][c] = mat[r][c].sub(&delta);
                }
                rhs[r] = rhs[r].sub(&rhs[pr].mul(&factor));
            }
        }
    }
    // consistency: no unused row may have a nonzero right side
    for r in 0..rows {
        if !used_row[r] && !rhs[r].is_zero() {
            return None;
        }
    }
    let mut sol = vec![CoefFrac::zero(table); cols];
    for col in 0..cols {
        if pivot_of_col[col] != usize::MAX {
            sol[col] = rhs[pivot_of_col[col]].clone();
        }
    }
    Some(sol)
}

/// Splits the numerator of each quantity over powers of `epsilon` and returns
/// the distinct primitive parameter factors; they must all vanish when the
/// family has a center for every `epsilon > 0`.
pub fn eta_necessary_factors(
    etas: &EtaList,
    unknowns: &[String],
) -> Result<Vec<ParamPoly>, LyapunovError> {
    let mut out: Vec<ParamPoly> = Vec::new();
    for (i, eta) in etas.etas.iter().enumerate() {
        if eta.is_zero() {
            continue;
        }
        for g in unknowns {
            if eta.num().contains_symbol(g) {
                return Err(LyapunovError::GDependent {
                    eta_index: i as u32 + 1,
                });
            }
        }
        let num = eta.num();
        let eps_idx = match num.table().lookup(EPSILON) {
            Some(i) => i,
            None => continue,
        };
        for c in num.coeffs_in(eps_idx) {
            if c.is_zero() {
                continue;
            }
            let prim = c.primitive_part();
            if !out.contains(&prim) {
                out.push(prim);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysio::parse_system;

    #[test]
    fn family_shape_and_unknowns() {
        let sys = parse_system(include_str!("../../../systems/song_wang_feng.sys")).unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Zero).unwrap();
        assert!(fam.unknowns.is_empty());
        assert!(fam.f1.is_zero() && fam.f2.is_zero());

        let fam = build_family(&sys.field, 2, PerturbationMode::Symbolic).unwrap();
        assert_eq!(
            fam.unknowns,
            vec!["g1_20", "g1_11", "g2_20", "g2_11", "g2_02"]
        );
        let fam = build_family(&sys.field, 1, PerturbationMode::Symbolic).unwrap();
        assert!(fam.unknowns.is_empty());
    }

    #[test]
    fn linear_field_has_zero_quantities() {
        let sys = parse_system("dx = y\ndy = 0\ndz = -z").unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Zero).unwrap();
        let etas = eta_quantities(&fam, 2).unwrap();
        assert!(etas.etas.iter().all(|e| e.is_zero()));
        // H stays exactly eps x^2 + y^2
        assert_eq!(etas.h_jet.num_terms(), 2);
    }

    #[test]
    fn residual_identity() {
        // X_eps H + sum_l eta_l x^(2l+2) = 0 exactly at truncation
        let sys = parse_system(include_str!("../../../systems/song_wang_feng.sys")).unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Zero).unwrap();
        for l in [1u32, 2] {
            let etas = eta_quantities(&fam, l).unwrap();
            let cap = 2 * l + 2;
            let applied = fam.apply(&etas.h_jet, cap).unwrap();
            let defect = etas.defect_series().truncated(cap);
            assert!(applied.add(&defect).is_zero());
        }
    }

    #[test]
    fn song_wang_feng_eta1_matches_exactly() {
        let sys = parse_system(include_str!("../../../systems/song_wang_feng.sys")).unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Zero).unwrap();
        let etas = eta_quantities(&fam, 1).unwrap();
        let t = fam.table();
        // -4 eps^2 d (a - b) / (12 eps + 3)
        let sym = |n: &str| ParamPoly::symbol(t, n);
        let num = sym(EPSILON)
            .pow(2)
            .mul(&sym("d"))
            .mul(&sym("a").sub(&sym("b")))
            .mul_rat(&crate::algebra::rat(-4, 1));
        let den = sym(EPSILON)
            .mul_rat(&crate::algebra::rat(12, 1))
            .add(&ParamPoly::constant(t, crate::algebra::rat(3, 1)));
        let expect = CoefFrac::new(num, den).unwrap();
        assert_eq!(*etas.eta(1), expect, "eta1 = {}", etas.eta(1));
        // denominator is a rational multiple of 4 eps + 1
        let four_eps_1 = sym(EPSILON)
            .mul_rat(&crate::algebra::rat(4, 1))
            .add(&ParamPoly::one(t));
        assert!(etas.eta(1).den().exact_div(&four_eps_1).map(|q| q.is_constant()) == Some(true));
    }

    #[test]
    fn reversible_family_has_zero_quantities() {
        // P even in x, Q odd in x, first two components z-free: the family is
        // invariant under (x, t) -> (-x, -t) for every epsilon, hence a
        // center; all quantities must vanish.
        let sys = parse_system("dx = y + x^2\ndy = -2*x^3 + x*y^2\ndz = -z + x^2").unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Zero).unwrap();
        let etas = eta_quantities(&fam, 2).unwrap();
        assert!(etas.eta(1).is_zero(), "eta1 = {}", etas.eta(1));
        assert!(etas.eta(2).is_zero(), "eta2 = {}", etas.eta(2));
    }

    #[test]
    fn g_dependent_numerator_is_rejected() {
        // in symbolic mode the first quantity picks up perturbation unknowns;
        // factor extraction must refuse rather than discharge them silently
        let sys = parse_system(include_str!("../../../systems/song_wang_feng.sys")).unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Symbolic).unwrap();
        let etas = eta_quantities(&fam, 1).unwrap();
        assert!(matches!(
            eta_necessary_factors(&etas, &fam.unknowns),
            Err(LyapunovError::GDependent { eta_index: 1 })
        ));
    }

    #[test]
    fn necessary_factor_extraction() {
        let sys = parse_system(include_str!("../../../systems/song_wang_feng.sys")).unwrap();
        let fam = build_family(&sys.field, 2, PerturbationMode::Zero).unwrap();
        let etas = eta_quantities(&fam, 1).unwrap();
        let factors = eta_necessary_factors(&etas, &fam.unknowns).unwrap();
        // the single factor is d*(a - b), primitive: a*d - b*d
        assert_eq!(factors.len(), 1);
        let t = etas.eta(1).table();
        let expect = ParamPoly::symbol(t, "a")
            .mul(&ParamPoly::symbol(t, "d"))
            .sub(&ParamPoly::symbol(t, "b").mul(&ParamPoly::symbol(t, "d")));
        assert_eq!(factors[0], expect);

        // zero list for a zero eta
        let lin = parse_system("dx = y\ndy = 0\ndz = -z").unwrap();
        let fam0 = build_family(&lin.field, 2, PerturbationMode::Zero).unwrap();
        let etas0 = eta_quantities(&fam0, 1).unwrap();
        assert!(eta_necessary_factors(&etas0, &fam0.unknowns)
            .unwrap()
            .is_empty());
    }
}
