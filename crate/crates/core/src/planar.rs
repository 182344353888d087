//! Planar inverse-integrating-factor machinery: residual verification of
//! candidate factors, a degree-by-degree obstruction pipeline for restricted
//! systems, and quasi-homogeneous decomposition.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;

use crate::algebra::{AlgebraError, Axis, CoefFrac, PhaseMono, PhasePoly, SymbolTable};

/// Planar vector field `(y + P(x,y), Q(x,y))` stored by its nonlinear parts.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarField {
    px: PhasePoly,
    py: PhasePoly,
    table: Arc<SymbolTable>,
}

impl PlanarField {
    pub fn new(
        table: &Arc<SymbolTable>,
        px: PhasePoly,
        py: PhasePoly,
    ) -> Result<PlanarField, AlgebraError> {
        for (name, p) in [("dx", &px), ("dy", &py)] {
            if p.has_z() {
                return Err(AlgebraError::BadStructure(format!(
                    "planar component {name} depends on z"
                )));
            }
            if p.min_degree() < 2 {
                return Err(AlgebraError::BadStructure(format!(
                    "nonlinear part of {name} contains a term of degree < 2"
                )));
            }
        }
        Ok(PlanarField {
            px,
            py,
            table: Arc::clone(table),
        })
    }

    pub fn px(&self) -> &PhasePoly {
        &self.px
    }

    pub fn py(&self) -> &PhasePoly {
        &self.py
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    /// Full first component `y + P`.
    pub fn dx(&self) -> PhasePoly {
        PhasePoly::var(&self.table, Axis::Y).add(&self.px)
    }

    pub fn dy(&self) -> PhasePoly {
        self.py.clone()
    }

    pub fn divergence(&self) -> PhasePoly {
        self.px
            .derivative(Axis::X)
            .add(&self.py.derivative(Axis::Y))
    }

    pub fn known_degree(&self) -> u32 {
        self.px.trunc().min(self.py.trunc())
    }

    pub fn substitute(
        &self,
        assign: &BTreeMap<String, CoefFrac>,
    ) -> Result<PlanarField, AlgebraError> {
        Ok(PlanarField {
            px: self.px.substitute_params(assign)?,
            py: self.py.substitute_params(assign)?,
            table: Arc::clone(&self.table),
        })
    }
}

impl std::fmt::Display for PlanarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::sysio::print_planar_field(self))
    }
}

/// `S(v) - v div S` truncated at `n`; identically zero certifies `v` as an
/// inverse integrating factor to that order.
pub fn verify_iif(s: &PlanarField, v: &PhasePoly, n: u32) -> Result<PhasePoly, AlgebraError> {
    if v.trunc() < n {
        return Err(AlgebraError::TruncationUnderflow {
            known: v.trunc(),
            needed: n,
        });
    }
    let lie = s
        .dx()
        .mul_capped(&v.derivative(Axis::X), n)
        .add(&s.dy().mul_capped(&v.derivative(Axis::Y), n));
    let vdiv = v.mul_capped(&s.divergence(), n);
    lie.sub(&vdiv).require_trunc(n)
}

/// Seed jet for the planar obstruction pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarSeed {
    /// `v = 1 + ...`
    One,
    /// `v = y^2 + ...`
    Y2,
}

impl PlanarSeed {
    pub fn degree(&self) -> u32 {
        match self {
            PlanarSeed::One => 0,
            PlanarSeed::Y2 => 2,
        }
    }

    fn jet(&self, table: &Arc<SymbolTable>) -> PhasePoly {
        match self {
            PlanarSeed::One => PhasePoly::constant(CoefFrac::one(table)),
            PlanarSeed::Y2 => PhasePoly::monomial(PhaseMono::new(0, 2, 0), CoefFrac::one(table)),
        }
    }
}

/// Result of the planar pipeline: `S(v) - v div S = sum_n Lambda_n x^n`.
#[derive(Debug, Clone)]
pub struct PlanarRun {
    pub seed: PlanarSeed,
    pub max_degree: u32,
    /// `lambdas[n]` is the residue on `x^n` (index 0 unused for seed One).
    pub lambdas: Vec<CoefFrac>,
    pub v_jet: PhasePoly,
}

/// Builds `v` degree by degree so that `S(v) - v div S = sum Lambda_n x^n`.
/// The degree-preserving operator is `y d/dx`, whose kernel at degree n is
/// `y^n` (coefficient fixed to zero) and whose image misses `x^n`.
pub fn planar_obstructions(
    s: &PlanarField,
    seed: PlanarSeed,
    n_max: u32,
) -> Result<PlanarRun, AlgebraError> {
    let table = &s.table;
    let mut v = seed.jet(table).with_trunc(n_max);
    let div = s.divergence();
    let mut lambdas = vec![CoefFrac::zero(table); n_max as usize + 1];
    for n in (seed.degree() + 1)..=n_max {
        // degree-n part of P dv/dx + Q dv/dy - v div S, built from lower orders
        let f_n = s
            .px
            .mul_capped(&v.derivative(Axis::X), n)
            .add(&s.py.mul_capped(&v.derivative(Axis::Y), n))
            .sub(&v.mul_capped(&div, n))
            .homogeneous_part(n);
        // solve (y d/dx)(v_n) + f_n = Lambda x^n: coefficient at x^j y^(n-j)
        // of (y d/dx)(v_n) is (j+1) * v_{j+1}
        let mut v_n = Vec::new();
        for j in (0..n).rev() {
            let f_j = f_n
                .coefficient(&PhaseMono::new(j, n - j, 0))
                .cloned()
                .unwrap_or_else(|| CoefFrac::zero(table));
            if !f_j.is_zero() {
                v_n.push((
                    PhaseMono::new(j + 1, n - j - 1, 0),
                    f_j.mul_rat(&BigRational::new((-1).into(), (j as i64 + 1).into())),
                ));
            }
        }
        lambdas[n as usize] = f_n
            .coefficient(&PhaseMono::new(n, 0, 0))
            .cloned()
            .unwrap_or_else(|| CoefFrac::zero(table));
        v = v.add(&PhasePoly::from_terms(v_n).with_trunc(n_max));
    }
    Ok(PlanarRun {
        seed,
        max_degree: n_max,
        lambdas,
        v_jet: v,
    })
}

/// Decomposition into `(t1,t2)`-quasi-homogeneous components keyed by
/// weighted degree `t1*i + t2*j`.
#[derive(Debug, Clone)]
pub struct QuasiDecomposition {
    pub weights: (u32, u32),
    pub components: BTreeMap<u32, PhasePoly>,
}

pub fn quasi_components(p: &PhasePoly, t1: u32, t2: u32) -> QuasiDecomposition {
    let mut components: BTreeMap<u32, PhasePoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let k = t1 * m.xe + t2 * m.ye;
        let entry = components.entry(k).or_insert_with(PhasePoly::zero);
        *entry = entry.add(&PhasePoly::monomial(*m, c.clone()));
    }
    QuasiDecomposition {
        weights: (t1, t2),
        components,
    }
}
