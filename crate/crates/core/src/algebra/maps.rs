use std::sync::Arc;

use super::coeffrac::CoefFrac;
use super::error::AlgebraError;
use super::phasepoly::{Axis, PhaseMono, PhasePoly};
use super::symbols::SymbolTable;
use super::vectorfield::VectorField3;

/// Jet of a polynomial map of phase space, `(x,y,z) -> (c0, c1, c2)`.
#[derive(Debug, Clone)]
pub struct PolyMap3 {
    pub components: [PhasePoly; 3],
    table: Arc<SymbolTable>,
}

impl PolyMap3 {
    pub fn new(table: &Arc<SymbolTable>, components: [PhasePoly; 3]) -> PolyMap3 {
        PolyMap3 {
            components,
            table: Arc::clone(table),
        }
    }

    pub fn identity(table: &Arc<SymbolTable>) -> PolyMap3 {
        PolyMap3::new(
            table,
            [
                PhasePoly::var(table, Axis::X),
                PhasePoly::var(table, Axis::Y),
                PhasePoly::var(table, Axis::Z),
            ],
        )
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    /// 3x3 matrix of the linear part, row = component, column = variable.
    pub fn linear_matrix(&self) -> [[CoefFrac; 3]; 3] {
        let get = |p: &PhasePoly, m: PhaseMono| {
            p.coefficient(&m)
                .cloned()
                .unwrap_or_else(|| CoefFrac::zero(&self.table))
        };
        let cols = [
            PhaseMono::new(1, 0, 0),
            PhaseMono::new(0, 1, 0),
            PhaseMono::new(0, 0, 1),
        ];
        std::array::from_fn(|i| std::array::from_fn(|j| get(&self.components[i], cols[j])))
    }

    /// Substitutes the map's components into `p`, truncated at `cap`.
    pub fn apply(&self, p: &PhasePoly, cap: u32) -> PhasePoly {
        // substitute one variable at a time through fresh intermediates: the
        // map components may themselves involve all of x, y, z, so go through
        // an explicit monomial expansion instead.
        let mut out = PhasePoly::zero_jet(cap);
        let mut pow_cache: [Vec<PhasePoly>; 3] = [
            vec![PhasePoly::constant(CoefFrac::one(&self.table))],
            vec![PhasePoly::constant(CoefFrac::one(&self.table))],
            vec![PhasePoly::constant(CoefFrac::one(&self.table))],
        ];
        let mut power = |axis: usize, e: u32, comp: &PhasePoly| -> PhasePoly {
            while pow_cache[axis].len() <= e as usize {
                let last = pow_cache[axis].last().unwrap();
                pow_cache[axis].push(last.mul_capped(comp, cap));
            }
            pow_cache[axis][e as usize].clone()
        };
        for (m, c) in p.terms() {
            let px = power(0, m.xe, &self.components[0]);
            let py = power(1, m.ye, &self.components[1]);
            let pz = power(2, m.ze, &self.components[2]);
            let term = px.mul_capped(&py, cap).mul_capped(&pz, cap).scale(c);
            out = out.add(&term);
        }
        let reliable = p.trunc().min(cap);
        out.with_trunc(reliable)
    }

    /// Composition `self . other`, truncated at `cap`.
    pub fn compose(&self, other: &PolyMap3, cap: u32) -> PolyMap3 {
        PolyMap3::new(
            &self.table,
            [
                other.apply(&self.components[0], cap),
                other.apply(&self.components[1], cap),
                other.apply(&self.components[2], cap),
            ],
        )
    }

    /// Compositional inverse jet to degree `cap`; errors when the linear part
    /// is singular.
    pub fn inverse(&self, cap: u32) -> Result<PolyMap3, AlgebraError> {
        let a = self.linear_matrix();
        let a_inv = invert3(&a)?;
        let vars = [
            PhasePoly::var(&self.table, Axis::X),
            PhasePoly::var(&self.table, Axis::Y),
            PhasePoly::var(&self.table, Axis::Z),
        ];
        let lin_applied = |m: &[[CoefFrac; 3]; 3], v: &[PhasePoly; 3]| -> [PhasePoly; 3] {
            std::array::from_fn(|i| {
                v[0].scale(&m[i][0])
                    .add(&v[1].scale(&m[i][1]))
                    .add(&v[2].scale(&m[i][2]))
            })
        };
        // nonlinear part of the map
        let nl: [PhasePoly; 3] = {
            let lin = lin_applied(&a, &vars);
            std::array::from_fn(|i| self.components[i].sub(&lin[i]))
        };
        // fixed point iteration: psi <- A^{-1} (u - nl(psi)); gains one degree
        // of correctness per round
        let mut psi = PolyMap3::new(&self.table, lin_applied(&a_inv, &vars));
        for _ in 1..cap.max(1) {
            let nl_of_psi: [PhasePoly; 3] = std::array::from_fn(|i| psi.apply(&nl[i], cap));
            let shifted: [PhasePoly; 3] = std::array::from_fn(|i| vars[i].sub(&nl_of_psi[i]));
            psi = PolyMap3::new(&self.table, lin_applied(&a_inv, &shifted));
        }
        for c in psi.components.iter_mut() {
            *c = c.truncated(cap);
        }
        Ok(psi)
    }

    /// Determinant of the Jacobian matrix, truncated at `cap`.
    pub fn jacobian_det(&self, cap: u32) -> PhasePoly {
        let d = |i: usize, ax: Axis| self.components[i].derivative(ax);
        let j: [[PhasePoly; 3]; 3] =
            std::array::from_fn(|i| [d(i, Axis::X), d(i, Axis::Y), d(i, Axis::Z)]);
        let minor = |r0: usize, r1: usize, c0: usize, c1: usize| {
            j[r0][c0]
                .mul_capped(&j[r1][c1], cap)
                .sub(&j[r0][c1].mul_capped(&j[r1][c0], cap))
        };
        j[0][0]
            .mul_capped(&minor(1, 2, 1, 2), cap)
            .sub(&j[0][1].mul_capped(&minor(1, 2, 0, 2), cap))
            .add(&j[0][2].mul_capped(&minor(1, 2, 0, 1), cap))
    }

    /// Pushforward of a vector field: `Y = (dphi . X) o phi^{-1}`, truncated
    /// at `cap`. The result must again have the nilpotent linear structure,
    /// which near-identity changes of variables preserve.
    pub fn pushforward(&self, x: &VectorField3, cap: u32) -> Result<VectorField3, AlgebraError> {
        let inv = self.inverse(cap)?;
        let comps = [x.dx(), x.dy(), x.dz()];
        let mut pushed: [PhasePoly; 3] = std::array::from_fn(|_| PhasePoly::zero_jet(cap));
        for (i, out) in pushed.iter_mut().enumerate() {
            let dphi = [
                self.components[i].derivative(Axis::X),
                self.components[i].derivative(Axis::Y),
                self.components[i].derivative(Axis::Z),
            ];
            let mut acc = PhasePoly::zero_jet(cap);
            for (d, c) in dphi.iter().zip(comps.iter()) {
                acc = acc.add(&d.mul_capped(c, cap));
            }
            *out = inv.apply(&acc, cap);
        }
        // split linear part and validate the nilpotent shape
        let y_mono = PhaseMono::new(0, 1, 0);
        let z_mono = PhaseMono::new(0, 0, 1);
        let one = CoefFrac::one(&self.table);
        let y_coeff = pushed[0]
            .coefficient(&y_mono)
            .cloned()
            .unwrap_or_else(|| CoefFrac::zero(&self.table));
        if y_coeff != one {
            return Err(AlgebraError::BadStructure(
                "pushforward does not preserve the linear part".into(),
            ));
        }
        let lambda = pushed[2]
            .coefficient(&z_mono)
            .cloned()
            .unwrap_or_else(|| CoefFrac::zero(&self.table))
            .neg();
        let strip = |p: &PhasePoly| -> PhasePoly {
            PhasePoly::from_terms(
                p.terms()
                    .filter(|(m, _)| m.degree() >= 2)
                    .map(|(m, c)| (*m, c.clone())),
            )
            .with_trunc(p.trunc())
        };
        let lin_defect = |p: &PhasePoly, expect: &PhasePoly| -> bool {
            let low: PhasePoly = PhasePoly::from_terms(
                p.terms()
                    .filter(|(m, _)| m.degree() < 2)
                    .map(|(m, c)| (*m, c.clone())),
            );
            &low == expect
        };
        let vy = PhasePoly::var(&self.table, Axis::Y);
        let vz = PhasePoly::var(&self.table, Axis::Z).scale(&lambda.neg());
        if !lin_defect(&pushed[0], &vy)
            || !lin_defect(&pushed[1], &PhasePoly::zero())
            || !lin_defect(&pushed[2], &vz)
        {
            return Err(AlgebraError::BadStructure(
                "pushforward does not preserve the linear part".into(),
            ));
        }
        VectorField3::new(
            &self.table,
            strip(&pushed[0]),
            strip(&pushed[1]),
            strip(&pushed[2]),
            lambda,
        )
    }
}

fn invert3(a: &[[CoefFrac; 3]; 3]) -> Result<[[CoefFrac; 3]; 3], AlgebraError> {
    let det = a[0][0]
        .mul(&a[1][1].mul(&a[2][2]).sub(&a[1][2].mul(&a[2][1])))
        .sub(&a[0][1].mul(&a[1][0].mul(&a[2][2]).sub(&a[1][2].mul(&a[2][0]))))
        .add(&a[0][2].mul(&a[1][0].mul(&a[2][1]).sub(&a[1][1].mul(&a[2][0]))));
    if det.is_zero() {
        return Err(AlgebraError::BadStructure(
            "map has a non-invertible linear part".into(),
        ));
    }
    let inv_det = det.inverse()?;
    let cof = |r: usize, c: usize| -> CoefFrac {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let m = a[rows[0]][cols[0]]
            .mul(&a[rows[1]][cols[1]])
            .sub(&a[rows[0]][cols[1]].mul(&a[rows[1]][cols[0]]));
        if (r + c).is_multiple_of(2) {
            m
        } else {
            m.neg()
        }
    };
    // adjugate transpose
    Ok(std::array::from_fn(|i| {
        std::array::from_fn(|j| cof(j, i).mul(&inv_det))
    }))
}
