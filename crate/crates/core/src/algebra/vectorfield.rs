use std::collections::BTreeMap;
use std::sync::Arc;

use super::coeffrac::CoefFrac;
use super::error::AlgebraError;
use super::phasepoly::{Axis, PhaseMono, PhasePoly, EXACT};
use super::symbols::SymbolTable;

/// Polynomial vector field with nilpotent linear part `(y, 0, -lambda*z)`.
///
/// `px`, `py`, `pz` hold the nonlinear parts only (order >= 2); the linear
/// structure is implicit. `lambda` is nonzero, usually a rational literal but
/// possibly symbolic.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField3 {
    px: PhasePoly,
    py: PhasePoly,
    pz: PhasePoly,
    lambda: CoefFrac,
    table: Arc<SymbolTable>,
}

impl VectorField3 {
    pub fn new(
        table: &Arc<SymbolTable>,
        px: PhasePoly,
        py: PhasePoly,
        pz: PhasePoly,
        lambda: CoefFrac,
    ) -> Result<VectorField3, AlgebraError> {
        if lambda.is_zero() {
            return Err(AlgebraError::BadStructure("lambda must be nonzero".into()));
        }
        for (name, p) in [("dx", &px), ("dy", &py), ("dz", &pz)] {
            if p.min_degree() < 2 {
                return Err(AlgebraError::BadStructure(format!(
                    "nonlinear part of {name} contains a term of degree < 2"
                )));
            }
        }
        Ok(VectorField3 {
            px,
            py,
            pz,
            lambda,
            table: Arc::clone(table),
        })
    }

    pub fn linear(table: &Arc<SymbolTable>, lambda: CoefFrac) -> VectorField3 {
        VectorField3::new(
            table,
            PhasePoly::zero(),
            PhasePoly::zero(),
            PhasePoly::zero(),
            lambda,
        )
        .expect("linear field is well formed")
    }

    pub fn px(&self) -> &PhasePoly {
        &self.px
    }

    pub fn py(&self) -> &PhasePoly {
        &self.py
    }

    pub fn pz(&self) -> &PhasePoly {
        &self.pz
    }

    pub fn lambda(&self) -> &CoefFrac {
        &self.lambda
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    /// Returns the field rebuilt over an extended symbol table (tables only
    /// ever grow, so existing coefficients stay valid).
    pub fn with_table(&self, table: &Arc<SymbolTable>) -> VectorField3 {
        VectorField3 {
            px: self.px.clone(),
            py: self.py.clone(),
            pz: self.pz.clone(),
            lambda: self.lambda.clone(),
            table: Arc::clone(table),
        }
    }

    /// Full first component `y + P`.
    pub fn dx(&self) -> PhasePoly {
        PhasePoly::var(&self.table, Axis::Y).add(&self.px)
    }

    /// Full second component `Q`.
    pub fn dy(&self) -> PhasePoly {
        self.py.clone()
    }

    /// Full third component `-lambda*z + R`.
    pub fn dz(&self) -> PhasePoly {
        PhasePoly::var(&self.table, Axis::Z)
            .scale(&self.lambda.neg())
            .add(&self.pz)
    }

    /// Coefficient of `x^j y^k z^l` in the requested component (counting the
    /// linear part), used to read the monodromy-criterion coefficients.
    pub fn coefficient(&self, component: Axis, mono: PhaseMono) -> CoefFrac {
        let p = match component {
            Axis::X => self.dx(),
            Axis::Y => self.dy(),
            Axis::Z => self.dz(),
        };
        p.coefficient(&mono)
            .cloned()
            .unwrap_or_else(|| CoefFrac::zero(&self.table))
    }

    /// Divergence `-lambda + dP/dx + dQ/dy + dR/dz`, exact for polynomial
    /// fields and truncated one below the stored degree for jets.
    pub fn divergence(&self) -> PhasePoly {
        let c = PhasePoly::constant(self.lambda.neg());
        c.add(&self.px.derivative(Axis::X))
            .add(&self.py.derivative(Axis::Y))
            .add(&self.pz.derivative(Axis::Z))
    }

    /// Nonlinear part of the divergence, `dP/dx + dQ/dy + dR/dz`.
    pub fn divergence_nonlinear(&self) -> PhasePoly {
        self.px
            .derivative(Axis::X)
            .add(&self.py.derivative(Axis::Y))
            .add(&self.pz.derivative(Axis::Z))
    }

    /// Lie derivative `X(V) = (y+P) dV/dx + Q dV/dy + (-lambda z + R) dV/dz`,
    /// truncated at `n`. Errors when `V` is not known to degree `n`.
    pub fn lie_derivative(&self, v: &PhasePoly, n: u32) -> Result<PhasePoly, AlgebraError> {
        if v.trunc() < n {
            return Err(AlgebraError::TruncationUnderflow {
                known: v.trunc(),
                needed: n,
            });
        }
        let out = self
            .dx()
            .mul_capped(&v.derivative(Axis::X), n)
            .add(&self.dy().mul_capped(&v.derivative(Axis::Y), n))
            .add(&self.dz().mul_capped(&v.derivative(Axis::Z), n));
        out.require_trunc(n)
    }

    /// Inverse-Jacobi-multiplier residual `X(V) - V div X`, truncated at `n`.
    /// Identically zero exactly when `V` is a multiplier to that order.
    pub fn ijm_residual(&self, v: &PhasePoly, n: u32) -> Result<PhasePoly, AlgebraError> {
        let lie = self.lie_derivative(v, n)?;
        let vdiv = v.mul_capped(&self.divergence(), n);
        lie.sub(&vdiv).require_trunc(n)
    }

    /// Exact substitution of parameters in all components and in lambda.
    pub fn substitute(
        &self,
        assign: &BTreeMap<String, CoefFrac>,
    ) -> Result<VectorField3, AlgebraError> {
        let lambda = self.lambda.substitute(assign)?;
        if lambda.is_zero() {
            return Err(AlgebraError::BadStructure(
                "substitution makes lambda vanish".into(),
            ));
        }
        Ok(VectorField3 {
            px: self.px.substitute_params(assign)?,
            py: self.py.substitute_params(assign)?,
            pz: self.pz.substitute_params(assign)?,
            lambda,
            table: Arc::clone(&self.table),
        })
    }

    /// Largest degree to which all nonlinear parts are reliable.
    pub fn known_degree(&self) -> u32 {
        self.px
            .trunc()
            .min(self.py.trunc())
            .min(self.pz.trunc())
    }

    pub fn is_exact(&self) -> bool {
        self.known_degree() == EXACT
    }
}

impl std::fmt::Display for VectorField3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::sysio::print_vector_field(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::sysio::parse_system;

    fn swf() -> VectorField3 {
        parse_system(include_str!("../../../../systems/song_wang_feng.sys"))
            .unwrap()
            .field
    }

    #[test]
    fn lie_derivative_examples() {
        let t = SymbolTable::empty();
        let linear = VectorField3::linear(&t, CoefFrac::one(&t));
        let z = PhasePoly::var(&t, Axis::Z);
        let x = PhasePoly::var(&t, Axis::X);
        let y = PhasePoly::var(&t, Axis::Y);
        // X = (y, 0, -z): X(z) = -z, X(x) = y
        assert_eq!(linear.lie_derivative(&z, 3).unwrap(), z.neg());
        assert_eq!(linear.lie_derivative(&x, 2).unwrap(), y);

        // Song-Wang-Feng: X(z) = -z + d*x*y
        let f = swf();
        let tz = PhasePoly::var(f.table(), Axis::Z);
        let got = f.lie_derivative(&tz, 3).unwrap();
        let d = CoefFrac::symbol(f.table(), "d");
        let expect = tz
            .neg()
            .add(&PhasePoly::monomial(PhaseMono::new(1, 1, 0), d));
        assert_eq!(got, expect);
    }

    #[test]
    fn truncation_underflow_is_an_error() {
        let f = swf();
        let v = PhasePoly::var(f.table(), Axis::Z).truncated(2);
        assert!(matches!(
            f.lie_derivative(&v, 3),
            Err(AlgebraError::TruncationUnderflow { known: 2, needed: 3 })
        ));
    }

    #[test]
    fn divergence_examples() {
        let t = SymbolTable::empty();
        let lam2 = CoefFrac::from_rat(&t, rat(2, 1));
        let linear = VectorField3::linear(&t, lam2.clone());
        assert_eq!(
            linear.divergence(),
            PhasePoly::constant(lam2.neg())
        );

        // Song-Wang-Feng: div = -1 + (a+b) z
        let f = swf();
        let a = CoefFrac::symbol(f.table(), "a");
        let b = CoefFrac::symbol(f.table(), "b");
        let expect = PhasePoly::constant(CoefFrac::from_rat(f.table(), rat(-1, 1)))
            .add(&PhasePoly::monomial(PhaseMono::new(0, 0, 1), a.add(&b)));
        assert_eq!(f.divergence(), expect);
    }

    #[test]
    fn jerk_divergence_expands_by_hand() {
        let f = parse_system(include_str!("../../../../systems/jerk.sys"))
            .unwrap()
            .field;
        let t = f.table();
        let sym = |n: &str| CoefFrac::symbol(t, n);
        // -1 - dF/dx + dF/dy + dF/dz, expanded by hand differentiation
        let mut expect = PhasePoly::constant(CoefFrac::from_rat(t, rat(-1, 1)));
        let add = |p: PhasePoly, m: PhaseMono, c: CoefFrac| p.add(&PhasePoly::monomial(m, c));
        expect = add(expect, PhaseMono::new(2, 0, 0), sym("g300").mul_rat(&rat(-3, 1)).add(&sym("g210")));
        expect = add(expect, PhaseMono::new(1, 1, 0), sym("g210").mul_rat(&rat(-2, 1)).add(&sym("g120").mul_rat(&rat(2, 1))));
        expect = add(expect, PhaseMono::new(0, 2, 0), sym("g120").neg().add(&sym("g030").mul_rat(&rat(3, 1))));
        expect = add(expect, PhaseMono::new(0, 0, 1), sym("g011"));
        expect = add(expect, PhaseMono::new(0, 1, 0), sym("g011"));
        assert_eq!(f.divergence(), expect);
    }

    #[test]
    fn divergence_free_planar_embedding() {
        // first two components Hamiltonian: the part of the divergence beyond
        // -lambda vanishes identically
        let f = parse_system("dx = y - 2*x*y\ndy = -2*x^3 + y^2\ndz = -z").unwrap().field;
        assert!(f.divergence_nonlinear().is_zero());
        assert_eq!(
            f.divergence(),
            PhasePoly::constant(CoefFrac::from_rat(f.table(), rat(-1, 1)))
        );
    }

    #[test]
    fn residual_examples() {
        let lam = CoefFrac::symbol(&SymbolTable::new(&["lambda"]), "lambda");
        let tab = Arc::clone(lam.table());
        let linear = VectorField3::linear(&tab, lam.clone());
        let z = PhasePoly::var(&tab, Axis::Z);
        let x = PhasePoly::var(&tab, Axis::X);
        let y = PhasePoly::var(&tab, Axis::Y);
        // V = z is an exact multiplier of the linear field
        assert!(linear.ijm_residual(&z, 4).unwrap().is_zero());
        // V = x leaves y + lambda*x
        let got = linear.ijm_residual(&x, 2).unwrap();
        assert_eq!(got, y.add(&x.scale(&lam)));

        // Song-Wang-Feng with a=b=d=0: V = z is exact
        let f = swf();
        let zero = CoefFrac::zero(f.table());
        let assign: BTreeMap<String, CoefFrac> = ["a", "b", "d"]
            .iter()
            .map(|s| (s.to_string(), zero.clone()))
            .collect();
        let f0 = f.substitute(&assign).unwrap();
        let vz = PhasePoly::var(f0.table(), Axis::Z);
        assert!(f0.ijm_residual(&vz, 8).unwrap().is_zero());
    }
}
