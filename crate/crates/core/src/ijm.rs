//! The inverse-Jacobi-multiplier obstruction pipeline: builds a formal series
//! `V` degree by degree so that `X(V) - V div X = sum_n Lambda_n x^(n-1) z`
//! exactly, starting from one of the two admissible seeds `z` or `y^2 z`.
//!
//! At each degree past the seed the kernel direction `y^(n-1) z` is left free
//! and a fresh symbolic unknown `v_{0,n-1,1}` is injected for it, so the
//! obstructions can depend on those unknowns exactly as the worked families
//! require. Forced substitutions (solving an obstruction for one symbol and
//! propagating) are recorded in a ledger.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{
    AlgebraError, Axis, CoefFrac, PhaseMono, PhasePoly, PolyMap3, SymbolTable, VectorField3,
};
use crate::homological::{kernel_unknown_name, solve_modulo_residue};

/// Lowest admissible jet of the multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    /// `j^1 V = z`
    Z,
    /// `j^3 V = y^2 z`
    Zy2,
}

impl Seed {
    pub fn degree(&self) -> u32 {
        match self {
            Seed::Z => 1,
            Seed::Zy2 => 3,
        }
    }

    pub fn jet(&self, table: &Arc<SymbolTable>) -> PhasePoly {
        let mono = match self {
            Seed::Z => PhaseMono::new(0, 0, 1),
            Seed::Zy2 => PhaseMono::new(0, 2, 1),
        };
        PhasePoly::monomial(mono, CoefFrac::one(table))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Seed::Z => "z",
            Seed::Zy2 => "zy2",
        }
    }
}

/// One forced substitution applied during reduction.
#[derive(Debug, Clone)]
pub struct ForcedSubstitution {
    pub symbol: String,
    pub value: CoefFrac,
    /// Index n of the obstruction `Lambda_n` that was solved.
    pub solved_from: u32,
}

/// The result of an obstruction run.
#[derive(Debug, Clone)]
pub struct ObstructionRun {
    pub seed: Seed,
    pub max_degree: u32,
    /// `lambdas[n-1]` is `Lambda_n`.
    pub lambdas: Vec<CoefFrac>,
    pub v_jet: PhasePoly,
    pub kernel_unknowns: Vec<String>,
    pub ledger: Vec<ForcedSubstitution>,
    table: Arc<SymbolTable>,
}

impl ObstructionRun {
    pub fn lambda(&self, n: u32) -> &CoefFrac {
        &self.lambdas[(n - 1) as usize]
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    /// The accumulated substitutions as an assignment map.
    pub fn ledger_assignments(&self) -> BTreeMap<String, CoefFrac> {
        self.ledger
            .iter()
            .map(|f| (f.symbol.clone(), f.value.clone()))
            .collect()
    }

    /// Every obstruction with the ledger substitutions replayed in order;
    /// solved obstructions become zero and later ones show their reduced
    /// parameter-only form.
    pub fn reduced_lambdas(&self) -> Result<Vec<CoefFrac>, AlgebraError> {
        let mut lambdas = self.lambdas.clone();
        for f in &self.ledger {
            let assign: BTreeMap<String, CoefFrac> =
                [(f.symbol.clone(), f.value.clone())].into_iter().collect();
            for lam in lambdas.iter_mut() {
                *lam = lam.substitute(&assign)?;
            }
        }
        Ok(lambdas)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum IjmError {
    Algebra(AlgebraError),
    /// The designated obstruction is not linear in the symbol:
    /// manual reduction required.
    NotLinear { symbol: String, lambda_index: u32 },
    /// No remaining nonzero obstruction involves the symbol.
    NothingToSolve { symbol: String },
}

impl std::fmt::Display for IjmError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IjmError::Algebra(e) => write!(f, "{e}"),
            IjmError::NotLinear {
                symbol,
                lambda_index,
            } => write!(
                f,
                "Lambda_{lambda_index} is not linear in {symbol}: manual reduction required"
            ),
            IjmError::NothingToSolve { symbol } => {
                write!(f, "no remaining nonzero obstruction involves {symbol}")
            }
        }
    }
}

impl std::error::Error for IjmError {}

impl From<AlgebraError> for IjmError {
    fn from(e: AlgebraError) -> IjmError {
        IjmError::Algebra(e)
    }
}

/// Runs the pipeline to degree `n_max`: at each degree assembles the forcing
/// term from lower-order data, solves modulo the residue direction and
/// injects a fresh kernel unknown. The returned run satisfies
/// `X(V) - V div X = sum Lambda_n x^(n-1) z` identically at truncation.
pub fn obstructions(
    x: &VectorField3,
    seed: Seed,
    n_max: u32,
) -> Result<ObstructionRun, IjmError> {
    assert!(n_max >= seed.degree(), "max degree below seed degree");
    // extend the table with every kernel unknown this run will introduce
    let mut table = Arc::clone(x.table());
    let mut kernel_unknowns = Vec::new();
    for n in (seed.degree() + 1)..=n_max {
        let name = kernel_unknown_name(n);
        if table.contains(&name) {
            return Err(AlgebraError::SymbolExists(name).into());
        }
        table = SymbolTable::with_symbol(&table, &name);
        kernel_unknowns.push(name);
    }
    let x = x.with_table(&table);

    let d_plus = x.divergence_nonlinear();
    let mut v = seed.jet(&table).with_trunc(n_max);
    let mut lambdas = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let f_n = x
            .px()
            .mul_capped(&v.derivative(Axis::X), n)
            .add(&x.py().mul_capped(&v.derivative(Axis::Y), n))
            .add(&x.pz().mul_capped(&v.derivative(Axis::Z), n))
            .sub(&v.mul_capped(&d_plus, n))
            .homogeneous_part(n);
        let mut v_n = if f_n.is_zero() {
            lambdas.push(CoefFrac::zero(&table));
            PhasePoly::zero()
        } else {
            let sol = solve_modulo_residue(&f_n, x.lambda())?;
            lambdas.push(sol.lambda_coef);
            sol.particular
        };
        if n > seed.degree() {
            let unknown = CoefFrac::symbol(&table, &kernel_unknown_name(n));
            v_n = v_n.add(&PhasePoly::monomial(PhaseMono::new(0, n - 1, 1), unknown));
        }
        v = v.add(&v_n.with_trunc(n_max));
    }
    Ok(ObstructionRun {
        seed,
        max_degree: n_max,
        lambdas,
        v_jet: v,
        kernel_unknowns,
        ledger: Vec::new(),
        table,
    })
}

/// Solves obstructions for the given symbols, in order: each symbol is paired
/// with the first remaining nonzero obstruction that involves it, that
/// obstruction is solved (it must be linear in the symbol) and the value is
/// substituted into every later obstruction and the multiplier jet.
pub fn reduce_chain(run: &ObstructionRun, solve_for: &[String]) -> Result<ObstructionRun, IjmError> {
    let mut out = run.clone();
    let mut consumed = vec![false; out.lambdas.len()];
    for symbol in solve_for {
        let mut found = None;
        for (i, lam) in out.lambdas.iter().enumerate() {
            if consumed[i] || lam.is_zero() {
                continue;
            }
            if lam.contains_symbol(symbol) {
                found = Some(i);
                break;
            }
        }
        let i = found.ok_or_else(|| IjmError::NothingToSolve {
            symbol: symbol.clone(),
        })?;
        let (a, b) = out.lambdas[i]
            .split_linear(symbol)
            .filter(|(a, _)| !a.is_zero())
            .ok_or_else(|| IjmError::NotLinear {
                symbol: symbol.clone(),
                lambda_index: i as u32 + 1,
            })?;
        let value = b.neg().div(&a)?;
        let assign: BTreeMap<String, CoefFrac> =
            [(symbol.clone(), value.clone())].into_iter().collect();
        for lam in out.lambdas.iter_mut().skip(i + 1) {
            *lam = lam.substitute(&assign)?;
        }
        out.v_jet = out.v_jet.substitute_params(&assign)?;
        consumed[i] = true;
        out.ledger.push(ForcedSubstitution {
            symbol: symbol.clone(),
            value,
            solved_from: i as u32 + 1,
        });
    }
    Ok(out)
}

/// Discharges kernel unknowns: walks obstructions in degree order and, for
/// each nonzero one that is linear in a kernel unknown of the run, solves for
/// the first such unknown and propagates. The surviving obstructions are the
/// genuine parameter conditions.
pub fn reduce_kernel_unknowns(run: &ObstructionRun) -> Result<ObstructionRun, IjmError> {
    let mut out = run.clone();
    loop {
        let mut target = None;
        'outer: for lam in out.lambdas.iter() {
            if lam.is_zero() {
                continue;
            }
            for unknown in &out.kernel_unknowns {
                if out.ledger.iter().any(|f| &f.symbol == unknown) {
                    continue;
                }
                if lam.contains_symbol(unknown)
                    && lam.split_linear(unknown).map(|(a, _)| !a.is_zero()) == Some(true) {
                        target = Some(unknown.clone());
                        break 'outer;
                    }
            }
        }
        match target {
            Some(sym) => out = reduce_chain(&out, &[sym])?,
            None => return Ok(out),
        }
    }
}

/// Which seeds a multiplier jet can start from, gated by the monodromy
/// condition: `beta = n-1` forces the `y^2 z` seed, `beta > n-1` admits both
/// (a unit multiplier restricts to `V = z` in three dimensions). When the
/// switch `2 a200 + b110` is symbolic both seeds stay available.
pub fn admissible_seeds(x: &VectorField3) -> Result<Vec<Seed>, AlgebraError> {
    let c = crate::monodromy::andreev2_criterion_3d(x)?;
    Ok(match c.beta_case {
        crate::monodromy::BetaCase::EqNMinus1 => vec![Seed::Zy2],
        _ => vec![Seed::Z, Seed::Zy2],
    })
}

/// Transforms a multiplier through a change of variables:
/// `W = det(d phi) * (V o phi^{-1})`, truncated at `n`.
pub fn transform_multiplier(
    v: &PhasePoly,
    phi: &PolyMap3,
    n: u32,
) -> Result<PhasePoly, AlgebraError> {
    let inv = phi.inverse(n)?;
    let det_old = phi.jacobian_det(n);
    let det_new = inv.apply(&det_old, n);
    let v_new = inv.apply(v, n);
    Ok(det_new.mul_capped(&v_new, n))
}

/// Recomputes the residual through the plain algebra path and compares with
/// the recorded obstructions. Ledger substitutions are replayed in order on
/// the field and on every obstruction (the run keeps solved obstructions in
/// their raw display form), so reduced runs check against the reduced system.
pub fn self_check(x: &VectorField3, run: &ObstructionRun) -> Result<bool, AlgebraError> {
    let mut x = x.clone();
    let mut lambdas = run.lambdas.clone();
    for f in &run.ledger {
        let assign: BTreeMap<String, CoefFrac> =
            [(f.symbol.clone(), f.value.clone())].into_iter().collect();
        x = x.substitute(&assign)?;
        for lam in lambdas.iter_mut() {
            *lam = lam.substitute(&assign)?;
        }
    }
    let residual = x.ijm_residual(&run.v_jet, run.max_degree)?;
    let mut expected = PhasePoly::zero_jet(run.max_degree);
    for (i, lam) in lambdas.iter().enumerate() {
        expected = expected.add(&PhasePoly::monomial(
            PhaseMono::new(i as u32, 0, 1),
            lam.clone(),
        ));
    }
    Ok(residual == expected)
}
