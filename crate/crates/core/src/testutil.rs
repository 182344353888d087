//! Deterministic pseudo-random generation for test suites. Seeded LCG so
//! property-style tests are reproducible across runs and platforms.

use num_rational::BigRational;

use crate::algebra::{rat, CoefFrac, ParamPoly, PhaseMono, PhasePoly, SymbolTable};
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Lcg {
        Lcg {
            state: seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407),
        }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.state >> 33) as u32
    }

    /// Small nonzero-biased rational in [-4, 4] with denominator 1..3.
    pub fn small_rat(&mut self) -> BigRational {
        let n = (self.next_u32() % 9) as i64 - 4;
        let d = (self.next_u32() % 3) as i64 + 1;
        rat(n, d)
    }

    pub fn small_nonzero_rat(&mut self) -> BigRational {
        loop {
            let r = self.small_rat();
            if !num_traits::Zero::is_zero(&r) {
                return r;
            }
        }
    }

    /// Sparse parameter polynomial with up to `max_terms` terms of total
    /// degree <= `max_deg`.
    pub fn param_poly(
        &mut self,
        table: &Arc<SymbolTable>,
        max_terms: u32,
        max_deg: u32,
    ) -> ParamPoly {
        let nsym = table.len().max(1);
        let mut p = ParamPoly::zero(table);
        for _ in 0..(self.next_u32() % (max_terms + 1)) {
            let mut exps = vec![0u32; table.len()];
            let mut budget = self.next_u32() % (max_deg + 1);
            while budget > 0 {
                let i = self.next_u32() as usize % nsym;
                if i < exps.len() {
                    exps[i] += 1;
                }
                budget -= 1;
            }
            let term = ParamPoly::from_terms(table, [(crate::algebra::PMono(exps), self.small_rat())]);
            p = p.add(&term);
        }
        p
    }

    pub fn coef_frac(&mut self, table: &Arc<SymbolTable>, max_terms: u32, max_deg: u32) -> CoefFrac {
        let num = self.param_poly(table, max_terms, max_deg);
        let mut den = self.param_poly(table, max_terms.min(2), max_deg.min(1));
        if den.is_zero() {
            den = ParamPoly::constant(table, self.small_nonzero_rat());
        }
        CoefFrac::new(num, den).unwrap()
    }

    /// Sparse phase polynomial with rational-in-parameters coefficients.
    pub fn phase_poly(
        &mut self,
        table: &Arc<SymbolTable>,
        max_terms: u32,
        max_deg: u32,
        fractional: bool,
    ) -> PhasePoly {
        let mut terms = Vec::new();
        for _ in 0..(self.next_u32() % (max_terms + 1)) {
            let d = self.next_u32() % (max_deg + 1);
            let xe = self.next_u32() % (d + 1);
            let ye = self.next_u32() % (d - xe + 1);
            let ze = d - xe - ye;
            let c = if fractional {
                self.coef_frac(table, 2, 2)
            } else {
                CoefFrac::from_poly(self.param_poly(table, 2, 2))
            };
            terms.push((PhaseMono::new(xe, ye, ze), c));
        }
        PhasePoly::from_terms(terms)
    }
}
