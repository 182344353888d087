use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;

use super::coeffrac::CoefFrac;
use super::error::AlgebraError;
use super::symbols::SymbolTable;

/// Truncation marker for values that are exact polynomials rather than jets.
pub const EXACT: u32 = u32::MAX;

/// Monomial in the phase variables x, y, z. The ordering is graded
/// lexicographic with x > y > z; reverse iteration of a `BTreeMap` therefore
/// walks monomials in the canonical descending print order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseMono {
    pub xe: u32,
    pub ye: u32,
    pub ze: u32,
}

impl PhaseMono {
    pub fn new(xe: u32, ye: u32, ze: u32) -> PhaseMono {
        PhaseMono { xe, ye, ze }
    }

    pub fn degree(&self) -> u32 {
        self.xe + self.ye + self.ze
    }

    pub fn mul(&self, o: &PhaseMono) -> PhaseMono {
        PhaseMono::new(self.xe + o.xe, self.ye + o.ye, self.ze + o.ze)
    }
}

impl Ord for PhaseMono {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.xe, self.ye, self.ze).cmp(&(
            other.degree(),
            other.xe,
            other.ye,
            other.ze,
        ))
    }
}

impl PartialOrd for PhaseMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Axis selector for the phase variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Sparse polynomial / truncated power series in x, y, z over [`CoefFrac`].
///
/// `trunc` is the degree the value is known to: every stored monomial has
/// total degree <= trunc, and arithmetic tracks how far results stay reliable.
/// `EXACT` marks genuine polynomials. Truncation is carried by value, never
/// implicit.
#[derive(Debug, Clone)]
pub struct PhasePoly {
    terms: BTreeMap<PhaseMono, CoefFrac>,
    trunc: u32,
}

impl PhasePoly {
    pub fn zero() -> PhasePoly {
        PhasePoly {
            terms: BTreeMap::new(),
            trunc: EXACT,
        }
    }

    pub fn zero_jet(trunc: u32) -> PhasePoly {
        PhasePoly {
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn monomial(mono: PhaseMono, coef: CoefFrac) -> PhasePoly {
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(mono, coef);
        }
        PhasePoly {
            terms,
            trunc: EXACT,
        }
    }

    pub fn constant(c: CoefFrac) -> PhasePoly {
        PhasePoly::monomial(PhaseMono::new(0, 0, 0), c)
    }

    pub fn var(table: &Arc<SymbolTable>, axis: Axis) -> PhasePoly {
        let mono = match axis {
            Axis::X => PhaseMono::new(1, 0, 0),
            Axis::Y => PhaseMono::new(0, 1, 0),
            Axis::Z => PhaseMono::new(0, 0, 1),
        };
        PhasePoly::monomial(mono, CoefFrac::one(table))
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (PhaseMono, CoefFrac)>) -> PhasePoly {
        let mut p = PhasePoly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn with_trunc(mut self, trunc: u32) -> PhasePoly {
        self.terms.retain(|m, _| m.degree() <= trunc);
        self.trunc = trunc;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhaseMono, &CoefFrac)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: &PhaseMono) -> Option<&CoefFrac> {
        self.terms.get(mono)
    }

    /// Lowest total degree among stored terms; `EXACT` for the zero value.
    pub fn min_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).min().unwrap_or(EXACT)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn has_z(&self) -> bool {
        self.terms.keys().any(|m| m.ze != 0)
    }

    fn add_term(&mut self, m: PhaseMono, c: CoefFrac) {
        if c.is_zero() || m.degree() > self.trunc {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &PhasePoly) -> PhasePoly {
        let mut out = PhasePoly {
            terms: self.terms.clone(),
            trunc: self.trunc.min(other.trunc),
        };
        out.terms.retain(|m, _| m.degree() <= out.trunc);
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> PhasePoly {
        PhasePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &PhasePoly) -> PhasePoly {
        self.add(&other.neg())
    }

    /// Degree up to which the product of two jets is reliable.
    fn mul_trunc_bound(&self, other: &PhasePoly) -> u32 {
        let a = self.trunc.saturating_add(other.min_degree());
        let b = other.trunc.saturating_add(self.min_degree());
        a.min(b)
    }

    pub fn mul(&self, other: &PhasePoly) -> PhasePoly {
        let cap = self.mul_trunc_bound(other);
        self.mul_capped(other, cap)
    }

    /// Product truncated at `min(cap, reliable degree)`.
    pub fn mul_capped(&self, other: &PhasePoly, cap: u32) -> PhasePoly {
        let cap = cap.min(self.mul_trunc_bound(other));
        let mut out = PhasePoly::zero_jet(cap);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > cap {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > cap {
                    continue;
                }
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &CoefFrac) -> PhasePoly {
        let mut out = PhasePoly::zero_jet(self.trunc);
        for (m, v) in &self.terms {
            out.add_term(*m, v.mul(c));
        }
        out
    }

    pub fn mul_rat(&self, c: &BigRational) -> PhasePoly {
        let mut out = PhasePoly::zero_jet(self.trunc);
        for (m, v) in &self.terms {
            out.add_term(*m, v.mul_rat(c));
        }
        out
    }

    pub fn derivative(&self, axis: Axis) -> PhasePoly {
        let trunc = if self.trunc == EXACT {
            EXACT
        } else {
            self.trunc.saturating_sub(1)
        };
        let mut out = PhasePoly::zero_jet(trunc);
        for (m, c) in &self.terms {
            let (e, next) = match axis {
                Axis::X => (m.xe, PhaseMono::new(m.xe.wrapping_sub(1), m.ye, m.ze)),
                Axis::Y => (m.ye, PhaseMono::new(m.xe, m.ye.wrapping_sub(1), m.ze)),
                Axis::Z => (m.ze, PhaseMono::new(m.xe, m.ye, m.ze.wrapping_sub(1))),
            };
            if e > 0 {
                out.add_term(next, c.mul_rat(&BigRational::from_integer(e.into())));
            }
        }
        out
    }

    /// The homogeneous degree-`n` part, as an exact polynomial. Panics when
    /// `n` exceeds the known degree; callers must check truncation first.
    pub fn homogeneous_part(&self, n: u32) -> PhasePoly {
        assert!(
            n <= self.trunc,
            "homogeneous part {n} beyond truncation {}",
            self.trunc
        );
        PhasePoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            trunc: EXACT,
        }
    }

    pub fn truncated(&self, n: u32) -> PhasePoly {
        self.clone().with_trunc(n.min(self.trunc))
    }

    /// Requires the value to be known at least to degree `n`, then truncates.
    pub fn require_trunc(&self, n: u32) -> Result<PhasePoly, AlgebraError> {
        if self.trunc < n {
            return Err(AlgebraError::TruncationUnderflow {
                known: self.trunc,
                needed: n,
            });
        }
        Ok(self.truncated(n))
    }

    /// Substitutes a series for one phase variable, truncating at `cap`.
    /// The substitution is simultaneous, so the value may mention the
    /// replaced variable (as in the shift `z -> z + h`). The value must have
    /// order >= 1 for the truncation tracking to stay valid.
    pub fn substitute_var(&self, axis: Axis, value: &PhasePoly, cap: u32) -> PhasePoly {
        let max_pow = self
            .terms
            .keys()
            .map(|m| match axis {
                Axis::X => m.xe,
                Axis::Y => m.ye,
                Axis::Z => m.ze,
            })
            .max()
            .unwrap_or(0);
        let mut powers: Vec<PhasePoly> = Vec::with_capacity(max_pow as usize + 1);
        powers.push(PhasePoly::constant_one_like(self, value));
        for k in 1..=max_pow {
            let prev = &powers[(k - 1) as usize];
            powers.push(prev.mul_capped(value, cap));
        }
        let mut out = PhasePoly::zero_jet(cap.min(self.trunc_for_subst(value)));
        for (m, c) in &self.terms {
            let (e, rest) = match axis {
                Axis::X => (m.xe, PhaseMono::new(0, m.ye, m.ze)),
                Axis::Y => (m.ye, PhaseMono::new(m.xe, 0, m.ze)),
                Axis::Z => (m.ze, PhaseMono::new(m.xe, m.ye, 0)),
            };
            let base = PhasePoly::monomial(rest, c.clone());
            let term = base.mul_capped(&powers[e as usize], cap);
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        out
    }

    fn constant_one_like(&self, other: &PhasePoly) -> PhasePoly {
        // a 1 whose coefficient table will merge with whatever it meets
        let table = self
            .terms
            .values()
            .chain(other.terms.values())
            .next()
            .map(|c| Arc::clone(c.table()))
            .unwrap_or_else(SymbolTable::empty);
        PhasePoly::constant(CoefFrac::one(&table))
    }

    fn trunc_for_subst(&self, value: &PhasePoly) -> u32 {
        // conservative: reliable to the min of both truncations when the
        // substituted series has order >= 1 (the only case the pipelines use)
        self.trunc.min(value.trunc)
    }

    /// Exact substitution of parameter symbols in every coefficient.
    pub fn substitute_params(
        &self,
        assign: &std::collections::BTreeMap<String, CoefFrac>,
    ) -> Result<PhasePoly, AlgebraError> {
        let mut out = PhasePoly::zero_jet(self.trunc);
        for (m, c) in &self.terms {
            out.add_term(*m, c.substitute(assign)?);
        }
        Ok(out)
    }

    /// Splits off the coefficient polynomials of each z power:
    /// `self = sum_k z^k * result[k](x, y)`.
    pub fn z_strata(&self) -> Vec<PhasePoly> {
        let max_z = self.terms.keys().map(|m| m.ze).max().unwrap_or(0);
        let mut out = vec![PhasePoly::zero_jet(self.trunc); max_z as usize + 1];
        for (m, c) in &self.terms {
            out[m.ze as usize].add_term(PhaseMono::new(m.xe, m.ye, 0), c.clone());
        }
        out
    }
}

impl PartialEq for PhasePoly {
    /// Term-wise semantic equality (coefficients compare by cross-
    /// multiplication); the truncation marker is bookkeeping, not value.
    fn eq(&self, other: &Self) -> bool {
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .zip(other.terms.iter())
            .all(|((ma, ca), (mb, cb))| ma == mb && ca == cb)
    }
}

impl Eq for PhasePoly {}

impl std::fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::sysio::print_phase_poly(self))
    }
}
