use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbols::SymbolTable;

/// Parameter-space monomial: exponent vector aligned with a [`SymbolTable`],
/// trailing zeros trimmed. Ordered graded-lexicographically (total degree
/// first, then exponents of earlier symbols weigh more), so iterating a
/// `BTreeMap` in reverse yields the canonical descending print order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PMono(pub Vec<u32>);

impl PMono {
    pub fn unit() -> PMono {
        PMono(Vec::new())
    }

    pub fn of_symbol(idx: usize, exp: u32) -> PMono {
        if exp == 0 {
            return PMono::unit();
        }
        let mut v = vec![0; idx + 1];
        v[idx] = exp;
        PMono(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.0.get(idx).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    fn trim(mut v: Vec<u32>) -> PMono {
        while v.last() == Some(&0) {
            v.pop();
        }
        PMono(v)
    }

    pub fn mul(&self, other: &PMono) -> PMono {
        let n = self.0.len().max(other.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.exp(i) + other.exp(i));
        }
        PMono::trim(v)
    }

    /// Exponent-wise quotient; `None` when not divisible.
    pub fn div(&self, other: &PMono) -> Option<PMono> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = Vec::with_capacity(self.0.len());
        for i in 0..self.0.len() {
            let (a, b) = (self.exp(i), other.exp(i));
            if b > a {
                return None;
            }
            v.push(a - b);
        }
        Some(PMono::trim(v))
    }

    pub fn with_exp(&self, idx: usize, exp: u32) -> PMono {
        let mut v = self.0.clone();
        if v.len() <= idx {
            v.resize(idx + 1, 0);
        }
        v[idx] = exp;
        PMono::trim(v)
    }

    fn remap(&self, map: &[usize]) -> PMono {
        let mut v = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e != 0 {
                let j = map[i];
                if v.len() <= j {
                    v.resize(j + 1, 0);
                }
                v[j] += e;
            }
        }
        PMono::trim(v)
    }
}

impl Ord for PMono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {
                let n = self.0.len().max(other.0.len());
                for i in 0..n {
                    match self.exp(i).cmp(&other.exp(i)) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            ord => ord,
        }
    }
}

impl PartialOrd for PMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in the parameter symbols over exact rationals.
/// No zero coefficients are stored.
#[derive(Debug, Clone)]
pub struct ParamPoly {
    table: Arc<SymbolTable>,
    terms: BTreeMap<PMono, BigRational>,
}

impl ParamPoly {
    pub fn zero(table: &Arc<SymbolTable>) -> ParamPoly {
        ParamPoly {
            table: Arc::clone(table),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<SymbolTable>, c: BigRational) -> ParamPoly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(PMono::unit(), c);
        }
        ParamPoly {
            table: Arc::clone(table),
            terms,
        }
    }

    pub fn one(table: &Arc<SymbolTable>) -> ParamPoly {
        ParamPoly::constant(table, BigRational::one())
    }

    pub fn symbol(table: &Arc<SymbolTable>, name: &str) -> ParamPoly {
        let idx = table
            .lookup(name)
            .unwrap_or_else(|| panic!("symbol {name} not in table"));
        let mut terms = BTreeMap::new();
        terms.insert(PMono::of_symbol(idx, 1), BigRational::one());
        ParamPoly {
            table: Arc::clone(table),
            terms,
        }
    }

    pub fn from_terms(
        table: &Arc<SymbolTable>,
        iter: impl IntoIterator<Item = (PMono, BigRational)>,
    ) -> ParamPoly {
        let mut p = ParamPoly::zero(table);
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PMono, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_unit())
    }

    pub fn const_value(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return Some(self.terms.values().next().unwrap().clone());
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.const_value().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(idx)).max().unwrap_or(0)
    }

    /// Indices of symbols that actually occur.
    pub fn symbols_present(&self) -> Vec<usize> {
        let mut seen = vec![false; self.table.len()];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    seen[i] = true;
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self.table.lookup(name) {
            Some(idx) => self.terms.keys().any(|m| m.exp(idx) != 0),
            None => false,
        }
    }

    fn add_term(&mut self, m: PMono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    /// Rewrites both operands over a common table.
    pub fn align(a: &ParamPoly, b: &ParamPoly) -> (ParamPoly, ParamPoly) {
        if Arc::ptr_eq(&a.table, &b.table) || b.table.is_prefix_of(&a.table) {
            let b2 = ParamPoly {
                table: Arc::clone(&a.table),
                terms: b.terms.clone(),
            };
            return (a.clone(), b2);
        }
        if a.table.is_prefix_of(&b.table) {
            let a2 = ParamPoly {
                table: Arc::clone(&b.table),
                terms: a.terms.clone(),
            };
            return (a2, b.clone());
        }
        let (t, map) = SymbolTable::merge(&a.table, &b.table);
        let a2 = ParamPoly {
            table: Arc::clone(&t),
            terms: a.terms.clone(),
        };
        let mut b2 = ParamPoly::zero(&t);
        for (m, c) in &b.terms {
            b2.add_term(m.remap(&map), c.clone());
        }
        (a2, b2)
    }

    pub fn add(&self, other: &ParamPoly) -> ParamPoly {
        let (mut a, b) = ParamPoly::align(self, other);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }

    pub fn neg(&self) -> ParamPoly {
        ParamPoly {
            table: Arc::clone(&self.table),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &ParamPoly) -> ParamPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ParamPoly) -> ParamPoly {
        let (a, b) = ParamPoly::align(self, other);
        let mut out = ParamPoly::zero(&a.table);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_rat(&self, c: &BigRational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero(&self.table);
        }
        ParamPoly {
            table: Arc::clone(&self.table),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut out = ParamPoly::one(&self.table);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Leading term under the canonical graded-lexicographic order.
    pub fn leading(&self) -> Option<(&PMono, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Positive rational content: gcd of coefficient numerators over lcm of
    /// denominators. Zero polynomial has content 1 by convention.
    pub fn content(&self) -> BigRational {
        if self.terms.is_empty() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(&c.numer().abs());
            den_lcm = den_lcm.lcm(c.denom());
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Exponent-wise minimum over all terms: the largest monomial dividing
    /// every term.
    pub fn monomial_content(&self) -> PMono {
        let mut it = self.terms.keys();
        let first = match it.next() {
            Some(m) => m.clone(),
            None => return PMono::unit(),
        };
        let mut v = first.0;
        for m in it {
            for (i, e) in v.iter_mut().enumerate() {
                *e = (*e).min(m.exp(i));
            }
            if v.iter().all(|&e| e == 0) {
                return PMono::unit();
            }
        }
        PMono::trim(v)
    }

    pub fn div_monomial(&self, m: &PMono) -> ParamPoly {
        if m.is_unit() {
            return self.clone();
        }
        ParamPoly {
            table: Arc::clone(&self.table),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.div(m).expect("monomial content divides"), c.clone()))
                .collect(),
        }
    }

    /// Exact multivariate division; `None` when `other` does not divide `self`.
    pub fn exact_div(&self, other: &ParamPoly) -> Option<ParamPoly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.const_value() {
            return Some(self.mul_rat(&(BigRational::one() / c)));
        }
        let (mut rem, div) = ParamPoly::align(self, other);
        let (lm, lc) = {
            let (m, c) = div.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut quot = ParamPoly::zero(&rem.table);
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.div(&lm)?;
            let qc = rc / lc.clone();
            let term = ParamPoly::from_terms(&rem.table, [(qm, qc)]);
            rem = rem.sub(&term.mul(&div));
            quot = quot.add(&term);
        }
        Some(quot)
    }

    /// View as univariate in symbol `idx`: coefficients indexed by power.
    pub fn coeffs_in(&self, idx: usize) -> Vec<ParamPoly> {
        let d = self.degree_in(idx) as usize;
        let mut out = vec![ParamPoly::zero(&self.table); d + 1];
        for (m, c) in &self.terms {
            let e = m.exp(idx) as usize;
            out[e].add_term(m.with_exp(idx, 0), c.clone());
        }
        out
    }

    pub fn from_coeffs_in(table: &Arc<SymbolTable>, idx: usize, coeffs: &[ParamPoly]) -> ParamPoly {
        let mut out = ParamPoly::zero(table);
        for (e, c) in coeffs.iter().enumerate() {
            let (aligned_out, c) = ParamPoly::align(&out, c);
            out = aligned_out;
            for (m, v) in &c.terms {
                out.add_term(m.with_exp(idx, m.exp(idx) + e as u32), v.clone());
            }
        }
        out
    }

    /// Scales so the coefficients are integers with gcd 1 and the leading
    /// coefficient is positive. Zero stays zero.
    pub fn primitive_part(&self) -> ParamPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        let mut p = self.mul_rat(&(BigRational::one() / c));
        if p.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            p = p.neg();
        }
        p
    }

    /// Evaluates with some symbols replaced by polynomial values (no
    /// fractions), leaving the rest in place. Used on the fast path of
    /// substitution; the general fractional case lives on [`CoefFrac`].
    pub fn substitute_poly(&self, assign: &BTreeMap<String, ParamPoly>) -> ParamPoly {
        let targets: Vec<(usize, &ParamPoly)> = assign
            .iter()
            .filter_map(|(name, val)| self.table.lookup(name).map(|i| (i, val)))
            .collect();
        if targets.is_empty() {
            return self.clone();
        }
        let mut out = ParamPoly::zero(&self.table);
        'terms: for (m, c) in &self.terms {
            let mut factor = ParamPoly::constant(&self.table, c.clone());
            let mut residual = m.clone();
            for (idx, val) in &targets {
                let e = residual.exp(*idx);
                if e > 0 {
                    residual = residual.with_exp(*idx, 0);
                    if val.is_zero() {
                        continue 'terms;
                    }
                    factor = factor.mul(&val.pow(e));
                }
            }
            let base = ParamPoly::from_terms(&self.table, [(residual, BigRational::one())]);
            out = out.add(&base.mul(&factor));
        }
        out
    }
}

impl PartialEq for ParamPoly {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = ParamPoly::align(self, other);
        a.terms == b.terms
    }
}

impl Eq for ParamPoly {}

impl std::fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::sysio::print_param_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn table() -> Arc<SymbolTable> {
        SymbolTable::new(&["a", "b", "d"])
    }

    #[test]
    fn grlex_order_prefers_earlier_symbols() {
        // a*d and b*d have the same degree; a*d is larger.
        let ad = PMono(vec![1, 0, 1]);
        let bd = PMono(vec![0, 1, 1]);
        assert!(ad > bd);
        // degree dominates
        assert!(PMono(vec![0, 0, 3]) > PMono(vec![1, 1]));
    }

    #[test]
    fn arithmetic_and_alignment() {
        let t = table();
        let a = ParamPoly::symbol(&t, "a");
        let b = ParamPoly::symbol(&t, "b");
        let p = a.add(&b).mul(&a.sub(&b));
        let q = a.mul(&a).sub(&b.mul(&b));
        assert_eq!(p, q);

        let other = SymbolTable::new(&["d", "a"]);
        let d2 = ParamPoly::symbol(&other, "d");
        let d1 = ParamPoly::symbol(&t, "d");
        assert_eq!(d1, d2);
        assert_eq!(d1.add(&d2), d1.mul_rat(&rat(2, 1)));
    }

    #[test]
    fn exact_division() {
        let t = table();
        let a = ParamPoly::symbol(&t, "a");
        let b = ParamPoly::symbol(&t, "b");
        let p = a.add(&b).mul(&a.sub(&b)).mul(&a);
        assert_eq!(p.exact_div(&a.add(&b)), Some(a.sub(&b).mul(&a)));
        assert_eq!(p.exact_div(&a.add(&b.mul_rat(&rat(2, 1)))), None);
    }

    #[test]
    fn content_and_primitive() {
        let t = table();
        let a = ParamPoly::symbol(&t, "a");
        let p = a.mul_rat(&rat(-4, 6)).add(&ParamPoly::constant(&t, rat(2, 3)));
        assert_eq!(p.content(), rat(2, 3));
        // sign flips so the leading (grlex-largest) coefficient is positive
        let prim = p.primitive_part();
        assert_eq!(prim, a.sub(&ParamPoly::one(&t)));
    }

    #[test]
    fn substitute_poly_examples() {
        // 3*g300 - g210 with g210 -> 3*g300 collapses to zero
        let t = SymbolTable::new(&["g300", "g210"]);
        let g300 = ParamPoly::symbol(&t, "g300");
        let g210 = ParamPoly::symbol(&t, "g210");
        let p = g300.mul_rat(&rat(3, 1)).sub(&g210);
        let mut assign = BTreeMap::new();
        assign.insert("g210".to_string(), g300.mul_rat(&rat(3, 1)));
        assert!(p.substitute_poly(&assign).is_zero());
    }
}
