use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::error::AlgebraError;
use super::parampoly::ParamPoly;
use super::symbols::SymbolTable;

// Guard rails for the best-effort univariate gcd: beyond these sizes the
// reduction is skipped (cross-multiplication equality stays exact regardless).
const GCD_MAX_DEGREE: u32 = 64;
const GCD_MAX_TERMS: usize = 4000;

/// Fraction of parameter polynomials; the coefficient field of the engine.
///
/// Canonical form: the denominator is nonzero, integer-primitive and has a
/// positive leading coefficient under the canonical symbol order; rational
/// scaling lives in the numerator. Reduction is by rational/monomial content,
/// exact-division checks and a best-effort univariate gcd per shared variable;
/// semantic equality is always decided by cross-multiplication.
#[derive(Debug, Clone)]
pub struct CoefFrac {
    num: ParamPoly,
    den: ParamPoly,
}

impl CoefFrac {
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<CoefFrac, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let mut f = CoefFrac { num, den };
        f.reduce();
        Ok(f)
    }

    pub fn from_poly(num: ParamPoly) -> CoefFrac {
        let den = ParamPoly::one(num.table());
        CoefFrac { num, den }
    }

    pub fn from_rat(table: &Arc<SymbolTable>, c: BigRational) -> CoefFrac {
        CoefFrac::from_poly(ParamPoly::constant(table, c))
    }

    pub fn zero(table: &Arc<SymbolTable>) -> CoefFrac {
        CoefFrac::from_poly(ParamPoly::zero(table))
    }

    pub fn one(table: &Arc<SymbolTable>) -> CoefFrac {
        CoefFrac::from_poly(ParamPoly::one(table))
    }

    pub fn symbol(table: &Arc<SymbolTable>, name: &str) -> CoefFrac {
        CoefFrac::from_poly(ParamPoly::symbol(table, name))
    }

    pub fn num(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den(&self) -> &ParamPoly {
        &self.den
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        self.num.table()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// The exact rational value when the fraction is constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.const_value()?;
        let d = self.den.const_value()?;
        Some(n / d)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The numerator as a polynomial when the denominator is constant
    /// (the constant is folded in).
    pub fn as_poly(&self) -> Option<ParamPoly> {
        let d = self.den.const_value()?;
        Some(self.num.mul_rat(&(BigRational::one() / d)))
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        self.num.contains_symbol(name) || self.den.contains_symbol(name)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = ParamPoly::one(self.num.table());
            return;
        }
        // common monomial content
        let mc_n = self.num.monomial_content();
        let mc_d = self.den.monomial_content();
        let mut common = Vec::new();
        let len = mc_n.0.len().min(mc_d.0.len());
        for i in 0..len {
            common.push(mc_n.exp(i).min(mc_d.exp(i)));
        }
        let common = super::parampoly::PMono(common);
        let common = {
            // retrim
            let mut v = common.0;
            while v.last() == Some(&0) {
                v.pop();
            }
            super::parampoly::PMono(v)
        };
        if !common.is_unit() {
            self.num = self.num.div_monomial(&common);
            self.den = self.den.div_monomial(&common);
        }
        if self.den.is_constant() {
            let d = self.den.const_value().unwrap();
            self.num = self.num.mul_rat(&(BigRational::one() / d));
            self.den = ParamPoly::one(self.num.table());
            return;
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            self.num = q;
            self.den = ParamPoly::one(self.num.table());
            return;
        }
        if let Some(q) = self.den.exact_div(&self.num) {
            // num/den = 1/q
            self.num = ParamPoly::one(self.num.table());
            self.den = q;
        }
        self.reduce_univariate();
        // integer-primitive, positive-leading denominator
        let c = self.den.content();
        let mut scale = BigRational::one() / c;
        if self
            .den
            .leading()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            scale = -scale;
        }
        if !scale.is_one() {
            self.den = self.den.mul_rat(&scale);
            self.num = self.num.mul_rat(&scale);
        }
    }

    /// Best-effort univariate cancellation. The effective case in practice is
    /// a denominator that is univariate with rational coefficients (powers of
    /// `lambda`, products of small polynomials in `epsilon`): any common
    /// divisor then lies in Q[v] and must divide every parameter-grouped
    /// coefficient of the numerator, so plain monic Euclid over Q decides it.
    /// Denominators mixing several symbols are left unreduced; equality
    /// testing stays exact via cross-multiplication.
    fn reduce_univariate(&mut self) {
        if self.num.num_terms() > GCD_MAX_TERMS || self.den.num_terms() > GCD_MAX_TERMS {
            return;
        }
        let den_syms = self.den.symbols_present();
        if den_syms.len() != 1 {
            return;
        }
        let v = den_syms[0];
        if self.num.degree_in(v) == 0 || self.den.degree_in(v) > GCD_MAX_DEGREE {
            return;
        }
        // gcd over Q[v] of the numerator's coefficients grouped by the
        // residual parameter monomial
        let mut groups: BTreeMap<super::parampoly::PMono, Vec<BigRational>> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            let e = m.exp(v) as usize;
            let key = m.with_exp(v, 0);
            let poly = groups.entry(key).or_default();
            if poly.len() <= e {
                poly.resize(e + 1, BigRational::zero());
            }
            poly[e] = poly[e].clone() + c.clone();
        }
        let mut acc: Option<Vec<BigRational>> = None;
        for poly in groups.values() {
            let poly = trim_univar(poly.clone());
            acc = Some(match acc {
                None => poly,
                Some(g) => univar_gcd(g, poly),
            });
            if acc.as_ref().map(|g| g.len() <= 1) == Some(true) {
                return;
            }
        }
        let den_univar = {
            let coeffs = self.den.coeffs_in(v);
            let mut out = Vec::with_capacity(coeffs.len());
            for c in coeffs {
                match c.const_value() {
                    Some(r) => out.push(r),
                    None => return,
                }
            }
            trim_univar(out)
        };
        let g = univar_gcd(acc.unwrap_or_default(), den_univar);
        if g.len() <= 1 {
            return;
        }
        let table = self.num.table().clone();
        let g_poly = ParamPoly::from_terms(
            &table,
            g.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (super::parampoly::PMono::of_symbol(v, e as u32), c.clone())),
        );
        if let (Some(qn), Some(qd)) = (self.num.exact_div(&g_poly), self.den.exact_div(&g_poly)) {
            self.num = qn;
            self.den = qd;
        }
        if self.den.is_constant() && !self.den.is_zero() {
            let d = self.den.const_value().unwrap();
            self.num = self.num.mul_rat(&(BigRational::one() / d));
            self.den = ParamPoly::one(self.num.table());
        }
    }

    pub fn add(&self, other: &CoefFrac) -> CoefFrac {
        if self.den.is_one() && other.den.is_one() {
            return CoefFrac::from_poly(self.num.add(&other.num));
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        CoefFrac::new(num, den).expect("nonzero denominators")
    }

    pub fn neg(&self) -> CoefFrac {
        CoefFrac {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &CoefFrac) -> CoefFrac {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CoefFrac) -> CoefFrac {
        if self.den.is_one() && other.den.is_one() {
            return CoefFrac::from_poly(self.num.mul(&other.num));
        }
        CoefFrac::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("nonzero denominators")
    }

    pub fn mul_rat(&self, c: &BigRational) -> CoefFrac {
        CoefFrac {
            num: self.num.mul_rat(c),
            den: if c.is_zero() {
                ParamPoly::one(self.num.table())
            } else {
                self.den.clone()
            },
        }
    }

    pub fn inverse(&self) -> Result<CoefFrac, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        CoefFrac::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &CoefFrac) -> Result<CoefFrac, AlgebraError> {
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, e: u32) -> CoefFrac {
        let mut out = CoefFrac::one(self.table());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Splits `self` as `A*s + B` with `A`, `B` free of `s`; `None` when the
    /// symbol occurs nonlinearly in the numerator or at all in the denominator.
    pub fn split_linear(&self, name: &str) -> Option<(CoefFrac, CoefFrac)> {
        if self.den.contains_symbol(name) {
            return None;
        }
        let idx = match self.table().lookup(name) {
            Some(i) => i,
            None => {
                return Some((CoefFrac::zero(self.table()), self.clone()));
            }
        };
        if self.num.degree_in(idx) > 1 {
            return None;
        }
        let coeffs = self.num.coeffs_in(idx);
        let b = CoefFrac::new(coeffs[0].clone(), self.den.clone()).unwrap();
        let a = if coeffs.len() > 1 {
            CoefFrac::new(coeffs[1].clone(), self.den.clone()).unwrap()
        } else {
            CoefFrac::zero(self.table())
        };
        Some((a, b))
    }

    /// Exact substitution of parameter symbols by fractional values.
    pub fn substitute(
        &self,
        assign: &BTreeMap<String, CoefFrac>,
    ) -> Result<CoefFrac, AlgebraError> {
        let num = substitute_param_poly(&self.num, assign)?;
        let den = substitute_param_poly(&self.den, assign)?;
        if den.is_zero() {
            return Err(AlgebraError::DenominatorVanished {
                denominator: crate::sysio::print_param_poly(&self.den),
            });
        }
        num.div(&den)
    }
}

impl PartialEq for CoefFrac {
    /// Cross-multiplication equality, never a string comparison.
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for CoefFrac {}

impl std::fmt::Display for CoefFrac {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::sysio::print_coef_frac(self))
    }
}

/// Substitutes into a plain polynomial, producing a fraction in general.
pub fn substitute_param_poly(
    p: &ParamPoly,
    assign: &BTreeMap<String, CoefFrac>,
) -> Result<CoefFrac, AlgebraError> {
    // fast path: all relevant values are polynomials
    if assign
        .iter()
        .all(|(name, v)| !p.contains_symbol(name) || v.is_polynomial())
    {
        let mut poly_assign = BTreeMap::new();
        for (name, v) in assign {
            if p.contains_symbol(name) {
                poly_assign.insert(name.clone(), v.as_poly().unwrap());
            }
        }
        return Ok(CoefFrac::from_poly(p.substitute_poly(&poly_assign)));
    }
    let table = p.table();
    let mut acc = CoefFrac::zero(table);
    for (mono, c) in p.terms() {
        let mut term = CoefFrac::from_rat(table, c.clone());
        for (i, &e) in mono.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = table.name(i);
            match assign.get(name) {
                Some(v) => term = term.mul(&v.pow(e)),
                None => {
                    term = term.mul(&CoefFrac::symbol(table, name).pow(e));
                }
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

fn trim_univar(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().map(|c| c.is_zero()) == Some(true) {
        p.pop();
    }
    p
}

/// Monic Euclidean gcd of dense univariate polynomials over Q.
fn univar_gcd(a: Vec<BigRational>, b: Vec<BigRational>) -> Vec<BigRational> {
    let (mut a, mut b) = (trim_univar(a), trim_univar(b));
    while !b.is_empty() {
        // a mod b with b normalized monic
        let lead = b.last().unwrap().clone();
        let bm: Vec<BigRational> = b.iter().map(|c| c / lead.clone()).collect();
        while a.len() >= bm.len() && !a.is_empty() {
            let shift = a.len() - bm.len();
            let factor = a.last().unwrap().clone();
            for (i, c) in bm.iter().enumerate() {
                a[shift + i] = a[shift + i].clone() - factor.clone() * c;
            }
            a = trim_univar(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    // monic result
    match a.last().cloned() {
        Some(lead) if !lead.is_zero() => a.into_iter().map(|c| c / lead.clone()).collect(),
        _ => a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn table() -> Arc<SymbolTable> {
        SymbolTable::new(&["a", "b", "epsilon"])
    }

    #[test]
    fn exact_division_reduces_to_polynomial() {
        let t = table();
        let a = ParamPoly::symbol(&t, "a");
        let b = ParamPoly::symbol(&t, "b");
        // (a^2 - b^2)/(a + b) == a - b
        let f = CoefFrac::new(a.mul(&a).sub(&b.mul(&b)), a.add(&b)).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.as_poly().unwrap(), a.sub(&b));
    }

    #[test]
    fn monomial_and_content_normalization() {
        let t = table();
        let a = ParamPoly::symbol(&t, "a");
        let b = ParamPoly::symbol(&t, "b");
        // (2*a^2*b)/( -4*a*(a+b) ) -> (-1/2 a b? ) check via cross mult
        let f = CoefFrac::new(
            a.mul(&a).mul(&b).mul_rat(&rat(2, 1)),
            a.mul(&a.add(&b)).mul_rat(&rat(-4, 1)),
        )
        .unwrap();
        // denominator canonical: primitive, positive leading
        assert!(!f.den().leading().unwrap().1.is_negative());
        let expect = CoefFrac::new(a.mul(&b).mul_rat(&rat(-1, 2)), a.add(&b)).unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn univariate_cancellation() {
        let t = table();
        let e = ParamPoly::symbol(&t, "epsilon");
        let a = ParamPoly::symbol(&t, "a");
        let four_e_plus_1 = e.mul_rat(&rat(4, 1)).add(&ParamPoly::one(&t));
        // (4e+1)^2 * a / ((4e+1) * (e+2)) reduces to (4e+1)*a/(e+2)
        let num = four_e_plus_1.pow(2).mul(&a);
        let den = four_e_plus_1.mul(&e.add(&ParamPoly::constant(&t, rat(2, 1))));
        let f = CoefFrac::new(num, den).unwrap();
        assert_eq!(
            f.den(),
            &e.add(&ParamPoly::constant(&t, rat(2, 1)))
        );
    }

    #[test]
    fn split_linear() {
        let t = SymbolTable::new(&["g300", "g011", "v011"]);
        let g300 = CoefFrac::symbol(&t, "g300");
        let g011 = CoefFrac::symbol(&t, "g011");
        let v011 = CoefFrac::symbol(&t, "v011");
        // -g300*(g011 - v011)
        let lam4 = g300.mul(&g011.sub(&v011)).neg();
        let (a, b) = lam4.split_linear("v011").unwrap();
        assert_eq!(a, g300);
        assert_eq!(b, g300.mul(&g011).neg());
        // solving gives v011 = g011
        let solved = b.neg().div(&a).unwrap();
        assert_eq!(solved, g011);
        assert!(lam4.mul(&lam4).split_linear("v011").is_none());
    }

    #[test]
    fn forced_value_substitutions() {
        // -4*d*(2*a - b) vanishes under d -> 0
        let t = SymbolTable::new(&["a", "b", "d"]);
        let sym = |n: &str| CoefFrac::symbol(&t, n);
        let p = sym("d")
            .mul(&sym("a").mul_rat(&rat(2, 1)).sub(&sym("b")))
            .mul_rat(&rat(-4, 1));
        let mut assign = BTreeMap::new();
        assign.insert("d".to_string(), CoefFrac::zero(&t));
        assert!(p.substitute(&assign).unwrap().is_zero());
    }

    #[test]
    fn substitution_with_fractions() {
        let t = table();
        let a = CoefFrac::symbol(&t, "a");
        let b = CoefFrac::symbol(&t, "b");
        let mut assign = BTreeMap::new();
        assign.insert("a".to_string(), b.inverse().unwrap());
        // a*b with a -> 1/b gives 1
        let v = a.mul(&b).substitute(&assign).unwrap();
        assert!(v.is_one());
        // 1/a with a -> 0 names the vanished denominator
        let mut zero_assign = BTreeMap::new();
        zero_assign.insert("a".to_string(), CoefFrac::zero(&t));
        let err = a.inverse().unwrap().substitute(&zero_assign).unwrap_err();
        assert!(matches!(err, AlgebraError::DenominatorVanished { .. }));
    }
}
