use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::algebra::{CoefFrac, ParamPoly, PhasePoly, VectorField3};

pub fn print_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// `x^2*y*z` style power product; empty string for the unit monomial.
fn phase_mono_string(m: &crate::algebra::PhaseMono) -> String {
    let mut parts = Vec::new();
    for (name, e) in [("x", m.xe), ("y", m.ye), ("z", m.ze)] {
        match e {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{e}")),
        }
    }
    parts.join("*")
}

fn param_mono_string(table: &crate::algebra::SymbolTable, m: &crate::algebra::PMono) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(table.name(i).to_string()),
            _ => parts.push(format!("{}^{e}", table.name(i))),
        }
    }
    parts.join("*")
}

/// One signed term: returns (is_negative, magnitude_string).
fn signed_term(c: &BigRational, mono: String) -> (bool, String) {
    let neg = c.is_negative();
    let mag = c.abs();
    let body = if mono.is_empty() {
        print_rational(&mag)
    } else if mag.is_one() {
        mono
    } else {
        format!("{}*{}", print_rational(&mag), mono)
    };
    (neg, body)
}

fn join_signed(terms: Vec<(bool, String)>) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in terms.into_iter().enumerate() {
        if neg {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        out.push_str(&body);
    }
    out
}

/// Fully expanded canonical form, terms descending in graded-lex order with
/// earlier-declared parameters ranked higher.
pub fn print_param_poly(p: &ParamPoly) -> String {
    let table = p.table();
    let mut terms = Vec::new();
    for (m, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        terms.push(signed_term(c, param_mono_string(table, m)));
    }
    join_signed(terms)
}

pub fn print_coef_frac(c: &CoefFrac) -> String {
    match c.as_poly() {
        Some(p) => print_param_poly(&p),
        None => format!("({})/({})", print_param_poly(c.num()), print_param_poly(c.den())),
    }
}

/// A coefficient that can be absorbed into a signed product term: a single
/// parameter monomial over a trivial denominator.
fn inline_coef(c: &CoefFrac) -> Option<(BigRational, String)> {
    let p = c.as_poly()?;
    if p.is_zero() {
        return Some((num_traits::Zero::zero(), String::new()));
    }
    if p.num_terms() != 1 {
        return None;
    }
    let (m, v) = p.terms().next().unwrap();
    Some((v.clone(), param_mono_string(p.table(), m)))
}

pub fn print_phase_poly(p: &PhasePoly) -> String {
    let mut terms = Vec::new();
    for (m, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        let phase = phase_mono_string(m);
        match inline_coef(c) {
            Some((rat, param)) => {
                let mono = match (param.is_empty(), phase.is_empty()) {
                    (true, true) => String::new(),
                    (false, true) => param,
                    (true, false) => phase,
                    (false, false) => format!("{param}*{phase}"),
                };
                terms.push(signed_term(&rat, mono));
            }
            None => {
                let coef = format!("({})", print_coef_frac(c));
                let body = if phase.is_empty() {
                    coef
                } else {
                    format!("{coef}*{phase}")
                };
                terms.push((false, body));
            }
        }
    }
    join_signed(terms)
}

/// `dx = ...` / `dy = ...` / `dz = ...` lines including the linear part.
pub fn print_vector_field(f: &VectorField3) -> String {
    format!(
        "dx = {}\ndy = {}\ndz = {}",
        print_phase_poly(&f.dx()),
        print_phase_poly(&f.dy()),
        print_phase_poly(&f.dz())
    )
}

pub fn print_planar_field(f: &crate::planar::PlanarField) -> String {
    format!(
        "dx = {}\ndy = {}",
        print_phase_poly(&f.dx()),
        print_phase_poly(&f.dy())
    )
}
