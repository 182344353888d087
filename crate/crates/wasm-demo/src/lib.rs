//! Browser demo bindings: parse a system in the textual format, analyze its
//! monodromy and center manifold, compute multiplier obstructions, and trace
//! restricted-orbit polylines for canvas plotting. Reports reuse the engine's
//! canonical printer, so the text shown in the page matches the CLI output.

use std::collections::BTreeMap;

use wasm_bindgen::prelude::*;

use nilcenter::algebra::{CoefFrac, PhaseMono, VectorField3};
use nilcenter::cmanifold;
use nilcenter::ijm::{self, Seed};
use nilcenter::lyapunov::{self, PerturbationMode};
use nilcenter::monodromy::{self, BetaCase, Verdict3};
use nilcenter::numeric;
use nilcenter::sysio::{parse_system, parse_value, print_coef_frac, print_phase_poly};
use num_rational::BigRational;

fn err(msg: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&msg.to_string())
}

fn parse_field(text: &str, subst: &str) -> Result<(String, VectorField3), JsValue> {
    let sys = parse_system(text).map_err(err)?;
    let field = if subst.trim().is_empty() {
        sys.field
    } else {
        let mut assign = BTreeMap::new();
        for part in subst.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| err(format!("substitution {part} is not k=v")))?;
            let val = parse_value(v, sys.field.table()).map_err(err)?;
            if val.max_degree() > 0 {
                return Err(err(format!(
                    "substitution value {v} involves phase variables"
                )));
            }
            let c = val
                .coefficient(&PhaseMono::new(0, 0, 0))
                .cloned()
                .unwrap_or_else(|| CoefFrac::zero(sys.field.table()));
            assign.insert(k.trim().to_string(), c);
        }
        sys.field.substitute(&assign).map_err(err)?
    };
    Ok((sys.name, field))
}

/// Monodromy criterion, center-manifold jet and restricted system, as one
/// plain-text report.
#[wasm_bindgen]
pub fn system_report(text: &str, subst: &str) -> Result<String, JsValue> {
    let (name, field) = parse_field(text, subst)?;
    let c = monodromy::andreev2_criterion_3d(&field).map_err(err)?;
    let mut out = format!("system: {name}\n\n[monodromy]\n");
    out += &format!("b200 = {}\n", print_coef_frac(&c.b200));
    out += &format!(
        "inequality: {} < {}\n",
        print_coef_frac(&c.lhs),
        print_coef_frac(&c.rhs)
    );
    out += &format!(
        "beta case: {}\n",
        match c.beta_case {
            BetaCase::EqNMinus1 => "beta=n-1",
            BetaCase::GtNMinus1 => "beta>n-1",
            BetaCase::Undecided => "undecided (symbolic switch)",
        }
    );
    out += &format!(
        "verdict: {}\n",
        match c.verdict {
            Verdict3::Monodromic => "monodromic, n=2",
            Verdict3::NotMonodromic => "not monodromic",
            Verdict3::NotAndreev2 => "not Andreev-2",
            Verdict3::Undecided => "undecided (symbolic)",
        }
    );
    let j = cmanifold::cm_jet(&field, 6).map_err(err)?;
    out += &format!("\n[center manifold]\nh = {}\n", print_phase_poly(&j.h));
    let planar = cmanifold::restrict(&field, &j, 6).map_err(err)?;
    out += &format!(
        "\n[restricted system]\n{}\n",
        nilcenter::sysio::print_planar_field(&planar)
    );
    Ok(out)
}

/// Multiplier obstructions `Lambda_n` (optionally after a reduction chain)
/// plus the first Lyapunov quantity, as one plain-text report.
#[wasm_bindgen]
pub fn obstruction_report(
    text: &str,
    subst: &str,
    seed: &str,
    max_degree: u32,
    solve: &str,
) -> Result<String, JsValue> {
    let (name, field) = parse_field(text, subst)?;
    let seed = match seed {
        "z" => Seed::Z,
        "zy2" => Seed::Zy2,
        other => return Err(err(format!("seed must be z or zy2, got {other}"))),
    };
    if max_degree < seed.degree() || max_degree > 12 {
        return Err(err("max degree must lie between the seed degree and 12"));
    }
    let run = ijm::obstructions(&field, seed, max_degree).map_err(err)?;
    let run = if solve.trim().is_empty() {
        run
    } else {
        let symbols: Vec<String> = solve
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| p.trim().to_string())
            .collect();
        ijm::reduce_chain(&run, &symbols).map_err(err)?
    };
    let mut out = format!("system: {name}\nseed: {}\n", seed.name());
    for n in 1..=max_degree {
        out += &format!("Lambda[{n}] = {}\n", print_coef_frac(run.lambda(n)));
    }
    for f in &run.ledger {
        out += &format!(
            "substitution: {} = {} (solved from Lambda[{}])\n",
            f.symbol,
            print_coef_frac(&f.value),
            f.solved_from
        );
    }
    let ok = ijm::self_check(&field, &run).map_err(err)?;
    out += &format!("self-check: {}\n", if ok { "ok" } else { "FAILED" });

    if !field.table().contains(lyapunov::EPSILON) {
        let fam = lyapunov::build_family(&field, 2, PerturbationMode::Zero).map_err(err)?;
        let etas = lyapunov::eta_quantities(&fam, 1).map_err(err)?;
        out += &format!("eta[1] = {}\n", print_coef_frac(etas.eta(1)));
    }
    Ok(out)
}

/// Restricted-orbit polyline from `(x0, 0)` for one revolution, flattened as
/// `[x0, y0, x1, y1, ...]` for canvas plotting.
#[wasm_bindgen]
pub fn orbit(text: &str, params: &str, x0: f64, tol: f64) -> Result<Vec<f64>, JsValue> {
    let (_, points, _) = run_orbit(text, params, x0, tol)?;
    Ok(points.into_iter().flatten().collect())
}

/// One-line summary of the same run (displacement, step count, status).
#[wasm_bindgen]
pub fn orbit_summary(text: &str, params: &str, x0: f64, tol: f64) -> Result<String, JsValue> {
    let (name, _, r) = run_orbit(text, params, x0, tol)?;
    Ok(format!(
        "{name}: x0 = {x0}  displacement = {}  steps = {}  status = {}",
        if r.displacement.is_nan() {
            "-".to_string()
        } else {
            format!("{:+.6e}", r.displacement)
        },
        r.steps,
        match r.status {
            numeric::ReturnStatus::Ok => "ok",
            numeric::ReturnStatus::NoReturn => "no-return",
            numeric::ReturnStatus::LeftNeighborhood => "left-neighborhood",
        }
    ))
}

fn run_orbit(
    text: &str,
    params: &str,
    x0: f64,
    tol: f64,
) -> Result<(String, Vec<[f64; 2]>, numeric::ReturnMapResult), JsValue> {
    let (name, field) = parse_field(text, "")?;
    let mut assignments = BTreeMap::new();
    for part in params.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| err(format!("parameter {part} is not k=v")))?;
        let r = parse_big_rational(v.trim())
            .ok_or_else(|| err(format!("parameter value {v} is not rational")))?;
        assignments.insert(k.trim().to_string(), r);
    }
    if !(x0 > 0.0 && x0 < 0.5) {
        return Err(err("x0 must lie in (0, 0.5)"));
    }
    let tol = tol.clamp(1e-14, 1e-3);
    let j = cmanifold::cm_jet(&field, 8).map_err(err)?;
    let planar = cmanifold::restrict(&field, &j, 8).map_err(err)?;
    let bound = numeric::bind(&planar, &assignments).map_err(err)?;
    let config = numeric::ReturnMapConfig::default();
    let (points, result) = numeric::trace_orbit(&bound, x0, tol, &config);
    Ok((name, points, result))
}

fn parse_big_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n = BigRational::new(n.trim().parse().ok()?, 1.into());
        let d = BigRational::new(d.trim().parse().ok()?, 1.into());
        if d == BigRational::new(0.into(), 1.into()) {
            return None;
        }
        return Some(n / d);
    }
    if let Some((int, frac)) = s.split_once('.') {
        // small decimals from slider-driven input, e.g. -0.25
        let digits = frac.len().min(12) as u32;
        let scale: i128 = 10i128.pow(digits);
        let int_abs: i128 = match int.trim_start_matches('-') {
            "" => 0,
            v => v.parse().ok()?,
        };
        let frac_part: i128 = frac.parse().ok()?;
        let sign: i128 = if s.trim_start().starts_with('-') { -1 } else { 1 };
        let num = sign * (int_abs * scale + frac_part);
        return Some(BigRational::new(num.into(), scale.into()));
    }
    Some(BigRational::new(s.parse().ok()?, 1.into()))
}
