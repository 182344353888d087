//! Floating-point corroboration: bind parameters, integrate the restricted
//! planar system with an embedded adaptive Runge-Kutta pair, and measure the
//! Poincare return displacement on the section `{y = 0, x > 0}`.
//!
//! The section is valid for the monodromic fixtures because `dy/dt = f(x)`
//! does not vanish on it away from the origin. Classification from
//! displacements is corroborating evidence, never a proof.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::algebra::CoefFrac;
use crate::planar::PlanarField;

/// Restricted planar field with every parameter bound, in double precision.
/// Terms are `(x_exponent, y_exponent, coefficient)`; the linear `y` of the
/// first component is implicit.
#[derive(Debug, Clone)]
pub struct BoundPlanar {
    fx: Vec<(u32, u32, f64)>,
    fy: Vec<(u32, u32, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumericError {
    UnboundParameter(String),
    Algebra(crate::algebra::AlgebraError),
}

impl std::fmt::Display for NumericError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NumericError::UnboundParameter(p) => write!(f, "parameter {p} is not bound"),
            NumericError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for NumericError {}

impl From<crate::algebra::AlgebraError> for NumericError {
    fn from(e: crate::algebra::AlgebraError) -> NumericError {
        NumericError::Algebra(e)
    }
}

/// Binds all parameters to rationals and lowers the field to doubles.
pub fn bind(
    planar: &PlanarField,
    assignments: &BTreeMap<String, BigRational>,
) -> Result<BoundPlanar, NumericError> {
    let table = planar.table();
    let assign: BTreeMap<String, CoefFrac> = assignments
        .iter()
        .map(|(k, v)| (k.clone(), CoefFrac::from_rat(table, v.clone())))
        .collect();
    let s = planar.substitute(&assign)?;
    let lower = |p: &crate::algebra::PhasePoly| -> Result<Vec<(u32, u32, f64)>, NumericError> {
        let mut out = Vec::new();
        for (m, c) in p.terms() {
            let r = c.as_rational().ok_or_else(|| {
                // name one offending symbol for the error
                let name = c
                    .num()
                    .symbols_present()
                    .into_iter()
                    .chain(c.den().symbols_present())
                    .map(|i| c.table().name(i).to_string())
                    .next()
                    .unwrap_or_else(|| "?".into());
                NumericError::UnboundParameter(name)
            })?;
            let v = r.numer().to_f64().unwrap_or(f64::NAN)
                / r.denom().to_f64().unwrap_or(f64::NAN);
            out.push((m.xe, m.ye, v));
        }
        Ok(out)
    };
    Ok(BoundPlanar {
        fx: lower(s.px())?,
        fy: lower(s.py())?,
    })
}

impl BoundPlanar {
    /// Builds a bound system directly from coefficient tables
    /// `(x_exponent, y_exponent, coefficient)`; the linear `y` of the first
    /// component is implicit, everything else (including linear terms of the
    /// second component) goes in the tables. Useful for sanity fixtures that
    /// do not come from a restriction, like the linear center `(y, -x)`.
    pub fn from_terms(fx: Vec<(u32, u32, f64)>, fy: Vec<(u32, u32, f64)>) -> BoundPlanar {
        BoundPlanar { fx, fy }
    }

    #[inline]
    fn rhs(&self, x: f64, y: f64) -> (f64, f64) {
        let eval = |terms: &[(u32, u32, f64)]| -> f64 {
            let mut acc = 0.0;
            for &(xe, ye, c) in terms {
                let mut t = c;
                for _ in 0..xe {
                    t *= x;
                }
                for _ in 0..ye {
                    t *= y;
                }
                acc += t;
            }
            acc
        };
        (y + eval(&self.fx), eval(&self.fy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnStatus {
    Ok,
    NoReturn,
    LeftNeighborhood,
}

#[derive(Debug, Clone)]
pub struct ReturnMapResult {
    pub x0: f64,
    pub displacement: f64,
    pub turns: u32,
    pub steps: usize,
    pub status: ReturnStatus,
}

#[derive(Debug, Clone, Copy)]
pub struct ReturnMapConfig {
    pub radius: f64,
    pub max_steps: usize,
}

impl Default for ReturnMapConfig {
    fn default() -> Self {
        ReturnMapConfig {
            radius: 0.75,
            max_steps: 4_000_000,
        }
    }
}

// Dormand-Prince 5(4) step with the standard fourth-order dense output.
struct Dopri5Step {
    rcont: [[f64; 2]; 5],
}

impl Dopri5Step {
    fn interpolate(&self, theta: f64) -> [f64; 2] {
        let t1 = 1.0 - theta;
        std::array::from_fn(|i| {
            self.rcont[0][i]
                + theta
                    * (self.rcont[1][i]
                        + t1 * (self.rcont[2][i] + theta * (self.rcont[3][i] + t1 * self.rcont[4][i])))
        })
    }
}

fn dopri5_step(
    s: &BoundPlanar,
    y: [f64; 2],
    k1: (f64, f64),
    h: f64,
) -> ([f64; 2], f64, (f64, f64), Dopri5Step) {
    let f = |p: [f64; 2]| s.rhs(p[0], p[1]);
    let add = |y: [f64; 2], parts: &[(f64, (f64, f64))]| -> [f64; 2] {
        let mut out = y;
        for &(c, k) in parts {
            out[0] += h * c * k.0;
            out[1] += h * c * k.1;
        }
        out
    };
    let k1t = k1;
    let k2 = f(add(y, &[(1.0 / 5.0, k1t)]));
    let k3 = f(add(y, &[(3.0 / 40.0, k1t), (9.0 / 40.0, k2)]));
    let k4 = f(add(
        y,
        &[(44.0 / 45.0, k1t), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)],
    ));
    let k5 = f(add(
        y,
        &[
            (19372.0 / 6561.0, k1t),
            (-25360.0 / 2187.0, k2),
            (64448.0 / 6561.0, k3),
            (-212.0 / 729.0, k4),
        ],
    ));
    let k6 = f(add(
        y,
        &[
            (9017.0 / 3168.0, k1t),
            (-355.0 / 33.0, k2),
            (46732.0 / 5247.0, k3),
            (49.0 / 176.0, k4),
            (-5103.0 / 18656.0, k5),
        ],
    ));
    let y1 = add(
        y,
        &[
            (35.0 / 384.0, k1t),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = f(y1);
    // embedded 4th-order difference
    let e = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let ks = [k1t, k2, k3, k4, k5, k6, k7];
    let mut err = [0.0f64; 2];
    for (c, k) in e.iter().zip(ks.iter()) {
        err[0] += c * k.0;
        err[1] += c * k.1;
    }
    err[0] *= h;
    err[1] *= h;
    let err_norm = (err[0] * err[0] + err[1] * err[1]).sqrt();

    // dense output (Hairer's rcont coefficients)
    let d = [
        -12715105075.0 / 11282082432.0,
        0.0,
        87487479700.0 / 32700410799.0,
        -10690763975.0 / 1880347072.0,
        701980252875.0 / 199316789632.0,
        -1453857185.0 / 822651844.0,
        69997945.0 / 29380423.0,
    ];
    let ydiff = [y1[0] - y[0], y1[1] - y[1]];
    let bspl = [h * k1t.0 - ydiff[0], h * k1t.1 - ydiff[1]];
    let mut cont5 = [0.0f64; 2];
    for (c, k) in d.iter().zip(ks.iter()) {
        cont5[0] += c * k.0;
        cont5[1] += c * k.1;
    }
    cont5[0] *= h;
    cont5[1] *= h;
    let step = Dopri5Step {
        rcont: [
            y,
            ydiff,
            bspl,
            [
                ydiff[0] - h * k7.0 - bspl[0],
                ydiff[1] - h * k7.1 - bspl[1],
            ],
            cont5,
        ],
    };
    (y1, err_norm, k7, step)
}

/// Integrates from `(x0, 0)` until the orbit returns to the section
/// `{y = 0, x > 0}` after one full revolution. Crossings are located by sign
/// change and bisection on the dense output.
pub fn return_map(
    s: &BoundPlanar,
    x0: f64,
    tol: f64,
    config: &ReturnMapConfig,
) -> ReturnMapResult {
    run_return_map(s, x0, tol, config, |_| {})
}

/// Same integration, additionally recording the accepted trajectory points
/// (for plotting).
pub fn trace_orbit(
    s: &BoundPlanar,
    x0: f64,
    tol: f64,
    config: &ReturnMapConfig,
) -> (Vec<[f64; 2]>, ReturnMapResult) {
    let mut points = vec![[x0, 0.0]];
    let result = run_return_map(s, x0, tol, config, |p| points.push(p));
    (points, result)
}

fn run_return_map(
    s: &BoundPlanar,
    x0: f64,
    tol: f64,
    config: &ReturnMapConfig,
    mut on_point: impl FnMut([f64; 2]),
) -> ReturnMapResult {
    assert!(x0 > 0.0 && x0 < config.radius, "x0 must sit inside the neighborhood");
    let mut y = [x0, 0.0];
    let mut k1 = s.rhs(y[0], y[1]);
    let mut h = 1e-6_f64;
    let mut steps = 0usize;
    let mut neg_crossings = 0u32;
    let fail = |status: ReturnStatus, steps: usize, turns: u32| ReturnMapResult {
        x0,
        displacement: f64::NAN,
        turns,
        steps,
        status,
    };
    while steps < config.max_steps {
        steps += 1;
        let (y1, err, k7, dense) = dopri5_step(s, y, k1, h);
        let sc = tol + tol * y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err > sc {
            let shrink = 0.9 * (sc / err).powf(0.2);
            h *= shrink.max(0.2);
            continue;
        }
        // accepted
        if y[1] != 0.0 && y1[1] != 0.0 && y[1].signum() != y1[1].signum() {
            // locate the crossing by bisection on the dense output
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            let y_at = |theta: f64| dense.interpolate(theta)[1];
            let sign_lo = y_at(0.0).signum();
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if y_at(mid).signum() == sign_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let cross = dense.interpolate(0.5 * (lo + hi));
            if cross[0] > 0.0 {
                if neg_crossings == 1 {
                    on_point(cross);
                    return ReturnMapResult {
                        x0,
                        displacement: cross[0] - x0,
                        turns: 1,
                        steps,
                        status: ReturnStatus::Ok,
                    };
                }
                // crossed the positive section without a full revolution
                return fail(ReturnStatus::NoReturn, steps, neg_crossings);
            } else {
                neg_crossings += 1;
                if neg_crossings > 1 {
                    return fail(ReturnStatus::NoReturn, steps, neg_crossings);
                }
            }
        }
        y = y1;
        k1 = k7;
        on_point(y);
        if y[0] * y[0] + y[1] * y[1] > config.radius * config.radius {
            return fail(ReturnStatus::LeftNeighborhood, steps, neg_crossings);
        }
        let grow = 0.9 * (sc / err.max(1e-300)).powf(0.2);
        h *= grow.clamp(0.2, 5.0);
        // keep well under the revolution time (which scales like 1/x0) so a
        // section crossing always shows as a sign change between endpoints
        h = h.min(0.05 / x0);
    }
    fail(ReturnStatus::NoReturn, steps, neg_crossings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    CenterConsistent,
    StableFocus,
    UnstableFocus,
    Inconclusive,
}

/// Runs the return map at each abscissa: center-consistent when every
/// displacement is below `100 * tol * x0`; a focus verdict when all exceed
/// the threshold with one sign (negative displacements contract, so the
/// focus is stable); anything else is inconclusive.
pub fn classify(
    s: &BoundPlanar,
    x0s: &[f64],
    tol: f64,
    config: &ReturnMapConfig,
) -> (Classification, Vec<ReturnMapResult>) {
    assert!(x0s.len() >= 3, "at least three initial points");
    let runs: Vec<ReturnMapResult> = x0s.iter().map(|&x0| return_map(s, x0, tol, config)).collect();
    if runs.iter().any(|r| r.status != ReturnStatus::Ok) {
        return (Classification::Inconclusive, runs);
    }
    let small = |r: &ReturnMapResult| r.displacement.abs() < 100.0 * tol * r.x0;
    if runs.iter().all(small) {
        return (Classification::CenterConsistent, runs);
    }
    if runs.iter().all(|r| !small(r) && r.displacement < 0.0) {
        return (Classification::StableFocus, runs);
    }
    if runs.iter().all(|r| !small(r) && r.displacement > 0.0) {
        return (Classification::UnstableFocus, runs);
    }
    (Classification::Inconclusive, runs)
}
