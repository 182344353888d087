//! Command-line front end: deterministic textual reports over the engine.
//! Exit codes: 0 success, 1 usage or parse error, 2 mathematical
//! precondition failure.

use std::collections::BTreeMap;
use std::process::ExitCode;

use nilcenter::algebra::{CoefFrac, PhaseMono, PhasePoly, VectorField3};
use nilcenter::cmanifold;
use nilcenter::ijm::{self, Seed};
use nilcenter::lyapunov::{self, PerturbationMode};
use nilcenter::monodromy::{self, BetaCase, Verdict3};
use nilcenter::numeric;
use nilcenter::planar;
use nilcenter::sysio::{self, parse_value, print_coef_frac, print_phase_poly};
use num_rational::BigRational;

enum CliError {
    Usage(String),
    Math(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }
}

macro_rules! math_from {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::Math(e.to_string())
            }
        })*
    };
}

math_from!(
    nilcenter::algebra::AlgebraError,
    nilcenter::ijm::IjmError,
    nilcenter::lyapunov::LyapunovError,
    nilcenter::cmanifold::CmError,
    nilcenter::monodromy::MonodromyError
);

impl From<sysio::ParseError> for CliError {
    fn from(e: sysio::ParseError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

const USAGE: &str = "usage: nilcenter <command> <system-file> [flags]

commands:
  check-monodromy <file>
      Andreev-number-2 monodromy criterion, read off the unrestricted field.
  ijm <file> --seed z|zy2 --max-degree N [--solve s1,s2,...] [--subst k=v,...]
      Inverse-Jacobi-multiplier obstructions Lambda_n.
  lyapunov <file> --order L [--pert-degree D] [--g zero|symbolic] [--subst k=v,...]
      Lyapunov quantities eta_l of the rotated family.
  center-manifold <file> --degree N [--subst k=v,...]
      Center-manifold jet z = h(x,y).
  restrict <file> --degree N [--subst k=v,...]
      Restriction of the field to the center manifold.
  verify-iif <file> --v <expr> --degree N [--subst k=v,...]
      Residual of a candidate inverse integrating factor on the restricted system.
  poincare <file> --params a=1,b=2,... --x0 0.02,0.04,... [--tol 1e-12] [--subst k=v,...]
      Poincare return displacements on the restricted system (corroboration only).
";

struct Flags {
    values: BTreeMap<String, String>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Flags, CliError> {
        let mut values = BTreeMap::new();
        let mut it = args.iter();
        while let Some(a) = it.next() {
            let name = a
                .strip_prefix("--")
                .ok_or_else(|| CliError::usage(format!("unexpected argument {a}")))?;
            let v = it
                .next()
                .ok_or_else(|| CliError::usage(format!("flag --{name} needs a value")))?;
            values.insert(name.to_string(), v.clone());
        }
        Ok(Flags { values })
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(|s| s.as_str())
    }

    fn require(&self, name: &str) -> Result<&str, CliError> {
        self.get(name)
            .ok_or_else(|| CliError::usage(format!("missing required flag --{name}")))
    }

    fn u32_flag(&self, name: &str) -> Result<Option<u32>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("--{name} expects a nonnegative integer"))),
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(report) => {
            print!("{report}");
            ExitCode::from(0)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            ExitCode::from(1)
        }
        Err(CliError::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &[String]) -> Result<String, CliError> {
    if args.is_empty() || args[0] == "--help" || args[0] == "help" {
        return Err(CliError::usage("a command is required"));
    }
    let command = args[0].as_str();
    let file = args
        .get(1)
        .filter(|a| !a.starts_with("--"))
        .ok_or_else(|| CliError::usage("a system file is required"))?;
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::usage(format!("cannot read {file}: {e}")))?;
    let sys = sysio::parse_system(&text)?;
    let flags = Flags::parse(&args[2..])?;

    let field = match flags.get("subst") {
        Some(s) => sys.field.substitute(&parse_subst(s, &sys.field)?)?,
        None => sys.field.clone(),
    };

    match command {
        "check-monodromy" => cmd_monodromy(&sys.name, &field),
        "ijm" => cmd_ijm(&sys.name, &field, &flags),
        "lyapunov" => cmd_lyapunov(&sys.name, &field, &flags),
        "center-manifold" => cmd_cm(&sys.name, &field, &flags),
        "restrict" => cmd_restrict(&sys.name, &field, &flags),
        "verify-iif" => cmd_verify_iif(&sys.name, &field, &flags),
        "poincare" => cmd_poincare(&sys.name, &field, &flags),
        other => Err(CliError::usage(format!("unknown command {other}"))),
    }
}

/// `k=v,k=v` with exact expression values over the system's parameters.
fn parse_subst(s: &str, field: &VectorField3) -> Result<BTreeMap<String, CoefFrac>, CliError> {
    let mut out = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--subst entry {part} is not k=v")))?;
        let val = parse_value(v, field.table())?;
        let c = as_coefficient(&val)
            .ok_or_else(|| CliError::usage(format!("--subst value {v} involves phase variables")))?;
        out.insert(k.trim().to_string(), c);
    }
    Ok(out)
}

fn as_coefficient(p: &PhasePoly) -> Option<CoefFrac> {
    if p.max_degree() > 0 {
        return None;
    }
    Some(
        p.coefficient(&PhaseMono::new(0, 0, 0))
            .cloned()
            .unwrap_or_else(|| CoefFrac::zero(&nilcenter::SymbolTable::empty())),
    )
}

fn cmd_monodromy(name: &str, field: &VectorField3) -> Result<String, CliError> {
    let c = monodromy::andreev2_criterion_3d(field)?;
    let mut out = format!("system: {name}\n");
    out += &format!("b200 = {}\n", print_coef_frac(&c.b200));
    out += &format!("inequality lhs = {}\n", print_coef_frac(&c.lhs));
    out += &format!("inequality rhs = {}\n", print_coef_frac(&c.rhs));
    out += &format!("2*a200+b110 = {}\n", print_coef_frac(&c.beta_switch));
    out += &format!(
        "beta case: {}\n",
        match c.beta_case {
            BetaCase::EqNMinus1 => "beta=n-1",
            BetaCase::GtNMinus1 => "beta>n-1",
            BetaCase::Undecided => "undecided",
        }
    );
    out += &format!(
        "verdict: {}\n",
        match (c.verdict, c.beta_case) {
            (Verdict3::Monodromic, BetaCase::GtNMinus1) => "monodromic, n=2, beta>n-1".to_string(),
            (Verdict3::Monodromic, BetaCase::EqNMinus1) => "monodromic, n=2, beta=n-1".to_string(),
            (Verdict3::Monodromic, BetaCase::Undecided) => "monodromic, n=2".to_string(),
            (Verdict3::NotMonodromic, _) => "not monodromic".to_string(),
            (Verdict3::NotAndreev2, _) => "not Andreev-2".to_string(),
            (Verdict3::Undecided, _) => format!(
                "undecided (symbolic): monodromic with n=2 iff {} = 0 and {} < {}",
                print_coef_frac(&c.b200),
                print_coef_frac(&c.lhs),
                print_coef_frac(&c.rhs)
            ),
        }
    );
    Ok(out)
}

fn cmd_ijm(name: &str, field: &VectorField3, flags: &Flags) -> Result<String, CliError> {
    let seed = match flags.require("seed")? {
        "z" => Seed::Z,
        "zy2" => Seed::Zy2,
        other => return Err(CliError::usage(format!("--seed must be z or zy2, got {other}"))),
    };
    let n = flags
        .u32_flag("max-degree")?
        .ok_or_else(|| CliError::usage("missing required flag --max-degree"))?;
    if n < seed.degree() {
        return Err(CliError::usage(format!(
            "--max-degree {n} is below the seed degree {}",
            seed.degree()
        )));
    }
    let run = ijm::obstructions(field, seed, n)?;
    let run = match flags.get("solve") {
        Some(s) => {
            let symbols: Vec<String> = s
                .split(',')
                .filter(|p| !p.is_empty())
                .map(|p| p.trim().to_string())
                .collect();
            ijm::reduce_chain(&run, &symbols)?
        }
        None => run,
    };
    let mut out = format!("system: {name}\nseed: {}\nmax degree: {n}\n", seed.name());
    let admissible = ijm::admissible_seeds(field)?;
    if !admissible.contains(&seed) {
        out += "note: the monodromy condition beta=n-1 admits only the zy2 seed; \
                obstructions below concern a multiplier jet that cannot exist\n";
    }
    for k in 1..=n {
        out += &format!("Lambda[{k}] = {}\n", print_coef_frac(run.lambda(k)));
    }
    out += &format!("kernel unknowns: {}\n", run.kernel_unknowns.join(" "));
    for f in &run.ledger {
        out += &format!(
            "substitution: {} = {} (solved from Lambda[{}])\n",
            f.symbol,
            print_coef_frac(&f.value),
            f.solved_from
        );
    }
    let ok = ijm::self_check(field, &run)?;
    out += &format!("self-check: {}\n", if ok { "ok" } else { "FAILED" });
    Ok(out)
}

fn cmd_lyapunov(name: &str, field: &VectorField3, flags: &Flags) -> Result<String, CliError> {
    let order = flags
        .u32_flag("order")?
        .ok_or_else(|| CliError::usage("missing required flag --order"))?;
    if order < 1 {
        return Err(CliError::usage("--order must be at least 1"));
    }
    let pert_degree = flags.u32_flag("pert-degree")?.unwrap_or(2);
    let mode = match flags.get("g").unwrap_or("zero") {
        "zero" => PerturbationMode::Zero,
        "symbolic" => PerturbationMode::Symbolic,
        other => {
            return Err(CliError::usage(format!(
                "--g must be zero or symbolic, got {other}"
            )));
        }
    };
    let fam = lyapunov::build_family(field, pert_degree, mode)?;
    let etas = lyapunov::eta_quantities(&fam, order)?;
    let mut out = format!(
        "system: {name}\nmode: {}\n",
        match mode {
            PerturbationMode::Zero => "zero".to_string(),
            PerturbationMode::Symbolic => format!("symbolic (degree {pert_degree})"),
        }
    );
    if !fam.unknowns.is_empty() {
        out += &format!("unknowns: {}\n", fam.unknowns.join(" "));
    }
    for l in 1..=order {
        out += &format!("eta[{l}] = {}\n", print_coef_frac(etas.eta(l)));
    }
    let cap = 2 * order + 2;
    let residual = fam
        .apply(&etas.h_jet, cap)?
        .add(&etas.defect_series().truncated(cap));
    out += &format!(
        "self-check: {}\n",
        if residual.is_zero() { "ok" } else { "FAILED" }
    );
    Ok(out)
}

fn cmd_cm(name: &str, field: &VectorField3, flags: &Flags) -> Result<String, CliError> {
    let n = flags
        .u32_flag("degree")?
        .ok_or_else(|| CliError::usage("missing required flag --degree"))?;
    let j = cmanifold::cm_jet(field, n)?;
    Ok(format!(
        "system: {name}\nh = {}\n",
        print_phase_poly(&j.h)
    ))
}

fn cmd_restrict(name: &str, field: &VectorField3, flags: &Flags) -> Result<String, CliError> {
    let n = flags
        .u32_flag("degree")?
        .ok_or_else(|| CliError::usage("missing required flag --degree"))?;
    let j = cmanifold::cm_jet(field, n)?;
    let planar = cmanifold::restrict(field, &j, n)?;
    Ok(format!(
        "system: {name}\n{}\n",
        sysio::print_planar_field(&planar)
    ))
}

fn cmd_verify_iif(name: &str, field: &VectorField3, flags: &Flags) -> Result<String, CliError> {
    let n = flags.u32_flag("degree")?.unwrap_or(8);
    let v_text = flags.require("v")?;
    let v = parse_value(v_text, field.table())?;
    if v.has_z() {
        return Err(CliError::usage("--v must be planar (no z)"));
    }
    // the divergence of an order-k jet is only reliable to k-1, so restrict
    // one degree deeper than the residual check
    let j = cmanifold::cm_jet(field, n + 1)?;
    let restricted = cmanifold::restrict(field, &j, n + 1)?;
    let residual = planar::verify_iif(&restricted, &v, n)?;
    Ok(format!(
        "system: {name}\nv = {}\nresidual = {}\n",
        print_phase_poly(&v),
        print_phase_poly(&residual)
    ))
}

fn cmd_poincare(name: &str, field: &VectorField3, flags: &Flags) -> Result<String, CliError> {
    let tol: f64 = match flags.get("tol") {
        None => 1e-12,
        Some(s) => s
            .parse()
            .map_err(|_| CliError::usage("--tol expects a floating-point number"))?,
    };
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(CliError::usage("--tol must lie in (0, 1e-2]"));
    }
    let x0s: Vec<f64> = flags
        .require("x0")?
        .split(',')
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::usage(format!("bad x0 value {p}")))
        })
        .collect::<Result<_, _>>()?;
    if x0s.is_empty() {
        return Err(CliError::usage("--x0 needs at least one value"));
    }
    let config = numeric::ReturnMapConfig::default();
    if let Some(&bad) = x0s.iter().find(|&&v| !(v > 0.0 && v < config.radius)) {
        return Err(CliError::usage(format!(
            "x0 = {bad} must lie strictly between 0 and the neighborhood radius {}",
            config.radius
        )));
    }
    let mut assignments = BTreeMap::new();
    if let Some(s) = flags.get("params") {
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| CliError::usage(format!("--params entry {part} is not k=v")))?;
            let r = parse_rational(v.trim())
                .ok_or_else(|| CliError::usage(format!("--params value {v} is not rational")))?;
            assignments.insert(k.trim().to_string(), r);
        }
    }
    let j = cmanifold::cm_jet(field, 8)?;
    let restricted = cmanifold::restrict(field, &j, 8)?;
    let bound = numeric::bind(&restricted, &assignments)
        .map_err(|e| CliError::usage(e.to_string()))?;
    let mut out = format!("system: {name}\n");
    let mut runs = Vec::new();
    for &x0 in &x0s {
        let r = numeric::return_map(&bound, x0, tol, &config);
        out += &format!(
            "x0 = {x0}  displacement = {}  turns = {}  steps = {}  status = {}\n",
            if r.displacement.is_nan() {
                "-".to_string()
            } else {
                format!("{:+.6e}", r.displacement)
            },
            r.turns,
            r.steps,
            match r.status {
                numeric::ReturnStatus::Ok => "ok",
                numeric::ReturnStatus::NoReturn => "no-return",
                numeric::ReturnStatus::LeftNeighborhood => "left-neighborhood",
            }
        );
        runs.push(r);
    }
    if x0s.len() >= 3 {
        let (class, _) = numeric::classify(&bound, &x0s, tol, &config);
        out += &format!(
            "classification: {} (numeric corroboration, not a proof)\n",
            match class {
                numeric::Classification::CenterConsistent => "center-consistent",
                numeric::Classification::StableFocus => "stable-focus",
                numeric::Classification::UnstableFocus => "unstable-focus",
                numeric::Classification::Inconclusive => "inconclusive",
            }
        );
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: num_rational::BigRational = BigRational::new(n.trim().parse().ok()?, 1.into());
            let d = BigRational::new(d.trim().parse().ok()?, 1.into());
            if d == BigRational::new(0.into(), 1.into()) {
                return None;
            }
            Some(n / d)
        }
        None => Some(BigRational::new(s.parse().ok()?, 1.into())),
    }
}
