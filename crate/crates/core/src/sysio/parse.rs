use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{
    AlgebraError, Axis, CoefFrac, PhaseMono, PhasePoly, SymbolTable, VectorField3,
};

/// Parse failure with source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// A fully validated system file.
#[derive(Debug, Clone)]
pub struct ParsedSystem {
    pub name: String,
    pub params: Vec<String>,
    pub field: VectorField3,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex_line(line: &str, line_no: usize, out: &mut Vec<Spanned>) -> Result<(), ParseError> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let chars: Vec<char> = body.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let simple = |t: Tok| Spanned {
            tok: t,
            line: line_no,
            col,
        };
        match c {
            ' ' | '\t' | '\r' => {
                i += 1;
            }
            ';' => {
                // statement separator is handled by the caller via a sentinel
                out.push(simple(Tok::Ident(";".into())));
                i += 1;
            }
            '+' => {
                out.push(simple(Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push(simple(Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push(simple(Tok::Star));
                i += 1;
            }
            '/' => {
                out.push(simple(Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push(simple(Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push(simple(Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push(simple(Tok::RParen));
                i += 1;
            }
            '=' => {
                out.push(simple(Tok::Eq));
                i += 1;
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' {
                    j += 1;
                }
                if j == chars.len() {
                    return Err(ParseError::new(line_no, col, "unterminated string literal"));
                }
                out.push(simple(Tok::Str(chars[start..j].iter().collect())));
                i = j + 1;
            }
            _ if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(simple(Tok::Int(s.parse().unwrap())));
                i = j;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push(simple(Tok::Ident(s)));
                i = j;
            }
            _ => {
                return Err(ParseError::new(
                    line_no,
                    col,
                    format!("unexpected character {c:?}"),
                ));
            }
        }
    }
    Ok(())
}

/// Recursive-descent expression evaluator over `PhasePoly` values.
/// Grammar: expr := ['+'|'-'] term (('+'|'-') term)*;
/// term := factor (('*'|'/') factor)*;
/// factor := int | symbol | '(' expr ')' — each optionally followed by '^' posint.
struct ExprParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    table: Arc<SymbolTable>,
    end: (usize, usize),
    depth: u32,
}

// hard limits so hostile input cannot stall or overflow the parser
const MAX_EXPONENT: u32 = 512;
const MAX_DEPTH: u32 = 128;

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::new(line, col, msg)
    }

    fn parse_expr(&mut self) -> Result<PhasePoly, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("expression nesting too deep"));
        }
        let result = self.parse_expr_inner();
        self.depth -= 1;
        result
    }

    fn parse_expr_inner(&mut self) -> Result<PhasePoly, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                self.parse_term()?.neg()
            }
            Some(Tok::Plus) => {
                self.bump();
                self.parse_term()?
            }
            _ => self.parse_term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<PhasePoly, ParseError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.parse_factor()?);
                }
                Some(Tok::Slash) => {
                    let (line, col) = self.here();
                    self.bump();
                    let rhs = self.parse_factor()?;
                    if rhs.has_z() || rhs.max_degree() > 0 {
                        return Err(ParseError::new(
                            line,
                            col,
                            "nonpolynomial construct: division by an expression in the phase variables",
                        ));
                    }
                    let c = rhs
                        .coefficient(&PhaseMono::new(0, 0, 0))
                        .cloned()
                        .unwrap_or_else(|| CoefFrac::zero(&self.table));
                    let inv = c
                        .inverse()
                        .map_err(|_| ParseError::new(line, col, "division by zero"))?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<PhasePoly, ParseError> {
        let base = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.bump();
                PhasePoly::constant(CoefFrac::from_rat(
                    &self.table,
                    BigRational::from_integer(n),
                ))
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                match name.as_str() {
                    "x" => PhasePoly::var(&self.table, Axis::X),
                    "y" => PhasePoly::var(&self.table, Axis::Y),
                    "z" => PhasePoly::var(&self.table, Axis::Z),
                    _ => {
                        if self.table.contains(&name) {
                            PhasePoly::constant(CoefFrac::symbol(&self.table, &name))
                        } else {
                            let (line, col) = self.here();
                            return Err(ParseError::new(
                                line,
                                col.saturating_sub(name.len()),
                                format!("unknown symbol {name}"),
                            ));
                        }
                    }
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.parse_expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.bump();
                        inner
                    }
                    _ => return Err(self.err("expected ')'")),
                }
            }
            _ => return Err(self.err("expected a number, symbol or '('")),
        };
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.bump();
                    if n.is_zero() || n < BigInt::zero() {
                        return Err(self.err("exponent must be a positive integer"));
                    }
                    let e: u32 = n
                        .try_into()
                        .ok()
                        .filter(|&e| e <= MAX_EXPONENT)
                        .ok_or_else(|| self.err("exponent too large"))?;
                    let mut out = PhasePoly::constant(CoefFrac::one(&self.table));
                    for _ in 0..e {
                        out = out.mul(&base);
                    }
                    return Ok(out);
                }
                _ => return Err(self.err("expected a positive integer exponent")),
            }
        }
        Ok(base)
    }
}

fn eval_expr(
    toks: &[Spanned],
    table: &Arc<SymbolTable>,
    end: (usize, usize),
) -> Result<PhasePoly, ParseError> {
    let mut p = ExprParser {
        toks,
        pos: 0,
        table: Arc::clone(table),
        end,
        depth: 0,
    };
    let v = p.parse_expr()?;
    if p.pos != toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

/// Parses one polynomial/fraction expression over the given symbol table.
/// `x`, `y`, `z` are the phase variables; all other identifiers must be in
/// the table.
pub fn parse_value(text: &str, table: &Arc<SymbolTable>) -> Result<PhasePoly, ParseError> {
    let mut toks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        lex_line(line, i + 1, &mut toks)?;
    }
    eval_expr(&toks, table, (text.lines().count().max(1), 1))
}

struct RawSystem {
    name: Option<String>,
    params: Option<(Vec<String>, usize)>,
    lambda: Option<(Vec<Spanned>, usize)>,
    eqs: [Option<(Vec<Spanned>, usize)>; 3],
}

/// Parses and validates the line-oriented system format:
///
/// ```text
/// system "<name>"
/// lambda = <rational literal or symbol>
/// params <sym> <sym> ...
/// dx = <expr> ; dy = <expr> ; dz = <expr>
/// ```
///
/// `#` starts a comment. The linear part must be exactly
/// `(y, 0, -lambda*z)` with `lambda != 0`.
pub fn parse_system(text: &str) -> Result<ParsedSystem, ParseError> {
    let mut raw = RawSystem {
        name: None,
        params: None,
        lambda: None,
        eqs: [None, None, None],
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut toks = Vec::new();
        lex_line(line, line_no, &mut toks)?;
        // split on ';' sentinels
        let mut stmts: Vec<Vec<Spanned>> = vec![Vec::new()];
        for t in toks {
            if matches!(&t.tok, Tok::Ident(s) if s == ";") {
                stmts.push(Vec::new());
            } else {
                stmts.last_mut().unwrap().push(t);
            }
        }
        for stmt in stmts {
            if stmt.is_empty() {
                continue;
            }
            parse_statement(&stmt, line_no, &mut raw)?;
        }
    }
    let (params, params_line) = raw.params.unwrap_or((Vec::new(), 0));
    for (i, p) in params.iter().enumerate() {
        if ["x", "y", "z", "lambda"].contains(&p.as_str()) {
            return Err(ParseError::new(
                params_line,
                1,
                format!("parameter {p} clashes with a reserved symbol"),
            ));
        }
        if params[..i].contains(p) {
            return Err(ParseError::new(
                params_line,
                1,
                format!("duplicate parameter {p}"),
            ));
        }
    }

    // lambda may be a literal or a symbol; a symbolic lambda is appended to
    // the table right after the declared parameters.
    let mut names = params.clone();
    let lambda_sym = match &raw.lambda {
        Some((toks, _)) if toks.len() == 1 => match &toks[0].tok {
            Tok::Ident(s) if !names.contains(s) => Some(s.clone()),
            _ => None,
        },
        _ => None,
    };
    if let Some(s) = &lambda_sym {
        names.push(s.clone());
    }
    let table = SymbolTable::new(&names);

    let lambda_value = match &raw.lambda {
        Some((toks, line)) => {
            let v = eval_expr(toks, &table, (*line, 1))?;
            if v.max_degree() > 0 {
                return Err(ParseError::new(
                    *line,
                    1,
                    "lambda must be a rational literal or a symbol",
                ));
            }
            let c = v
                .coefficient(&PhaseMono::new(0, 0, 0))
                .cloned()
                .unwrap_or_else(|| CoefFrac::zero(&table));
            if c.is_zero() {
                return Err(ParseError::new(*line, 1, "lambda must be nonzero"));
            }
            Some(c)
        }
        None => None,
    };

    let mut components = Vec::new();
    for (idx, name) in ["dx", "dy", "dz"].iter().enumerate() {
        match &raw.eqs[idx] {
            Some((toks, line)) => {
                components.push(eval_expr(toks, &table, (*line, 1))?);
            }
            None => {
                return Err(ParseError::new(
                    text.lines().count().max(1),
                    1,
                    format!("missing equation for {name}"),
                ));
            }
        }
    }
    let dz_line = raw.eqs[2].as_ref().map(|(_, l)| *l).unwrap_or(1);

    validate_linear(&components, &table, lambda_value, dz_line, raw.name, params)
}

fn parse_statement(
    stmt: &[Spanned],
    line_no: usize,
    raw: &mut RawSystem,
) -> Result<(), ParseError> {
    let head = &stmt[0];
    let kw = match &head.tok {
        Tok::Ident(s) => s.clone(),
        _ => {
            return Err(ParseError::new(
                line_no,
                head.col,
                "expected a statement keyword (system, lambda, params, dx, dy, dz)",
            ));
        }
    };
    let expect_eq = |stmt: &[Spanned]| -> Result<(), ParseError> {
        match stmt.get(1).map(|s| &s.tok) {
            Some(Tok::Eq) => Ok(()),
            _ => Err(ParseError::new(line_no, head.col, "expected '='")),
        }
    };
    match kw.as_str() {
        "system" => match stmt.get(1).map(|s| &s.tok) {
            Some(Tok::Str(s)) => {
                raw.name = Some(s.clone());
                Ok(())
            }
            _ => Err(ParseError::new(
                line_no,
                head.col,
                "expected a quoted system name",
            )),
        },
        "lambda" => {
            expect_eq(stmt)?;
            raw.lambda = Some((stmt[2..].to_vec(), line_no));
            Ok(())
        }
        "params" => {
            let mut names = Vec::new();
            for s in &stmt[1..] {
                match &s.tok {
                    Tok::Ident(n) => names.push(n.clone()),
                    _ => {
                        return Err(ParseError::new(
                            line_no,
                            s.col,
                            "expected a parameter name",
                        ));
                    }
                }
            }
            raw.params = Some((names, line_no));
            Ok(())
        }
        "dx" | "dy" | "dz" => {
            expect_eq(stmt)?;
            let idx = match kw.as_str() {
                "dx" => 0,
                "dy" => 1,
                _ => 2,
            };
            raw.eqs[idx] = Some((stmt[2..].to_vec(), line_no));
            Ok(())
        }
        other => Err(ParseError::new(
            line_no,
            head.col,
            format!("unknown statement {other}"),
        )),
    }
}

fn validate_linear(
    components: &[PhasePoly],
    table: &Arc<SymbolTable>,
    lambda_declared: Option<CoefFrac>,
    dz_line: usize,
    name: Option<String>,
    params: Vec<String>,
) -> Result<ParsedSystem, ParseError> {
    let low_monos = [
        PhaseMono::new(0, 0, 0),
        PhaseMono::new(1, 0, 0),
        PhaseMono::new(0, 1, 0),
        PhaseMono::new(0, 0, 1),
    ];
    let comp_names = ["dx", "dy", "dz"];
    let coef = |p: &PhasePoly, m: PhaseMono| -> CoefFrac {
        p.coefficient(&m)
            .cloned()
            .unwrap_or_else(|| CoefFrac::zero(table))
    };
    let offending = |comp: usize, m: PhaseMono, c: &CoefFrac| -> ParseError {
        let mono = crate::sysio::print_phase_poly(&PhasePoly::monomial(m, c.clone()));
        ParseError::new(
            dz_line,
            1,
            format!(
                "wrong linear part: {} contains term {} (linear part must be (y, 0, -lambda*z))",
                comp_names[comp], mono
            ),
        )
    };
    // dx: y coefficient 1, everything else at degree <= 1 zero
    let one = CoefFrac::one(table);
    for (ci, p) in components.iter().enumerate() {
        for m in low_monos {
            let c = coef(p, m);
            let is_y = m == PhaseMono::new(0, 1, 0);
            let is_z = m == PhaseMono::new(0, 0, 1);
            match (ci, is_y, is_z) {
                (0, true, _) => {
                    if c != one {
                        return Err(offending(0, m, &c));
                    }
                }
                (2, _, true) => {} // defines lambda below
                _ => {
                    if !c.is_zero() {
                        return Err(offending(ci, m, &c));
                    }
                }
            }
        }
    }
    let lambda = coef(&components[2], PhaseMono::new(0, 0, 1)).neg();
    if lambda.is_zero() {
        return Err(ParseError::new(dz_line, 1, "lambda must be nonzero"));
    }
    if let Some(decl) = lambda_declared {
        if decl != lambda {
            return Err(ParseError::new(
                dz_line,
                1,
                format!(
                    "declared lambda = {} but dz has linear part -({})*z",
                    crate::sysio::print_coef_frac(&decl),
                    crate::sysio::print_coef_frac(&lambda)
                ),
            ));
        }
    }
    let nonlinear = |p: &PhasePoly| -> PhasePoly {
        PhasePoly::from_terms(
            p.terms()
                .filter(|(m, _)| m.degree() >= 2)
                .map(|(m, c)| (*m, c.clone())),
        )
    };
    let field = VectorField3::new(
        table,
        nonlinear(&components[0]),
        nonlinear(&components[1]),
        nonlinear(&components[2]),
        lambda,
    )
    .map_err(|e: AlgebraError| ParseError::new(dz_line, 1, e.to_string()))?;
    Ok(ParsedSystem {
        name: name.unwrap_or_else(|| "unnamed".to_string()),
        params,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn song_wang_feng_coefficients() {
        let sys =
            parse_system(include_str!("../../../../systems/song_wang_feng.sys")).unwrap();
        assert_eq!(sys.name, "song-wang-feng");
        assert_eq!(sys.params, vec!["a", "b", "d"]);
        let f = &sys.field;
        let t = f.table();
        assert_eq!(*f.lambda(), CoefFrac::one(t));
        let c = |ax: Axis, m: (u32, u32, u32)| f.coefficient(ax, PhaseMono::new(m.0, m.1, m.2));
        assert_eq!(c(Axis::X, (1, 1, 0)), CoefFrac::from_rat(t, rat(-2, 1)));
        assert_eq!(c(Axis::X, (1, 0, 1)), CoefFrac::symbol(t, "a"));
        assert_eq!(c(Axis::Y, (3, 0, 0)), CoefFrac::from_rat(t, rat(-2, 1)));
        assert_eq!(c(Axis::Y, (0, 2, 0)), CoefFrac::one(t));
        assert_eq!(c(Axis::Y, (0, 1, 1)), CoefFrac::symbol(t, "b"));
        assert_eq!(c(Axis::Z, (1, 1, 0)), CoefFrac::symbol(t, "d"));
    }

    #[test]
    fn trivial_linear_system() {
        let sys = parse_system("dx = y\ndy = 0\ndz = -z").unwrap();
        assert!(sys.field.px().is_zero());
        assert!(sys.field.py().is_zero());
        assert!(sys.field.pz().is_zero());
        assert_eq!(*sys.field.lambda(), CoefFrac::one(sys.field.table()));
    }

    #[test]
    fn wrong_linear_part_is_named() {
        let err = parse_system("dx = 2*y\ndy = 0\ndz = -z").unwrap_err();
        assert!(err.msg.contains("wrong linear part"), "{}", err.msg);
        assert!(err.msg.contains("dx"), "{}", err.msg);
        let err = parse_system("dx = y\ndy = x\ndz = -z").unwrap_err();
        assert!(err.msg.contains("dy contains term x"), "{}", err.msg);
        let err = parse_system("dx = y\ndy = 0\ndz = 0").unwrap_err();
        assert!(err.msg.contains("lambda must be nonzero"), "{}", err.msg);
    }

    #[test]
    fn unknown_symbol_and_nonpolynomial() {
        let err = parse_system("dx = y + q*x^2\ndy = 0\ndz = -z").unwrap_err();
        assert!(err.msg.contains("unknown symbol q"), "{}", err.msg);
        let t = SymbolTable::new(&["a"]);
        let err = parse_value("1/x", &t).unwrap_err();
        assert!(err.msg.contains("nonpolynomial"), "{}", err.msg);
    }

    #[test]
    fn declared_lambda_cross_checked() {
        let ok = parse_system("lambda = 3\ndx = y\ndy = 0\ndz = -3*z").unwrap();
        assert_eq!(
            *ok.field.lambda(),
            CoefFrac::from_rat(ok.field.table(), rat(3, 1))
        );
        let err = parse_system("lambda = 2\ndx = y\ndy = 0\ndz = -3*z").unwrap_err();
        assert!(err.msg.contains("declared lambda"), "{}", err.msg);
    }
}
