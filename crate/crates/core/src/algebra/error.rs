use std::fmt;

/// Errors raised by the exact-arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// A jet was requested at a degree beyond what the value is known to.
    TruncationUnderflow { known: u32, needed: u32 },
    /// A substitution made a stored denominator vanish identically.
    DenominatorVanished { denominator: String },
    /// Division of a coefficient by zero.
    DivisionByZero,
    /// An operation required a homogeneous polynomial.
    NonHomogeneous,
    /// A fresh symbol clashed with one already declared.
    SymbolExists(String),
    /// A vector field (or map) violated a structural requirement.
    BadStructure(String),
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::TruncationUnderflow { known, needed } => write!(
                f,
                "truncation underflow: value known to degree {known}, degree {needed} requested"
            ),
            AlgebraError::DenominatorVanished { denominator } => {
                write!(f, "substitution makes denominator {denominator} vanish")
            }
            AlgebraError::DivisionByZero => write!(f, "division by zero"),
            AlgebraError::NonHomogeneous => write!(f, "operand is not homogeneous"),
            AlgebraError::SymbolExists(s) => write!(f, "symbol {s} already declared"),
            AlgebraError::BadStructure(s) => write!(f, "{s}"),
        }
    }
}

impl std::error::Error for AlgebraError {}
