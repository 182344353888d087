//! Textual input/output: the system file parser and the canonical printer.
//!
//! Printing is deterministic: graded-lexicographic monomial order with
//! x > y > z, descending; coefficients as reduced fractions with positive
//! denominators; parameters in canonical declaration order inside each
//! coefficient. Everything the printer emits parses back to an identical
//! value.

mod parse;
mod print;

pub use parse::{parse_system, parse_value, ParseError, ParsedSystem};
pub use print::{
    print_coef_frac, print_param_poly, print_phase_poly, print_planar_field, print_rational,
    print_vector_field,
};
