//! Continuous first-order logic: syntax, parsing and fiberwise evaluation.

pub mod eval;
pub mod formula;
pub mod parser;
pub mod random;
pub mod signature;

pub use eval::{eval_formula, eval_term, lipschitz, Binding, ElementSample, EvalError, Structure, ValueInterval};
pub use formula::{Comparator, Condition, Formula, Term};
pub use parser::{parse_condition, parse_condition_with, parse_formula, ParseError};
pub use signature::{Signature, Symbol};
