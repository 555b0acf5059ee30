//! Exact rational arithmetic and the simplex kernel every other module uses.

mod lp;
mod rational;

pub use lp::{
    solve_lp, Constraint, LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense, VarBounds,
};
pub(crate) use lp::dot;
pub use rational::{
    common_denominator, format_rational, int, parse_rational, rat, serde_rational,
    serde_rational_vec, to_decimal_string, to_f64, Exact, ParseRationalError, Rational,
};
