//! Front end for `vn-core`: the expression language used on the command
//! line and the DOT renderer for tree-pair diagrams.

pub mod dot;
pub mod expr;

pub use dot::render_dot;
pub use expr::{parse_expression, Env, EvalError, Expr, ParseError};
