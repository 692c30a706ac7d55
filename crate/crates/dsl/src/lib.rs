//! A small expression language for vector fields `f(x1, x2)` and impulse
//! shapes `g(x1, x2)`, with exact symbolic Jacobians.
//!
//! ```
//! use kickflow_dsl::{compile_field, MapSpec};
//! let f = compile_field(&MapSpec::new("x2", "x1 - a*x1^3").param("a", 1.0)).unwrap();
//! assert_eq!(f.trace(kickflow_core::Vec2::new(0.3, 0.4)), 0.0);
//! ```

pub mod ast;
pub mod compile;
pub mod diff;
pub mod error;
pub mod eval;
pub mod parser;

pub use ast::{BinOp, Expr, ExprKind, Func, Span, Var};
pub use compile::{compile_field, compile_impulse, compile_map, CompiledMap, MapSpec};
pub use diff::differentiate;
pub use error::{DslError, Result};
pub use eval::{eval, Env};
pub use parser::parse;
