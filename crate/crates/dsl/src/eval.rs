use std::collections::BTreeMap;

use crate::ast::{BinOp, Expr, ExprKind, Func, Var};
use crate::error::{DslError, Result};

/// Variable values for evaluation.
#[derive(Debug, Clone, Copy)]
pub struct Env<'a> {
    pub x1: f64,
    pub x2: f64,
    pub params: &'a BTreeMap<String, f64>,
}

/// `base^exp`, rejecting non-integer powers of negative bases.
pub(crate) fn power(base: f64, exp: f64) -> std::result::Result<f64, String> {
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        Ok(base.powi(exp as i32))
    } else if base < 0.0 {
        Err(format!("non-integer power {exp} of negative base {base}"))
    } else {
        Ok(base.powf(exp))
    }
}

/// Evaluate `e`. Any non-finite intermediate result is an error located at
/// the node that produced it.
pub fn eval(e: &Expr, env: &Env<'_>) -> Result<f64> {
    let v = match &e.kind {
        ExprKind::Num(v) => *v,
        ExprKind::Var(Var::X1) => env.x1,
        ExprKind::Var(Var::X2) => env.x2,
        ExprKind::Var(Var::Param(name)) => {
            *env.params.get(name).ok_or_else(|| DslError::UnboundParameter(name.clone()))?
        }
        ExprKind::Neg(a) => -eval(a, env)?,
        ExprKind::Call(f, a) => {
            let x = eval(a, env)?;
            match f {
                Func::Log if x <= 0.0 => return Err(DslError::eval(e.span, format!("log of non-positive value {x}"))),
                Func::Sqrt if x < 0.0 => return Err(DslError::eval(e.span, format!("sqrt of negative value {x}"))),
                _ => f.apply(x),
            }
        }
        ExprKind::Bin(op, a, b) => {
            let (x, y) = (eval(a, env)?, eval(b, env)?);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(DslError::eval(e.span, "division by zero"));
                    }
                    x / y
                }
                BinOp::Pow => power(x, y).map_err(|m| DslError::eval(e.span, m))?,
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(DslError::eval(e.span, format!("non-finite result `{v}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn ev(s: &str, x1: f64, x2: f64) -> Result<f64> {
        let params = BTreeMap::from([("a".to_string(), 2.0)]);
        eval(&parse(s, &["a".to_string()]).unwrap(), &Env { x1, x2, params: &params })
    }

    #[test]
    fn values() {
        assert_eq!(ev("x1 - x1^3 + a*x2", 2.0, 1.0).unwrap(), 2.0 - 8.0 + 2.0);
        assert_eq!(ev("-2^2", 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(ev("(-2)^3", 0.0, 0.0).unwrap(), -8.0);
        assert!((ev("sech(x1)", 0.5, 0.0).unwrap() - 1.0 / 0.5f64.cosh()).abs() < 1e-16);
        assert_eq!(ev("abs(x1) * sign(x1)", -3.0, 0.0).unwrap(), -3.0);
    }

    #[test]
    fn failures_carry_positions() {
        let e = ev("x1 + (x2)^0.5", 0.0, -1.0).unwrap_err();
        assert!(matches!(e, DslError::Eval { line: 1, col: 7, .. }), "{e}");
        assert!(ev("log(x1)", 0.0, 0.0).is_err());
        assert!(ev("1 / x1", 0.0, 0.0).is_err());
        assert!(ev("exp(x1)", 1000.0, 0.0).is_err());
        assert!(ev("sqrt(x1)", -1.0, 0.0).is_err());
    }
}
