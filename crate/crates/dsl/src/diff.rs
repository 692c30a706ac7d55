//! Symbolic differentiation with light constant folding.
//!
//! Derived nodes inherit the span of the source node they came from, so an
//! evaluation failure in a Jacobian entry still points into the user's text.

use crate::ast::{BinOp, Expr, ExprKind, Func, Span, Var};
use crate::error::{DslError, Result};
use crate::eval::power;

fn num(v: f64, span: Span) -> Expr {
    Expr::new(ExprKind::Num(v), span)
}

fn is(e: &Expr, v: f64) -> bool {
    e.as_num() == Some(v)
}

/// Fold only when the result is finite, so failures surface at evaluation.
fn folded(v: f64, span: Span) -> Option<Expr> {
    v.is_finite().then(|| num(v, span))
}

pub fn neg(a: Expr, span: Span) -> Expr {
    match a.kind {
        ExprKind::Num(v) => num(-v, span),
        ExprKind::Neg(inner) => *inner,
        kind => Expr::new(ExprKind::Neg(Box::new(Expr::new(kind, a.span))), span),
    }
}

pub fn call(f: Func, a: Expr, span: Span) -> Expr {
    if let Some(v) = a.as_num() {
        let ok = match f {
            Func::Log => v > 0.0,
            Func::Sqrt => v >= 0.0,
            _ => true,
        };
        if ok {
            if let Some(e) = folded(f.apply(v), span) {
                return e;
            }
        }
    }
    Expr::new(ExprKind::Call(f, Box::new(a)), span)
}

pub fn bin(op: BinOp, a: Expr, b: Expr, span: Span) -> Expr {
    if let (Some(x), Some(y)) = (a.as_num(), b.as_num()) {
        let v = match op {
            BinOp::Add => Some(x + y),
            BinOp::Sub => Some(x - y),
            BinOp::Mul => Some(x * y),
            BinOp::Div => (y != 0.0).then(|| x / y),
            BinOp::Pow => power(x, y).ok(),
        };
        if let Some(e) = v.and_then(|v| folded(v, span)) {
            return e;
        }
    }
    match op {
        BinOp::Add if is(&a, 0.0) => b,
        BinOp::Add | BinOp::Sub if is(&b, 0.0) => a,
        BinOp::Sub if is(&a, 0.0) => neg(b, span),
        BinOp::Mul if is(&a, 0.0) || is(&b, 0.0) => num(0.0, span),
        BinOp::Mul if is(&a, 1.0) => b,
        BinOp::Mul | BinOp::Div if is(&b, 1.0) => a,
        BinOp::Mul if is(&a, -1.0) => neg(b, span),
        BinOp::Mul if is(&b, -1.0) => neg(a, span),
        BinOp::Div if is(&a, 0.0) => num(0.0, span),
        BinOp::Pow if is(&b, 1.0) => a,
        BinOp::Pow if is(&b, 0.0) => num(1.0, span),
        _ => Expr::new(ExprKind::Bin(op, Box::new(a), Box::new(b)), span),
    }
}

impl Expr {
    /// Rebuild bottom-up through the folding constructors.
    pub fn simplify(&self) -> Expr {
        match &self.kind {
            ExprKind::Num(_) | ExprKind::Var(_) => self.clone(),
            ExprKind::Neg(a) => neg(a.simplify(), self.span),
            ExprKind::Call(f, a) => call(*f, a.simplify(), self.span),
            ExprKind::Bin(op, a, b) => bin(*op, a.simplify(), b.simplify(), self.span),
        }
    }

    /// Replace parameters by their values.
    pub fn bind(&self, lookup: &dyn Fn(&str) -> Option<f64>) -> Result<Expr> {
        Ok(match &self.kind {
            ExprKind::Var(Var::Param(name)) => {
                num(lookup(name).ok_or_else(|| DslError::UnboundParameter(name.clone()))?, self.span)
            }
            ExprKind::Num(_) | ExprKind::Var(_) => self.clone(),
            ExprKind::Neg(a) => neg(a.bind(lookup)?, self.span),
            ExprKind::Call(f, a) => call(*f, a.bind(lookup)?, self.span),
            ExprKind::Bin(op, a, b) => bin(*op, a.bind(lookup)?, b.bind(lookup)?, self.span),
        })
    }
}

/// `∂e/∂v`.
pub fn differentiate(e: &Expr, v: &Var) -> Result<Expr> {
    let sp = e.span;
    if !e.depends_on(v) {
        return Ok(num(0.0, sp));
    }
    Ok(match &e.kind {
        ExprKind::Num(_) => num(0.0, sp),
        ExprKind::Var(w) => num(if w == v { 1.0 } else { 0.0 }, sp),
        ExprKind::Neg(a) => neg(differentiate(a, v)?, sp),
        ExprKind::Bin(op, a, b) => {
            let (da, db) = (differentiate(a, v)?, differentiate(b, v)?);
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                BinOp::Add => bin(BinOp::Add, da, db, sp),
                BinOp::Sub => bin(BinOp::Sub, da, db, sp),
                BinOp::Mul => bin(BinOp::Add, bin(BinOp::Mul, da, b.clone(), sp), bin(BinOp::Mul, a, db, sp), sp),
                BinOp::Div => {
                    let top = bin(BinOp::Sub, bin(BinOp::Mul, da, b.clone(), sp), bin(BinOp::Mul, a, db, sp), sp);
                    bin(BinOp::Div, top, bin(BinOp::Pow, b, num(2.0, sp), sp), sp)
                }
                BinOp::Pow if !b.depends_on(v) => {
                    // b · a^(b − 1) · a'
                    let lowered = bin(BinOp::Pow, a, bin(BinOp::Sub, b.clone(), num(1.0, sp), sp), sp);
                    bin(BinOp::Mul, bin(BinOp::Mul, b, lowered, sp), da, sp)
                }
                BinOp::Pow if !a.depends_on(v) => {
                    // a^b · ln a · b'
                    let whole = bin(BinOp::Pow, a.clone(), b, sp);
                    bin(BinOp::Mul, bin(BinOp::Mul, whole, call(Func::Log, a, sp), sp), db, sp)
                }
                BinOp::Pow => {
                    // a^b · (b' ln a + b a'/a)
                    let whole = bin(BinOp::Pow, a.clone(), b.clone(), sp);
                    let left = bin(BinOp::Mul, db, call(Func::Log, a.clone(), sp), sp);
                    let right = bin(BinOp::Div, bin(BinOp::Mul, b, da, sp), a, sp);
                    bin(BinOp::Mul, whole, bin(BinOp::Add, left, right, sp), sp)
                }
            }
        }
        ExprKind::Call(f, a) => {
            let da = differentiate(a, v)?;
            let a = (**a).clone();
            let outer = match f {
                Func::Sin => call(Func::Cos, a, sp),
                Func::Cos => neg(call(Func::Sin, a, sp), sp),
                Func::Tan => {
                    bin(BinOp::Add, num(1.0, sp), bin(BinOp::Pow, call(Func::Tan, a, sp), num(2.0, sp), sp), sp)
                }
                Func::Tanh => {
                    bin(BinOp::Sub, num(1.0, sp), bin(BinOp::Pow, call(Func::Tanh, a, sp), num(2.0, sp), sp), sp)
                }
                Func::Sech => neg(bin(BinOp::Mul, call(Func::Sech, a.clone(), sp), call(Func::Tanh, a, sp), sp), sp),
                Func::Cosh => call(Func::Sinh, a, sp),
                Func::Sinh => call(Func::Cosh, a, sp),
                Func::Exp => call(Func::Exp, a, sp),
                Func::Log => bin(BinOp::Div, num(1.0, sp), a, sp),
                Func::Sqrt => bin(BinOp::Div, num(0.5, sp), call(Func::Sqrt, a, sp), sp),
                Func::Abs => call(Func::Sign, a, sp),
                Func::Sign => {
                    return Err(DslError::NotDifferentiable { line: sp.line, col: sp.col, func: f.name() });
                }
            };
            bin(BinOp::Mul, outer, da, sp)
        }
    })
}
