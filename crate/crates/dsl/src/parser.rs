//! Tokenizer and precedence-climbing parser.
//!
//! Binding, loosest first: `+ -`, `* /`, unary `-`, `^` (right-associative).
//! So `-x^2` is `-(x^2)` and `2^-x` is `2^(-x)`.

use crate::ast::{BinOp, Expr, ExprKind, Func, Span, Var};
use crate::error::{DslError, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span_at = |start: usize, end: usize, line: usize, line_start: usize| Span {
        start,
        end,
        line,
        col: src[line_start..start].chars().count() + 1,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut k = i + 1;
                if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                    k += 1;
                }
                if k < bytes.len() && bytes[k].is_ascii_digit() {
                    i = k;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| {
                DslError::syntax(span_at(start, i, line, line_start), format!("malformed number `{text}`"))
            })?;
            Tok::Num(v)
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            Tok::Ident(src[start..i].to_string())
        } else {
            i += 1;
            match c {
                b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                _ => {
                    let ch = src[start..].chars().next().unwrap();
                    return Err(DslError::syntax(
                        span_at(start, start + ch.len_utf8(), line, line_start),
                        format!("unexpected character `{ch}`"),
                    ));
                }
            }
        };
        out.push(Token { tok, span: span_at(start, i, line, line_start) });
    }
    out.push(Token { tok: Tok::End, span: span_at(src.len(), src.len(), line, line_start) });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    params: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn join(a: Span, b: Span) -> Span {
        Span { start: a.start, end: b.end, line: a.line, col: a.col }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Tok::Op(c @ ('+' | '-')) = self.peek().tok {
            self.next();
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            let span = Self::join(lhs.span, rhs.span);
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.peek().tok {
            self.next();
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            let span = Self::join(lhs.span, rhs.span);
            lhs = Expr::new(ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Tok::Op('-') = self.peek().tok {
            let minus = self.next();
            let inner = self.unary()?;
            let span = Self::join(minus.span, inner.span);
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if let Tok::Op('^') = self.peek().tok {
            self.next();
            let exp = self.unary()?;
            let span = Self::join(base.span, exp.span);
            return Ok(Expr::new(ExprKind::Bin(BinOp::Pow, Box::new(base), Box::new(exp)), span));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(Expr::new(ExprKind::Num(v), t.span)),
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect_close(t.span)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Tok::LParen = self.peek().tok {
                    let func = match name.as_str() {
                        "neg" => None,
                        _ => Some(Func::from_name(&name).ok_or(DslError::UnknownFunction {
                            line: t.span.line,
                            col: t.span.col,
                            name: name.clone(),
                        })?),
                    };
                    let open = self.next();
                    let mut args = Vec::new();
                    if self.peek().tok != Tok::RParen {
                        args.push(self.sum()?);
                        while self.peek().tok == Tok::Comma {
                            self.next();
                            args.push(self.sum()?);
                        }
                    }
                    let close = self.expect_close(open.span)?;
                    if args.len() != 1 {
                        return Err(DslError::Arity { line: t.span.line, col: t.span.col, name, got: args.len() });
                    }
                    let arg = Box::new(args.pop().unwrap());
                    let span = Self::join(t.span, close);
                    return Ok(match func {
                        None => Expr::new(ExprKind::Neg(arg), span),
                        Some(f) => Expr::new(ExprKind::Call(f, arg), span),
                    });
                }
                let var = match name.as_str() {
                    "x1" => Var::X1,
                    "x2" => Var::X2,
                    _ if self.params.iter().any(|p| p == &name) => Var::Param(name),
                    _ => {
                        let allowed: String = self.params.iter().map(|p| format!(", {p}")).collect();
                        return Err(DslError::UnknownIdentifier { line: t.span.line, col: t.span.col, name, allowed });
                    }
                };
                Ok(Expr::new(ExprKind::Var(var), t.span))
            }
            other => Err(DslError::syntax(t.span, format!("expected an operand, found {}", describe(&other)))),
        }
    }

    fn expect_close(&mut self, open: Span) -> Result<Span> {
        let t = self.next();
        match t.tok {
            Tok::RParen => Ok(t.span),
            other => Err(DslError::syntax(
                t.span,
                format!("expected `)` to close `(` at {}:{}, found {}", open.line, open.col, describe(&other)),
            )),
        }
    }
}

/// Names that cannot be parameters.
pub fn is_reserved(name: &str) -> bool {
    name == "x1" || name == "x2" || name == "neg" || Func::from_name(name).is_some()
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parse `src`, accepting `x1`, `x2` and the names in `params` as variables.
pub fn parse(src: &str, params: &[String]) -> Result<Expr> {
    for p in params {
        if !is_identifier(p) || is_reserved(p) {
            return Err(DslError::BadParameterName(p.clone()));
        }
    }
    let mut parser = Parser { tokens: tokenize(src)?, pos: 0, params };
    let e = parser.sum()?;
    let t = parser.peek().clone();
    if t.tok != Tok::End {
        return Err(DslError::syntax(t.span, format!("unexpected {} after expression", describe(&t.tok))));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s, &["a".to_string()]).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x1^2"), p("-(x1^2)"));
        assert_eq!(p("2^3^x1"), p("2^(3^x1)"));
        assert_eq!(p("2^-x1"), p("2^(-x1)"));
        assert_eq!(p("a - x1 - x2"), p("(a - x1) - x2"));
        assert_eq!(p("-x1 * x2"), p("(-x1) * x2"));
        assert_ne!(p("a / x1 * x2"), p("a / (x1 * x2)"));
        assert_eq!(p("neg(x1)"), p("-x1"));
    }

    #[test]
    fn numbers() {
        assert_eq!(p("1.5e-3").as_num(), Some(1.5e-3));
        assert_eq!(p(".25").as_num(), Some(0.25));
        assert_eq!(p("2E+2").as_num(), Some(200.0));
    }

    #[test]
    fn error_positions() {
        let e = parse("x1 +\n  2 * y", &[]).unwrap_err();
        assert!(matches!(e, DslError::UnknownIdentifier { line: 2, col: 7, .. }), "{e}");
        let e = parse("sin(x1", &[]).unwrap_err();
        assert!(matches!(e, DslError::Syntax { line: 1, col: 7, .. }), "{e}");
        let e = parse("x1 $ 2", &[]).unwrap_err();
        assert!(matches!(e, DslError::Syntax { line: 1, col: 4, .. }), "{e}");
        let e = parse("foo(x1)", &[]).unwrap_err();
        assert!(matches!(e, DslError::UnknownFunction { .. }), "{e}");
        assert!(parse("x1 x2", &[]).is_err());
        assert!(matches!(parse("sin(x1, x2)", &[]), Err(DslError::Arity { got: 2, .. })));
        assert!(matches!(parse("exp()", &[]), Err(DslError::Arity { got: 0, .. })));
        assert!(matches!(parse("x1 - ^ x2", &[]), Err(DslError::Syntax { line: 1, col: 6, .. })));
        assert!(parse("", &[]).is_err());
        assert!(matches!(parse("x1", &["sin".into()]), Err(DslError::BadParameterName(_))));
    }
}
