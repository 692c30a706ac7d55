use thiserror::Error;

use crate::ast::Span;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unknown identifier `{name}` (allowed: x1, x2{allowed})")]
    UnknownIdentifier { line: usize, col: usize, name: String, allowed: String },
    #[error("{line}:{col}: unknown function `{name}`")]
    UnknownFunction { line: usize, col: usize, name: String },
    #[error("{line}:{col}: `{name}` takes 1 argument, got {got}")]
    Arity { line: usize, col: usize, name: String, got: usize },
    #[error("{line}:{col}: {message}")]
    Eval { line: usize, col: usize, message: String },
    #[error("{line}:{col}: `{func}` is not differentiable")]
    NotDifferentiable { line: usize, col: usize, func: &'static str },
    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),
    #[error("parameter name `{0}` is reserved or not an identifier")]
    BadParameterName(String),
    #[error("component {component}: {source}")]
    Component { component: usize, source: Box<DslError> },
    #[error("probe at ({x1}, {x2}): {source}")]
    Probe { x1: f64, x2: f64, source: Box<DslError> },
}

impl DslError {
    pub(crate) fn eval(span: Span, message: impl Into<String>) -> Self {
        DslError::Eval { line: span.line, col: span.col, message: message.into() }
    }

    pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Self {
        DslError::Syntax { line: span.line, col: span.col, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, DslError>;
