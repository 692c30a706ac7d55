use std::collections::BTreeMap;
use std::sync::Arc;

use kickflow_core::{Impulse, Mat2, PlanarField, SmoothMap, Vec2};

use crate::ast::{Expr, Var};
use crate::diff::differentiate;
use crate::error::{DslError, Result};
use crate::eval::{eval, Env};
use crate::parser::parse;

/// Source text for a planar map plus its parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub components: [String; 2],
    pub params: BTreeMap<String, f64>,
    /// Point at which value and Jacobian must evaluate cleanly.
    pub probe: Vec2,
}

impl MapSpec {
    pub fn new(f1: impl Into<String>, f2: impl Into<String>) -> Self {
        Self { components: [f1.into(), f2.into()], params: BTreeMap::new(), probe: Vec2::new(0.1, 0.1) }
    }

    pub fn param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn probe(mut self, at: Vec2) -> Self {
        self.probe = at;
        self
    }
}

/// A map R² → R² whose Jacobian was derived symbolically.
#[derive(Debug, Clone)]
pub struct CompiledMap {
    /// As parsed, parameters unbound.
    pub source: [Expr; 2],
    value: [Expr; 2],
    jacobian: [[Expr; 2]; 2],
}

static NO_PARAMS: BTreeMap<String, f64> = BTreeMap::new();

impl CompiledMap {
    fn env(x: Vec2) -> Env<'static> {
        Env { x1: x.x, x2: x.y, params: &NO_PARAMS }
    }

    pub fn try_value(&self, x: Vec2) -> Result<Vec2> {
        let env = Self::env(x);
        let at = |c: usize| {
            eval(&self.value[c], &env).map_err(|e| DslError::Component { component: c + 1, source: Box::new(e) })
        };
        Ok(Vec2::new(at(0)?, at(1)?))
    }

    pub fn try_jacobian(&self, x: Vec2) -> Result<Mat2> {
        let env = Self::env(x);
        let mut m = Mat2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c)] = eval(&self.jacobian[r][c], &env)
                    .map_err(|e| DslError::Component { component: r + 1, source: Box::new(e) })?;
            }
        }
        Ok(m)
    }

    /// Printed Jacobian entries `[[∂f1/∂x1, ∂f1/∂x2], [∂f2/∂x1, ∂f2/∂x2]]`.
    pub fn jacobian_text(&self) -> [[String; 2]; 2] {
        self.jacobian.clone().map(|row| row.map(|e| e.to_string()))
    }
}

/// Evaluation failures inside the numerics become NaN, which the integrators
/// and Melnikov evaluators reject as non-finite.
impl SmoothMap for CompiledMap {
    fn value(&self, x: Vec2) -> Vec2 {
        self.try_value(x).unwrap_or(Vec2::new(f64::NAN, f64::NAN))
    }

    fn jacobian(&self, x: Vec2) -> Mat2 {
        self.try_jacobian(x).unwrap_or(Mat2::from_element(f64::NAN))
    }
}

pub fn compile_map(spec: &MapSpec) -> Result<CompiledMap> {
    let names: Vec<String> = spec.params.keys().cloned().collect();
    let lookup = |n: &str| spec.params.get(n).copied();
    let mut source = Vec::with_capacity(2);
    let mut value = Vec::with_capacity(2);
    let mut jacobian = Vec::with_capacity(2);
    for (c, text) in spec.components.iter().enumerate() {
        let wrap = |e: DslError| DslError::Component { component: c + 1, source: Box::new(e) };
        let parsed = parse(text, &names).map_err(wrap)?;
        let bound = parsed.bind(&lookup).map_err(wrap)?;
        let d1 = differentiate(&bound, &Var::X1).map_err(wrap)?;
        let d2 = differentiate(&bound, &Var::X2).map_err(wrap)?;
        source.push(parsed);
        value.push(bound);
        jacobian.push([d1, d2]);
    }
    let take2 = |mut v: Vec<Expr>| -> [Expr; 2] {
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        [a, b]
    };
    let j1 = jacobian.pop().unwrap();
    let j0 = jacobian.pop().unwrap();
    let map = CompiledMap { source: take2(source), value: take2(value), jacobian: [j0, j1] };
    let probe = |e: DslError| DslError::Probe { x1: spec.probe.x, x2: spec.probe.y, source: Box::new(e) };
    map.try_value(spec.probe).map_err(probe)?;
    map.try_jacobian(spec.probe).map_err(probe)?;
    Ok(map)
}

pub fn compile_field(spec: &MapSpec) -> Result<PlanarField> {
    Ok(PlanarField::new(Arc::new(compile_map(spec)?)))
}

/// An impulse `g_i` at `time` from source text.
pub fn compile_impulse(time: f64, spec: &MapSpec) -> Result<Impulse> {
    Ok(Impulse::new(time, Arc::new(compile_map(spec)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duffing_from_text() {
        let f = compile_field(&MapSpec::new("x2", "x1 - x1^3")).unwrap();
        let x = Vec2::new(0.7, -0.2);
        assert_eq!(f.velocity(x), Vec2::new(-0.2, 0.7 - 0.7f64.powi(3)));
        let j = f.jacobian(x);
        assert!((j - Mat2::new(0.0, 1.0, 1.0 - 3.0 * 0.49, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parameters_are_bound() {
        let m = compile_map(&MapSpec::new("a * x1", "x2 / b").param("a", 2.0).param("b", 4.0)).unwrap();
        assert_eq!(m.try_value(Vec2::new(1.0, 1.0)).unwrap(), Vec2::new(2.0, 0.25));
        assert_eq!(m.jacobian_text()[1][1], "0.25");
    }

    #[test]
    fn probe_failures_are_reported() {
        let err = compile_map(&MapSpec::new("log(x1)", "x2").probe(Vec2::new(-1.0, 0.0))).unwrap_err();
        assert!(matches!(err, DslError::Probe { .. }), "{err}");
        let err = compile_map(&MapSpec::new("x1", "x2 + y")).unwrap_err();
        assert!(err.to_string().starts_with("component 2: 1:6: unknown identifier `y`"), "{err}");
    }

    #[test]
    fn runtime_failure_becomes_nan() {
        let m = compile_map(&MapSpec::new("sqrt(x1)", "x2")).unwrap();
        assert!(m.value(Vec2::new(-1.0, 0.0)).x.is_nan());
        assert!(m.try_value(Vec2::new(-1.0, 0.0)).is_err());
    }
}
