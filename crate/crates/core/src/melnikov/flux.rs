//! Leading-order pseudo-manifolds, the gate between them, and lobe flux.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use super::function::{MelnikovKind, MelnikovProblem};
use super::grid::linspace;
use crate::error::{Error, Result};
use crate::flow::{evolve_impulsive, IntegratorSettings};
use crate::geometry::{perp, perp_cw, Vec2};
use crate::impulse::SliceTime;
use crate::orbit::{ManifoldKind, OrbitKind};

/// `x̄(p) + ε M^{kind}(p, t) f⊥/|f|²`.
pub fn pseudo_manifold_point(
    problem: &MelnikovProblem<'_>,
    kind: ManifoldKind,
    p: f64,
    t: impl Into<SliceTime>,
) -> Result<Vec2> {
    let t = t.into();
    let m = problem.value(MelnikovKind::from(kind), p, t)?;
    displaced_point(problem, p, m)
}

/// `x̄(p) + ε m f⊥/|f|²` for an already evaluated Melnikov value `m`.
pub fn displaced_point(problem: &MelnikovProblem<'_>, p: f64, m: f64) -> Result<Vec2> {
    let x = problem.orbit.point(p)?;
    problem.orbit.unit_normal(problem.field, p)?;
    let f = problem.field.velocity(x);
    Ok(x + problem.schedule.epsilon() * m / f.norm_squared() * perp(f))
}

/// `ε M(p, t)`.
pub fn flux_leading(problem: &MelnikovProblem<'_>, p: f64, t: impl Into<SliceTime>) -> Result<f64> {
    Ok(problem.schedule.epsilon() * problem.distance(p, t)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatrixSampling {
    /// Points per polyline, including the gate endpoint.
    pub samples: usize,
    /// How far back (in parameter) from `p` the unstable branch reaches, and
    /// forward the stable branch, clipped to the orbit window.
    pub span: f64,
}

impl Default for SeparatrixSampling {
    fn default() -> Self {
        Self { samples: 201, span: 6.0 }
    }
}

/// Pseudo-separatrix at slice `t`, split at the gate through `x̄(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatrixGeometry {
    pub time: SliceTime,
    pub p: f64,
    pub base: Vec2,
    pub normal: Vec2,
    /// From the source saddle's image to the gate (parameters `≤ p`).
    pub unstable: Vec<Vec2>,
    /// From the gate to the target saddle's image (parameters `≥ p`).
    pub stable: Vec<Vec2>,
    pub gate_stable: Vec2,
    pub gate_unstable: Vec2,
}

impl SeparatrixGeometry {
    pub fn gate_length(&self) -> f64 {
        (self.gate_unstable - self.gate_stable).norm()
    }
}

/// Build the unstable branch up to `p`, the stable branch from `p`, and the
/// gate joining their endpoints on the normal line at `x̄(p)`.
pub fn pseudo_separatrix(
    problem: &MelnikovProblem<'_>,
    p: f64,
    t: impl Into<SliceTime>,
    sampling: &SeparatrixSampling,
    integrator: &IntegratorSettings,
) -> Result<SeparatrixGeometry> {
    let t = t.into();
    let orbit = problem.orbit;
    if orbit.kind() != OrbitKind::Heteroclinic {
        return Err(Error::WrongOrbitKind("heteroclinic"));
    }
    problem.schedule.check_slice(t)?;
    if sampling.samples < 2 {
        return Err(Error::InvalidArgument("separatrix needs at least two samples per branch".into()));
    }
    let (lo, hi) = orbit.window();
    let a = orbit.source().expect("heteroclinic has a source").location;
    let b = orbit.target().expect("heteroclinic has a target").location;
    let sched = problem.schedule;
    let start = evolve_impulsive(problem.field, sched, a, sched.first_time() - 1.0, t, integrator)?;
    let end = evolve_impulsive(problem.field, sched, b, sched.last_time() + 1.0, t, integrator)?;

    let branch = |kind: MelnikovKind, qs: Vec<f64>| -> Result<Vec<Vec2>> {
        qs.par_iter()
            .map(|&q| {
                let m = problem.at(kind, q, t.time, t.time)?.value(t)?;
                displaced_point(problem, q, m)
            })
            .collect()
    };
    let margin = 1e-9;
    let u_qs = linspace((p - sampling.span).max(lo + margin), p, sampling.samples);
    let s_qs = linspace(p, (p + sampling.span).min(hi - margin), sampling.samples);
    let mut unstable = vec![start];
    unstable.extend(branch(MelnikovKind::Unstable, u_qs)?);
    let mut stable = branch(MelnikovKind::Stable, s_qs)?;
    stable.push(end);
    Ok(SeparatrixGeometry {
        time: t,
        p,
        base: orbit.point(p)?,
        normal: orbit.unit_normal(problem.field, p)?,
        gate_unstable: *unstable.last().unwrap(),
        gate_stable: stable[0],
        unstable,
        stable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateFlux {
    pub value: f64,
    /// False when `f · n̂` differs in sign at the two gate endpoints; the
    /// orientation then follows the midpoint velocity.
    pub orientation_consistent: bool,
}

/// `∫ f · n̂ dℓ` across the gate by 16-point Gauss–Legendre, signed positive
/// when the unstable endpoint lies on the `N̂` side of the stable one.
pub fn flux_gate_direct(field: &crate::field::PlanarField, geometry: &SeparatrixGeometry) -> GateFlux {
    let (xs, xu) = (geometry.gate_stable, geometry.gate_unstable);
    let d = xu - xs;
    let len = d.norm();
    if len == 0.0 {
        return GateFlux { value: 0.0, orientation_consistent: true };
    }
    let across = perp_cw(geometry.normal);
    let es = field.velocity(xs).dot(&across);
    let eu = field.velocity(xu).dot(&across);
    let consistent = es.signum() == eu.signum();
    let orient = if consistent { es.signum() } else { field.velocity(xs + 0.5 * d).dot(&across).signum() };
    let n_hat = orient * across;
    let rule = GaussLegendre::new(NonZeroUsize::new(16).unwrap());
    let integral = rule.integrate(0.0, len, |l| field.velocity(xs + d * (l / len)).dot(&n_hat));
    let sign = d.dot(&geometry.normal).signum();
    GateFlux { value: sign * integral, orientation_consistent: consistent }
}
