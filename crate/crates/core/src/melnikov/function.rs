//! Jump strengths and the Melnikov functions built from them.

use super::resolvent::{resolvent, ResolventKind, ResolventTable};
use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::perp;
use crate::impulse::{ImpulseSchedule, SliceTime};
use crate::orbit::{ManifoldKind, OrbitParametrization};
use crate::quadrature;

/// How the accumulated effect of earlier jumps is carried along the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Formula {
    /// Jump strengths plus their convolution with the divergence resolvent.
    #[default]
    Resolvent,
    /// Each jump strength scaled by `exp ∫ Tr Df` along the orbit between
    /// the kick and the slice. This is the first-order transport of a jump
    /// displacement by the linearized flow.
    Transport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MelnikovKind {
    Unstable,
    Stable,
    Distance,
}

impl MelnikovKind {
    pub fn name(self) -> &'static str {
        match self {
            MelnikovKind::Unstable => "unstable",
            MelnikovKind::Stable => "stable",
            MelnikovKind::Distance => "distance",
        }
    }

    fn resolvent_kind(self) -> ResolventKind {
        match self {
            MelnikovKind::Unstable => ResolventKind::Unstable,
            MelnikovKind::Stable => ResolventKind::Stable,
            MelnikovKind::Distance => ResolventKind::TwoSided,
        }
    }
}

impl From<ManifoldKind> for MelnikovKind {
    fn from(k: ManifoldKind) -> Self {
        match k {
            ManifoldKind::Unstable => MelnikovKind::Unstable,
            ManifoldKind::Stable => MelnikovKind::Stable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelnikovSettings {
    pub formula: Formula,
    /// Resolvent marching step.
    pub resolvent_step: f64,
    /// Relative tolerance for the divergence integral in [`Formula::Transport`].
    pub transport_tol: f64,
}

impl Default for MelnikovSettings {
    fn default() -> Self {
        Self { formula: Formula::Resolvent, resolvent_step: 1e-3, transport_tol: 1e-12 }
    }
}

/// Field, schedule and orbit bundled for Melnikov evaluations.
#[derive(Clone, Copy)]
pub struct MelnikovProblem<'a> {
    pub field: &'a PlanarField,
    pub schedule: &'a ImpulseSchedule,
    pub orbit: &'a OrbitParametrization,
    pub settings: MelnikovSettings,
}

impl<'a> MelnikovProblem<'a> {
    pub fn new(field: &'a PlanarField, schedule: &'a ImpulseSchedule, orbit: &'a OrbitParametrization) -> Self {
        Self { field, schedule, orbit, settings: MelnikovSettings::default() }
    }

    pub fn with_settings(mut self, settings: MelnikovSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn with_formula(mut self, formula: Formula) -> Self {
        self.settings.formula = formula;
        self
    }

    /// `j_i(p, t) = f⊥(x̄(t_i − t + p)) · g_i(x̄(t_i − t + p))`.
    pub fn jump_strength(&self, i: usize, p: f64, t: f64) -> Result<f64> {
        let imp = self.schedule.impulse(i)?;
        let x = self.orbit.point(imp.time - t + p)?;
        let v = perp(self.field.velocity(x)).dot(&imp.g(x));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(format!("jump strength {i} at p = {p}, t = {t}")))
        }
    }

    /// Precompute whatever is needed at parameter `p` for slices with times
    /// in `[t_min, t_max]`.
    pub fn at(&self, kind: MelnikovKind, p: f64, t_min: f64, t_max: f64) -> Result<MelnikovSlice<'a>> {
        match kind {
            MelnikovKind::Unstable | MelnikovKind::Distance => ManifoldKind::Unstable.check(self.orbit)?,
            MelnikovKind::Stable => ManifoldKind::Stable.check(self.orbit)?,
        }
        if kind == MelnikovKind::Distance {
            ManifoldKind::Stable.check(self.orbit)?;
        }
        let table = match self.settings.formula {
            Formula::Resolvent => {
                let fwd = (t_max - self.schedule.first_time()).max(0.0);
                let bwd = (self.schedule.last_time() - t_min).max(0.0);
                Some(resolvent(
                    self.field,
                    self.orbit,
                    kind.resolvent_kind(),
                    p,
                    fwd,
                    bwd,
                    self.settings.resolvent_step,
                )?)
            }
            Formula::Transport => None,
        };
        Ok(MelnikovSlice { problem: *self, kind, p, table })
    }

    fn eval(&self, kind: MelnikovKind, p: f64, t: SliceTime) -> Result<f64> {
        self.at(kind, p, t.time, t.time)?.value(t)
    }

    pub fn unstable(&self, p: f64, t: impl Into<SliceTime>) -> Result<f64> {
        self.eval(MelnikovKind::Unstable, p, t.into())
    }

    pub fn stable(&self, p: f64, t: impl Into<SliceTime>) -> Result<f64> {
        self.eval(MelnikovKind::Stable, p, t.into())
    }

    pub fn distance(&self, p: f64, t: impl Into<SliceTime>) -> Result<f64> {
        self.eval(MelnikovKind::Distance, p, t.into())
    }

    pub fn value(&self, kind: MelnikovKind, p: f64, t: impl Into<SliceTime>) -> Result<f64> {
        self.eval(kind, p, t.into())
    }
}

/// A Melnikov function frozen at one `p`, evaluable at many slices.
pub struct MelnikovSlice<'a> {
    problem: MelnikovProblem<'a>,
    kind: MelnikovKind,
    p: f64,
    table: Option<ResolventTable>,
}

impl<'a> MelnikovSlice<'a> {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn resolvent(&self) -> Option<&ResolventTable> {
        self.table.as_ref()
    }

    pub fn value(&self, t: impl Into<SliceTime>) -> Result<f64> {
        let t = t.into();
        let pr = &self.problem;
        pr.schedule.check_slice(t)?;
        let mut total = 0.0;
        for i in 0..pr.schedule.len() {
            let past = pr.schedule.is_after(i, t);
            let include = match self.kind {
                MelnikovKind::Unstable => past,
                MelnikovKind::Stable => !past,
                MelnikovKind::Distance => true,
            };
            if !include {
                continue;
            }
            // The stable function enters the distance with a minus sign.
            let sign = if self.kind == MelnikovKind::Stable { -1.0 } else { 1.0 };
            total += sign * self.term(i, t, past)?;
        }
        if total.is_finite() {
            Ok(total)
        } else {
            Err(Error::NonFinite(format!("Melnikov value at p = {}, t = {}", self.p, t.time)))
        }
    }

    /// Contribution of jump `i` to `M^u` (if `past`) or to `M^s` with the
    /// sign flipped (if not), i.e. its contribution to the distance `M`.
    fn term(&self, i: usize, t: SliceTime, past: bool) -> Result<f64> {
        let pr = &self.problem;
        let p = self.p;
        let ti = pr.schedule.impulse(i)?.time;
        let j = pr.jump_strength(i, p, t.time)?;
        match &self.table {
            None => {
                let lo = ti - t.time + p;
                pr.orbit.point(lo)?;
                let tr = quadrature::integrate(
                    |s| pr.field.trace(pr.orbit.point_unchecked(s)),
                    lo,
                    p,
                    1e-14,
                    pr.settings.transport_tol,
                );
                Ok(j * tr.exp())
            }
            Some(table) => {
                // ∫_{t_i}^{t} R(t − ξ) j_i(p, ξ) dξ with ξ = t ∓ u.
                let d = (t.time - ti).abs();
                let forward = past;
                let mut w = |u: f64| -> Result<f64> {
                    let xi = if forward { t.time - u } else { t.time + u };
                    pr.jump_strength(i, p, xi)
                };
                let conv = table.weighted_integral(forward, d, &mut w)?;
                Ok(if forward { j + conv } else { j - conv })
            }
        }
    }
}

pub fn jump_strength(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    orbit: &OrbitParametrization,
    i: usize,
    p: f64,
    t: f64,
) -> Result<f64> {
    MelnikovProblem::new(field, schedule, orbit).jump_strength(i, p, t)
}

/// Unstable Melnikov function `M^u(p, t)` with default settings.
pub fn melnikov_unstable(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    orbit: &OrbitParametrization,
    p: f64,
    t: impl Into<SliceTime>,
) -> Result<f64> {
    MelnikovProblem::new(field, schedule, orbit).unstable(p, t)
}

/// Stable Melnikov function `M^s(p, t)` with default settings.
pub fn melnikov_stable(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    orbit: &OrbitParametrization,
    p: f64,
    t: impl Into<SliceTime>,
) -> Result<f64> {
    MelnikovProblem::new(field, schedule, orbit).stable(p, t)
}

/// Distance Melnikov function `M = M^u − M^s` with default settings.
pub fn melnikov_distance(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    orbit: &OrbitParametrization,
    p: f64,
    t: impl Into<SliceTime>,
) -> Result<f64> {
    MelnikovProblem::new(field, schedule, orbit).distance(p, t)
}
