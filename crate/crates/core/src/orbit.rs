//! Parametrized unperturbed orbits `x̄(s)` on stable, unstable or
//! heteroclinic manifolds.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::{perp, Vec2};
use crate::saddle::SaddlePoint;

/// Default parameter window before truncation near the anchoring saddles.
pub const DEFAULT_WINDOW: (f64, f64) = (-15.0, 15.0);
/// Distance to a saddle below which the window is cut off.
pub const SADDLE_CUTOFF: f64 = 1e-6;
/// Speeds below this make the normal direction meaningless.
pub const DEGENERATE_SPEED: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    Unstable,
    Stable,
    Heteroclinic,
}

impl OrbitKind {
    pub fn has_unstable(self) -> bool {
        matches!(self, OrbitKind::Unstable | OrbitKind::Heteroclinic)
    }

    pub fn has_stable(self) -> bool {
        matches!(self, OrbitKind::Stable | OrbitKind::Heteroclinic)
    }
}

/// Uniformly sampled orbit with velocities, interpolated by cubic Hermite.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub s0: f64,
    pub h: f64,
    pub points: Vec<Vec2>,
    pub velocities: Vec<Vec2>,
}

impl SampledCurve {
    pub fn s_end(&self) -> f64 {
        self.s0 + self.h * (self.points.len() - 1) as f64
    }

    fn eval(&self, s: f64) -> Vec2 {
        let n = self.points.len();
        let u = ((s - self.s0) / self.h).clamp(0.0, (n - 1) as f64);
        let k = (u.floor() as usize).min(n - 2);
        let t = u - k as f64;
        let (p0, p1) = (self.points[k], self.points[k + 1]);
        let (m0, m1) = (self.velocities[k] * self.h, self.velocities[k + 1] * self.h);
        let t2 = t * t;
        let t3 = t2 * t;
        p0 * (2.0 * t3 - 3.0 * t2 + 1.0) + m0 * (t3 - 2.0 * t2 + t) + p1 * (-2.0 * t3 + 3.0 * t2) + m1 * (t3 - t2)
    }
}

#[derive(Clone)]
enum Curve {
    Closed(Arc<dyn Fn(f64) -> Vec2 + Send + Sync>),
    Sampled(Arc<SampledCurve>),
}

/// `x̄(s)` on a finite window, with the saddles it leaves (`source`, as
/// `s → -∞`) and approaches (`target`, as `s → +∞`).
#[derive(Clone)]
pub struct OrbitParametrization {
    kind: OrbitKind,
    curve: Curve,
    shift: f64,
    window: (f64, f64),
    source: Option<SaddlePoint>,
    target: Option<SaddlePoint>,
}

impl fmt::Debug for OrbitParametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrbitParametrization")
            .field("kind", &self.kind)
            .field("window", &self.window)
            .field("shift", &self.shift)
            .field("source", &self.source.map(|s| s.location))
            .field("target", &self.target.map(|s| s.location))
            .finish()
    }
}

impl OrbitParametrization {
    /// Closed-form orbit. The default window is truncated where the curve
    /// comes within [`SADDLE_CUTOFF`] of its anchoring saddle(s).
    pub fn closed_form<F>(
        kind: OrbitKind,
        curve: F,
        source: Option<SaddlePoint>,
        target: Option<SaddlePoint>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> Vec2 + Send + Sync + 'static,
    {
        check_anchors(kind, &source, &target)?;
        let curve: Arc<dyn Fn(f64) -> Vec2 + Send + Sync> = Arc::new(curve);
        let (mut lo, mut hi) = DEFAULT_WINDOW;
        if let Some(a) = source {
            lo = truncate(&*curve, a.location, lo, hi, true);
        }
        if let Some(b) = target {
            hi = truncate(&*curve, b.location, hi, lo, false);
        }
        Ok(Self { kind, curve: Curve::Closed(curve), shift: 0.0, window: (lo, hi), source, target })
    }

    pub fn sampled(
        kind: OrbitKind,
        samples: SampledCurve,
        source: Option<SaddlePoint>,
        target: Option<SaddlePoint>,
    ) -> Result<Self> {
        check_anchors(kind, &source, &target)?;
        if samples.points.len() < 2 || samples.points.len() != samples.velocities.len() {
            return Err(Error::InvalidArgument("sampled orbit needs matching points and velocities".into()));
        }
        let window = (samples.s0, samples.s_end());
        Ok(Self { kind, curve: Curve::Sampled(Arc::new(samples)), shift: 0.0, window, source, target })
    }

    pub fn with_window(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
        }
        if let Curve::Sampled(c) = &self.curve {
            let (a, b) = (c.s0 - self.shift, c.s_end() - self.shift);
            if lo < a - 1e-12 || hi > b + 1e-12 {
                return Err(Error::OutsideWindow { s: if lo < a { lo } else { hi }, min: a, max: b });
            }
        }
        self.window = (lo, hi);
        Ok(self)
    }

    /// Reparametrize as `s ↦ x̄(s + ds)`.
    pub fn shifted(mut self, ds: f64) -> Self {
        self.shift += ds;
        self.window = (self.window.0 - ds, self.window.1 - ds);
        self
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn source(&self) -> Option<SaddlePoint> {
        self.source
    }

    pub fn target(&self) -> Option<SaddlePoint> {
        self.target
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.window.0 - 1e-12 && s <= self.window.1 + 1e-12
    }

    pub fn point(&self, s: f64) -> Result<Vec2> {
        if !self.contains(s) {
            return Err(Error::OutsideWindow { s, min: self.window.0, max: self.window.1 });
        }
        Ok(self.point_unchecked(s))
    }

    pub fn point_unchecked(&self, s: f64) -> Vec2 {
        let s = s + self.shift;
        match &self.curve {
            Curve::Closed(f) => f(s),
            Curve::Sampled(c) => c.eval(s),
        }
    }

    /// `N̂ = f⊥/|f|` at `x̄(p)`.
    pub fn unit_normal(&self, field: &PlanarField, p: f64) -> Result<Vec2> {
        let v = field.velocity(self.point(p)?);
        let speed = v.norm();
        if !(speed >= DEGENERATE_SPEED) {
            return Err(Error::DegenerateVelocity { p, speed });
        }
        Ok(perp(v) / speed)
    }
}

fn check_anchors(kind: OrbitKind, source: &Option<SaddlePoint>, target: &Option<SaddlePoint>) -> Result<()> {
    let ok = match kind {
        OrbitKind::Unstable => source.is_some(),
        OrbitKind::Stable => target.is_some(),
        OrbitKind::Heteroclinic => source.is_some() && target.is_some(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{kind:?} orbit is missing its anchoring saddle")))
    }
}

/// Move the window end `from` towards `toward` until the curve is at least
/// [`SADDLE_CUTOFF`] away from `saddle`, then bisect the crossing.
fn truncate(curve: &dyn Fn(f64) -> Vec2, saddle: Vec2, from: f64, toward: f64, lower: bool) -> f64 {
    let dist = |s: f64| (curve(s) - saddle).norm();
    if !(dist(from) < SADDLE_CUTOFF) {
        return from;
    }
    let dir = if lower { 1.0 } else { -1.0 };
    let step = 0.01;
    let mut near = from;
    let mut far = from;
    loop {
        let next = far + dir * step;
        if (next - toward) * dir >= 0.0 {
            return far;
        }
        if dist(next) >= SADDLE_CUTOFF {
            far = next;
            break;
        }
        near = next;
        far = next;
    }
    for _ in 0..60 {
        let mid = 0.5 * (near + far);
        if dist(mid) < SADDLE_CUTOFF {
            near = mid;
        } else {
            far = mid;
        }
    }
    far
}

/// Which invariant manifold of the unperturbed orbit a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Unstable,
    Stable,
}

impl ManifoldKind {
    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Unstable => "unstable",
            ManifoldKind::Stable => "stable",
        }
    }

    pub fn check(self, orbit: &OrbitParametrization) -> Result<()> {
        let ok = match self {
            ManifoldKind::Unstable => orbit.kind().has_unstable(),
            ManifoldKind::Stable => orbit.kind().has_stable(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::WrongOrbitKind(self.name()))
        }
    }
}
