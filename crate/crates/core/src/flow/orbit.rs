//! Numerical stable/unstable manifold branches of a saddle.

use super::integrator::rk4_step;
use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::{is_finite, Vec2};
use crate::orbit::{OrbitKind, OrbitParametrization, SampledCurve};
use crate::saddle::SaddlePoint;

use super::integrator::BLOWUP_NORM;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    UnstablePlus,
    UnstableMinus,
    StablePlus,
    StableMinus,
}

impl Branch {
    fn is_unstable(self) -> bool {
        matches!(self, Branch::UnstablePlus | Branch::UnstableMinus)
    }

    fn sign(self) -> f64 {
        match self {
            Branch::UnstablePlus | Branch::StablePlus => 1.0,
            _ => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSettings {
    /// Seed offset from the saddle along the eigenvector.
    pub delta0: f64,
    /// Amplitude `C` in `x̄(s) ≈ a + C e^{λ s} v` near the saddle; fixes the
    /// parameter origin.
    pub amplitude: f64,
    /// Far end of the parameter range (`+extent` for unstable, `-extent` for
    /// stable branches).
    pub extent: f64,
    pub sample_step: f64,
    /// Saddle at the other end, if the branch is known to connect to one.
    pub other_end: Option<SaddlePoint>,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        Self { delta0: 1e-7, amplitude: 1.0, extent: 15.0, sample_step: 1e-3, other_end: None }
    }
}

/// Integrate one branch of the invariant manifold of `saddle`.
///
/// The seed `a ± δ₀ v` is placed at `s₀ = ln(δ₀/C)/λ`, so the returned curve
/// matches the linearization `a + C e^{λ s} v` near the saddle.
pub fn compute_orbit(
    field: &PlanarField,
    saddle: &SaddlePoint,
    branch: Branch,
    settings: &OrbitSettings,
) -> Result<OrbitParametrization> {
    if !(settings.delta0 > 0.0 && settings.amplitude > 0.0 && settings.sample_step > 0.0) {
        return Err(Error::InvalidArgument("orbit seed settings must be positive".into()));
    }
    let (lambda, v) = if branch.is_unstable() {
        (saddle.lambda_unstable, saddle.v_unstable)
    } else {
        (saddle.lambda_stable, saddle.v_stable)
    };
    let s0 = (settings.delta0 / settings.amplitude).ln() / lambda;
    let s_far = if branch.is_unstable() { settings.extent } else { -settings.extent };
    if (s_far - s0) * lambda.signum() <= 0.0 {
        return Err(Error::InvalidArgument(format!("extent {s_far} does not reach past the seed parameter {s0}")));
    }
    let n = ((s_far - s0).abs() / settings.sample_step).ceil() as usize;
    let h = (s_far - s0) / n as f64;
    let rhs = |x: Vec2| field.velocity(x);
    let mut x = saddle.location + branch.sign() * settings.delta0 * v;
    let mut points = Vec::with_capacity(n + 1);
    points.push(x);
    for k in 0..n {
        x = rk4_step(&rhs, x, h);
        let s = s0 + (k + 1) as f64 * h;
        if !is_finite(x) || x.norm() > BLOWUP_NORM {
            return Err(Error::BlowUp { time: s });
        }
        if !field.in_domain(x) {
            return Err(Error::DomainExit { time: s });
        }
        points.push(x);
    }
    let (s_start, step) = if h > 0.0 { (s0, h) } else { (s_far, -h) };
    if h < 0.0 {
        points.reverse();
    }
    let velocities = points.iter().map(|&p| field.velocity(p)).collect();
    let curve = SampledCurve { s0: s_start, h: step, points, velocities };
    let (kind, source, target) = match (branch.is_unstable(), settings.other_end) {
        (true, None) => (OrbitKind::Unstable, Some(*saddle), None),
        (true, Some(b)) => (OrbitKind::Heteroclinic, Some(*saddle), Some(b)),
        (false, None) => (OrbitKind::Stable, None, Some(*saddle)),
        (false, Some(a)) => (OrbitKind::Heteroclinic, Some(a), Some(*saddle)),
    };
    OrbitParametrization::sampled(kind, curve, source, target)
}
