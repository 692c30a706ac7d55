//! Direct-simulation measurement of the perturbed manifold's normal offset.
//!
//! Points of the unperturbed manifold are seeded before the first impulse
//! (unstable) or after the last (stable), where nothing has moved them yet,
//! and evolved impulsively to the requested slice. The image curve is then
//! intersected with the normal line through `x̄(p)`.

use super::evolve::evolve_impulsive;
use super::integrator::IntegratorSettings;
use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::{perp_cw, Vec2};
use crate::impulse::{ImpulseSchedule, SliceTime};
use crate::orbit::{ManifoldKind, OrbitParametrization};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Distance of the seeding time from the first/last impulse.
    pub seed_offset: f64,
    pub fan_points: usize,
    /// Fan half-width in units of `ε·max(1, 1/|f(x̄(p))|)`.
    pub fan_scale: f64,
    pub max_widenings: usize,
    pub integrator: IntegratorSettings,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            seed_offset: 1.0,
            fan_points: 9,
            fan_scale: 5.0,
            max_widenings: 8,
            integrator: IntegratorSettings::dopri5(1e-13, 1e-13),
        }
    }
}

/// Signed distance, along `N̂(p)`, from `x̄(p)` to the perturbed `kind`
/// manifold at slice `t`.
pub fn manifold_oracle(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    orbit: &OrbitParametrization,
    kind: ManifoldKind,
    p: f64,
    t: impl Into<SliceTime>,
    settings: &OracleSettings,
) -> Result<f64> {
    let t = t.into();
    kind.check(orbit)?;
    schedule.check_slice(t)?;
    if settings.fan_points < 2 {
        return Err(Error::InvalidArgument("fan needs at least two points".into()));
    }
    let base = orbit.point(p)?;
    let normal = orbit.unit_normal(field, p)?;
    let tangent = perp_cw(normal);
    let speed = field.velocity(base).norm();
    let tau0 = match kind {
        ManifoldKind::Unstable => schedule.first_time() - settings.seed_offset,
        ManifoldKind::Stable => schedule.last_time() + settings.seed_offset,
    };
    let image = |q: f64| -> Result<Vec2> {
        let seed = orbit.point(tau0 - t.time + q)?;
        Ok(evolve_impulsive(field, schedule, seed, tau0, t, &settings.integrator)? - base)
    };
    let sigma = |q: f64| image(q).map(|d| d.dot(&tangent));

    let mut half = settings.fan_scale * schedule.epsilon().abs().max(1e-6) * (1.0 / speed).max(1.0);
    let m = settings.fan_points;
    for _ in 0..=settings.max_widenings {
        let qs: Vec<f64> = (0..m).map(|k| p + half * (2.0 * k as f64 / (m - 1) as f64 - 1.0)).collect();
        let sig: Vec<f64> = qs.iter().map(|&q| sigma(q)).collect::<Result<_>>()?;
        let mut best: Option<(usize, f64)> = None;
        for k in 0..m - 1 {
            if sig[k] == 0.0 || sig[k].signum() != sig[k + 1].signum() {
                let mid = 0.5 * (qs[k] + qs[k + 1]);
                if best.is_none_or(|(_, d)| (mid - p).abs() < d) {
                    best = Some((k, (mid - p).abs()));
                }
            }
        }
        if let Some((k, _)) = best {
            let q = refine_root(&sigma, qs[k], qs[k + 1], sig[k], sig[k + 1])?;
            return image(q).map(|d| d.dot(&normal));
        }
        half *= 2.0;
    }
    Err(Error::FanNotBracketing { p })
}

/// Illinois false position on a bracketing interval.
fn refine_root(sigma: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = sigma(c)?;
        if fc == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + c.abs()) {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
        if fc.abs() <= 1e-16 * (1.0 + c.abs()) {
            return Ok(c);
        }
    }
    Ok((a * fb - b * fa) / (fb - fa))
}
