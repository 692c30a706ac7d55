//! Piecewise evolution across the jump set, and the smoothed-pulse model it
//! is the limit of.

use super::integrator::{flow_smooth, rk4_steps, IntegratorSettings};
use super::jump::{jump_map, Direction};
use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::Vec2;
use crate::impulse::{ImpulseSchedule, SliceTime};

/// Minimum RK4 steps on each half of a smoothed pulse.
pub const PULSE_STEPS: usize = 200;

/// Evolve `x0` from `t0` to `t1` (either direction), flowing smoothly between
/// impulses and applying the implicit jump map at each impulse crossed.
///
/// Bare times on the jump set are rejected; pass [`SliceTime::before`] or
/// [`SliceTime::after`] to stop on one side of a jump.
pub fn evolve_impulsive(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    x0: Vec2,
    t0: impl Into<SliceTime>,
    t1: impl Into<SliceTime>,
    settings: &IntegratorSettings,
) -> Result<Vec2> {
    let (t0, t1) = (t0.into(), t1.into());
    schedule.check_slice(t0)?;
    schedule.check_slice(t1)?;
    let mut x = x0;
    let mut now = t0.time;
    let times = schedule.jump_times();
    match t0.cmp_order(&t1) {
        std::cmp::Ordering::Equal => return Ok(x0),
        std::cmp::Ordering::Less => {
            for (i, &ti) in times.iter().enumerate() {
                if !t0.is_past(ti) && t1.is_past(ti) {
                    x = flow_smooth(field, x, now, ti, settings)?;
                    x = jump_map(schedule, i, x, Direction::Forward)?;
                    now = ti;
                }
            }
        }
        std::cmp::Ordering::Greater => {
            for (i, &ti) in times.iter().enumerate().rev() {
                if t0.is_past(ti) && !t1.is_past(ti) {
                    x = flow_smooth(field, x, now, ti, settings)?;
                    x = jump_map(schedule, i, x, Direction::Backward)?;
                    now = ti;
                }
            }
        }
    }
    flow_smooth(field, x, now, t1.time, settings)
}

/// Evolve with each delta replaced by a rectangular pulse of half-width `ell`
/// carrying weight `α` on `[t_i − ℓ, t_i)` and `1 − α` on `[t_i, t_i + ℓ]`.
pub fn evolve_regularized(
    field: &PlanarField,
    schedule: &ImpulseSchedule,
    x0: Vec2,
    t0: f64,
    t1: f64,
    ell: f64,
    settings: &IntegratorSettings,
) -> Result<Vec2> {
    if !(ell > 0.0) || !(2.0 * ell < schedule.min_gap()) {
        return Err(Error::PulseOverlap { width: ell });
    }
    let times = schedule.jump_times();
    if times.iter().any(|&ti| (t0 - ti).abs() <= ell || (t1 - ti).abs() <= ell) {
        return Err(Error::PulseOverlap { width: ell });
    }
    let eps = schedule.epsilon();
    let alpha = schedule.alpha();
    let inside = |x: Vec2| field.in_domain(x);
    let mut x = x0;
    let mut now = t0;
    let forward = t1 > t0;
    let order: Vec<usize> = if forward {
        (0..times.len()).filter(|&i| times[i] > t0 && times[i] < t1).collect()
    } else {
        (0..times.len()).rev().filter(|&i| times[i] < t0 && times[i] > t1).collect()
    };
    for i in order {
        let imp = schedule.impulse(i)?;
        let ti = imp.time;
        let pre = |x: Vec2| field.velocity(x) + (eps * alpha / ell) * imp.g(x);
        let post = |x: Vec2| field.velocity(x) + (eps * (1.0 - alpha) / ell) * imp.g(x);
        if forward {
            x = flow_smooth(field, x, now, ti - ell, settings)?;
            x = rk4_steps(&pre, &inside, x, ti - ell, ti, PULSE_STEPS)?;
            x = rk4_steps(&post, &inside, x, ti, ti + ell, PULSE_STEPS)?;
            now = ti + ell;
        } else {
            x = flow_smooth(field, x, now, ti + ell, settings)?;
            x = rk4_steps(&post, &inside, x, ti + ell, ti, PULSE_STEPS)?;
            x = rk4_steps(&pre, &inside, x, ti, ti - ell, PULSE_STEPS)?;
            now = ti - ell;
        }
    }
    flow_smooth(field, x, now, t1, settings)
}
