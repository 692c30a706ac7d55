//! Fixed-step RK4 and adaptive Dormand–Prince 5(4) for autonomous planar ODEs.

use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::{is_finite, Vec2};

/// States larger than this are treated as a finite-time blow-up.
pub const BLOWUP_NORM: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rk4 { step: f64 },
    Dopri5 { abs_tol: f64, rel_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub method: Method,
    pub max_steps: usize,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { method: Method::Dopri5 { abs_tol: 1e-11, rel_tol: 1e-11 }, max_steps: 2_000_000 }
    }
}

impl IntegratorSettings {
    pub fn dopri5(abs_tol: f64, rel_tol: f64) -> Self {
        Self { method: Method::Dopri5 { abs_tol, rel_tol }, ..Self::default() }
    }

    pub fn rk4(step: f64) -> Self {
        Self { method: Method::Rk4 { step }, ..Self::default() }
    }
}

/// Flow `x0` under `f` from `t0` to `t1` (either direction).
pub fn flow_smooth(field: &PlanarField, x0: Vec2, t0: f64, t1: f64, settings: &IntegratorSettings) -> Result<Vec2> {
    integrate(&|x| field.velocity(x), &|x| field.in_domain(x), x0, t0, t1, settings)
}

pub(crate) fn integrate(
    rhs: &dyn Fn(Vec2) -> Vec2,
    inside: &dyn Fn(Vec2) -> bool,
    x0: Vec2,
    t0: f64,
    t1: f64,
    settings: &IntegratorSettings,
) -> Result<Vec2> {
    if !is_finite(x0) {
        return Err(Error::NonFinite("initial state".into()));
    }
    if !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::NonFinite("integration time".into()));
    }
    if t0 == t1 {
        return Ok(x0);
    }
    match settings.method {
        Method::Rk4 { step } => {
            let n = ((t1 - t0).abs() / step).ceil().max(1.0) as usize;
            if n > settings.max_steps {
                return Err(Error::StepBudget { max_steps: settings.max_steps, time: t0 });
            }
            rk4_steps(rhs, inside, x0, t0, t1, n)
        }
        Method::Dopri5 { abs_tol, rel_tol } => dopri5(rhs, inside, x0, t0, t1, abs_tol, rel_tol, settings.max_steps),
    }
}

fn check(x: Vec2, t: f64, inside: &dyn Fn(Vec2) -> bool) -> Result<()> {
    if !is_finite(x) || x.norm() > BLOWUP_NORM {
        return Err(Error::BlowUp { time: t });
    }
    if !inside(x) {
        return Err(Error::DomainExit { time: t });
    }
    Ok(())
}

#[inline]
pub(crate) fn rk4_step(rhs: &dyn Fn(Vec2) -> Vec2, x: Vec2, h: f64) -> Vec2 {
    let k1 = rhs(x);
    let k2 = rhs(x + 0.5 * h * k1);
    let k3 = rhs(x + 0.5 * h * k2);
    let k4 = rhs(x + h * k3);
    x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Exactly `n` equal RK4 steps from `t0` to `t1`.
pub(crate) fn rk4_steps(
    rhs: &dyn Fn(Vec2) -> Vec2,
    inside: &dyn Fn(Vec2) -> bool,
    x0: Vec2,
    t0: f64,
    t1: f64,
    n: usize,
) -> Result<Vec2> {
    let h = (t1 - t0) / n as f64;
    let mut x = x0;
    for k in 0..n {
        x = rk4_step(rhs, x, h);
        check(x, t0 + (k + 1) as f64 * h, inside)?;
    }
    Ok(x)
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[allow(clippy::too_many_arguments)]
fn dopri5(
    rhs: &dyn Fn(Vec2) -> Vec2,
    inside: &dyn Fn(Vec2) -> bool,
    x0: Vec2,
    t0: f64,
    t1: f64,
    atol: f64,
    rtol: f64,
    max_steps: usize,
) -> Result<Vec2> {
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut x = x0;
    let mut k1 = rhs(x);
    let scale0 = atol + rtol * x.amax();
    let mut h = (0.01 * scale0.max(1e-6) / (k1.amax() + 1e-12)).clamp(1e-8, 0.1).min(span);
    let mut steps = 0usize;
    loop {
        let remaining = (t1 - t).abs();
        if remaining <= 1e-14 * (1.0 + t1.abs()) {
            return Ok(x);
        }
        if steps >= max_steps {
            return Err(Error::StepBudget { max_steps, time: t });
        }
        steps += 1;
        let last = h >= remaining;
        let hs = if last { remaining } else { h };
        let hd = dir * hs;
        let k2 = rhs(x + hd * (A21 * k1));
        let k3 = rhs(x + hd * (A31 * k1 + A32 * k2));
        let k4 = rhs(x + hd * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = rhs(x + hd * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = rhs(x + hd * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let xn = x + hd * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = rhs(xn);
        let e = hd * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let mut err2 = 0.0;
        for i in 0..2 {
            let sc = atol + rtol * x[i].abs().max(xn[i].abs());
            err2 += (e[i] / sc).powi(2);
        }
        let err = (0.5 * err2).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::BlowUp { time: t });
            }
            continue;
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + hd };
            x = xn;
            check(x, t, inside)?;
            k1 = k7;
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hs * fac;
            if last {
                return Ok(x);
            }
        } else {
            h = hs * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            if h < 1e-14 * (1.0 + t.abs()) {
                return Err(Error::BlowUp { time: t });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Mat2;

    fn rotation() -> PlanarField {
        PlanarField::from_fns(|x| Vec2::new(-x.y, x.x), |_| Mat2::new(0.0, -1.0, 1.0, 0.0))
    }

    #[test]
    fn dopri_rotation_quarter_turn() {
        let s = IntegratorSettings::default();
        let y = flow_smooth(&rotation(), Vec2::new(1.0, 0.0), 0.0, std::f64::consts::FRAC_PI_2, &s).unwrap();
        assert!((y - Vec2::new(0.0, 1.0)).norm() < 1e-9);
        let back = flow_smooth(&rotation(), y, std::f64::consts::FRAC_PI_2, 0.0, &s).unwrap();
        assert!((back - Vec2::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn rk4_fixed_step_accuracy() {
        let s = IntegratorSettings::rk4(1e-3);
        let y = flow_smooth(&rotation(), Vec2::new(1.0, 0.0), 0.0, 1.0, &s).unwrap();
        assert!((y - Vec2::new(1f64.cos(), 1f64.sin())).norm() < 1e-12);
    }

    #[test]
    fn blowup_is_reported() {
        let f = PlanarField::from_fns(|x| Vec2::new(x.x * x.x, 0.0), |x| Mat2::new(2.0 * x.x, 0.0, 0.0, 0.0));
        let r = flow_smooth(&f, Vec2::new(1.0, 0.0), 0.0, 2.0, &IntegratorSettings::default());
        assert!(matches!(r, Err(Error::BlowUp { .. })));
    }
}
