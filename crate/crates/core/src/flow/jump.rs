//! The implicit jump `y = x + ε[α g(x) + (1 − α) g(y)]` and its inverse.

use crate::error::{Error, Result};
use crate::geometry::{is_finite, Mat2, Vec2};
use crate::impulse::ImpulseSchedule;

const MAX_ITER: usize = 50;
const RESIDUAL_TOL: f64 = 1e-12;
const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Apply jump `i` to `x` (pre-jump state when `Forward`, post-jump state
/// when `Backward`).
pub fn jump_map(schedule: &ImpulseSchedule, i: usize, x: Vec2, direction: Direction) -> Result<Vec2> {
    let imp = schedule.impulse(i)?;
    let eps = schedule.epsilon();
    let alpha = schedule.alpha();
    if !is_finite(x) {
        return Err(Error::NonFinite("jump input".into()));
    }
    if eps == 0.0 {
        return Ok(x);
    }
    match direction {
        Direction::Forward => {
            let gx = imp.g(x);
            let fixed = x + eps * alpha * gx;
            let a = eps * (1.0 - alpha);
            newton(fixed, |y| y - fixed - a * imp.g(y), |y| Mat2::identity() - a * imp.dg(y), x)
        }
        Direction::Backward => {
            let fixed = x - eps * (1.0 - alpha) * imp.g(x);
            let a = eps * alpha;
            newton(fixed, |z| z - fixed + a * imp.g(z), |z| Mat2::identity() + a * imp.dg(z), x)
        }
    }
}

/// Damped Newton for `r(z) = 0`. `scale` sets the residual tolerance.
fn newton(seed: Vec2, r: impl Fn(Vec2) -> Vec2, jac: impl Fn(Vec2) -> Mat2, scale: Vec2) -> Result<Vec2> {
    let tol = RESIDUAL_TOL * (1.0 + scale.norm());
    let mut z = seed;
    let mut res = r(z);
    let mut norm = res.norm();
    for _ in 0..MAX_ITER {
        if norm <= tol {
            return Ok(z);
        }
        let step = jac(z).lu().solve(&res).filter(|s| is_finite(*s)).ok_or(Error::SingularJump { x: z.x, y: z.y })?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand = z - lambda * step;
            let cres = r(cand);
            let cnorm = cres.norm();
            if cnorm.is_finite() && cnorm < norm {
                z = cand;
                res = cres;
                norm = cnorm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm <= tol {
        Ok(z)
    } else {
        Err(Error::JumpNotConverged { iterations: MAX_ITER, residual: norm })
    }
}
