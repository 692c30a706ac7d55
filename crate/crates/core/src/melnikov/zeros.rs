//! Zeros of the distance Melnikov function: sign-change scan in `t`, then
//! bisection.

use rayon::prelude::*;

use super::function::{MelnikovKind, MelnikovProblem};
use super::grid::linspace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSettings {
    pub t_samples: usize,
    pub exclusion_radius: f64,
    pub tol: f64,
    pub gradient_step: f64,
    /// `|∇M|` below this marks a zero as non-simple.
    pub simple_threshold: f64,
}

impl Default for ZeroSettings {
    fn default() -> Self {
        Self { t_samples: 801, exclusion_radius: 1e-3, tol: 1e-10, gradient_step: 1e-5, simple_threshold: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeteroclinicZero {
    pub p: f64,
    pub t: f64,
    pub dm_dp: f64,
    pub dm_dt: f64,
    pub simple: bool,
    /// Within the exclusion radius of a jump time: the pseudo-manifolds are
    /// not curves there, so the zero has no intersection meaning.
    pub on_jump_set: bool,
}

/// Zeros of `M(p, ·)` on `[t_min, t_max]` for each `p`, ordered by `p` then `t`.
pub fn find_heteroclinic_zeros(
    problem: &MelnikovProblem<'_>,
    p_values: &[f64],
    t_range: (f64, f64),
    settings: &ZeroSettings,
) -> Result<Vec<HeteroclinicZero>> {
    let (t_min, t_max) = t_range;
    if !(t_min < t_max) || settings.t_samples < 2 {
        return Err(Error::InvalidArgument(format!("empty zero-scan range [{t_min}, {t_max}]")));
    }
    let h = settings.gradient_step;
    let per_p: Vec<Vec<HeteroclinicZero>> = p_values
        .par_iter()
        .map(|&p| -> Result<Vec<HeteroclinicZero>> {
            let (lo, hi) = (t_min - 2.0 * h, t_max + 2.0 * h);
            let m = problem.at(MelnikovKind::Distance, p, lo, hi)?;
            let mp = problem.at(MelnikovKind::Distance, p + h, lo, hi)?;
            let mm = problem.at(MelnikovKind::Distance, p - h, lo, hi)?;
            let eval = |t: f64| m.value(away_from_jumps(problem, t));
            let ts: Vec<f64> = linspace(t_min, t_max, settings.t_samples)
                .into_iter()
                .filter(|&t| problem.schedule.nearest_within(t, settings.exclusion_radius).is_none())
                .collect();
            let vals: Vec<f64> = ts.iter().map(|&t| eval(t)).collect::<Result<_>>()?;
            let mut roots = Vec::new();
            for k in 0..ts.len() {
                if vals[k] == 0.0 {
                    roots.push(ts[k]);
                    continue;
                }
                if k + 1 < ts.len() && vals[k + 1] != 0.0 && vals[k].signum() != vals[k + 1].signum() {
                    roots.push(bisect(&eval, ts[k], ts[k + 1], vals[k], settings.tol)?);
                }
            }
            roots
                .into_iter()
                .map(|t| {
                    let dm_dt = (eval(t + h)? - eval(t - h)?) / (2.0 * h);
                    let at = away_from_jumps(problem, t);
                    let dm_dp = (mp.value(at)? - mm.value(at)?) / (2.0 * h);
                    let simple = dm_dp.hypot(dm_dt) >= settings.simple_threshold;
                    let on_jump_set = problem.schedule.nearest_within(t, settings.exclusion_radius).is_some();
                    Ok(HeteroclinicZero { p, t, dm_dp, dm_dt, simple, on_jump_set })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_p.concat())
}

/// Evaluation times never land exactly on a jump; `M` is continuous there.
fn away_from_jumps(problem: &MelnikovProblem<'_>, t: f64) -> f64 {
    if problem.schedule.index_at(t).is_some() {
        t + 1e-13 * (1.0 + t.abs())
    } else {
        t
    }
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, fa: f64, tol: f64) -> Result<f64> {
    let sa = fa.signum();
    while (b - a) > tol {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == sa {
            a = c;
        } else {
            b = c;
        }
    }
    Ok(0.5 * (a + b))
}
