//! Melnikov values on a `(p, t)` grid.

use rayon::prelude::*;

use super::function::{MelnikovKind, MelnikovProblem};
use crate::error::Result;
use crate::impulse::{ImpulseSchedule, Side, SliceTime};

/// Default radius around each jump time inside which grid times are moved to
/// the one-sided limit.
pub const EXCLUSION_RADIUS: f64 = 1e-3;

/// A requested grid time and the slice actually evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridTime {
    pub requested: f64,
    pub slice: SliceTime,
}

impl GridTime {
    /// Snap `t` onto a one-sided limit when it falls within `radius` of a
    /// jump time.
    pub fn resolve(schedule: &ImpulseSchedule, t: f64, radius: f64) -> Self {
        let slice = match schedule.nearest_within(t, radius) {
            Some(i) => {
                let ti = schedule.impulses()[i].time;
                if t < ti {
                    SliceTime::before(ti)
                } else {
                    SliceTime::after(ti)
                }
            }
            None => SliceTime::at(t),
        };
        Self { requested: t, slice }
    }

    pub fn side_label(&self) -> &'static str {
        match self.slice.side {
            None => "none",
            Some(Side::Before) => "before",
            Some(Side::After) => "after",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MelnikovGrid {
    pub kind: MelnikovKind,
    pub p: Vec<f64>,
    pub t: Vec<GridTime>,
    /// Row-major: `values[ip * t.len() + it]`.
    pub values: Vec<f64>,
    pub jump_times: Vec<f64>,
    pub epsilon: f64,
}

impl MelnikovGrid {
    /// Evaluate `kind` on the tensor grid `p × t`. Work is spread over the
    /// rayon pool; output order depends only on grid indices.
    pub fn compute(
        problem: &MelnikovProblem<'_>,
        kind: MelnikovKind,
        p: &[f64],
        t: &[f64],
        radius: f64,
    ) -> Result<Self> {
        let times: Vec<GridTime> = t.iter().map(|&t| GridTime::resolve(problem.schedule, t, radius)).collect();
        let (t_min, t_max) = times
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| (a.min(g.slice.time), b.max(g.slice.time)));
        let rows: Vec<Vec<f64>> = p
            .par_iter()
            .map(|&pv| -> Result<Vec<f64>> {
                let slice = problem.at(kind, pv, t_min, t_max)?;
                times.par_iter().map(|g| slice.value(g.slice)).collect()
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            kind,
            p: p.to_vec(),
            t: times,
            values: rows.concat(),
            jump_times: problem.schedule.jump_times(),
            epsilon: problem.schedule.epsilon(),
        })
    }

    pub fn value(&self, ip: usize, it: usize) -> f64 {
        self.values[ip * self.t.len() + it]
    }
}

/// `n` evenly spaced values on `[a, b]` (just `a` when `n == 1`).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}
