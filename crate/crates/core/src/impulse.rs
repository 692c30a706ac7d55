//! Impulse schedules and time slices that may sit on either side of a jump.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FnMap, SmoothMap};
use crate::geometry::{Mat2, Vec2};

/// A single kick `ε g(x) δ(t - time)`.
#[derive(Clone)]
pub struct Impulse {
    pub time: f64,
    pub shape: Arc<dyn SmoothMap>,
}

impl Impulse {
    pub fn new(time: f64, shape: Arc<dyn SmoothMap>) -> Self {
        Self { time, shape }
    }

    pub fn from_fns<F, J>(time: f64, value: F, jacobian: J) -> Self
    where
        F: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
        J: Fn(Vec2) -> Mat2 + Send + Sync + 'static,
    {
        Self::new(time, Arc::new(FnMap::new(value, jacobian)))
    }

    /// State-independent kick of fixed vector `c`.
    pub fn constant(time: f64, c: Vec2) -> Self {
        Self::from_fns(time, move |_| c, |_| Mat2::zeros())
    }

    #[inline]
    pub fn g(&self, x: Vec2) -> Vec2 {
        self.shape.value(x)
    }

    #[inline]
    pub fn dg(&self, x: Vec2) -> Mat2 {
        self.shape.jacobian(x)
    }
}

impl fmt::Debug for Impulse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Impulse").field("time", &self.time).finish_non_exhaustive()
    }
}

/// Finite, strictly increasing impulse list with amplitude `ε` and
/// interpretation parameter `α`.
#[derive(Clone, Debug)]
pub struct ImpulseSchedule {
    impulses: Vec<Impulse>,
    epsilon: f64,
    alpha: f64,
}

impl ImpulseSchedule {
    pub fn new(impulses: Vec<Impulse>, epsilon: f64, alpha: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if impulses.is_empty() {
            problems.push("impulse list is empty".to_string());
        }
        if impulses.iter().any(|i| !i.time.is_finite()) {
            problems.push("impulse times must be finite".to_string());
        }
        if impulses.windows(2).any(|w| !(w[0].time < w[1].time)) {
            problems.push("jump times not increasing".to_string());
        }
        if !epsilon.is_finite() {
            problems.push(format!("epsilon {epsilon} is not finite"));
        }
        if !(0.0..=1.0).contains(&alpha) {
            problems.push(format!("alpha {alpha} outside [0, 1]"));
        }
        if !problems.is_empty() {
            return Err(Error::InvalidSchedule(problems.join("; ")));
        }
        Ok(Self { impulses, epsilon, alpha })
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    pub fn len(&self) -> usize {
        self.impulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.impulses.is_empty()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn impulse(&self, i: usize) -> Result<&Impulse> {
        self.impulses.get(i).ok_or(Error::ImpulseIndex { index: i, len: self.impulses.len() })
    }

    pub fn jump_times(&self) -> Vec<f64> {
        self.impulses.iter().map(|i| i.time).collect()
    }

    pub fn first_time(&self) -> f64 {
        self.impulses[0].time
    }

    pub fn last_time(&self) -> f64 {
        self.impulses[self.impulses.len() - 1].time
    }

    /// Smallest spacing between consecutive jumps (infinite for a single jump).
    pub fn min_gap(&self) -> f64 {
        self.impulses.windows(2).map(|w| w[1].time - w[0].time).fold(f64::INFINITY, f64::min)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.impulses.clone(), self.epsilon, alpha)
    }

    /// Index of the impulse at exactly `t`, if any.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        self.impulses.iter().position(|i| i.time == t)
    }

    /// Index of the impulse closest to `t` when within `radius`.
    pub fn nearest_within(&self, t: f64, radius: f64) -> Option<usize> {
        self.impulses
            .iter()
            .enumerate()
            .filter(|(_, i)| (i.time - t).abs() < radius)
            .min_by(|a, b| (a.1.time - t).abs().total_cmp(&(b.1.time - t).abs()))
            .map(|(k, _)| k)
    }

    /// Whether the slice lies after impulse `i` on the time axis.
    pub fn is_after(&self, i: usize, at: SliceTime) -> bool {
        at.is_past(self.impulses[i].time)
    }

    /// Rejects bare times on the jump set.
    pub fn check_slice(&self, at: SliceTime) -> Result<()> {
        if !at.time.is_finite() {
            return Err(Error::NonFinite(format!("time {}", at.time)));
        }
        if at.side.is_none() && self.index_at(at.time).is_some() {
            return Err(Error::AtJumpTime(at.time));
        }
        Ok(())
    }
}

/// Which side of a jump a one-sided limit is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Before,
    After,
}

/// A time, optionally marked as a one-sided limit `t - 0` or `t + 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceTime {
    pub time: f64,
    pub side: Option<Side>,
}

impl SliceTime {
    pub fn at(time: f64) -> Self {
        Self { time, side: None }
    }

    pub fn before(time: f64) -> Self {
        Self { time, side: Some(Side::Before) }
    }

    pub fn after(time: f64) -> Self {
        Self { time, side: Some(Side::After) }
    }

    /// True when a jump at `tj` has already happened by this slice.
    pub fn is_past(&self, tj: f64) -> bool {
        tj < self.time || (tj == self.time && self.side == Some(Side::After))
    }

    fn rank(&self) -> i8 {
        match self.side {
            Some(Side::Before) => -1,
            None => 0,
            Some(Side::After) => 1,
        }
    }

    pub fn cmp_order(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.rank().cmp(&other.rank()))
    }
}

impl From<f64> for SliceTime {
    fn from(time: f64) -> Self {
        Self::at(time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kick(t: f64) -> Impulse {
        Impulse::constant(t, Vec2::new(0.0, 1.0))
    }

    #[test]
    fn validation_collects_every_problem() {
        let err = ImpulseSchedule::new(vec![kick(1.0), kick(-1.0)], 0.1, 1.5).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("jump times not increasing"), "{msg}");
        assert!(msg.contains("alpha 1.5 outside [0, 1]"), "{msg}");
    }

    #[test]
    fn slices_order_around_a_jump() {
        assert!(!SliceTime::before(0.0).is_past(0.0));
        assert!(SliceTime::after(0.0).is_past(0.0));
        assert!(SliceTime::at(0.1).is_past(0.0));
        assert_eq!(SliceTime::before(0.0).cmp_order(&SliceTime::after(0.0)), Ordering::Less);
    }

    #[test]
    fn bare_jump_time_is_rejected() {
        let s = ImpulseSchedule::new(vec![kick(0.0)], 0.1, 0.5).unwrap();
        assert_eq!(s.check_slice(0.0.into()), Err(Error::AtJumpTime(0.0)));
        assert!(s.check_slice(SliceTime::after(0.0)).is_ok());
    }
}
