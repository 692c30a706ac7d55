//! Divergence resolvents along the unperturbed orbit.
//!
//! With `F(τ) = Tr Df(x̄(p − τ))` the unstable resolvent solves
//! `R = F + F∗R` on `τ ≥ 0`. With `F̃(τ) = Tr Df(x̄(p + τ))` the stable one
//! solves `R̃ = F̃ − F̃∗R̃`, and is stored as `R(τ) = R̃(−τ)` for `τ < 0`.
//! Both are marched with the product trapezoidal rule.

use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::orbit::OrbitParametrization;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventKind {
    Unstable,
    Stable,
    TwoSided,
}

/// Uniform samples of `R_p` on `[-h·(n_s − 1), h·(n_u − 1)]`.
#[derive(Debug, Clone)]
pub struct ResolventTable {
    p: f64,
    h: f64,
    /// `R(k h)`, `k ≥ 0`.
    forward: Vec<f64>,
    /// `R(−k h)`, `k ≥ 0`.
    backward: Vec<f64>,
    /// Branches that vanish identically (zero divergence along the orbit).
    forward_zero: bool,
    backward_zero: bool,
}

impl ResolventTable {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Samples at `τ = k h`, `k = 0, 1, …` (empty if not computed).
    pub fn forward(&self) -> &[f64] {
        &self.forward
    }

    /// Samples at `τ = −k h`, `k = 0, 1, …` (empty if not computed).
    pub fn backward(&self) -> &[f64] {
        &self.backward
    }

    pub fn range(&self) -> (f64, f64) {
        let lo = if self.backward.is_empty() { 0.0 } else { -self.h * (self.backward.len() - 1) as f64 };
        let hi = if self.forward.is_empty() { 0.0 } else { self.h * (self.forward.len() - 1) as f64 };
        (lo, hi)
    }

    /// Cubic Lagrange interpolation of `R(τ)`.
    pub fn value(&self, tau: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let slack = 1e-9 * self.h;
        let (samples, u) = if tau >= 0.0 && !self.forward.is_empty() {
            (&self.forward, tau / self.h)
        } else if tau <= 0.0 && !self.backward.is_empty() {
            (&self.backward, -tau / self.h)
        } else {
            return Err(Error::OutsideTable { tau, min: lo, max: hi });
        };
        if u > (samples.len() - 1) as f64 + slack / self.h {
            return Err(Error::OutsideTable { tau, min: lo, max: hi });
        }
        Ok(interpolate(samples, u))
    }

    /// `∫_0^{D} R(±u) w(u) du` over one branch, `D ≥ 0`: composite Simpson on
    /// the grid nodes, with Gauss–Legendre on the partial end cell.
    pub(crate) fn weighted_integral(
        &self,
        forward: bool,
        d: f64,
        w: &mut dyn FnMut(f64) -> Result<f64>,
    ) -> Result<f64> {
        if d <= 0.0 {
            return Ok(0.0);
        }
        let samples = if forward { &self.forward } else { &self.backward };
        let h = self.h;
        let zero = if forward { self.forward_zero } else { self.backward_zero };
        let available = (samples.len().max(1) - 1) as f64 * h;
        if samples.is_empty() || d > available * (1.0 + 1e-12) + 1e-12 {
            let tau = if forward { d } else { -d };
            let (min, max) = self.range();
            return Err(Error::OutsideTable { tau, min, max });
        }
        if zero {
            return Ok(0.0);
        }
        let m = ((d / h).floor() as usize).min(samples.len() - 1);
        let node =
            |k: usize, w: &mut dyn FnMut(f64) -> Result<f64>| -> Result<f64> { Ok(samples[k] * w(k as f64 * h)?) };
        let mut total = 0.0;
        let simpson_end = if m >= 2 {
            let even = if m.is_multiple_of(2) { m } else { m - 3 };
            if even >= 2 {
                let mut acc = node(0, w)? + node(even, w)?;
                for k in 1..even {
                    acc += if k % 2 == 1 { 4.0 } else { 2.0 } * node(k, w)?;
                }
                total += acc * h / 3.0;
            }
            if m % 2 == 1 {
                let k0 = even;
                total +=
                    3.0 * h / 8.0 * (node(k0, w)? + 3.0 * node(k0 + 1, w)? + 3.0 * node(k0 + 2, w)? + node(k0 + 3, w)?);
            }
            m
        } else {
            0
        };
        let a = simpson_end as f64 * h;
        if d > a {
            total += gauss_tail(samples, h, a, d, w)?;
        }
        Ok(total)
    }
}

/// Five-point Gauss–Legendre on `[a, b]` with interpolated resolvent values.
fn gauss_tail(samples: &[f64], h: f64, a: f64, b: f64, w: &mut dyn FnMut(f64) -> Result<f64>) -> Result<f64> {
    const X: [f64; 5] =
        [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, wt) in X.iter().zip(W) {
        let u = c + r * x;
        acc += wt * interpolate(samples, u / h) * w(u)?;
    }
    Ok(acc * r)
}

/// Cubic Lagrange through the four nodes nearest to fractional index `u`.
fn interpolate(samples: &[f64], u: f64) -> f64 {
    let n = samples.len();
    if n == 1 {
        return samples[0];
    }
    if n < 4 {
        let k = (u.floor() as usize).min(n - 2);
        let t = u - k as f64;
        return samples[k] * (1.0 - t) + samples[k + 1] * t;
    }
    let k = (u.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = u - k as f64;
    let (y0, y1, y2, y3) = (samples[k], samples[k + 1], samples[k + 2], samples[k + 3]);
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3
}

/// Solve `R = F + σ F∗R` on `k h`, `k = 0..=n`.
fn march(f: &[f64], h: f64, sigma: f64) -> Vec<f64> {
    let n = f.len();
    let mut r = Vec::with_capacity(n);
    if n == 0 {
        return r;
    }
    if f.iter().all(|&v| v == 0.0) {
        return vec![0.0; n];
    }
    r.push(f[0]);
    let denom = 1.0 - sigma * 0.5 * h * f[0];
    for k in 1..n {
        let mut conv = 0.5 * f[k] * r[0];
        for j in 1..k {
            conv += f[k - j] * r[j];
        }
        r.push((f[k] + sigma * h * conv) / denom);
    }
    r
}

/// Build the resolvent table at parameter `p` covering `[-stable_horizon,
/// unstable_horizon]` (only the branches requested by `kind`).
pub fn resolvent(
    field: &PlanarField,
    orbit: &OrbitParametrization,
    kind: ResolventKind,
    p: f64,
    unstable_horizon: f64,
    stable_horizon: f64,
    step: f64,
) -> Result<ResolventTable> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("resolvent step {step} must be positive")));
    }
    let (lo, hi) = orbit.window();
    let nodes = |horizon: f64| -> usize { (horizon.max(0.0) / step * (1.0 - 1e-12)).ceil() as usize + 1 };
    let sample = |n: usize, dir: f64| -> Result<Vec<f64>> {
        let reach = p + dir * step * (n - 1) as f64;
        if reach < lo - 1e-12 || reach > hi + 1e-12 {
            return Err(Error::HorizonTooLong { horizon: step * (n - 1) as f64 });
        }
        (0..n)
            .map(|k| {
                let v = field.trace(orbit.point(p + dir * step * k as f64)?);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::NonFinite(format!("divergence along the orbit at p = {p}")))
                }
            })
            .collect()
    };
    let forward = if matches!(kind, ResolventKind::Unstable | ResolventKind::TwoSided) {
        march(&sample(nodes(unstable_horizon), -1.0)?, step, 1.0)
    } else {
        Vec::new()
    };
    let backward = if matches!(kind, ResolventKind::Stable | ResolventKind::TwoSided) {
        march(&sample(nodes(stable_horizon), 1.0)?, step, -1.0)
    } else {
        Vec::new()
    };
    let forward_zero = forward.iter().all(|&v| v == 0.0);
    let backward_zero = backward.iter().all(|&v| v == 0.0);
    Ok(ResolventTable { p, h: step, forward, backward, forward_zero, backward_zero })
}
