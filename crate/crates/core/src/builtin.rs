//! Reference systems with closed-form orbits.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::{Mat2, Vec2};
use crate::impulse::{Impulse, ImpulseSchedule};
use crate::orbit::{OrbitKind, OrbitParametrization};
use crate::saddle::SaddlePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Parabolic,
    Duffing,
    Eddy,
    Expanding,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Parabolic, Builtin::Duffing, Builtin::Eddy, Builtin::Expanding];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Parabolic => "parabolic",
            Builtin::Duffing => "duffing",
            Builtin::Eddy => "eddy",
            Builtin::Expanding => "expanding",
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown builtin system `{s}`")))
    }
}

/// A reference system: field, saddles, closed-form orbits and a default
/// impulse schedule.
#[derive(Clone, Debug)]
pub struct BuiltinSystem {
    pub builtin: Builtin,
    pub field: PlanarField,
    pub saddles: Vec<SaddlePoint>,
    /// Unstable-manifold branch (parabolic only).
    pub unstable: Option<OrbitParametrization>,
    /// Stable-manifold branch (parabolic only).
    pub stable: Option<OrbitParametrization>,
    /// Homoclinic or heteroclinic connection.
    pub connection: Option<OrbitParametrization>,
    pub schedule: ImpulseSchedule,
}

impl BuiltinSystem {
    /// The orbit of the requested kind, if this system has one.
    pub fn orbit(&self, kind: OrbitKind) -> Option<&OrbitParametrization> {
        match kind {
            OrbitKind::Unstable => self.unstable.as_ref().or(self.connection.as_ref()),
            OrbitKind::Stable => self.stable.as_ref().or(self.connection.as_ref()),
            OrbitKind::Heteroclinic => self.connection.as_ref(),
        }
    }
}

pub fn builtin_system(which: Builtin) -> BuiltinSystem {
    match which {
        Builtin::Parabolic => parabolic(),
        Builtin::Duffing => duffing(),
        Builtin::Eddy => eddy(),
        Builtin::Expanding => expanding(),
    }
}

fn sech(s: f64) -> f64 {
    1.0 / s.cosh()
}

/// `ẋ = (−3x₁, x₂)` with a single kick `(x₁² + x₂², x₁²)` at `t = 0`.
pub fn parabolic() -> BuiltinSystem {
    let field = parabolic_field();
    let saddle = SaddlePoint::at(&field, Vec2::zeros()).expect("origin is a saddle");
    let unstable =
        OrbitParametrization::closed_form(OrbitKind::Unstable, |s| Vec2::new(0.0, s.exp()), Some(saddle), None)
            .expect("anchored");
    let stable =
        OrbitParametrization::closed_form(OrbitKind::Stable, |s| Vec2::new((-3.0 * s).exp(), 0.0), None, Some(saddle))
            .expect("anchored");
    BuiltinSystem {
        builtin: Builtin::Parabolic,
        field,
        saddles: vec![saddle],
        unstable: Some(unstable),
        stable: Some(stable),
        connection: None,
        schedule: ImpulseSchedule::new(vec![parabolic_kick(0.0)], 0.1, 0.5).expect("valid"),
    }
}

pub fn parabolic_field() -> PlanarField {
    PlanarField::from_fns(|x| Vec2::new(-3.0 * x.x, x.y), |_| Mat2::new(-3.0, 0.0, 0.0, 1.0))
}

/// Kick `(x₁² + x₂², x₁²)` at time `t`.
pub fn parabolic_kick(t: f64) -> Impulse {
    Impulse::from_fns(
        t,
        |x| Vec2::new(x.x * x.x + x.y * x.y, x.x * x.x),
        |x| Mat2::new(2.0 * x.x, 2.0 * x.y, 2.0 * x.x, 0.0),
    )
}

/// Kick sets `(times, γ)` for the unforced Duffing oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuffingPreset {
    Solid,
    Dashed,
    Dotted,
}

impl DuffingPreset {
    pub const ALL: [DuffingPreset; 3] = [DuffingPreset::Solid, DuffingPreset::Dashed, DuffingPreset::Dotted];

    pub fn kicks(self) -> (Vec<f64>, Vec<f64>) {
        match self {
            DuffingPreset::Solid => (vec![-1.0, 1.0], vec![-1.0, 1.0]),
            DuffingPreset::Dashed => (vec![-1.0, 0.0, 1.0], vec![-1.0, 1.0, -3.0]),
            DuffingPreset::Dotted => (vec![-2.0, 2.0], vec![3.7, -2.7]),
        }
    }

    pub fn schedule(self, epsilon: f64, alpha: f64) -> ImpulseSchedule {
        let (t, g) = self.kicks();
        duffing_kicks(&t, &g, epsilon, alpha).expect("preset is valid")
    }
}

/// Vertical kicks `(0, γ_i)` at `times`.
pub fn duffing_kicks(times: &[f64], gammas: &[f64], epsilon: f64, alpha: f64) -> Result<ImpulseSchedule> {
    if times.len() != gammas.len() {
        return Err(Error::InvalidArgument("times and gammas differ in length".into()));
    }
    let imps = times.iter().zip(gammas).map(|(&t, &g)| Impulse::constant(t, Vec2::new(0.0, g))).collect();
    ImpulseSchedule::new(imps, epsilon, alpha)
}

/// `ẋ = (x₂, x₁ − x₁³)` with homoclinic `(√2 sech s, −√2 sech s tanh s)`.
pub fn duffing() -> BuiltinSystem {
    let field = duffing_field();
    let saddle = SaddlePoint::at(&field, Vec2::zeros()).expect("origin is a saddle");
    let r2 = std::f64::consts::SQRT_2;
    let connection = OrbitParametrization::closed_form(
        OrbitKind::Heteroclinic,
        move |s| Vec2::new(r2 * sech(s), -r2 * sech(s) * s.tanh()),
        Some(saddle),
        Some(saddle),
    )
    .expect("anchored");
    BuiltinSystem {
        builtin: Builtin::Duffing,
        field,
        saddles: vec![saddle],
        unstable: None,
        stable: None,
        connection: Some(connection),
        schedule: DuffingPreset::Solid.schedule(0.01, 0.5),
    }
}

pub fn duffing_field() -> PlanarField {
    PlanarField::from_fns(|x| Vec2::new(x.y, x.x - x.x.powi(3)), |x| Mat2::new(0.0, 1.0, 1.0 - 3.0 * x.x * x.x, 0.0))
}

/// Point-source kick `(x − c)/|x − c|²` at time `t`.
pub fn explosion(t: f64, centre: Vec2) -> Impulse {
    Impulse::from_fns(
        t,
        move |x| {
            let d = x - centre;
            d / d.norm_squared()
        },
        move |x| {
            let d = x - centre;
            let r2 = d.norm_squared();
            (Mat2::identity() * r2 - 2.0 * d * d.transpose()) / (r2 * r2)
        },
    )
}

/// `ẋ = (2x₂ − 3x₂², 2x₁)` with homoclinic `(−sech²s tanh s, sech²s)`.
pub fn eddy() -> BuiltinSystem {
    let field = eddy_field();
    let saddle = SaddlePoint::at(&field, Vec2::zeros()).expect("origin is a saddle");
    let connection = OrbitParametrization::closed_form(
        OrbitKind::Heteroclinic,
        |s| {
            let c = sech(s).powi(2);
            Vec2::new(-c * s.tanh(), c)
        },
        Some(saddle),
        Some(saddle),
    )
    .expect("anchored");
    BuiltinSystem {
        builtin: Builtin::Eddy,
        field,
        saddles: vec![saddle],
        unstable: None,
        stable: None,
        connection: Some(connection),
        schedule: ImpulseSchedule::new(vec![explosion(0.0, Vec2::new(0.5, 0.8))], 0.02, 0.5).expect("valid"),
    }
}

pub fn eddy_field() -> PlanarField {
    PlanarField::from_fns(
        |x| Vec2::new(2.0 * x.y - 3.0 * x.y * x.y, 2.0 * x.x),
        |x| Mat2::new(0.0, 2.0 - 6.0 * x.y, 2.0, 0.0),
    )
}

/// `ẋ = (x₁ − x₁², 2x₁x₂ − x₂/2)`, divergence ½, heteroclinic
/// `(eˢ/(1 + eˢ), 0)` from `(0, 0)` to `(1, 0)`.
pub fn expanding() -> BuiltinSystem {
    let field = expanding_field();
    let a = SaddlePoint::at(&field, Vec2::zeros()).expect("saddle");
    let b = SaddlePoint::at(&field, Vec2::new(1.0, 0.0)).expect("saddle");
    let connection = OrbitParametrization::closed_form(
        OrbitKind::Heteroclinic,
        |s| Vec2::new(1.0 / (1.0 + (-s).exp()), 0.0),
        Some(a),
        Some(b),
    )
    .expect("anchored");
    let k1 = Impulse::from_fns(0.0, |x| Vec2::new(0.0, x.x), |_| Mat2::new(0.0, 0.0, 1.0, 0.0));
    let k2 = Impulse::from_fns(
        1.0,
        |x| Vec2::new(0.0, x.y * x.y + x.x.powi(3)),
        |x| Mat2::new(0.0, 0.0, 3.0 * x.x * x.x, 2.0 * x.y),
    );
    BuiltinSystem {
        builtin: Builtin::Expanding,
        field,
        saddles: vec![a, b],
        unstable: None,
        stable: None,
        connection: Some(connection),
        schedule: ImpulseSchedule::new(vec![k1, k2], 0.01, 0.5).expect("valid"),
    }
}

pub fn expanding_field() -> PlanarField {
    PlanarField::from_fns(
        |x| Vec2::new(x.x - x.x * x.x, 2.0 * x.x * x.y - 0.5 * x.y),
        |x| Mat2::new(1.0 - 2.0 * x.x, 0.0, 2.0 * x.y, 2.0 * x.x - 0.5),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_orbits_solve_the_field() {
        for b in Builtin::ALL {
            let sys = builtin_system(b);
            for orbit in [&sys.unstable, &sys.stable, &sys.connection].into_iter().flatten() {
                let (lo, hi) = orbit.window();
                let (lo, hi) = (lo.max(-6.0), hi.min(4.0));
                for k in 0..=50 {
                    let s = lo + (hi - lo) * k as f64 / 50.0;
                    let h = 1e-5;
                    let d = (orbit.point(s + h).unwrap() - orbit.point(s - h).unwrap()) / (2.0 * h);
                    let f = sys.field.velocity(orbit.point(s).unwrap());
                    assert!((d - f).norm() < 1e-7 * (1.0 + f.norm()), "{b:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn windows_stop_near_saddles() {
        let d = duffing();
        assert_eq!(d.connection.as_ref().unwrap().window(), (-15.0, 15.0));
        let e = eddy();
        let (lo, hi) = e.connection.as_ref().unwrap().window();
        let cut = (4.0 * 2f64.sqrt() / 1e-6).ln() / 2.0;
        assert!((lo + cut).abs() < 1e-3 && (hi - cut).abs() < 1e-3, "{lo} {hi}");
        let p = parabolic();
        let (lo, hi) = p.unstable.as_ref().unwrap().window();
        assert!((lo - 1e-6f64.ln()).abs() < 1e-9 && hi == 15.0);
    }

    #[test]
    fn expanding_trace_is_constant() {
        let f = expanding_field();
        for x in [Vec2::new(0.1, 0.3), Vec2::new(-2.0, 5.0)] {
            assert_eq!(f.trace(x), 0.5);
        }
    }
}
