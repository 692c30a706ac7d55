//! Turn a [`RunConfig`] into a field, schedule and orbits.

use kickflow_core::builtin::{builtin_system, BuiltinSystem};
use kickflow_core::flow::{compute_orbit, OrbitSettings};
use kickflow_core::{ImpulseSchedule, OrbitKind, OrbitParametrization, PlanarField, SaddlePoint, Vec2};
use kickflow_dsl::{compile_field, compile_impulse, MapSpec};

use crate::config::{RunConfig, SystemSpec};
use crate::error::{CliError, Context, Result};

enum Orbits {
    Builtin(Box<BuiltinSystem>),
    Custom(OrbitParametrization),
}

pub struct Setup {
    pub field: PlanarField,
    pub schedule: ImpulseSchedule,
    orbits: Orbits,
    kind: Option<OrbitKind>,
    window: Option<(f64, f64)>,
}

fn spec(cfg: &RunConfig, g1: &str, g2: &str, probe: Vec2) -> MapSpec {
    cfg.params.iter().fold(MapSpec::new(g1, g2).probe(probe), |s, (k, &v)| s.param(k.clone(), v))
}

impl Setup {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        let probe = cfg.orbit.saddle.unwrap_or(Vec2::new(0.1, 0.1));
        let (field, orbits) = match &cfg.system {
            SystemSpec::Builtin { which, .. } => {
                let sys = builtin_system(*which);
                (sys.field.clone(), Orbits::Builtin(Box::new(sys)))
            }
            SystemSpec::Custom { f1, f2 } => {
                let field = compile_field(&spec(cfg, f1, f2, probe)).context(|| "compiling the vector field".into())?;
                let o = &cfg.orbit;
                let (guess, branch) = (o.saddle.expect("validated"), o.branch.expect("validated"));
                let saddle = SaddlePoint::polish(&field, guess)
                    .context(|| format!("locating the saddle near ({}, {})", guess.x, guess.y))?;
                let other_end = o
                    .target
                    .map(|b| {
                        SaddlePoint::polish(&field, b)
                            .context(|| format!("locating the target saddle near ({}, {})", b.x, b.y))
                    })
                    .transpose()?;
                let settings = OrbitSettings {
                    delta0: o.delta0,
                    amplitude: o.amplitude,
                    extent: o.extent,
                    sample_step: o.step,
                    other_end,
                };
                let orbit =
                    compute_orbit(&field, &saddle, branch, &settings).context(|| "integrating the orbit".into())?;
                (field, Orbits::Custom(orbit))
            }
        };
        let (eps, alpha) = (cfg.run.epsilon, cfg.run.alpha);
        let schedule = if cfg.impulses.is_empty() {
            match (&cfg.system, &orbits) {
                (SystemSpec::Builtin { preset: Some(p), .. }, _) => p.schedule(eps, alpha),
                (_, Orbits::Builtin(sys)) => {
                    sys.schedule.with_epsilon(eps).with_alpha(alpha).context(|| "impulse schedule".into())?
                }
                _ => unreachable!("custom systems carry impulses"),
            }
        } else {
            let kicks = cfg
                .impulses
                .iter()
                .enumerate()
                .map(|(i, imp)| {
                    compile_impulse(imp.time, &spec(cfg, &imp.g1, &imp.g2, probe))
                        .context(|| format!("compiling impulse {}", i + 1))
                })
                .collect::<Result<Vec<_>>>()?;
            ImpulseSchedule::new(kicks, eps, alpha).context(|| "impulse schedule".into())?
        };
        Ok(Self { field, schedule, orbits, kind: cfg.orbit.kind, window: cfg.orbit.window })
    }

    /// The orbit to use where `want` is natural. An explicit `orbit.kind`
    /// wins; custom systems have a single orbit.
    pub fn orbit(&self, want: OrbitKind) -> Result<OrbitParametrization> {
        let orbit = match &self.orbits {
            Orbits::Custom(o) => o.clone(),
            Orbits::Builtin(sys) => {
                let kind = self.kind.unwrap_or(want);
                sys.orbit(kind).cloned().ok_or_else(|| {
                    CliError::Usage(format!("builtin `{}` has no {kind:?} orbit; set orbit.kind", sys.builtin.name()))
                })?
            }
        };
        match self.window {
            Some((lo, hi)) => orbit.with_window(lo, hi).context(|| format!("orbit window [{lo}, {hi}]")),
            None => Ok(orbit),
        }
    }
}
