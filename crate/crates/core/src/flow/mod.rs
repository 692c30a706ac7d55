//! Time integration: smooth flow, jumps, impulsive and regularized
//! evolution, manifold branches and the direct-simulation manifold probe.

mod evolve;
mod integrator;
mod jump;
mod oracle;
mod orbit;

pub use evolve::{evolve_impulsive, evolve_regularized, PULSE_STEPS};
pub use integrator::{flow_smooth, IntegratorSettings, Method, BLOWUP_NORM};
pub use jump::{jump_map, Direction};
pub use oracle::{manifold_oracle, OracleSettings};
pub use orbit::{compute_orbit, Branch, OrbitSettings};
