//! Melnikov functions for impulsive perturbations and what is built on them.

mod flux;
mod function;
mod grid;
mod resolvent;
mod zeros;

pub use flux::{
    displaced_point, flux_gate_direct, flux_leading, pseudo_manifold_point, pseudo_separatrix, GateFlux,
    SeparatrixGeometry, SeparatrixSampling,
};
pub use function::{
    jump_strength, melnikov_distance, melnikov_stable, melnikov_unstable, Formula, MelnikovKind, MelnikovProblem,
    MelnikovSettings, MelnikovSlice,
};
pub use grid::{linspace, GridTime, MelnikovGrid, EXCLUSION_RADIUS};
pub use resolvent::{resolvent, ResolventKind, ResolventTable};
pub use zeros::{find_heteroclinic_zeros, HeteroclinicZero, ZeroSettings};
