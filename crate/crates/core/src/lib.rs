//! Planar flows with impulsive perturbations: impulsive evolution,
//! pseudo-manifolds, Melnikov functions, lobe flux and the direct-simulation
//! checks that go with them.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod error;
pub mod field;
pub mod flow;
pub mod geometry;
pub mod impulse;
pub mod melnikov;
pub mod orbit;
pub mod quadrature;
pub mod saddle;

pub use error::{Error, Result};
pub use field::{FnMap, PlanarField, SmoothMap};
pub use geometry::{perp, BoundingBox, Mat2, Vec2};
pub use impulse::{Impulse, ImpulseSchedule, Side, SliceTime};
pub use orbit::{ManifoldKind, OrbitKind, OrbitParametrization};
pub use saddle::SaddlePoint;
