//! Smooth planar maps and the autonomous vector field wrapper.

use std::fmt;
use std::sync::Arc;

use crate::geometry::{BoundingBox, Mat2, Vec2};

/// A smooth map R² → R² together with its exact Jacobian.
///
/// Used both for the autonomous velocity `f` and for impulse shapes `g_i`.
pub trait SmoothMap: Send + Sync {
    fn value(&self, x: Vec2) -> Vec2;
    fn jacobian(&self, x: Vec2) -> Mat2;
}

/// Closure-backed [`SmoothMap`].
pub struct FnMap<F, J> {
    value: F,
    jacobian: J,
}

impl<F, J> FnMap<F, J>
where
    F: Fn(Vec2) -> Vec2 + Send + Sync,
    J: Fn(Vec2) -> Mat2 + Send + Sync,
{
    pub fn new(value: F, jacobian: J) -> Self {
        Self { value, jacobian }
    }
}

impl<F, J> SmoothMap for FnMap<F, J>
where
    F: Fn(Vec2) -> Vec2 + Send + Sync,
    J: Fn(Vec2) -> Mat2 + Send + Sync,
{
    fn value(&self, x: Vec2) -> Vec2 {
        (self.value)(x)
    }
    fn jacobian(&self, x: Vec2) -> Mat2 {
        (self.jacobian)(x)
    }
}

/// Autonomous planar velocity field `ẋ = f(x)`.
#[derive(Clone)]
pub struct PlanarField {
    map: Arc<dyn SmoothMap>,
    domain: Option<BoundingBox>,
}

impl PlanarField {
    pub fn new(map: Arc<dyn SmoothMap>) -> Self {
        Self { map, domain: None }
    }

    pub fn from_fns<F, J>(value: F, jacobian: J) -> Self
    where
        F: Fn(Vec2) -> Vec2 + Send + Sync + 'static,
        J: Fn(Vec2) -> Mat2 + Send + Sync + 'static,
    {
        Self::new(Arc::new(FnMap::new(value, jacobian)))
    }

    pub fn with_domain(mut self, domain: BoundingBox) -> Self {
        self.domain = Some(domain);
        self
    }

    pub fn domain(&self) -> Option<BoundingBox> {
        self.domain
    }

    #[inline]
    pub fn velocity(&self, x: Vec2) -> Vec2 {
        self.map.value(x)
    }

    #[inline]
    pub fn jacobian(&self, x: Vec2) -> Mat2 {
        self.map.jacobian(x)
    }

    /// Divergence `Tr Df(x)`, taken from the diagonal of the exact Jacobian.
    #[inline]
    pub fn trace(&self, x: Vec2) -> f64 {
        let j = self.map.jacobian(x);
        j[(0, 0)] + j[(1, 1)]
    }

    pub fn in_domain(&self, x: Vec2) -> bool {
        self.domain.is_none_or(|d| d.contains(x))
    }
}

impl fmt::Debug for PlanarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarField").field("domain", &self.domain).finish_non_exhaustive()
    }
}
