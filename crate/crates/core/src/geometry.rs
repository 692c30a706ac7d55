//! Planar vectors and the handful of rotations used throughout.

use nalgebra::{Matrix2, Vector2};

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;

/// Counter-clockwise quarter turn: `(-v2, v1)`.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Clockwise quarter turn, the inverse of [`perp`].
#[inline]
pub fn perp_cw(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// `u ∧ v = u1 v2 - u2 v1`.
#[inline]
pub fn wedge(u: Vec2, v: Vec2) -> f64 {
    u.x * v.y - u.y * v.x
}

#[inline]
pub fn is_finite(v: Vec2) -> bool {
    v.x.is_finite() && v.y.is_finite()
}

/// Axis-aligned box used as an optional domain hint for fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub min: Vec2,
    pub max: Vec2,
}

impl BoundingBox {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, x: Vec2) -> bool {
        x.x >= self.min.x && x.x <= self.max.x && x.y >= self.min.y && x.y <= self.max.y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perp_rotates_counter_clockwise() {
        assert_eq!(perp(Vec2::new(1.0, 0.0)), Vec2::new(0.0, 1.0));
        assert_eq!(perp_cw(perp(Vec2::new(2.0, -3.0))), Vec2::new(2.0, -3.0));
        assert_eq!(wedge(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)), 1.0);
    }
}
