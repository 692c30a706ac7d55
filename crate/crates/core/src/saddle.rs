//! Hyperbolic saddle points of a planar field.

use crate::error::{Error, Result};
use crate::field::PlanarField;
use crate::geometry::{Mat2, Vec2};

const NEWTON_MAX_ITER: usize = 60;
const FIXED_POINT_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    pub location: Vec2,
    pub lambda_unstable: f64,
    pub lambda_stable: f64,
    pub v_unstable: Vec2,
    pub v_stable: Vec2,
}

impl SaddlePoint {
    /// Newton-polish `guess` to a zero of `f` and classify it.
    pub fn polish(field: &PlanarField, guess: Vec2) -> Result<Self> {
        let mut x = guess;
        for _ in 0..NEWTON_MAX_ITER {
            let fx = field.velocity(x);
            if fx.norm() <= 1e-14 {
                break;
            }
            let step = field.jacobian(x).lu().solve(&fx).ok_or(Error::SaddleNotConverged)?;
            x -= step;
            if !(x.x.is_finite() && x.y.is_finite()) {
                return Err(Error::SaddleNotConverged);
            }
            if step.norm() <= 1e-15 * (1.0 + x.norm()) {
                break;
            }
        }
        Self::at(field, x)
    }

    /// Classify an (already accurate) fixed point.
    pub fn at(field: &PlanarField, location: Vec2) -> Result<Self> {
        if field.velocity(location).norm() > FIXED_POINT_TOL {
            return Err(Error::SaddleNotConverged);
        }
        let a = field.jacobian(location);
        let tr = a.trace();
        let det = a.determinant();
        let disc = 0.25 * tr * tr - det;
        if det >= 0.0 || disc <= 0.0 {
            let (l1, l2) =
                if disc >= 0.0 { (0.5 * tr + disc.sqrt(), 0.5 * tr - disc.sqrt()) } else { (0.5 * tr, 0.5 * tr) };
            return Err(Error::NotASaddle { x: location.x, y: location.y, lambda1: l1, lambda2: l2 });
        }
        let root = disc.sqrt();
        // Take the larger-magnitude root directly, the other from the determinant.
        let (lambda_unstable, lambda_stable) = if tr >= 0.0 {
            let lu = 0.5 * tr + root;
            (lu, det / lu)
        } else {
            let ls = 0.5 * tr - root;
            (det / ls, ls)
        };
        let v_unstable = eigenvector(&a, lambda_unstable);
        let v_stable = eigenvector(&a, lambda_stable);
        for (l, v) in [(lambda_unstable, v_unstable), (lambda_stable, v_stable)] {
            if (a * v - l * v).norm() > EIGEN_TOL * (1.0 + l.abs()) {
                return Err(Error::NotASaddle {
                    x: location.x,
                    y: location.y,
                    lambda1: lambda_unstable,
                    lambda2: lambda_stable,
                });
            }
        }
        Ok(Self { location, lambda_unstable, lambda_stable, v_unstable, v_stable })
    }
}

/// Unit eigenvector for a real eigenvalue, sign fixed so the dominant
/// component is positive.
fn eigenvector(a: &Mat2, lambda: f64) -> Vec2 {
    let r1 = Vec2::new(a[(0, 1)], lambda - a[(0, 0)]);
    let r2 = Vec2::new(lambda - a[(1, 1)], a[(1, 0)]);
    let mut v = if r1.norm() >= r2.norm() { r1 } else { r2 };
    v /= v.norm();
    let dominant = if v.x.abs() >= v.y.abs() { v.x } else { v.y };
    if dominant < 0.0 {
        v = -v;
    }
    v
}
