//! Planar and spatial geometry kernel.
//!
//! Conventions
//! - Planar polygons are stored counterclockwise; the inside of an edge is on
//!   its left.
//! - An [`Orientation`] stores a rotation as a 3×3 matrix whose rows are the
//!   images of the standard basis vectors. Applying it to a vector `v` gives
//!   `Σ v_i · row_i`, i.e. `Mᵀ v`.
//! - All predicates share one [`Tolerances`] record.

mod lp;
mod polygon;

pub use lp::{largest_homothet_lp, max_clearance_center, maximize_first, HalfSpace3, HomothetFit};
pub use polygon::{convex_hull, convex_hull_indexed, polygon_area, ConvexPolygon};

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation2, UnitQuaternion, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = Vector2<f64>;
pub type Vec3 = Vector3<f64>;

/// Tolerances shared by every predicate in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Planar predicates (distances, collinearity).
    pub geom: f64,
    /// Matrix orthonormality checks.
    pub ortho: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geom: 1e-9,
            ortho: 1e-12,
        }
    }
}

/// Default interior clearance relative to the polygon diameter.
pub const CLEARANCE_FRACTION: f64 = 1e-6;

/// z-component of the planar cross product.
#[inline]
pub fn cross2(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counterclockwise quarter turn.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Proper rotation of 3-space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    rows: Matrix3<f64>,
}

impl Orientation {
    /// Validates `rows` as an orthonormal, positively oriented frame.
    pub fn new(rows: Matrix3<f64>, tol: &Tolerances) -> Result<Self> {
        if rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidOrientation("non-finite entry"));
        }
        let o = Self { rows };
        if o.orthonormality_defect() > tol.ortho {
            return Err(Error::InvalidOrientation("rows are not orthonormal"));
        }
        if (rows.determinant() - 1.0).abs() > tol.ortho {
            return Err(Error::InvalidOrientation("determinant is not +1"));
        }
        Ok(o)
    }

    pub fn identity() -> Self {
        Self {
            rows: Matrix3::identity(),
        }
    }

    /// Rotation by `angle` about the unit `axis` (right-hand rule).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let r = nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
        // apply(v) = rowsᵀ v must equal R v.
        Self {
            rows: r.matrix().transpose(),
        }
    }

    pub fn from_quaternion(q: &UnitQuaternion<f64>) -> Self {
        Self {
            rows: q.to_rotation_matrix().matrix().transpose(),
        }
    }

    pub fn about_z(angle: f64) -> Self {
        Self::from_axis_angle(Vec3::z(), angle)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.rows
    }

    /// Image of the `i`-th standard basis vector.
    pub fn row(&self, i: usize) -> Vec3 {
        self.rows.row(i).transpose()
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.rows.transpose() * v
    }

    pub fn apply_inverse(&self, v: &Vec3) -> Vec3 {
        self.rows * v
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Orientation) -> Orientation {
        Orientation {
            rows: inner.rows * self.rows,
        }
    }

    /// Largest deviation of `rows · rowsᵀ` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        (self.rows * self.rows.transpose() - Matrix3::identity()).amax()
    }

    pub fn determinant(&self) -> f64 {
        self.rows.determinant()
    }
}

/// Closed or open (margin-separated) containment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Containment {
    /// Signed distance to every edge line ≥ −tol.geom.
    Closed,
    /// Signed distance to every edge line ≥ margin.
    Open { margin: f64 },
}

/// A `width × height` rectangle rotated by `angle` about its center. The
/// width runs along `(cos angle, sin angle)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectPlacement {
    pub center: Vec2,
    pub angle: f64,
    pub width: f64,
    pub height: f64,
}

impl RectPlacement {
    pub fn new(center: Vec2, angle: f64, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::DegenerateInput("rectangle sides must be positive"));
        }
        if !(center.x.is_finite() && center.y.is_finite() && angle.is_finite()) {
            return Err(Error::DegenerateInput("non-finite rectangle placement"));
        }
        Ok(Self {
            center,
            angle: normalize_angle(angle),
            width,
            height,
        })
    }

    /// Rectangle with one corner at `origin` and sides `side_w`, `side_h`
    /// (assumed perpendicular).
    pub fn from_corner(origin: Vec2, side_w: Vec2, side_h: Vec2) -> Result<Self> {
        let center = origin + 0.5 * (side_w + side_h);
        Self::new(
            center,
            side_w.y.atan2(side_w.x),
            side_w.norm(),
            side_h.norm(),
        )
    }

    pub fn axes(&self) -> (Vec2, Vec2) {
        let u = Vec2::new(self.angle.cos(), self.angle.sin());
        (u, perp(u))
    }

    /// Corner offsets from the center, counterclockwise.
    pub fn corner_offsets(&self) -> [Vec2; 4] {
        corner_offsets(self.width, self.height, self.angle)
    }

    pub fn corners(&self) -> [Vec2; 4] {
        self.corner_offsets().map(|o| self.center + o)
    }

    /// Same center and angle, sides multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            width: self.width * factor,
            height: self.height * factor,
            ..*self
        }
    }

    pub fn rotated(&self, delta: f64) -> Self {
        Self {
            angle: normalize_angle(self.angle + delta),
            ..*self
        }
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }
}

/// Corner offsets of a `w × h` rectangle at `angle`, counterclockwise.
pub fn corner_offsets(w: f64, h: f64, angle: f64) -> [Vec2; 4] {
    let rot = Rotation2::new(angle);
    [
        Vec2::new(-0.5 * w, -0.5 * h),
        Vec2::new(0.5 * w, -0.5 * h),
        Vec2::new(0.5 * w, 0.5 * h),
        Vec2::new(-0.5 * w, 0.5 * h),
    ]
    .map(|v| rot * v)
}

/// Maps an angle into `[0, π)`; a rectangle is invariant under a half turn.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(PI);
    if a >= PI {
        0.0
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orientation_rows_are_basis_images() {
        let o = Orientation::from_axis_angle(Vec3::z(), PI / 2.0);
        assert_abs_diff_eq!(o.apply(&Vec3::x()), Vec3::y(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.row(0), Vec3::y(), epsilon = 1e-15);
        assert_abs_diff_eq!(o.apply_inverse(&o.apply(&Vec3::new(1.0, 2.0, 3.0))), Vec3::new(1.0, 2.0, 3.0), epsilon = 1e-14);
    }

    #[test]
    fn compose_applies_inner_first() {
        let a = Orientation::from_axis_angle(Vec3::x(), 0.3);
        let b = Orientation::from_axis_angle(Vec3::y(), -1.1);
        let v = Vec3::new(0.2, -0.7, 1.3);
        assert_abs_diff_eq!(a.compose(&b).apply(&v), a.apply(&b.apply(&v)), epsilon = 1e-14);
    }

    #[test]
    fn rejects_reflections_and_skew() {
        let tol = Tolerances::default();
        let refl = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(Orientation::new(refl, &tol).is_err());
        let mut skew = Matrix3::identity();
        skew[(0, 1)] = 1e-6;
        assert!(Orientation::new(skew, &tol).is_err());
        assert!(Orientation::new(Matrix3::identity(), &tol).is_ok());
    }

    #[test]
    fn angle_normalization() {
        assert_abs_diff_eq!(normalize_angle(PI + 0.25), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(normalize_angle(-0.25), PI - 0.25, epsilon = 1e-15);
        assert_eq!(normalize_angle(PI), 0.0);
    }

    #[test]
    fn rect_from_corner_roundtrip() {
        let r = RectPlacement::from_corner(Vec2::new(1.0, 1.0), Vec2::new(2.0, 0.0), Vec2::new(0.0, 3.0)).unwrap();
        assert_abs_diff_eq!(r.center, Vec2::new(2.0, 2.5), epsilon = 1e-15);
        assert_abs_diff_eq!(r.width, 2.0);
        assert_abs_diff_eq!(r.height, 3.0);
        let mut cs = r.corners().to_vec();
        cs.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        assert_abs_diff_eq!(cs[0], Vec2::new(1.0, 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(cs[3], Vec2::new(3.0, 4.0), epsilon = 1e-15);
    }

    #[test]
    fn rect_rejects_nonpositive_sides() {
        assert!(RectPlacement::new(Vec2::zeros(), 0.0, 0.0, 1.0).is_err());
        assert!(RectPlacement::new(Vec2::zeros(), 0.0, 1.0, -1.0).is_err());
    }
}
