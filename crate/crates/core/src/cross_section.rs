//! Rectangles in planar cross-sections of rectangular tubes.
//!
//! A plane tilted by `α` against the base of a vertical tube over a rectangle
//! `R` cuts the tube in a parallelogram. Folding that plane flat about its
//! horizontal line turns it into the image of `R` under
//! `(x, y) ↦ (x, y / cos α)`, and the parallelogram always contains a copy of
//! `R`:
//!
//! - label the corners of `R` 1..4 by height, so 2–3 is a diagonal; the
//!   stretched parallelogram is obtuse at 2* and 3*;
//! - if both parts of the angle at 2* cut by the diagonal 2*3* are at least
//!   the matching angles of `R` at 2, the copy of `R` centered with a diagonal
//!   on 2*3* fits;
//! - otherwise the side 2*X* on the narrowed side is longer than 2X, and the
//!   copy with a corner at 2* and a side along 2*X* fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    cross2, perp, Containment, ConvexPolygon, RectPlacement, Tolerances, Vec2, Vec3,
};
use crate::nieuwland::{best_lambda_for_direction, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS};
use crate::shadow::{orientation_from_direction, unit_direction, vertical_fiber, BoxDims};

/// Largest fold angle accepted, just short of a vertical plane.
const MAX_FOLD: f64 = std::f64::consts::FRAC_PI_2 - 1e-9;

/// Fold image of a tube base, corners labeled 1..4 by preimage height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldedParallelogram {
    /// Corners `1*, 2*, 3*, 4*`.
    pub vertices: [Vec2; 4],
    pub alpha: f64,
}

impl FoldedParallelogram {
    /// Preimage corners `1..4` in the base plane.
    pub fn preimage(&self) -> [Vec2; 4] {
        let c = self.alpha.cos();
        self.vertices.map(|v| Vec2::new(v.x, v.y * c))
    }

    /// Counterclockwise polygon `1*, 2*, 4*, 3*` (or its reverse).
    pub fn polygon(&self, tol: &Tolerances) -> Result<ConvexPolygon> {
        let [v1, v2, v3, v4] = self.vertices;
        let mut cyc = vec![v1, v2, v4, v3];
        let signed: f64 = (0..4).map(|i| cross2(cyc[i], cyc[(i + 1) % 4])).sum();
        if signed < 0.0 {
            cyc.reverse();
        }
        ConvexPolygon::new(cyc, tol)
    }

    /// Interior angle at corner `k` (1-based).
    pub fn angle_at(&self, k: usize) -> f64 {
        let [v1, v2, v3, v4] = self.vertices;
        let (at, a, b) = match k {
            1 => (v1, v2, v3),
            2 => (v2, v1, v4),
            3 => (v3, v1, v4),
            _ => (v4, v2, v3),
        };
        angle_between(a - at, b - at)
    }
}

fn angle_between(a: Vec2, b: Vec2) -> f64 {
    cross2(a, b).abs().atan2(a.dot(&b))
}

fn label_by_height(corners: [Vec2; 4]) -> [Vec2; 4] {
    let mut c = corners;
    c.sort_by(|p, q| p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x)));
    c
}

/// Rotates the `w × h` base (centered at the origin) by `axis_angle` relative
/// to the fold axis, then stretches it by `1 / cos α` across the axis.
pub fn fold_cross_section(base: (f64, f64), alpha: f64, axis_angle: f64) -> Result<FoldedParallelogram> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidConfig("fold angle must be non-negative"));
    }
    if alpha >= MAX_FOLD {
        return Err(Error::SteepPlane(alpha));
    }
    let rect = RectPlacement::new(Vec2::zeros(), axis_angle, base.0, base.1)?;
    let pre = label_by_height(rect.corners());
    let k = 1.0 / alpha.cos();
    Ok(FoldedParallelogram {
        vertices: pre.map(|v| Vec2::new(v.x, v.y * k)),
        alpha,
    })
}

/// Which construction [`rect_in_parallelogram`] used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FoldCase {
    /// α = 0: the parallelogram is the base itself.
    Flat,
    /// Centered copy with a diagonal on 2*3*.
    Diagonal,
    /// Copy with a corner at 2* and a side along a side of the parallelogram.
    Corner,
}

/// Base rectangle placed inside a folded cross-section.
pub fn rect_in_parallelogram(p: &FoldedParallelogram, base: (f64, f64), tol: &Tolerances) -> Result<(RectPlacement, FoldCase)> {
    let (a, b) = base;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidConfig("base sides must be positive"));
    }
    let pre = p.preimage();
    let [r1, r2, r3, r4] = pre;
    let (l21, l24) = ((r1 - r2).norm(), (r4 - r2).norm());
    let scale = a.max(b);
    let same_sides = {
        let (s, t) = if l21 <= l24 { (l21, l24) } else { (l24, l21) };
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        (s - x).abs() <= tol.geom * scale && (t - y).abs() <= tol.geom * scale
    };
    let right_angle = (r1 - r2).dot(&(r4 - r2)).abs() <= tol.geom * scale * scale;
    let poly = p.polygon(tol).map_err(|_| Error::NotACrossSection)?;
    if !same_sides || !right_angle || !dist_ok(&poly, a.min(b), a.max(b), tol) {
        return Err(Error::NotACrossSection);
    }

    let [s1, s2, s3, s4] = p.vertices;
    let (placement, case) = if p.alpha == 0.0 {
        (RectPlacement::from_corner(r2, r1 - r2, r4 - r2)?, FoldCase::Flat)
    } else {
        let (t1, t4) = (angle_between(r1 - r2, r3 - r2), angle_between(r4 - r2, r3 - r2));
        let (u1, u4) = (angle_between(s1 - s2, s3 - s2), angle_between(s4 - s2, s3 - s2));
        if u1 >= t1 && u4 >= t4 {
            // Copy of the base centered on the parallelogram, its 2–3
            // diagonal along 2*3*, turned so its angles at the 2* end match.
            let d = (s2 - s3).normalize();
            let half_diag = 0.5 * (r2 - r3).norm();
            let c2 = 0.5 * (s2 + s3) + half_diag * d;
            let toward1 = if cross2(-d, s1 - s2) > 0.0 { 1.0 } else { -1.0 };
            let rot = |v: Vec2, phi: f64| Vec2::new(phi.cos() * v.x - phi.sin() * v.y, phi.sin() * v.x + phi.cos() * v.y);
            let side1 = l21 * rot(-d, toward1 * t1);
            let side4 = l24 * rot(-d, -toward1 * t4);
            (RectPlacement::from_corner(c2, side1, side4)?, FoldCase::Diagonal)
        } else {
            // The narrowed side at 2* is the long one.
            let (sx, sy, lx, ly) = if u4 < t4 { (s4, s1, l24, l21) } else { (s1, s4, l21, l24) };
            let e = (sx - s2).normalize();
            let mut n = perp(e);
            if n.dot(&(sy - s2)) < 0.0 {
                n = -n;
            }
            (RectPlacement::from_corner(s2, lx * e, ly * n)?, FoldCase::Corner)
        }
    };
    if !poly.contains_rect(&placement, Containment::Closed, tol) {
        return Err(Error::ConstructionFailed("cross-section rectangle left the parallelogram"));
    }
    Ok((placement, case))
}

/// Opposite sides of the parallelogram are at least `short` and `long` apart.
fn dist_ok(poly: &ConvexPolygon, short: f64, long: f64, tol: &Tolerances) -> bool {
    let v = poly.vertices();
    let width = |i: usize| {
        let a = v[i];
        let e = (v[(i + 1) % 4] - a).normalize();
        cross2(e, v[(i + 2) % 4] - a).abs()
    };
    let (w0, w1) = (width(0), width(1));
    let (lo, hi) = if w0 <= w1 { (w0, w1) } else { (w1, w0) };
    let slack = tol.geom * long;
    lo >= short - slack && hi >= long - slack
}

/// Four coplanar points forming a parallelogram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarQuad3D {
    pub points: [Vec3; 4],
}

impl PlanarQuad3D {
    /// Midpoint mismatch of the diagonals and distance of the fourth point
    /// from the plane of the first three.
    pub fn defects(&self) -> (f64, f64) {
        let [p0, p1, p2, p3] = self.points;
        let mid = ((p0 + p2) - (p1 + p3)).norm() * 0.5;
        let n = (p1 - p0).cross(&(p3 - p0)).normalize();
        (mid, n.dot(&(p2 - p0)).abs())
    }
}

/// Rectangle inside the box certifying that `λ·dims` can pass along
/// `direction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Witness {
    pub quad: PlanarQuad3D,
    /// Rectangle corners in box coordinates, in order.
    pub rect: [Vec3; 4],
    /// Centered rectangle in the shadow plane.
    pub shadow_rect: RectPlacement,
    pub fold_case: FoldCase,
}

/// Builds a `λa × λb` rectangle strictly inside the box from a centered
/// rectangle in its shadow: lift two adjacent corners to the middle of their
/// vertical fibers, reflect both through the box center, and place the
/// rectangle in the resulting parallelogram, which projects onto the shadow
/// rectangle.
pub fn theorem2_witness(dims: &BoxDims, lambda: f64, direction: &Vec3, tol: &Tolerances) -> Result<Theorem2Witness> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig("lambda must be positive"));
    }
    let u = unit_direction(direction)?;
    let orient = orientation_from_direction(&u, tol)?;
    let fit = best_lambda_for_direction(dims, &u, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS, tol).map_err(|e| match e {
        Error::FaceParallelDirection => Error::LiftDegenerate,
        e => e,
    })?;
    // Shadows are centrally symmetric, so the centered rectangle fits as soon
    // as any translate does.
    if !(fit.lambda > lambda) {
        return Err(Error::DoesNotFit);
    }
    let shadow_rect = RectPlacement::new(Vec2::zeros(), fit.angle, lambda * dims.a, lambda * dims.b)?;
    let corners = shadow_rect.corners();
    let lift = |pt: Vec2| -> Result<Vec3> {
        let (t0, t1) = vertical_fiber(dims, &orient, pt).ok_or(Error::DoesNotFit)?;
        if t1 - t0 <= tol.geom * dims.a {
            return Err(Error::LiftDegenerate);
        }
        Ok(Vec3::new(pt.x, pt.y, 0.5 * (t0 + t1)))
    };
    let u_star = lift(corners[0])?;
    let v_star = lift(corners[1])?;
    let quad_world = [u_star, v_star, -u_star, -v_star];

    let (rect_world, fold_case) = rect_in_plane(&quad_world, &shadow_rect, tol)?;
    let to_box = |p: &Vec3| orient.apply_inverse(p);
    Ok(Theorem2Witness {
        quad: PlanarQuad3D {
            points: quad_world.map(|p| to_box(&p)),
        },
        rect: rect_world.map(|p| to_box(&p)),
        shadow_rect,
        fold_case,
    })
}

/// Folds the plane through the origin containing `quad` onto the horizontal
/// plane, places the shadow rectangle in it, and unfolds the result.
fn rect_in_plane(quad: &[Vec3; 4], shadow_rect: &RectPlacement, tol: &Tolerances) -> Result<([Vec3; 4], FoldCase)> {
    let mut normal = quad[0].cross(&quad[1]).normalize();
    if normal.z < 0.0 {
        normal = -normal;
    }
    let cos_alpha = normal.z.clamp(-1.0, 1.0);
    let alpha = cos_alpha.acos();
    let horiz = Vec2::new(normal.x, normal.y);
    // Fold axis: the horizontal line of the plane.
    let axis = if horiz.norm() <= 1e-15 { Vec2::x() } else { perp(horiz).normalize() };
    let axis3 = Vec3::new(axis.x, axis.y, 0.0);
    let across = perp(axis);
    // In-plane unit vector perpendicular to the axis, projecting onto `across`.
    let mut up = normal.cross(&axis3).normalize();
    if up.x * across.x + up.y * across.y < 0.0 {
        up = -up;
    }
    let axis_angle = axis.y.atan2(axis.x);
    let folded = fold_cross_section((shadow_rect.width, shadow_rect.height), alpha, shadow_rect.angle - axis_angle)?;
    let (placement, case) = rect_in_parallelogram(&folded, (shadow_rect.width, shadow_rect.height), tol)?;
    let rect = placement.corners().map(|c| c.x * axis3 + c.y * up);
    Ok((rect, case))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn flat_fold_is_identity() {
        let p = fold_cross_section((1.0, 2.0), 0.0, 0.7).unwrap();
        let (r, case) = rect_in_parallelogram(&p, (1.0, 2.0), &tol()).unwrap();
        assert_eq!(case, FoldCase::Flat);
        assert_abs_diff_eq!(r.width * r.height, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.center, Vec2::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn pi_over_three_doubles_height() {
        let p = fold_cross_section((1.0, 1.0), PI / 3.0, 0.0).unwrap();
        let ys: Vec<f64> = p.vertices.iter().map(|v| v.y).collect();
        assert_abs_diff_eq!(ys[3] - ys[0], 2.0, epsilon = 1e-12);
        let xs: Vec<f64> = p.vertices.iter().map(|v| v.x).collect();
        assert_abs_diff_eq!(xs.iter().cloned().fold(f64::MIN, f64::max), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn obtuse_at_two_and_three() {
        let p = fold_cross_section((1.0, 2.0), 0.7, 0.4).unwrap();
        assert!(p.angle_at(2) > PI / 2.0);
        assert!(p.angle_at(3) > PI / 2.0);
        assert!(p.angle_at(1) < PI / 2.0);
        assert!(p.angle_at(4) < PI / 2.0);
    }

    #[test]
    fn axis_aligned_stretch_holds_unit_square() {
        let p = fold_cross_section((1.0, 1.0), PI / 4.0, 0.0).unwrap();
        let (r, _) = rect_in_parallelogram(&p, (1.0, 1.0), &tol()).unwrap();
        let poly = p.polygon(&tol()).unwrap();
        assert!(poly.contains_rect(&r, Containment::Closed, &tol()));
        assert_abs_diff_eq!(r.width, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn steep_plane_rejected() {
        assert!(matches!(fold_cross_section((1.0, 1.0), PI / 2.0, 0.0), Err(Error::SteepPlane(_))));
    }

    #[test]
    fn foreign_parallelogram_rejected() {
        let p = fold_cross_section((1.0, 2.0), 0.5, 0.3).unwrap();
        assert_eq!(rect_in_parallelogram(&p, (1.0, 3.0), &tol()).unwrap_err(), Error::NotACrossSection);
    }

    #[test]
    fn cube_diagonal_witness() {
        let dims = BoxDims::cube(1.0).unwrap();
        let w = theorem2_witness(&dims, 1.0, &Vec3::new(1.0, 1.0, 1.0), &tol()).unwrap();
        for p in w.rect {
            assert!(p.amax() < 0.5);
        }
        assert_abs_diff_eq!((w.rect[1] - w.rect[0]).norm(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!((w.rect[2] - w.rect[1]).norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn half_scale_witness() {
        let dims = BoxDims::cube(1.0).unwrap();
        let w = theorem2_witness(&dims, 0.5, &Vec3::new(0.3, -0.4, 0.8), &tol()).unwrap();
        assert_abs_diff_eq!((w.rect[1] - w.rect[0]).norm(), 0.5, epsilon = 1e-9);
        let (mid, planar) = w.quad.defects();
        assert!(mid < 1e-12 && planar < 1e-12);
    }
}
