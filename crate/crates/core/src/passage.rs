//! Explicit straight tunnels through a box.
//!
//! The construction works in the shadow of the box. At a hexagon vertex `A`,
//! the two hexagon sides are projections of two box edges; the third edge
//! from the same corner points into the hexagon. Call its vertical component
//! `p` and the other two `q`, `r`. Laying the inward edge horizontally, the
//! points `B`, `C` on the two sides parallel to it at distance 1 from `A` are
//! perpendicular as seen from `A`, and they sit
//! `q·√((1−p)/(1+p))` and `r·√((1−p)/(1+p))` past the adjacent hexagon
//! vertices. The fourth corner of the square `ABDC` lies on the horizontal
//! through the opposite vertex and is inside the hexagon iff `q + r ≤ 1 + p`,
//! which holds whenever `p` is not the smallest component.
//!
//! For a box `a ≤ b ≤ c` the same square with side `a`, placed at a corner of
//! the `a × b × b` box whose shadow vertex ends a side projected from an
//! `a`-edge, can be stretched to an `a × b` rectangle inside the shadow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    corner_offsets, max_clearance_center, Containment, ConvexPolygon, RectPlacement, Tolerances, Vec2, Vec3,
    CLEARANCE_FRACTION,
};
use crate::nieuwland::{best_lambda_for_direction, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS};
use crate::shadow::{
    orientation_from_direction, project_box, unit_direction, vertical_fiber, BoxDims, Shadow, ShadowKind,
    FACE_PARALLEL_TOL,
};

/// Rotation budgets tried by [`harden_to_interior`], in radians.
const HARDEN_ROTATION_BUDGETS: [f64; 7] = [1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2, 3.2e-2, 6.4e-2];
const HARDEN_STEPS: usize = 8;

/// Square sharing a vertex with a hexagonal shadow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerSquare {
    pub anchor_vertex: usize,
    /// Box edge direction pointing into the hexagon at the anchor.
    pub inward_axis: usize,
    /// Edge directions of the sides `A → B` and `A → C` respectively.
    pub side_axes: [usize; 2],
    /// `(p, q, r)` relabeled: `p` for the inward axis, then the two sides.
    pub pqr: [f64; 3],
    /// Distances `B'B` and `C'C` from the closed form (scaled by the side).
    pub offsets: [f64; 2],
    pub side: f64,
    /// `A, B, D, C` in order around the square.
    pub corners: [Vec2; 4],
    pub placement: RectPlacement,
    pub fits: bool,
    /// `(1 + p) − (q + r)`.
    pub slack: f64,
}

impl CornerSquare {
    pub fn anchor(&self) -> Vec2 {
        self.corners[0]
    }
    pub fn fourth(&self) -> Vec2 {
        self.corners[2]
    }
}

/// Builds the corner square at `vertex_index` of a hexagonal shadow.
///
/// The square side is the shortest box edge; the construction uses the cube
/// of that side sitting in the box corner above the vertex. Only endpoints of
/// sides projected from a shortest edge qualify (every vertex, for a cube).
pub fn corner_square(shadow: &Shadow, vertex_index: usize, tol: &Tolerances) -> Result<CornerSquare> {
    if shadow.kind != ShadowKind::Hexagon {
        return Err(Error::NotHexagon);
    }
    let n = shadow.polygon.len();
    if vertex_index >= n {
        return Err(Error::VertexNotCornerCandidate(vertex_index));
    }
    let r_axis = shadow
        .side_axis(vertex_index + n - 1)
        .ok_or(Error::ConstructionFailed("hexagon side is not a box edge"))?;
    let q_axis = shadow
        .side_axis(vertex_index)
        .ok_or(Error::ConstructionFailed("hexagon side is not a box edge"))?;
    let p_axis = 3 - q_axis - r_axis;
    let dims = shadow.dims.as_array();
    let side = shadow.dims.a;
    let is_short = |axis: usize| dims[axis] <= side * (1.0 + 1e-12);
    if !is_short(q_axis) && !is_short(r_axis) {
        return Err(Error::VertexNotCornerCandidate(vertex_index));
    }

    let k = shadow.vertex_origin[vertex_index];
    let flat = |v: Vec3| Vec2::new(v.x, v.y);
    let e_p = flat(shadow.inward_edge(k, p_axis));
    let e_q = flat(shadow.inward_edge(k, q_axis));
    let [p, q, r] = [p_axis, q_axis, r_axis].map(|i| shadow.pqr[i]);

    let s = (1.0 - p * p).sqrt();
    let x_hat = e_p / s;
    let mut y_hat = crate::geom::perp(x_hat);
    if y_hat.dot(&e_q) < 0.0 {
        y_hat = -y_hat;
    }
    let a = shadow.polygon.vertex(vertex_index);
    let ab = side * ((q / s) * x_hat + (r / s) * y_hat);
    let ac = side * ((r / s) * x_hat - (q / s) * y_hat);
    let b = a + ab;
    let c = a + ac;
    let d = b + ac;
    let shrink = ((1.0 - p) / (1.0 + p)).sqrt();
    let slack = 1.0 + p - (q + r);
    Ok(CornerSquare {
        anchor_vertex: vertex_index,
        inward_axis: p_axis,
        side_axes: [q_axis, r_axis],
        pqr: [p, q, r],
        offsets: [side * q * shrink, side * r * shrink],
        side,
        corners: [a, b, d, c],
        placement: RectPlacement::from_corner(a, ab, ac)?,
        fits: slack >= -tol.geom,
        slack,
    })
}

/// Every corner square of a hexagonal shadow, one per qualifying vertex.
pub fn corner_squares(shadow: &Shadow, tol: &Tolerances) -> Result<Vec<CornerSquare>> {
    if shadow.kind != ShadowKind::Hexagon {
        return Err(Error::NotHexagon);
    }
    let mut out = Vec::new();
    for i in 0..shadow.polygon.len() {
        match corner_square(shadow, i, tol) {
            Ok(sq) => out.push(sq),
            Err(Error::VertexNotCornerCandidate(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn face_parallel(shadow_pqr: &[f64; 3]) -> bool {
    shadow_pqr.iter().any(|&p| p <= FACE_PARALLEL_TOL)
}

fn shadow_for(dims: &BoxDims, direction: &Vec3, tol: &Tolerances) -> Result<Shadow> {
    let u = unit_direction(direction)?;
    let orient = orientation_from_direction(&u, tol)?;
    let shadow = project_box(dims, &orient, tol).map_err(|e| match e {
        Error::AmbiguousClassification { .. } => Error::FaceParallelDirection,
        e => e,
    })?;
    if shadow.kind != ShadowKind::Hexagon || face_parallel(&shadow.pqr) {
        return Err(Error::FaceParallelDirection);
    }
    Ok(shadow)
}

/// The `a × b` rectangle in the closed shadow, before moving it inward.
pub fn face_rectangle_closed(dims: &BoxDims, direction: &Vec3, tol: &Tolerances) -> Result<(Shadow, RectPlacement)> {
    let full = shadow_for(dims, direction, tol)?;
    let scaffold_dims = BoxDims::new(dims.a, dims.b, dims.b)?;
    let scaffold = project_box(&scaffold_dims, &full.orientation, tol).map_err(|_| Error::FaceParallelDirection)?;
    if scaffold.kind != ShadowKind::Hexagon {
        return Err(Error::FaceParallelDirection);
    }

    let mut candidates: Vec<CornerSquare> = corner_squares(&scaffold, tol)?.into_iter().filter(|s| s.fits).collect();
    candidates.sort_by(|x, y| y.slack.total_cmp(&x.slack).then(x.anchor_vertex.cmp(&y.anchor_vertex)));

    let stretch = dims.b / dims.a;
    let sd = scaffold_dims.as_array();
    for sq in &candidates {
        let [a, b, _, c] = sq.corners;
        let (ab, ac) = (b - a, c - a);
        // Stretch the side heading to the side projected from a b-edge.
        let toward_c = sd[sq.side_axes[1]] >= sd[sq.side_axes[0]];
        let tries = if toward_c {
            [(ab, ac * stretch), (ab * stretch, ac)]
        } else {
            [(ab * stretch, ac), (ab, ac * stretch)]
        };
        for (u, v) in tries {
            // Width is the a-side.
            let (w_side, h_side) = if u.norm() <= v.norm() { (u, v) } else { (v, u) };
            let rect = RectPlacement::from_corner(a, w_side, h_side)?;
            if full.polygon.contains_rect(&rect, Containment::Closed, tol) {
                return Ok((full, rect));
            }
        }
    }
    Err(Error::ConstructionFailed("no corner square extends to an a × b rectangle"))
}

/// An `a × b` rectangle strictly inside the shadow of `dims` along
/// `direction`.
pub fn face_rectangle_in_shadow(dims: &BoxDims, direction: &Vec3, tol: &Tolerances) -> Result<RectPlacement> {
    let (full, rect) = face_rectangle_closed(dims, direction, tol)?;
    harden_to_interior(&full.polygon, &rect, tol)
}

/// Moves a rectangle from the closed polygon into its interior with clearance
/// `1e-6 · diameter`, by a small rotation about its center followed by the
/// shift that maximizes edge clearance.
///
/// Rotation budgets start at 1e-3 rad and double up to 6.4e-2 rad. Fails with
/// [`Error::CannotHarden`] when no budget yields the clearance, which happens
/// when the rectangle is at the largest size the polygon admits.
pub fn harden_to_interior(poly: &ConvexPolygon, rect: &RectPlacement, tol: &Tolerances) -> Result<RectPlacement> {
    if !poly.contains_rect(rect, Containment::Closed, tol) {
        return Err(Error::DoesNotFit);
    }
    let eps = poly.default_margin();
    if poly.rect_clearance(rect) >= eps {
        return Ok(*rect);
    }
    for budget in HARDEN_ROTATION_BUDGETS {
        let mut best: Option<(f64, RectPlacement)> = None;
        for step in 0..=HARDEN_STEPS {
            let delta = budget * step as f64 / HARDEN_STEPS as f64;
            for d in [delta, -delta] {
                let angle = rect.angle + d;
                let offs = corner_offsets(rect.width, rect.height, angle);
                let Some((clear, center)) = max_clearance_center(poly, &offs) else {
                    continue;
                };
                if best.as_ref().is_none_or(|(c, _)| clear > *c) {
                    best = Some((clear, RectPlacement::new(center, angle, rect.width, rect.height)?));
                }
                if step == 0 {
                    break;
                }
            }
        }
        if let Some((_, cand)) = best {
            if poly.contains_rect(&cand, Containment::Open { margin: eps }, tol) {
                return Ok(cand);
            }
        }
    }
    Err(Error::CannotHarden)
}

/// A straight tunnel: the prism over `cross_section` along `direction`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageSpec {
    pub dims: BoxDims,
    pub lambda: f64,
    pub direction: Vec3,
    /// Placement in the shadow plane of `orientation_from_direction(direction)`.
    pub cross_section: RectPlacement,
    /// Smallest distance from a cross-section corner to the shadow boundary.
    pub clearance: f64,
}

impl PassageSpec {
    /// Re-projects the box and checks open containment with margin
    /// `clearance_floor`.
    pub fn verify(&self, clearance_floor: f64, tol: &Tolerances) -> bool {
        let Ok(shadow) = shadow_for(&self.dims, &self.direction, tol) else {
            return false;
        };
        shadow
            .polygon
            .contains_rect(&self.cross_section, Containment::Open { margin: clearance_floor }, tol)
    }

    /// Cross-section corners as points in box coordinates, each the midpoint
    /// of the tunnel edge line's chord through the box. The tunnel edges are
    /// the lines through these points along `direction`.
    pub fn tunnel_edge_points(&self, tol: &Tolerances) -> Result<[Vec3; 4]> {
        let orient = orientation_from_direction(&self.direction, tol)?;
        let mut out = [Vec3::zeros(); 4];
        for (slot, c) in out.iter_mut().zip(self.cross_section.corners()) {
            let (t0, t1) = vertical_fiber(&self.dims, &orient, c).ok_or(Error::LiftDegenerate)?;
            *slot = orient.apply_inverse(&Vec3::new(c.x, c.y, 0.5 * (t0 + t1)));
        }
        Ok(out)
    }
}

/// Tunnel through `dims` along `direction` wide enough for `lambda · dims`.
pub fn build_passage(dims: &BoxDims, direction: &Vec3, lambda: f64, tol: &Tolerances) -> Result<PassageSpec> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig("lambda must be positive"));
    }
    let u = unit_direction(direction)?;
    let shadow = shadow_for(dims, &u, tol)?;
    let eps = shadow.polygon.default_margin();
    let rect = if lambda <= 1.0 {
        face_rectangle_in_shadow(dims, &u, tol)?.scaled(lambda)
    } else {
        let best = best_lambda_for_direction(dims, &u, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS, tol)?;
        if best.lambda <= lambda {
            return Err(Error::DoesNotFit);
        }
        let at_lambda = best.placement.scaled(lambda / best.lambda);
        harden_to_interior(&shadow.polygon, &at_lambda, tol).map_err(|_| Error::DoesNotFit)?
    };
    if !shadow.polygon.contains_rect(&rect, Containment::Open { margin: eps }, tol) {
        return Err(Error::DoesNotFit);
    }
    Ok(PassageSpec {
        dims: *dims,
        lambda,
        direction: u,
        cross_section: rect,
        clearance: shadow.polygon.rect_clearance(&rect),
    })
}

/// Margin used for passage re-verification, relative to the shadow diameter.
pub fn passage_margin(shadow: &Shadow) -> f64 {
    CLEARANCE_FRACTION * shadow.polygon.diameter()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadow::shadow_along;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn diag() -> Vec3 {
        Vec3::new(1.0, 1.0, 1.0).normalize()
    }

    fn cube_diag_shadow() -> Shadow {
        shadow_along(&BoxDims::cube(1.0).unwrap(), &diag(), &tol()).unwrap()
    }

    #[test]
    fn regular_hexagon_corner_square() {
        let s = cube_diag_shadow();
        let t3 = 1.0 / 3f64.sqrt();
        let expected = t3 * ((1.0 - t3) / (1.0 + t3)).sqrt();
        assert_abs_diff_eq!(expected, 0.29886, epsilon = 1e-5);
        for i in 0..6 {
            let sq = corner_square(&s, i, &tol()).unwrap();
            assert!(sq.fits);
            assert_abs_diff_eq!(sq.offsets[0], expected, epsilon = 1e-12);
            assert_abs_diff_eq!(sq.offsets[1], expected, epsilon = 1e-12);
            assert!(s.polygon.contains_point(sq.fourth(), Containment::Closed, &tol()));
            // Unit square.
            assert_abs_diff_eq!(sq.placement.width, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(sq.placement.height, 1.0, epsilon = 1e-12);
            assert!(s.polygon.contains_rect(&sq.placement, Containment::Closed, &tol()));
        }
    }

    #[test]
    fn corner_square_needs_hexagon() {
        let s = project_box(&BoxDims::cube(1.0).unwrap(), &crate::geom::Orientation::identity(), &tol()).unwrap();
        assert_eq!(corner_square(&s, 0, &tol()).unwrap_err(), Error::NotHexagon);
    }

    #[test]
    fn non_candidate_vertex_rejected() {
        // For a, b, b only the endpoints of the two a-sides qualify.
        let dims = BoxDims::new(1.0, 2.0, 2.0).unwrap();
        let s = shadow_along(&dims, &Vec3::new(0.3, 0.5, 0.9), &tol()).unwrap();
        let ok = (0..6).filter(|&i| corner_square(&s, i, &tol()).is_ok()).count();
        assert_eq!(ok, 4);
        let bad = (0..6).find(|&i| corner_square(&s, i, &tol()).is_err()).unwrap();
        assert_eq!(corner_square(&s, bad, &tol()).unwrap_err(), Error::VertexNotCornerCandidate(bad));
    }

    #[test]
    fn largest_component_vertex_fits() {
        let s = shadow_along(&BoxDims::cube(1.0).unwrap(), &Vec3::new(0.2, 0.45, 0.87), &tol()).unwrap();
        let pmax = s.pqr.iter().cloned().fold(0.0, f64::max);
        for i in 0..6 {
            let sq = corner_square(&s, i, &tol()).unwrap();
            if sq.pqr[0] == pmax {
                assert!(sq.fits);
            }
        }
    }

    #[test]
    fn unit_square_in_diagonal_shadow() {
        let r = face_rectangle_in_shadow(&BoxDims::cube(1.0).unwrap(), &diag(), &tol()).unwrap();
        let s = cube_diag_shadow();
        let eps = s.polygon.default_margin();
        assert!(s.polygon.contains_rect(&r, Containment::Open { margin: eps }, &tol()));
        assert_abs_diff_eq!(r.width, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.height, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn face_parallel_rejected() {
        let e = face_rectangle_in_shadow(&BoxDims::cube(1.0).unwrap(), &Vec3::z(), &tol()).unwrap_err();
        assert_eq!(e, Error::FaceParallelDirection);
        let e = build_passage(&BoxDims::cube(1.0).unwrap(), &Vec3::z(), 1.0, &tol()).unwrap_err();
        assert_eq!(e, Error::FaceParallelDirection);
    }

    #[test]
    fn harden_examples() {
        let t = tol();
        let sq = ConvexPolygon::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)],
            &t,
        )
        .unwrap();
        let small = RectPlacement::new(Vec2::new(0.5, 0.5), 0.0, 0.5, 0.5).unwrap();
        assert_eq!(harden_to_interior(&sq, &small, &t).unwrap(), small);
        let full = RectPlacement::new(Vec2::new(0.5, 0.5), 0.0, 1.0, 1.0).unwrap();
        assert_eq!(harden_to_interior(&sq, &full, &t).unwrap_err(), Error::CannotHarden);
    }

    #[test]
    fn harden_face_rectangle_placement() {
        let dims = BoxDims::new(1.0, 2.0, 3.0).unwrap();
        let dir = Vec3::new(0.3, 0.5, 0.9).normalize();
        let (full, closed) = face_rectangle_closed(&dims, &dir, &tol()).unwrap();
        let open = harden_to_interior(&full.polygon, &closed, &tol()).unwrap();
        assert!(full.polygon.rect_clearance(&open) >= 1e-6 * full.polygon.diameter());
        assert_abs_diff_eq!(open.width, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(open.height, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn classical_passage_at_1_06() {
        let dir = Vec3::new(2.0, 2.0, 1.0) / 3.0;
        let tunnel = build_passage(&BoxDims::cube(1.0).unwrap(), &dir, 1.06, &tol()).unwrap();
        assert_abs_diff_eq!(tunnel.cross_section.width, 1.06, epsilon = 1e-12);
        assert!(tunnel.verify(1e-6 * 1.0, &tol()));
        assert!(build_passage(&BoxDims::cube(1.0).unwrap(), &dir, 1.07, &tol()).is_err());
    }

    #[test]
    fn tunnel_edges_lie_in_box() {
        let tunnel = build_passage(&BoxDims::new(1.0, 2.0, 3.0).unwrap(), &Vec3::new(0.3, 0.5, 0.9), 1.0, &tol()).unwrap();
        for p in tunnel.tunnel_edge_points(&tol()).unwrap() {
            assert!(p.x.abs() < 0.5 && p.y.abs() < 1.0 && p.z.abs() < 1.5);
        }
    }
}
