//! Perpendicular projection of an oriented box onto the horizontal plane.
//!
//! The box is centered at the origin with its edges along the rows of an
//! [`Orientation`]. Projecting along the vertical axis gives a centrally
//! symmetric polygon: a hexagon for generic orientations, a rectangle when the
//! vertical is parallel to a face.
//!
//! For a unit edge direction the vertical component `p` satisfies two facts
//! used throughout the crate: the face perpendicular to it casts a shadow of
//! area `p` times its own area, and the three components of an orthonormal
//! frame satisfy `p² + q² + r² = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{convex_hull_indexed, ConvexPolygon, Orientation, Tolerances, Vec2, Vec3};

/// Directions with a vertical edge component this close to 0 are treated as
/// face-parallel.
pub const FACE_PARALLEL_TOL: f64 = 1e-7;

/// Side lengths `a ≤ b ≤ c` of a rectangular box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDims {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BoxDims {
    /// Requires `0 < a ≤ b ≤ c`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let ok = [a, b, c].iter().all(|v| v.is_finite() && *v > 0.0) && a <= b && b <= c;
        if !ok {
            return Err(Error::InvalidDims([a, b, c]));
        }
        Ok(Self { a, b, c })
    }

    /// Sorts three positive side lengths.
    pub fn sorted(x: f64, y: f64, z: f64) -> Result<Self> {
        let mut s = [x, y, z];
        if s.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidDims(s));
        }
        s.sort_by(f64::total_cmp);
        Self::new(s[0], s[1], s[2])
    }

    pub fn cube(side: f64) -> Result<Self> {
        Self::new(side, side, side)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.a * k, self.b * k, self.c * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShadowKind {
    Hexagon,
    Rectangle,
}

/// Projection of an oriented box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Shadow {
    pub dims: BoxDims,
    pub orientation: Orientation,
    pub polygon: ConvexPolygon,
    pub kind: ShadowKind,
    /// Absolute vertical components of the three unit edge directions,
    /// paired with `(a, b, c)`.
    pub pqr: [f64; 3],
    pub vertical_extent: f64,
    /// For each polygon vertex, the box corner projecting onto it. Bit `i`
    /// of the corner index set means `+dims[i]/2` along edge direction `i`.
    pub vertex_origin: Vec<usize>,
}

impl Shadow {
    /// Corner `k` of the box, in the rotated frame.
    pub fn box_corner(&self, k: usize) -> Vec3 {
        box_corner(&self.dims, &self.orientation, k)
    }

    /// Box edge direction (0, 1 or 2) that side `i → i+1` is a projection of.
    pub fn side_axis(&self, i: usize) -> Option<usize> {
        let n = self.vertex_origin.len();
        let diff = self.vertex_origin[i % n] ^ self.vertex_origin[(i + 1) % n];
        match diff {
            1 => Some(0),
            2 => Some(1),
            4 => Some(2),
            _ => None,
        }
    }

    /// Unit edge direction `axis` pointing from corner `k` into the box.
    pub fn inward_edge(&self, k: usize, axis: usize) -> Vec3 {
        let sign = if k & (1 << axis) != 0 { -1.0 } else { 1.0 };
        sign * self.orientation.row(axis)
    }

    pub fn area(&self) -> f64 {
        self.polygon.area()
    }
}

fn box_corner(dims: &BoxDims, orient: &Orientation, k: usize) -> Vec3 {
    let d = dims.as_array();
    let mut v = Vec3::zeros();
    for (i, side) in d.iter().enumerate() {
        let s = if k & (1 << i) != 0 { 0.5 } else { -0.5 };
        v += s * side * orient.row(i);
    }
    v
}

/// Rotation carrying the unit vector `u` to `(0, 0, 1)`.
///
/// The frame is completed with the standard basis vector least aligned with
/// `u` (lowest index on ties), so `(0, 0, -1)` maps by a half turn about x.
pub fn orientation_from_direction(u: &Vec3, tol: &Tolerances) -> Result<Orientation> {
    if !(u.x.is_finite() && u.y.is_finite() && u.z.is_finite()) {
        return Err(Error::InvalidDirection("non-finite component"));
    }
    if (u.norm() - 1.0).abs() > tol.ortho.max(1e-12) {
        return Err(Error::InvalidDirection("direction is not unit length"));
    }
    let k = (0..3)
        .min_by(|&i, &j| u[i].abs().total_cmp(&u[j].abs()).then(i.cmp(&j)))
        .unwrap_or(0);
    let mut e = Vec3::zeros();
    e[k] = 1.0;
    let x = (e - e.dot(u) * u).normalize();
    let y = u.cross(&x);
    // The map v ↦ (x·v, y·v, u·v) has matrix T with rows x, y, u; apply() is
    // Mᵀ v, so M = Tᵀ.
    let t = nalgebra::Matrix3::from_rows(&[x.transpose(), y.transpose(), u.transpose()]);
    let relaxed = Tolerances {
        ortho: tol.ortho.max(1e-12) * 10.0,
        ..*tol
    };
    Orientation::new(t.transpose(), &relaxed)
}

/// Normalizes a nonzero direction.
pub fn unit_direction(v: &Vec3) -> Result<Vec3> {
    let n = v.norm();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidDirection("zero or non-finite direction"));
    }
    Ok(v / n)
}

/// Absolute third coordinates of the three rows of `orient`.
pub fn normal_sum_check(orient: &Orientation) -> [f64; 3] {
    [0, 1, 2].map(|i| orient.row(i).z.abs())
}

/// Projects the box onto the horizontal plane and classifies the shadow.
pub fn project_box(dims: &BoxDims, orient: &Orientation, tol: &Tolerances) -> Result<Shadow> {
    let corners: Vec<Vec3> = (0..8).map(|k| box_corner(dims, orient, k)).collect();
    let flat: Vec<Vec2> = corners.iter().map(|v| Vec2::new(v.x, v.y)).collect();
    let (polygon, origin) = convex_hull_indexed(&flat, tol)?;
    let pqr = normal_sum_check(orient);
    let (zmin, zmax) = corners
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.z), hi.max(v.z)));
    let near_parallel = pqr.iter().any(|&p| p <= FACE_PARALLEL_TOL);
    let kind = match (polygon.len(), near_parallel) {
        (4, true) => ShadowKind::Rectangle,
        (6, false) => ShadowKind::Hexagon,
        (n, _) => return Err(Error::AmbiguousClassification { vertices: n }),
    };
    Ok(Shadow {
        dims: *dims,
        orientation: *orient,
        polygon,
        kind,
        pqr,
        vertical_extent: zmax - zmin,
        vertex_origin: origin,
    })
}

/// Shadow of the box viewed along `direction` (any nonzero vector).
pub fn shadow_along(dims: &BoxDims, direction: &Vec3, tol: &Tolerances) -> Result<Shadow> {
    let u = unit_direction(direction)?;
    let orient = orientation_from_direction(&u, tol)?;
    project_box(dims, &orient, tol)
}

/// `(area, vertical extent)` of the unit cube's shadow; the two agree.
pub fn cube_area_extent_identity(orient: &Orientation, tol: &Tolerances) -> Result<(f64, f64)> {
    let s = project_box(&BoxDims::cube(1.0)?, orient, tol)?;
    Ok((s.area(), s.vertical_extent))
}

/// Vertical interval `[t0, t1]` of the box above the planar point `pt`, or
/// `None` if the vertical line misses the closed box.
pub fn vertical_fiber(dims: &BoxDims, orient: &Orientation, pt: Vec2) -> Option<(f64, f64)> {
    let half = dims.as_array().map(|s| 0.5 * s);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (i, h) in half.iter().enumerate() {
        // |row·(pt, t)| ≤ h  ⇔  −h ≤ base + t·slope ≤ h.
        let row = orient.row(i);
        let base = row.x * pt.x + row.y * pt.y;
        let slope = row.z;
        if slope.abs() < 1e-300 {
            if base.abs() > *h {
                return None;
            }
            continue;
        }
        let t0 = (-h - base) / slope;
        let t1 = (h - base) / slope;
        lo = lo.max(t0.min(t1));
        hi = hi.min(t0.max(t1));
    }
    (lo <= hi).then_some((lo, hi))
}
