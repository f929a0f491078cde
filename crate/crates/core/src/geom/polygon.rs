use serde::{Deserialize, Serialize};

use super::{cross2, perp, Containment, RectPlacement, Tolerances, Vec2};
use crate::error::{Error, Result};

/// Strictly convex polygon, vertices counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Validates counterclockwise order, convexity and distinct vertices.
    pub fn new(vertices: Vec<Vec2>, tol: &Tolerances) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::DegenerateInput("polygon needs at least 3 vertices"));
        }
        if vertices.iter().any(|v| !(v.x.is_finite() && v.y.is_finite())) {
            return Err(Error::DegenerateInput("non-finite vertex"));
        }
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).norm() <= tol.geom {
                return Err(Error::DegenerateInput("repeated vertex"));
            }
            if cross2(b - a, c - b) <= -tol.geom {
                return Err(Error::DegenerateInput("vertices are not convex counterclockwise"));
            }
        }
        let poly = Self { vertices };
        if poly.area() <= tol.geom * tol.geom {
            return Err(Error::DegenerateInput("polygon has no area"));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Vec2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Edge from vertex `i` to vertex `i + 1`.
    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertex(i), self.vertex(i + 1))
    }

    /// Inward unit normal `n` and offset `d` of every edge: inside is `n·x ≥ d`.
    pub fn half_planes(&self) -> Vec<(Vec2, f64)> {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                let n = perp(b - a).normalize();
                (n, n.dot(&a))
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        polygon_area(self)
    }

    /// Area centroid.
    pub fn centroid(&self) -> Vec2 {
        let n = self.len();
        let o = self.vertices[0];
        let mut acc = Vec2::zeros();
        let mut total = 0.0;
        for i in 1..n - 1 {
            let a = self.vertices[i] - o;
            let b = self.vertices[i + 1] - o;
            let w = 0.5 * cross2(a, b);
            acc += w * (a + b) / 3.0;
            total += w;
        }
        o + acc / total
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Interior angle at vertex `i`, in radians.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let v = self.vertex(i);
        let a = self.vertex(i + n - 1) - v;
        let b = self.vertex(i + 1) - v;
        (a.dot(&b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos()
    }

    /// Smallest signed distance from `pt` to an edge line; positive inside.
    pub fn clearance(&self, pt: Vec2) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let e = self.vertices[(i + 1) % n] - a;
                cross2(e, pt - a) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn rect_clearance(&self, rect: &RectPlacement) -> f64 {
        rect.corners()
            .iter()
            .map(|c| self.clearance(*c))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_point(&self, pt: Vec2, mode: Containment, tol: &Tolerances) -> bool {
        let d = self.clearance(pt);
        match mode {
            Containment::Closed => d >= -tol.geom,
            Containment::Open { margin } => d >= margin,
        }
    }

    /// By convexity, containment of a rectangle reduces to its corners.
    pub fn contains_rect(&self, rect: &RectPlacement, mode: Containment, tol: &Tolerances) -> bool {
        rect.corners()
            .iter()
            .all(|c| self.contains_point(*c, mode, tol))
    }

    /// Default margin for open containment.
    pub fn default_margin(&self) -> f64 {
        super::CLEARANCE_FRACTION * self.diameter()
    }

    /// Edge lengths, in vertex order.
    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                (b - a).norm()
            })
            .collect()
    }
}

/// Shoelace area.
pub fn polygon_area(poly: &ConvexPolygon) -> f64 {
    let v = poly.vertices();
    let n = v.len();
    0.5 * (0..n).map(|i| cross2(v[i], v[(i + 1) % n])).sum::<f64>()
}

/// Convex hull of `points`, counterclockwise, collinear and repeated points
/// dropped.
pub fn convex_hull(points: &[Vec2], tol: &Tolerances) -> Result<ConvexPolygon> {
    let (poly, _) = convex_hull_indexed(points, tol)?;
    Ok(poly)
}

/// Like [`convex_hull`], also returning for each hull vertex the index of the
/// input point it came from.
pub fn convex_hull_indexed(points: &[Vec2], tol: &Tolerances) -> Result<(ConvexPolygon, Vec<usize>)> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput("need at least 3 points"));
    }
    if points.iter().any(|p| !(p.x.is_finite() && p.y.is_finite())) {
        return Err(Error::DegenerateInput("non-finite point"));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
            .then(i.cmp(&j))
    });

    // Pop `a` while o → a → b is not a strict left turn: the distance of `a`
    // from the line o–b is at most tol.geom.
    let keep = |o: Vec2, a: Vec2, b: Vec2| cross2(a - o, b - o) > tol.geom * (b - o).norm().max(tol.geom);

    let mut hull: Vec<usize> = Vec::with_capacity(2 * points.len());
    for &i in &order {
        while hull.len() >= 2 && !keep(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in order.iter().rev().skip(1) {
        while hull.len() >= lower_len && !keep(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();

    // Coincident first/last survivors (all points nearly equal).
    hull.dedup_by(|a, b| (points[*a] - points[*b]).norm() <= tol.geom);
    while hull.len() > 1 && (points[hull[0]] - points[hull[hull.len() - 1]]).norm() <= tol.geom {
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::DegenerateInput("points are collinear"));
    }
    let verts = hull.iter().map(|&i| points[i]).collect();
    let poly = ConvexPolygon::new(verts, tol).map_err(|_| Error::DegenerateInput("points are collinear"))?;
    Ok((poly, hull))
}
