//! Three-variable linear programs solved by vertex enumeration.
//!
//! Both programs used by the crate (largest homothet, largest clearance) have
//! one constraint per polygon edge plus at most a handful of bounds, so
//! enumerating every constraint triple is cheap and has no pivoting cases.

use serde::{Deserialize, Serialize};

use super::{corner_offsets, ConvexPolygon, Tolerances, Vec2};
use crate::error::{Error, Result};

/// The constraint `coeffs · x ≥ rhs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpace3 {
    pub coeffs: [f64; 3],
    pub rhs: f64,
}

impl HalfSpace3 {
    pub fn new(coeffs: [f64; 3], rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    #[inline]
    fn slack(&self, x: &[f64; 3]) -> f64 {
        self.coeffs[0] * x[0] + self.coeffs[1] * x[1] + self.coeffs[2] * x[2] - self.rhs
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule; `None` when the rows are (nearly) dependent.
fn solve3(a: &HalfSpace3, b: &HalfSpace3, c: &HalfSpace3) -> Option<[f64; 3]> {
    let m = [a.coeffs, b.coeffs, c.coeffs];
    let d = det3(&m);
    let scale = m.iter().map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt()).product::<f64>();
    if d.abs() <= 1e-12 * scale {
        return None;
    }
    let rhs = [a.rhs, b.rhs, c.rhs];
    let mut x = [0.0; 3];
    for (k, xk) in x.iter_mut().enumerate() {
        let mut mk = m;
        for r in 0..3 {
            mk[r][k] = rhs[r];
        }
        *xk = det3(&mk) / d;
    }
    Some(x)
}

/// Maximizes `x[0]` over `{x : c·x ≥ rhs for all c}`.
///
/// The feasible set must be pointed (constraint normals spanning R³) and the
/// objective bounded above. When the optimum is not unique, the mean of the
/// optimal vertices is returned, which is itself optimal by convexity.
pub fn maximize_first(constraints: &[HalfSpace3]) -> Option<[f64; 3]> {
    let scale = constraints.iter().map(|c| c.rhs.abs()).fold(1.0, f64::max);
    let feas_tol = 1e-10 * scale;
    let n = constraints.len();
    let mut best = f64::NEG_INFINITY;
    let mut optimal: Vec<[f64; 3]> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(x) = solve3(&constraints[i], &constraints[j], &constraints[k]) else {
                    continue;
                };
                if x[0] < best - 1e-12 * scale {
                    continue;
                }
                if constraints.iter().any(|c| c.slack(&x) < -feas_tol) {
                    continue;
                }
                if x[0] > best + 1e-12 * scale {
                    best = x[0];
                    optimal.retain(|v| v[0] >= best - 1e-12 * scale);
                }
                optimal.push(x);
            }
        }
    }
    if optimal.is_empty() {
        return None;
    }
    let k = optimal.len() as f64;
    let mut mean = [0.0; 3];
    for v in &optimal {
        for d in 0..3 {
            mean[d] += v[d] / k;
        }
    }
    // Keep the exact optimum value rather than the averaged one.
    mean[0] = best;
    Some(mean)
}

/// Largest homothet of a rectangle that fits in a polygon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomothetFit {
    pub lambda: f64,
    pub center: Vec2,
}

/// Largest λ such that the `λw × λh` rectangle rotated by `angle` fits in the
/// closed polygon, together with an optimal center.
///
/// Variables `(λ, cx, cy)`: for every edge with inward normal `n` and offset
/// `d`, each corner offset `u_k` must satisfy `n·c + λ n·u_k ≥ d`. For λ ≥ 0
/// only the most negative `n·u_k` binds, so one constraint per edge suffices.
pub fn largest_homothet_lp(poly: &ConvexPolygon, aspect: (f64, f64), angle: f64, tol: &Tolerances) -> Result<HomothetFit> {
    let (w, h) = aspect;
    if !(w > 0.0 && h > 0.0) {
        return Err(Error::InfeasibleInput("aspect sides must be positive"));
    }
    if poly.area() <= tol.geom {
        return Err(Error::InfeasibleInput("polygon is degenerate"));
    }
    let offsets = corner_offsets(w, h, angle);
    let mut cons: Vec<HalfSpace3> = poly
        .half_planes()
        .into_iter()
        .map(|(n, d)| {
            let reach = offsets.iter().map(|u| n.dot(u)).fold(f64::INFINITY, f64::min);
            HalfSpace3::new([reach, n.x, n.y], d)
        })
        .collect();
    cons.push(HalfSpace3::new([1.0, 0.0, 0.0], 0.0));
    let x = maximize_first(&cons).ok_or(Error::InfeasibleInput("no feasible placement"))?;
    Ok(HomothetFit {
        lambda: x[0].max(0.0),
        center: Vec2::new(x[1], x[2]),
    })
}

/// Center maximizing the edge clearance of a rectangle with the given corner
/// offsets (fixed size and angle). Returns `(clearance, center)`.
pub fn max_clearance_center(poly: &ConvexPolygon, offsets: &[Vec2; 4]) -> Option<(f64, Vec2)> {
    let cons: Vec<HalfSpace3> = poly
        .half_planes()
        .into_iter()
        .map(|(n, d)| {
            let reach = offsets.iter().map(|u| n.dot(u)).fold(f64::INFINITY, f64::min);
            HalfSpace3::new([-1.0, n.x, n.y], d - reach)
        })
        .collect();
    let x = maximize_first(&cons)?;
    Some((x[0], Vec2::new(x[1], x[2])))
}
