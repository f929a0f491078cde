//! Nieuwland constants of rectangular boxes.
//!
//! A homothet `λB` passes through `B` by translation exactly when, for some
//! direction, the shadow of `B` contains the `λa × λb` face rectangle. So the
//! constant is the supremum over directions of the largest face homothet in
//! the shadow. For one direction that is a scan over the rectangle's angle of
//! a three-variable LP; over directions we sample a Fibonacci lattice on one
//! octant (box shadows are invariant under sign flips of the direction) and
//! refine the incumbent locally.
//!
//! Results are certified lower bounds: every reported value comes with a
//! placement that re-verifies. The outer problem is nonconvex and no claim of
//! global optimality is made.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{largest_homothet_lp, Containment, RectPlacement, Tolerances, Vec3};
use crate::shadow::{orientation_from_direction, project_box, unit_direction, BoxDims, ShadowKind, FACE_PARALLEL_TOL};

pub const DEFAULT_ANGLE_SAMPLES: usize = 360;
pub const DEFAULT_REFINE_ITERS: usize = 40;
/// Relative shrink applied to the reported optimum before re-verification.
pub const BACK_OFF: f64 = 1e-9;
/// Directions sampled per local refinement round.
const REFINE_SAMPLES: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    /// Approximate number of lattice directions in the positive octant.
    pub sphere_samples: usize,
    pub angle_samples: usize,
    /// Golden-section iterations per direction and local refinement rounds.
    pub refine_iters: usize,
    pub refine_shrink: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            sphere_samples: 4000,
            angle_samples: DEFAULT_ANGLE_SAMPLES,
            refine_iters: DEFAULT_REFINE_ITERS,
            refine_shrink: 0.7,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sphere_samples == 0 || self.angle_samples == 0 || self.refine_iters == 0 {
            return Err(Error::InvalidConfig("sample counts must be at least 1"));
        }
        if !(self.refine_shrink > 0.0 && self.refine_shrink < 1.0) {
            return Err(Error::InvalidConfig("refine_shrink must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Best face homothet for one direction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionFit {
    pub lambda: f64,
    pub angle: f64,
    /// The `λa × λb` rectangle in the shadow plane.
    pub placement: RectPlacement,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub direction: Vec3,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub lambda_star: f64,
    pub direction: Vec3,
    pub angle: f64,
    /// Placement at `lambda_star · (1 − BACK_OFF)`.
    pub placement: RectPlacement,
    pub evaluations: usize,
    pub skipped_face_parallel: usize,
    pub history: Vec<Incumbent>,
}

/// Maximizes a unimodal-ish `f` on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Largest λ such that the `λa × λb` rectangle fits in the shadow of `dims`
/// along `direction`, with the rectangle angle scanned and then refined by
/// golden-section search.
pub fn best_lambda_for_direction(
    dims: &BoxDims,
    direction: &Vec3,
    angle_samples: usize,
    refine_iters: usize,
    tol: &Tolerances,
) -> Result<DirectionFit> {
    let u = unit_direction(direction)?;
    let orient = orientation_from_direction(&u, tol)?;
    let shadow = project_box(dims, &orient, tol).map_err(|e| match e {
        Error::AmbiguousClassification { .. } => Error::FaceParallelDirection,
        e => e,
    })?;
    if shadow.kind != ShadowKind::Hexagon || shadow.pqr.iter().any(|&p| p <= FACE_PARALLEL_TOL) {
        return Err(Error::FaceParallelDirection);
    }
    let poly = &shadow.polygon;
    let aspect = (dims.a, dims.b);
    let eval = |angle: f64| largest_homothet_lp(poly, aspect, angle, tol).map(|f| f.lambda).unwrap_or(0.0);

    let n = angle_samples.max(1);
    let step = PI / n as f64;
    let (mut best_angle, mut best) = (0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let angle = i as f64 * step;
        let l = eval(angle);
        if l > best {
            best = l;
            best_angle = angle;
        }
    }
    if refine_iters > 0 {
        let (a, l) = golden_section_max(eval, best_angle - step, best_angle + step, refine_iters);
        if l > best {
            best_angle = a;
        }
    }
    let fit = largest_homothet_lp(poly, aspect, best_angle, tol)?;
    let placement = RectPlacement::new(fit.center, best_angle, fit.lambda * dims.a, fit.lambda * dims.b)?;
    Ok(DirectionFit {
        lambda: fit.lambda,
        angle: placement.angle,
        placement,
    })
}

/// True iff the `λ`-homothet can be carried through the box along
/// `direction`: the best homothet for that direction is strictly larger and
/// the `λ` rectangle at its center clears the shadow boundary.
pub fn passes_through(dims: &BoxDims, lambda: f64, direction: &Vec3, tol: &Tolerances) -> Result<bool> {
    let fit = best_lambda_for_direction(dims, direction, DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS, tol)?;
    if !(fit.lambda > lambda) || lambda <= 0.0 {
        return Ok(false);
    }
    let shadow = crate::shadow::shadow_along(dims, direction, tol)?;
    let rect = fit.placement.scaled(lambda / fit.lambda);
    Ok(shadow
        .polygon
        .contains_rect(&rect, Containment::Open { margin: tol.geom }, tol))
}

/// Fibonacci lattice restricted to the open positive octant. About `target`
/// points are returned.
pub fn octant_lattice(target: usize) -> Vec<Vec3> {
    let total = 8 * target.max(1);
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..total)
        .filter_map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / total as f64;
            let radius = (1.0 - z * z).sqrt();
            let theta = golden_angle * i as f64;
            let v = Vec3::new(radius * theta.cos(), radius * theta.sin(), z);
            (v.x > 0.0 && v.y > 0.0 && v.z > 0.0).then_some(v)
        })
        .collect()
}

fn tangent_basis(d: &Vec3) -> (Vec3, Vec3) {
    let k = (0..3).min_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs())).unwrap_or(0);
    let mut e = Vec3::zeros();
    e[k] = 1.0;
    let t1 = (e - e.dot(d) * d).normalize();
    (t1, d.cross(&t1))
}

/// Evaluates directions in parallel; returns results in input order.
fn evaluate(dims: &BoxDims, dirs: &[Vec3], cfg: &OptConfig, tol: &Tolerances) -> Vec<Option<DirectionFit>> {
    dirs.par_iter()
        .map(|d| best_lambda_for_direction(dims, d, cfg.angle_samples, cfg.refine_iters, tol).ok())
        .collect()
}

/// Numerical Nieuwland constant of `dims`.
pub fn nieuwland_constant(dims: &BoxDims, cfg: &OptConfig, tol: &Tolerances) -> Result<OptResult> {
    cfg.validate()?;
    let lattice = octant_lattice(cfg.sphere_samples);
    let mut evaluations = 0usize;
    let mut skipped = 0usize;
    let mut history = Vec::new();
    let mut incumbent: Option<(Vec3, DirectionFit)> = None;

    let mut absorb = |dirs: &[Vec3], fits: Vec<Option<DirectionFit>>, incumbent: &mut Option<(Vec3, DirectionFit)>, history: &mut Vec<Incumbent>| {
        // Ordered reduction: strictly better only, so ties keep the earliest.
        for (d, fit) in dirs.iter().zip(fits) {
            evaluations += 1;
            let Some(fit) = fit else {
                skipped += 1;
                continue;
            };
            if incumbent.as_ref().is_none_or(|(_, f)| fit.lambda > f.lambda) {
                history.push(Incumbent {
                    direction: *d,
                    lambda: fit.lambda,
                });
                *incumbent = Some((*d, fit));
            }
        }
    };

    let fits = evaluate(dims, &lattice, cfg, tol);
    absorb(&lattice, fits, &mut incumbent, &mut history);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let spacing = (4.0 * PI / (8 * cfg.sphere_samples.max(1)) as f64).sqrt();
    let mut radius = 2.0 * spacing;
    for _ in 0..cfg.refine_iters {
        let Some((center, _)) = incumbent else { break };
        let (t1, t2) = tangent_basis(&center);
        let dirs: Vec<Vec3> = (0..REFINE_SAMPLES)
            .map(|_| {
                // Uniform in the disk of the given radius.
                let rho = radius * rng.random::<f64>().sqrt();
                let phi = 2.0 * PI * rng.random::<f64>();
                let v = center + rho * (phi.cos() * t1 + phi.sin() * t2);
                v.normalize().map(f64::abs)
            })
            .collect();
        let fits = evaluate(dims, &dirs, cfg, tol);
        absorb(&dirs, fits, &mut incumbent, &mut history);
        radius *= cfg.refine_shrink;
    }

    let (direction, fit) = incumbent.ok_or(Error::ConstructionFailed("every sampled direction was face-parallel"))?;
    Ok(OptResult {
        lambda_star: fit.lambda,
        direction,
        angle: fit.angle,
        placement: fit.placement.scaled(1.0 - BACK_OFF),
        evaluations,
        skipped_face_parallel: skipped,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        // A smooth peak only pins the argmax to about sqrt(eps); a kink pins it exactly.
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, -1.0, 1.0, 60);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-7);
        assert_abs_diff_eq!(fx, 2.0, epsilon = 1e-12);
        let (x, _) = golden_section_max(|x| 2.0 - (x - 0.3).abs(), -1.0, 1.0, 60);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-11);
    }

    #[test]
    fn lattice_stays_in_octant() {
        let pts = octant_lattice(500);
        assert!((400..600).contains(&pts.len()));
        assert!(pts.iter().all(|p| p.x > 0.0 && p.y > 0.0 && p.z > 0.0 && (p.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cube_diagonal_direction() {
        // Largest square in the regular hexagon of side s is (3 − √3)s.
        let s = (2.0f64 / 3.0).sqrt();
        let fit = best_lambda_for_direction(&BoxDims::cube(1.0).unwrap(), &Vec3::new(1.0, 1.0, 1.0), 360, 40, &tol()).unwrap();
        assert_abs_diff_eq!(fit.lambda, (3.0 - 3f64.sqrt()) * s, epsilon = 1e-9);
    }

    #[test]
    fn near_face_normal_is_rejected() {
        let d = Vec3::new(1e-9, 1e-9, 1.0);
        let e = best_lambda_for_direction(&BoxDims::cube(1.0).unwrap(), &d, 36, 5, &tol()).unwrap_err();
        assert_eq!(e, Error::FaceParallelDirection);
    }

    #[test]
    fn classical_direction_reaches_three_root_two_over_four() {
        let fit = best_lambda_for_direction(&BoxDims::cube(1.0).unwrap(), &Vec3::new(2.0, 2.0, 1.0), 360, 40, &tol()).unwrap();
        assert_abs_diff_eq!(fit.lambda, 3.0 * 2f64.sqrt() / 4.0, epsilon = 1e-9);
    }

    #[test]
    fn passes_through_examples() {
        let cube = BoxDims::cube(1.0).unwrap();
        let d = Vec3::new(1.0, 1.0, 1.0);
        assert!(passes_through(&cube, 1.0, &d, &tol()).unwrap());
        assert!(!passes_through(&cube, 1.2, &Vec3::new(2.0, 2.0, 1.0), &tol()).unwrap());
        assert!(passes_through(&cube, 0.1, &Vec3::new(0.3, -0.2, 0.7), &tol()).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(OptConfig { refine_shrink: 1.0, ..Default::default() }.validate().is_err());
        assert!(OptConfig { angle_samples: 0, ..Default::default() }.validate().is_err());
    }
}
