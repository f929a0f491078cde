//! Randomized property suites.
//!
//! Each suite draws `trials` random instances from a seeded generator (trial
//! `i` uses stream `i` of `ChaCha8Rng::seed_from_u64(seed)`, so any failure
//! reproduces from the pair `(seed, i)`) and aggregates named checks with
//! their worst residuals.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cross_section::{fold_cross_section, rect_in_parallelogram, theorem2_witness, FoldCase};
use crate::geom::{Containment, Tolerances, Vec2};
use crate::passage::{corner_squares, face_rectangle_in_shadow};
use crate::sampling::{random_generic_direction, random_orientation};
use crate::shadow::{
    orientation_from_direction, project_box, vertical_fiber, BoxDims, ShadowKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemma1,
    Lemma3,
    Lemma4,
    Theorem1,
    Theorem2,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Lemma1, Suite::Lemma3, Suite::Lemma4, Suite::Theorem1, Suite::Theorem2];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lemma1 => "lemma1",
            Suite::Lemma3 => "lemma3",
            Suite::Lemma4 => "lemma4",
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Suite::All]
            .into_iter()
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected lemma1, lemma3, lemma4, theorem1, theorem2 or all)"))
    }
}

/// Aggregate of one named property over all trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckStat {
    pub name: String,
    pub pass: bool,
    /// Worst residual (or the value compared against `tolerance`).
    pub measured: f64,
    pub tolerance: f64,
    pub passed: u64,
    pub total: u64,
    pub first_failure: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub checks: Vec<CheckStat>,
    pub counters: BTreeMap<String, u64>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckStat> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Residual check: each sample passes when `value ≤ tolerance`.
struct Residual {
    stat: CheckStat,
}

impl Residual {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            stat: CheckStat {
                name: name.to_string(),
                pass: true,
                measured: 0.0,
                tolerance,
                passed: 0,
                total: 0,
                first_failure: None,
            },
        }
    }

    fn record(&mut self, trial: u64, value: f64) {
        let s = &mut self.stat;
        s.total += 1;
        // NaN counts as a failure.
        if value <= s.tolerance {
            s.passed += 1;
        } else if s.first_failure.is_none() {
            s.first_failure = Some(trial);
        }
        if !(value <= s.measured) {
            s.measured = value;
        }
    }

    fn flag(&mut self, trial: u64, ok: bool) {
        self.record(trial, if ok { 0.0 } else { 1.0 });
    }

    fn finish(mut self) -> CheckStat {
        self.stat.pass = self.stat.passed == self.stat.total;
        self.stat
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs one suite. [`Suite::All`] runs every suite and concatenates checks
/// with the suite name as prefix.
pub fn run_suite(suite: Suite, trials: u64, seed: u64, tol: &Tolerances) -> SuiteReport {
    match suite {
        Suite::Lemma1 => lemma1(trials, seed, tol),
        Suite::Lemma3 => lemma3(trials, seed, tol),
        Suite::Lemma4 => lemma4(trials, seed, tol),
        Suite::Theorem1 => theorem1(trials, seed, tol),
        Suite::Theorem2 => theorem2(trials, seed, tol),
        Suite::All => {
            let mut checks = Vec::new();
            let mut counters = BTreeMap::new();
            for s in Suite::EACH {
                let r = run_suite(s, trials, seed, tol);
                checks.extend(r.checks.into_iter().map(|mut c| {
                    c.name = format!("{}.{}", s.name(), c.name);
                    c
                }));
                counters.extend(r.counters.into_iter().map(|(k, v)| (format!("{}.{}", s.name(), k), v)));
            }
            SuiteReport {
                suite,
                trials,
                seed,
                checks,
                counters,
            }
        }
    }
}

/// Unit-vector identities, area = vertical extent for the unit cube, central
/// symmetry and obtuse angles of hexagonal shadows.
pub fn lemma1(trials: u64, seed: u64, tol: &Tolerances) -> SuiteReport {
    let cube = BoxDims::cube(1.0).expect("unit cube");
    let mut pqr_sum = Residual::new("pqr_unit_sum", 1e-12);
    let mut column_sums = Residual::new("first_second_coordinate_sums", 1e-12);
    let mut area_extent = Residual::new("area_equals_extent", 1e-9);
    let mut symmetry = Residual::new("central_symmetry", 1e-9);
    // Residual is how far the smallest angle falls short of π/2 + 1e-9.
    let mut obtuse = Residual::new("obtuse_angles", 0.0);
    let mut below_pi = Residual::new("angles_below_pi", 0.0);
    let mut counters = BTreeMap::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let o = random_orientation(&mut rng);
        let m = o.matrix();
        let third: f64 = (0..3).map(|i| m[(i, 2)] * m[(i, 2)]).sum();
        pqr_sum.record(t, (third - 1.0).abs());
        let worst_col = (0..2)
            .map(|j| ((0..3).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        column_sums.record(t, worst_col);
        let shadow = match project_box(&cube, &o, tol) {
            Ok(s) => s,
            Err(_) => {
                *counters.entry("ambiguous".to_string()).or_insert(0) += 1;
                continue;
            }
        };
        area_extent.record(t, (shadow.area() - shadow.vertical_extent).abs());
        if shadow.kind == ShadowKind::Hexagon {
            *counters.entry("hexagons".to_string()).or_insert(0) += 1;
            let v = shadow.polygon.vertices();
            let s0 = v[0] + v[3];
            let asym = (1..3).map(|i| (v[i] + v[i + 3] - s0).norm()).fold(0.0, f64::max);
            symmetry.record(t, asym);
            let angles: Vec<f64> = (0..6).map(|i| shadow.polygon.interior_angle(i)).collect();
            let min_angle = angles.iter().cloned().fold(f64::INFINITY, f64::min);
            let max_angle = angles.iter().cloned().fold(0.0, f64::max);
            obtuse.record(t, (FRAC_PI_2 + 1e-9 - min_angle).max(0.0));
            below_pi.record(t, (max_angle - PI).max(0.0));
        } else {
            *counters.entry("rectangles".to_string()).or_insert(0) += 1;
        }
    }
    SuiteReport {
        suite: Suite::Lemma1,
        trials,
        seed,
        checks: vec![
            pqr_sum.finish(),
            column_sums.finish(),
            area_extent.finish(),
            symmetry.finish(),
            obtuse.finish(),
            below_pi.finish(),
        ],
        counters,
    }
}

/// Corner squares of unit-cube hexagons.
pub fn lemma3(trials: u64, seed: u64, tol: &Tolerances) -> SuiteReport {
    let cube = BoxDims::cube(1.0).expect("unit cube");
    let mut agree = Residual::new("criterion_matches_fourth_corner", 0.0);
    let mut pairs = Residual::new("at_least_two_pairs_fit", 0.0);
    let mut pair_consistent = Residual::new("opposite_vertices_agree", 0.0);
    let mut offsets = Residual::new("offset_formulas", 1e-9);
    let mut on_sides = Residual::new("adjacent_corners_on_opposite_sides", 1e-9);
    let mut interior = Residual::new("fourth_corner_interior", 0.0);
    let mut counters = BTreeMap::new();
    let mut hexagons = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let o = random_orientation(&mut rng);
        let Ok(shadow) = project_box(&cube, &o, tol) else {
            *counters.entry("skipped".to_string()).or_insert(0) += 1;
            continue;
        };
        if shadow.kind != ShadowKind::Hexagon {
            *counters.entry("skipped".to_string()).or_insert(0) += 1;
            continue;
        }
        hexagons += 1;
        let squares = match corner_squares(&shadow, tol) {
            Ok(s) if s.len() == 6 => s,
            _ => {
                agree.flag(t, false);
                continue;
            }
        };
        let poly = &shadow.polygon;
        let mut fitting_pairs = 0;
        for (i, sq) in squares.iter().enumerate() {
            let inside = poly.contains_point(sq.fourth(), Containment::Closed, tol);
            if sq.slack.abs() > 1e-9 {
                agree.flag(t, inside == sq.fits);
            }
            if sq.slack > 1e-9 {
                interior.flag(t, poly.clearance(sq.fourth()) > 0.0);
            }
            let [_, b, _, c] = sq.corners;
            let b_prime = poly.vertex(i + 1);
            let c_prime = poly.vertex(i + 5);
            let err = ((b - b_prime).norm() - sq.offsets[0]).abs().max(((c - c_prime).norm() - sq.offsets[1]).abs());
            offsets.record(t, err);
            // B and C lie on the two sides parallel to the inward edge.
            let on_b = distance_to_segment(b, poly.vertex(i + 1), poly.vertex(i + 2));
            let on_c = distance_to_segment(c, poly.vertex(i + 5), poly.vertex(i + 4));
            on_sides.record(t, on_b.max(on_c));
            if i < 3 {
                let opp = &squares[i + 3];
                if sq.slack.abs() > 1e-9 {
                    pair_consistent.flag(t, opp.fits == sq.fits && opp.inward_axis == sq.inward_axis);
                }
                if sq.fits && opp.fits {
                    fitting_pairs += 1;
                }
            }
        }
        *counters.entry(format!("pairs_fitting_{fitting_pairs}")).or_insert(0) += 1;
        pairs.flag(t, fitting_pairs >= 2);
    }
    counters.insert("hexagons".to_string(), hexagons);
    SuiteReport {
        suite: Suite::Lemma3,
        trials,
        seed,
        checks: vec![
            agree.finish(),
            pairs.finish(),
            pair_consistent.finish(),
            offsets.finish(),
            on_sides.finish(),
            interior.finish(),
        ],
        counters,
    }
}

fn distance_to_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (a + t * ab - p).norm()
}

/// Parallelogram membership through the coordinates of `p − o` in the basis
/// `(e, f)`; independent of the polygon code.
fn in_parallelogram(p: Vec2, o: Vec2, e: Vec2, f: Vec2, slack: f64) -> bool {
    let det = e.x * f.y - e.y * f.x;
    let d = p - o;
    let s = (d.x * f.y - d.y * f.x) / det;
    let t = (e.x * d.y - e.y * d.x) / det;
    let (se, sf) = (slack / e.norm(), slack / f.norm());
    s >= -se && s <= 1.0 + se && t >= -sf && t <= 1.0 + sf
}

/// Fold angles are drawn from `(0, 1.45)`.
pub fn lemma4(trials: u64, seed: u64, tol: &Tolerances) -> SuiteReport {
    let mut fits = Residual::new("placement_inside_parallelogram", 0.0);
    let mut sides = Residual::new("placement_congruent_to_base", 1e-9);
    let mut area = Residual::new("fold_area_scaling", 1e-9);
    let mut midpoint = Residual::new("fold_preserves_midpoints", 1e-12);
    let mut obtuse = Residual::new("obtuse_at_2_and_3", 0.0);
    let (mut diag, mut corner) = (0u64, 0u64);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let a = rng.random_range(0.2..2.0);
        let b = a * rng.random_range(1.0..3.0);
        let alpha = rng.random_range(1e-6..1.45);
        let axis = rng.random_range(0.0..PI);
        let p = match fold_cross_section((a, b), alpha, axis) {
            Ok(p) => p,
            Err(_) => {
                fits.flag(t, false);
                continue;
            }
        };
        let [v1, v2, v3, v4] = p.vertices;
        let par_area = ((v1 - v2).x * (v4 - v2).y - (v1 - v2).y * (v4 - v2).x).abs();
        area.record(t, (par_area - a * b / alpha.cos()).abs() / (a * b));
        midpoint.record(t, ((v1 + v4) - (v2 + v3)).norm());
        obtuse.flag(t, p.angle_at(2) > FRAC_PI_2 && p.angle_at(3) > FRAC_PI_2);
        match rect_in_parallelogram(&p, (a, b), tol) {
            Ok((r, case)) => {
                match case {
                    FoldCase::Diagonal => diag += 1,
                    FoldCase::Corner => corner += 1,
                    FoldCase::Flat => {}
                }
                let slack = tol.geom * b;
                let ok = r.corners().iter().all(|c| in_parallelogram(*c, v2, v1 - v2, v4 - v2, slack));
                fits.flag(t, ok);
                let (lo, hi) = (r.width.min(r.height), r.width.max(r.height));
                sides.record(t, (lo - a).abs().max((hi - b).abs()));
            }
            Err(_) => fits.flag(t, false),
        }
    }
    let need = (trials / 50).min(100);
    let mut branches = Residual::new("both_cases_exercised", 0.0);
    branches.flag(trials, diag >= need && corner >= need);
    let mut counters = BTreeMap::new();
    counters.insert("case_diagonal".to_string(), diag);
    counters.insert("case_corner".to_string(), corner);
    counters.insert("case_min_required".to_string(), need);
    SuiteReport {
        suite: Suite::Lemma4,
        trials,
        seed,
        checks: vec![
            fits.finish(),
            sides.finish(),
            area.finish(),
            midpoint.finish(),
            obtuse.finish(),
            branches.finish(),
        ],
        counters,
    }
}

fn random_dims<R: Rng>(rng: &mut R) -> BoxDims {
    let x = rng.random_range(0.2..3.0);
    let y = rng.random_range(0.2..3.0);
    let z = rng.random_range(0.2..3.0);
    BoxDims::sorted(x, y, z).expect("positive sides")
}

/// Face rectangle strictly inside every generic shadow. The containment
/// oracle lifts each corner to its vertical fiber through the box.
pub fn theorem1(trials: u64, seed: u64, tol: &Tolerances) -> SuiteReport {
    let mut built = Residual::new("construction_succeeds", 0.0);
    let mut sides = Residual::new("rectangle_is_a_by_b", 1e-9);
    let mut fiber = Residual::new("corners_over_box_interior", 0.0);
    let mut clearance = Residual::new("clearance_at_least_margin", 0.0);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let dims = random_dims(&mut rng);
        let dir = random_generic_direction(&mut rng, 1e-3);
        let rect = match face_rectangle_in_shadow(&dims, &dir, tol) {
            Ok(r) => r,
            Err(_) => {
                built.flag(t, false);
                continue;
            }
        };
        built.flag(t, true);
        sides.record(t, (rect.width - dims.a).abs().max((rect.height - dims.b).abs()));
        let orient = orientation_from_direction(&dir, tol).expect("unit direction");
        let positive = rect.corners().iter().all(|c| {
            vertical_fiber(&dims, &orient, *c).is_some_and(|(t0, t1)| t1 - t0 > 0.0)
        });
        fiber.flag(t, positive);
        let shadow = project_box(&dims, &orient, tol).expect("generic direction");
        let margin = shadow.polygon.default_margin();
        clearance.record(t, (margin - shadow.polygon.rect_clearance(&rect)).max(0.0));
    }
    SuiteReport {
        suite: Suite::Theorem1,
        trials,
        seed,
        checks: vec![built.finish(), sides.finish(), fiber.finish(), clearance.finish()],
        counters: BTreeMap::new(),
    }
}

/// Rectangles inside the box from centered rectangles in the shadow.
pub fn theorem2(trials: u64, seed: u64, tol: &Tolerances) -> SuiteReport {
    let mut built = Residual::new("witness_built", 0.0);
    let mut sides = Residual::new("side_lengths", 1e-9);
    let mut right = Residual::new("right_angles", 1e-9);
    let mut inside = Residual::new("corners_strictly_inside_box", 0.0);
    let mut projection = Residual::new("quad_projects_to_shadow_rectangle", 1e-9);
    let mut planar = Residual::new("quad_is_planar_parallelogram", 1e-9);
    let mut counters = BTreeMap::new();
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        let dims = random_dims(&mut rng);
        let dir = random_generic_direction(&mut rng, 1e-3);
        let lambda = rng.random_range(0.1..0.999);
        let w = match theorem2_witness(&dims, lambda, &dir, tol) {
            Ok(w) => w,
            Err(_) => {
                built.flag(t, false);
                continue;
            }
        };
        built.flag(t, true);
        *counters
            .entry(format!("{:?}", w.fold_case).to_lowercase())
            .or_insert(0) += 1;
        let r = w.rect;
        let e0 = r[1] - r[0];
        let e1 = r[3] - r[0];
        let (lo, hi) = {
            let (x, y) = (e0.norm(), e1.norm());
            (x.min(y), x.max(y))
        };
        sides.record(t, (lo - lambda * dims.a).abs().max((hi - lambda * dims.b).abs()));
        let opposite = ((r[2] - r[1]) - e1).norm().max(((r[3] - r[2]) + e0).norm());
        right.record(t, (e0.dot(&e1) / (e0.norm() * e1.norm())).abs().max(opposite));
        let half = dims.as_array().map(|s| 0.5 * s);
        inside.flag(t, r.iter().all(|p| (0..3).all(|i| p[i].abs() < half[i])));
        let orient = orientation_from_direction(&dir, tol).expect("unit direction");
        let expected = w.shadow_rect.corners();
        let proj_err = w
            .quad
            .points
            .iter()
            .zip(expected.iter())
            .map(|(p, e)| {
                let q = orient.apply(p);
                (Vec2::new(q.x, q.y) - e).norm()
            })
            .fold(0.0, f64::max);
        projection.record(t, proj_err);
        let (mid, off_plane) = w.quad.defects();
        planar.record(t, mid.max(off_plane));
    }
    SuiteReport {
        suite: Suite::Theorem2,
        trials,
        seed,
        checks: vec![
            built.finish(),
            sides.finish(),
            right.finish(),
            inside.finish(),
            projection.finish(),
            planar.finish(),
        ],
        counters,
    }
}
