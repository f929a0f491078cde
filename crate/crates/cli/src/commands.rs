//! The four subcommands. Each returns the JSON report text, an optional SVG
//! figure and an exit code; nothing here touches files or the terminal.

use serde::{Deserialize, Serialize};

use rupert_core::verify::{run_suite, Suite, SuiteReport};
use rupert_core::{
    build_passage, nieuwland_constant, shadow_along, BoxDims, Error, OptConfig, OptResult, PassageSpec, ShadowKind,
    Tolerances, Vec2, Vec3,
};

use crate::report::{to_json, Check, RunReport};
use crate::svg::Figure;

pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_AMBIGUOUS: u8 = 3;
pub const EXIT_DOES_NOT_FIT: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn new(code: u8, e: impl std::fmt::Display) -> Self {
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(e: &Error) -> Option<Failure> {
    match e {
        Error::InvalidDims(_)
        | Error::InvalidDirection(_)
        | Error::InvalidConfig(_)
        | Error::DegenerateInput(_)
        | Error::InvalidOrientation(_) => Some(Failure::new(EXIT_INVALID_INPUT, e)),
        _ => None,
    }
}

fn fail(e: Error) -> Failure {
    input_error(&e).unwrap_or_else(|| Failure::new(EXIT_CHECK_FAILED, e))
}

pub struct Outcome {
    pub json: String,
    pub svg: Option<String>,
    pub code: u8,
    /// Human-readable lines for stderr.
    pub summary: Vec<String>,
}

/// Sorts the sides into `a ≤ b ≤ c` and permutes the direction with them, so
/// that every output is expressed in the frame of the sorted box.
pub fn sorted_frame(dims: [f64; 3], dir: Option<[f64; 3]>) -> Result<(BoxDims, Option<Vec3>), Failure> {
    if dims.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(fail(Error::InvalidDims(dims)));
    }
    let mut perm = [0usize, 1, 2];
    perm.sort_by(|&i, &j| dims[i].total_cmp(&dims[j]));
    let b = BoxDims::new(dims[perm[0]], dims[perm[1]], dims[perm[2]]).map_err(fail)?;
    let d = match dir {
        Some(d) => {
            let v = Vec3::new(d[perm[0]], d[perm[1]], d[perm[2]]);
            Some(rupert_core::shadow::unit_direction(&v).map_err(fail)?)
        }
        None => None,
    };
    Ok((b, d))
}

fn finish<I: Serialize, O: Serialize>(
    report: &RunReport<I, O>,
    svg: Option<String>,
    code: u8,
    summary: Vec<String>,
) -> Result<Outcome, Failure> {
    let json = to_json(report).map_err(|e| Failure::new(EXIT_CHECK_FAILED, e))?;
    Ok(Outcome { json, svg, code, summary })
}

fn check_lines(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .map(|c| {
            format!(
                "{} {}: measured {:e}, tolerance {:e}",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowInputs {
    pub dims: [f64; 3],
    pub direction: [f64; 3],
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowOutputs {
    /// Sorted sides; `direction` is permuted to match.
    pub dims: BoxDims,
    pub direction: Vec3,
    pub kind: ShadowKind,
    pub vertices: Vec<Vec2>,
    pub pqr: [f64; 3],
    pub vertical_extent: f64,
    pub area: f64,
}

pub fn shadow(inputs: &ShadowInputs, want_svg: bool) -> Result<Outcome, Failure> {
    let tol = tolerances(inputs.tol)?;
    let (dims, dir) = sorted_frame(inputs.dims, Some(inputs.direction))?;
    let dir = dir.expect("direction given");
    let s = shadow_along(&dims, &dir, &tol).map_err(|e| match e {
        Error::AmbiguousClassification { .. } => Failure::new(EXIT_AMBIGUOUS, e),
        e => fail(e),
    })?;
    let [p, q, r] = s.pqr;
    let unit = (p * p + q * q + r * r - 1.0).abs();
    let expected_area = dims.b * dims.c * p + dims.c * dims.a * q + dims.a * dims.b * r;
    let scale = dims.c * dims.c;
    let checks = vec![
        Check::at_most("pqr_unit_sum", unit, 1e-12),
        Check::at_most("area_matches_face_projections", (s.area() - expected_area).abs() / scale, 1e-9),
    ];
    let outputs = ShadowOutputs {
        dims,
        direction: dir,
        kind: s.kind,
        vertices: s.polygon.vertices().to_vec(),
        pqr: s.pqr,
        vertical_extent: s.vertical_extent,
        area: s.area(),
    };
    let svg = want_svg.then(|| {
        Figure {
            shadow: outputs.vertices.clone(),
            rect: None,
            clearance: None,
        }
        .render()
    });
    let mut summary = vec![format!(
        "{:?} shadow, {} vertices, area {:.12}",
        s.kind,
        outputs.vertices.len(),
        outputs.area
    )];
    summary.extend(check_lines(&checks));
    let report = RunReport {
        command: "shadow".into(),
        inputs: inputs.clone(),
        outputs,
        checks,
    };
    let code = if report.passed() { 0 } else { EXIT_CHECK_FAILED };
    finish(&report, svg, code, summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageInputs {
    pub dims: [f64; 3],
    pub direction: [f64; 3],
    pub lambda: f64,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageOutputs {
    pub passage: PassageSpec,
    pub shadow: Vec<Vec2>,
    /// One point on each tunnel edge line, in box coordinates.
    pub tunnel_edge_points: [Vec3; 4],
}

pub fn passage(inputs: &PassageInputs, want_svg: bool) -> Result<Outcome, Failure> {
    let tol = tolerances(inputs.tol)?;
    let (dims, dir) = sorted_frame(inputs.dims, Some(inputs.direction))?;
    let dir = dir.expect("direction given");
    let tunnel = build_passage(&dims, &dir, inputs.lambda, &tol).map_err(|e| match e {
        Error::DoesNotFit | Error::FaceParallelDirection | Error::AmbiguousClassification { .. } => {
            Failure::new(EXIT_DOES_NOT_FIT, e)
        }
        e => fail(e),
    })?;
    let s = shadow_along(&dims, &dir, &tol).map_err(fail)?;
    let margin = s.polygon.default_margin();
    let checks = vec![
        Check::above("clearance", tunnel.clearance, margin),
        Check::at_most(
            "reverifies_in_fresh_shadow",
            if tunnel.verify(margin, &tol) { 0.0 } else { 1.0 },
            0.0,
        ),
    ];
    let outputs = PassageOutputs {
        tunnel_edge_points: tunnel.tunnel_edge_points(&tol).map_err(fail)?,
        shadow: s.polygon.vertices().to_vec(),
        passage: tunnel,
    };
    let svg = want_svg.then(|| {
        Figure {
            shadow: outputs.shadow.clone(),
            rect: Some(outputs.passage.cross_section),
            clearance: Some(outputs.passage.clearance),
        }
        .render()
    });
    let mut summary = vec![format!(
        "passage for lambda {} with clearance {:e}",
        inputs.lambda, outputs.passage.clearance
    )];
    summary.extend(check_lines(&checks));
    let report = RunReport {
        command: "passage".into(),
        inputs: inputs.clone(),
        outputs,
        checks,
    };
    let code = if report.passed() { 0 } else { EXIT_CHECK_FAILED };
    finish(&report, svg, code, summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NieuwlandInputs {
    pub dims: [f64; 3],
    pub config: OptConfig,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NieuwlandOutputs {
    pub dims: BoxDims,
    pub result: OptResult,
    /// Clearance of the backed-off placement in a recomputed shadow.
    pub verified_clearance: f64,
}

pub fn nieuwland(inputs: &NieuwlandInputs, want_svg: bool) -> Result<Outcome, Failure> {
    let tol = tolerances(inputs.tol)?;
    let (dims, _) = sorted_frame(inputs.dims, None)?;
    let result = nieuwland_constant(&dims, &inputs.config, &tol).map_err(fail)?;
    let s = shadow_along(&dims, &result.direction, &tol).map_err(fail)?;
    let clearance = s.polygon.rect_clearance(&result.placement);
    let monotone = result.history.windows(2).all(|w| w[1].lambda >= w[0].lambda);
    let checks = vec![
        Check::above("placement_reverifies", clearance, 0.0),
        Check::above("at_least_face_size", result.lambda_star, 1.0 - 1e-9),
        Check::at_most("history_non_decreasing", if monotone { 0.0 } else { 1.0 }, 0.0),
    ];
    let svg = want_svg.then(|| {
        Figure {
            shadow: s.polygon.vertices().to_vec(),
            rect: Some(result.placement),
            clearance: None,
        }
        .render()
    });
    let mut summary = vec![format!(
        "lambda_star {:.12} after {} directions",
        result.lambda_star, result.evaluations
    )];
    summary.extend(check_lines(&checks));
    let report = RunReport {
        command: "nieuwland".into(),
        inputs: inputs.clone(),
        outputs: NieuwlandOutputs {
            dims,
            result,
            verified_clearance: clearance,
        },
        checks,
    };
    let code = if report.passed() { 0 } else { EXIT_CHECK_FAILED };
    finish(&report, svg, code, summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyInputs {
    pub suite: Suite,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
}

pub fn verify(inputs: &VerifyInputs) -> Result<Outcome, Failure> {
    let tol = tolerances(inputs.tol)?;
    if inputs.trials == 0 {
        return Err(Failure::new(EXIT_INVALID_INPUT, "--trials must be at least 1"));
    }
    let r: SuiteReport = run_suite(inputs.suite, inputs.trials, inputs.seed, &tol);
    let checks: Vec<Check> = r.checks.iter().map(Check::from).collect();
    let mut summary: Vec<String> = r
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {}: {}/{} passed, worst {:e} (tolerance {:e})",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.passed,
                c.total,
                c.measured,
                c.tolerance
            )
        })
        .collect();
    for (k, v) in &r.counters {
        summary.push(format!("     {k} = {v}"));
    }
    for c in r.checks.iter().filter(|c| !c.pass) {
        if let Some(t) = c.first_failure {
            summary.push(format!(
                "reproduce {}: first failing trial {t}, rerun with --seed {} --trials {}",
                c.name,
                inputs.seed,
                t + 1
            ));
        }
    }
    let report = RunReport {
        command: "verify".into(),
        inputs: inputs.clone(),
        outputs: r,
        checks,
    };
    let code = if report.passed() && !report.checks.is_empty() { 0 } else { EXIT_CHECK_FAILED };
    finish(&report, None, code, summary)
}

fn tolerances(geom: f64) -> Result<Tolerances, Failure> {
    if !(geom.is_finite() && geom > 0.0 && geom < 1e-3) {
        return Err(Failure::new(EXIT_INVALID_INPUT, "--tol must lie in (0, 1e-3)"));
    }
    Ok(Tolerances {
        geom,
        ..Tolerances::default()
    })
}
