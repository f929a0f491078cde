use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use rupert_core::nieuwland::{DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS};
use rupert_core::{
    best_lambda_for_direction, largest_homothet_lp, orientation_from_direction, project_box, BoxDims, Tolerances,
    Vec3,
};

fn shadows(c: &mut Criterion) {
    let tol = Tolerances::default();
    let dims = BoxDims::new(1.0, 1.5, 2.0).unwrap();
    let orient = orientation_from_direction(&Vec3::new(0.3, 0.5, 0.81).normalize(), &tol).unwrap();
    c.bench_function("project_box", |b| {
        b.iter(|| project_box(black_box(&dims), black_box(&orient), &tol).unwrap())
    });

    let shadow = project_box(&dims, &orient, &tol).unwrap();
    c.bench_function("largest_homothet_lp", |b| {
        b.iter(|| largest_homothet_lp(black_box(&shadow.polygon), (1.0, 1.5), black_box(0.4), &tol).unwrap())
    });

    let dir = Vec3::new(2.0, 2.0, 1.0) / 3.0;
    c.bench_function("best_lambda_for_direction", |b| {
        b.iter(|| {
            best_lambda_for_direction(
                black_box(&BoxDims::cube(1.0).unwrap()),
                black_box(&dir),
                DEFAULT_ANGLE_SAMPLES,
                DEFAULT_REFINE_ITERS,
                &tol,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, shadows);
criterion_main!(benches);
