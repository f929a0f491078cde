//! Seeded random rotations and directions.

use nalgebra::{Quaternion, UnitQuaternion};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geom::{Orientation, Vec3};

/// Uniformly distributed rotation (normalized Gaussian quaternion).
pub fn random_orientation<R: Rng + ?Sized>(rng: &mut R) -> Orientation {
    loop {
        let q = Quaternion::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        if q.norm() > 1e-6 {
            return Orientation::from_quaternion(&UnitQuaternion::from_quaternion(q));
        }
    }
}

/// Uniformly distributed unit vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

/// Random unit vector whose components all exceed `min_abs` in magnitude.
pub fn random_generic_direction<R: Rng + ?Sized>(rng: &mut R, min_abs: f64) -> Vec3 {
    loop {
        let v = random_direction(rng);
        if v.iter().all(|c| c.abs() > min_abs) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Tolerances;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_rotations_are_valid_and_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tol = Tolerances::default();
        for _ in 0..200 {
            let a = random_orientation(&mut rng);
            let b = random_orientation(&mut rng);
            assert!(a.orthonormality_defect() < tol.ortho);
            let c = a.compose(&b);
            assert!(c.orthonormality_defect() < 2.0 * tol.ortho);
            assert!((c.determinant() - 1.0).abs() < 2.0 * tol.ortho);
        }
    }
}
