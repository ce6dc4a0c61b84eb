//! Random orientations and trajectory endpoints.

use rand::Rng;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rotation::{UnitQuaternion, Vec3};

/// Uniformly distributed rotation (Shoemake's subgroup algorithm).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> UnitQuaternion {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random_range(0.0..2.0 * PI);
    let u3: f64 = rng.random_range(0.0..2.0 * PI);
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    UnitQuaternion::new(a * u2.sin(), a * u2.cos(), b * u3.sin(), b * u3.cos())
        .expect("Shoemake sample has unit norm")
}

/// Uniform direction on the unit sphere.
pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Rotation angle drawn from the density `∝ 1 − cos ω` (that of uniform random
/// rotations) truncated to `[min, max]` radians.
pub fn truncated_rotation_angle<R: Rng + ?Sized>(rng: &mut R, min: f64, max: f64) -> Result<f64> {
    if !(0.0 <= min && min <= max && max <= PI) {
        return Err(Error::InvalidArgument(format!(
            "rotation angle range [{min}, {max}] must lie within [0, π]"
        )));
    }
    if max - min < 1e-15 {
        return Ok(min);
    }
    let peak = 1.0 - max.cos();
    if peak <= 0.0 {
        return Ok(min);
    }
    loop {
        let w = rng.random_range(min..=max);
        if rng.random::<f64>() * peak <= 1.0 - w.cos() {
            return Ok(w);
        }
    }
}

/// Pair `(q, p)` with `q` uniform and the relative rotation angle between
/// them in `[min_deg, max_deg]`, distributed as for uniform random pairs.
pub fn sample_endpoints<R: Rng + ?Sized>(
    rng: &mut R,
    min_deg: f64,
    max_deg: f64,
) -> Result<(UnitQuaternion, UnitQuaternion)> {
    let q = random_rotation(rng);
    let w = truncated_rotation_angle(rng, min_deg.to_radians(), max_deg.to_radians())?;
    let r = UnitQuaternion::from_axis_angle(random_axis(rng), w)?;
    // q p* = q q* r* = r*, whose angle is w.
    Ok((q, r.compose(&q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn endpoint_angles_within_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let (q, p) = sample_endpoints(&mut rng, 20.0, 180.0).unwrap();
            let a = q.angle_to(&p).to_degrees();
            assert!((20.0 - 1e-9..=180.0 + 1e-9).contains(&a), "{a}");
        }
    }

    #[test]
    fn invalid_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_endpoints(&mut rng, 90.0, 20.0).is_err());
        assert!(sample_endpoints(&mut rng, 0.0, 200.0).is_err());
    }
}
