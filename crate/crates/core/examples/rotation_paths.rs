//! Headset rotations and the path they trace in UV space.
//!
//! `cargo run --release --example rotation_paths`

use covrage::metrics::random_rotation;
use covrage::rotation::{
    active_rotation, apply_rotation, direction_to_uv, slerp, SphericalDirection, UnitQuaternion,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> covrage::Result<()> {
    let now = UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], 10f64.to_radians())?;
    let later = UnitQuaternion::from_axis_angle([0.3, 1.0, 0.1], 55f64.to_radians())?;
    println!("rotation between orientations: {:.2} deg", now.angle_to(&later).to_degrees());

    let ap = SphericalDirection::from_degrees(5.0, 10.0);
    let delta = active_rotation(&now, &later);
    println!("{:>6} {:>9} {:>9}", "a", "u", "v");
    for i in 0..=10 {
        let a = i as f64 / 10.0;
        let q = delta.powf(a)?;
        let d = apply_rotation(&q, &ap);
        let uv = direction_to_uv(&d.direction);
        println!("{a:>6.1} {:>9.4} {:>9.4}", uv.u, uv.v);
    }

    // Interpolated orientation halfway between the two poses.
    let mid = slerp(&now, &later, 0.5)?;
    println!("halfway: {:?}", mid.components());

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let q = random_rotation(&mut rng);
    println!("random rotation of {:.1} deg about {:?}", q.angle().to_degrees(), q.axis());
    Ok(())
}
