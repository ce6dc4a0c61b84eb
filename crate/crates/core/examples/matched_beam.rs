//! Conjugate-matched beams on a 32 x 32 array: peak gain, half-power width and
//! the beamwidth prediction.

use covrage::array::{build_ura, WeightVector};
use covrage::channel::{los_gain, linear_to_db, predicted_beamwidth_uv, steering_vector_uv};
use covrage::rotation::UvPoint;
use num_complex::Complex64;

fn main() -> covrage::Result<()> {
    let wavelength = 299_792_458.0 / 60e9;
    let geom = build_ura(32, wavelength / 2.0, wavelength)?;
    let aim = UvPoint::new(0.2, -0.1);

    // Matched weights: w = a(aim) / |a|, stored as phases.
    let a = steering_vector_uv(&geom, &aim);
    let phases: Vec<f64> = a.entries().iter().map(|x| x.arg()).collect();
    let w = WeightVector::new(phases, vec![true; geom.len()])?;
    let g = los_gain(&geom, w.values(), &aim);
    println!("gain at aim: {g:.3} ({:.2} dBi)", linear_to_db(g));

    // Walk along u until the gain halves on each side.
    let half = |dir: f64| {
        let mut s = 0.0;
        while los_gain(&geom, w.values(), &UvPoint::new(aim.u + dir * s, aim.v)) > g / 2.0 {
            s += 1e-5;
        }
        s
    };
    let width = half(1.0) + half(-1.0);
    let predicted = predicted_beamwidth_uv(32, geom.spacing(), wavelength);
    println!("-3 dB width {width:.5} uv, predicted {predicted:.5} uv");

    // A random unit-norm vector never beats N.
    let rand_w: Vec<Complex64> = (0..geom.len()).map(|i| Complex64::from_polar(1.0, (i * i) as f64 * 0.37)).collect();
    let norm = (geom.len() as f64).sqrt();
    let scaled: Vec<Complex64> = rand_w.iter().map(|x| x / norm).collect();
    println!("arbitrary weights at aim: {:.3}", los_gain(&geom, &scaled, &aim));
    Ok(())
}
