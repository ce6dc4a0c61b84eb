//! Sampling the predicted access-point path, classifying its slope and
//! placing sub-beams along it.

use covrage::beam::{classify_trajectory, place_subbeams, sample_trajectory};
use covrage::channel::predicted_beamwidth_uv;
use covrage::rotation::{SphericalDirection, UnitQuaternion};

fn main() -> covrage::Result<()> {
    let now = UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], 0.0)?;
    let later = UnitQuaternion::from_axis_angle([0.2, 1.0, 0.0], 40f64.to_radians())?;
    let ap = SphericalDirection::from_degrees(-15.0, 5.0);

    let plan = sample_trajectory(&now, &later, &ap, 0.002)?;
    println!(
        "{} samples over {:.4} uv, start {:?}, end {:?}",
        plan.samples.len(),
        plan.total_length(),
        plan.start(),
        plan.end()
    );
    let gaps: Vec<f64> = plan.samples.windows(2).map(|w| w[0].distance(&w[1])).collect();
    let (lo, hi) = gaps.iter().fold((f64::MAX, 0.0f64), |(a, b), g| (a.min(*g), b.max(*g)));
    println!("sample spacing {lo:.5}..{hi:.5} uv");

    let class = classify_trajectory(&plan);
    println!("slope {:.3}: {:?}, {:?}", class.slope, class.slope_class, class.orientation);

    // Sub-array beamwidth: 16 elements per side at half a wavelength.
    let bw = predicted_beamwidth_uv(16, 0.5, 1.0);
    let placed = place_subbeams(&plan, 14, bw)?;
    for (i, d) in placed.subbeam_dirs.iter().enumerate() {
        println!("  sub-beam {i:>2} at ({:+.4}, {:+.4})", d.u, d.v);
    }
    println!("{} midpoints, infeasible: {}", placed.midpoints.len(), placed.coverage_infeasible);
    Ok(())
}
