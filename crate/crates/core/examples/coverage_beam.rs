//! Full beam synthesis from two headset orientations, for both beam types.
//!
//! `cargo run --release --example coverage_beam -- beam.json` also writes the
//! loose beam description as JSON.

use covrage::array::{partition_multiblock, ArrayGeometry};
use covrage::beam::{covrage_beam, BeamConfig, BeamType};
use covrage::channel::{linear_to_db, los_gain};
use covrage::rotation::{SphericalDirection, UnitQuaternion};

fn main() -> covrage::Result<()> {
    let geom = ArrayGeometry::from_frequency(64, 0.25, 120e9)?;
    let part = partition_multiblock(&geom, 2, 2)?;
    let now = UnitQuaternion::from_axis_angle([0.1, 1.0, 0.05], 5f64.to_radians())?;
    let later = UnitQuaternion::from_axis_angle([0.1, 1.0, 0.05], 35f64.to_radians())?;
    let ap = SphericalDirection::BROADSIDE;

    for bt in [BeamType::Tight, BeamType::Loose] {
        let cfg = BeamConfig::new(bt, part.clone());
        let out = covrage_beam(&now, &later, &ap, &cfg)?;
        let gains: Vec<f64> = out
            .plan
            .resample(0.004)
            .iter()
            .map(|p| linear_to_db(los_gain(geom_of(&out), out.weights.values(), p)))
            .collect();
        let lo = gains.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{bt}: {:?} path of {:.3} uv, {} sub-beams, {} active elements, on-path gain {lo:.1}..{hi:.1} dBi",
            out.spec.classification.slope_class,
            out.plan.total_length(),
            out.spec.subbeam_count(),
            out.weights.active_count(),
        );
        for w in &out.warnings {
            println!("  warning: {w}");
        }
        if bt == BeamType::Loose {
            if let Some(path) = std::env::args().nth(1) {
                std::fs::write(&path, serde_json::to_string_pretty(&out.describe())?)?;
                println!("  wrote {path}");
            }
        }
    }
    Ok(())
}

fn geom_of(out: &covrage::beam::BeamOutput) -> &ArrayGeometry {
    out.spec.partition.geometry()
}
