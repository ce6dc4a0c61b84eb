//! On- and off-trajectory gain profiles, gain variation and gain
//! concentration for one random trajectory.

use covrage::beam::{beam_from_plan, BeamType};
use covrage::harness::{trajectory_draw, ScenarioConfig};
use covrage::metrics::{
    gain_concentration, gain_map, gain_variation, isotropic_map, shift_trajectory,
    trajectory_gain_profile, DistanceField, NormalSide, PROFILE_STEP,
};

fn main() -> covrage::Result<()> {
    let cfg = ScenarioConfig { resolution: 512, ..ScenarioConfig::default() };
    let draw = trajectory_draw(&cfg, 11)?;
    let plan = &draw.plan;
    println!("trajectory length {:.3} uv", plan.total_length());

    let field = DistanceField::new(cfg.resolution, &plan.samples, 0.2)?;
    let deltas = [0.01, 0.036, 0.1];
    let iso = gain_concentration(&isotropic_map(cfg.resolution), &field, &deltas)?;
    println!("isotropic concentration at {deltas:?}: {iso:.3?}");

    for bt in [BeamType::Tight, BeamType::Loose] {
        let out = beam_from_plan(plan, &cfg.beam_config(bt)?)?;
        let geom = out.spec.partition.geometry();
        for shift in [0.0, 0.025, 0.075] {
            let path = if shift == 0.0 { plan.clone() } else { shift_trajectory(plan, shift, NormalSide::Left)? };
            let gains: Vec<f64> = trajectory_gain_profile(geom, out.weights.values(), &path, PROFILE_STEP)
                .iter()
                .map(|p| p.gain_db)
                .collect();
            let mean = gains.iter().sum::<f64>() / gains.len() as f64;
            println!(
                "{bt:>5} shift {shift:.3}: mean {mean:6.2} dBi, variation {:5.2} dB over {} points",
                gain_variation(&gains)?,
                gains.len()
            );
        }
        let map = gain_map(geom, out.weights.values(), cfg.resolution)?;
        let c = gain_concentration(&map, &field, &deltas)?;
        println!("{bt:>5} concentration at {deltas:?}: {c:.3?}");
    }
    Ok(())
}
