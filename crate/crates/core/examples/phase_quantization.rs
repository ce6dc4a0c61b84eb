//! Effect of low-resolution phase shifters on a 32 x 32 coverage beam.

use covrage::array::quantize_phases;
use covrage::beam::BeamType;
use covrage::channel::linear_to_db;
use covrage::harness::{trajectory_draw, ScenarioConfig, PRESET_60GHZ};
use covrage::metrics::{gain_map, percentile_nearest_rank};

fn main() -> covrage::Result<()> {
    let cfg = ScenarioConfig { resolution: 256, ..ScenarioConfig::preset(PRESET_60GHZ)? };
    let draw = trajectory_draw(&cfg, 0)?;
    let out = covrage::beam::beam_from_plan(&draw.plan, &cfg.beam_config(BeamType::Loose)?)?;
    let geom = out.spec.partition.geometry();
    let cont = gain_map(geom, out.continuous.values(), cfg.resolution)?;

    println!("{:>4} {:>9} {:>9} {:>9}", "bits", "p99 dB", "worst dB", "cells");
    for bits in [1, 2, 3, 4, 6, 8] {
        let q = quantize_phases(&out.continuous, bits)?;
        let qmap = gain_map(geom, q.values(), cfg.resolution)?;
        let mut diffs: Vec<f64> = cont
            .values()
            .iter()
            .zip(qmap.values())
            .filter(|(a, b)| !a.is_nan() && (**a >= 10.0 || **b >= 10.0))
            .map(|(a, b)| (linear_to_db(*a) - linear_to_db(*b)).abs())
            .collect();
        diffs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "{bits:>4} {:>9.4} {:>9.4} {:>9}",
            percentile_nearest_rank(&diffs, 99.0)?,
            diffs.last().unwrap(),
            diffs.len()
        );
    }
    Ok(())
}
