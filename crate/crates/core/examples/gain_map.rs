//! Gain map of a coverage beam over the visible disk, with an ASCII preview.
//!
//! `cargo run --release --example gain_map -- out_dir` writes CSV and binary maps.

use covrage::harness::{compute_gainmap, ScenarioConfig};
use covrage::channel::linear_to_db;

fn main() -> covrage::Result<()> {
    let cfg = ScenarioConfig {
        start_quaternion: Some([1.0, 0.0, 0.0, 0.0]),
        end_quaternion: Some([0.966, 0.0, 0.259, 0.0]),
        ap_azimuth_deg: -10.0,
        ap_elevation_deg: 8.0,
        resolution: 256,
        ..ScenarioConfig::default()
    };
    let res = compute_gainmap(&cfg)?;
    let out_dir = std::env::args().nth(1);
    for (beam, map) in &res.beams {
        let (peak, i, j) = map.peak().unwrap();
        println!(
            "{} beam: peak {:.2} dBi at {:?}, integrated gain {:.4}",
            beam.spec.beam_type,
            linear_to_db(peak),
            map.point(i, j),
            map.integrated_gain()
        );
        // Coarse preview: '#' >= 20 dBi, '+' >= 8 dBi, '.' visible.
        let step = map.resolution() / 64;
        for j in (0..map.resolution()).step_by(step * 2).rev() {
            let row: String = (0..map.resolution())
                .step_by(step)
                .map(|i| match map.get(i, j) {
                    Some(g) if linear_to_db(g) >= 20.0 => '#',
                    Some(g) if linear_to_db(g) >= 8.0 => '+',
                    Some(_) => '.',
                    None => ' ',
                })
                .collect();
            println!("{row}");
        }
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)?;
            let name = beam.spec.beam_type.as_str();
            map.write_csv(std::fs::File::create(format!("{dir}/gainmap_{name}.csv"))?)?;
            map.write_binary(std::fs::File::create(format!("{dir}/gainmap_{name}.bin"))?)?;
        }
    }
    Ok(())
}
