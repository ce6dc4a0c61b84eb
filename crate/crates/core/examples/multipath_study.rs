//! On-trajectory gain change when NLoS paths are added, over a small batch.

use covrage::harness::{compute_multipath, ScenarioConfig, PRESET_60GHZ};

fn main() -> covrage::Result<()> {
    let cfg = ScenarioConfig {
        trajectories: 16,
        channel_draws: 50,
        ..ScenarioConfig::preset(PRESET_60GHZ)?
    };
    println!("{:>6} {:>6} {:>12} {:>10} {:>10}", "K dB", "beam", "avg worst", "P99.99", "worst");
    for case in compute_multipath(&cfg, 1)? {
        println!(
            "{:>6} {:>6} {:>12.3} {:>10.3} {:>10.3}",
            case.k_factor_db,
            case.beam_type.as_str(),
            case.averaged_worst(),
            case.tail(99.99)?,
            case.worst()
        );
    }
    Ok(())
}
