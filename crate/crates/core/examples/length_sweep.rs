//! Trajectory gain binned by trajectory length, smoothed as for plotting.
//!
//! `cargo run --release --example length_sweep -- 300 4` runs 300
//! trajectories on 4 threads.

use covrage::harness::{compute_sweep, ScenarioConfig};

fn main() -> covrage::Result<()> {
    let mut args = std::env::args().skip(1);
    let trajectories = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let threads = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let cfg = ScenarioConfig { trajectories, ..ScenarioConfig::default() };
    let res = compute_sweep(&cfg, threads)?;
    println!("{} series, {} beams flagged infeasible", res.series.len(), res.infeasible);

    let on_t = res.series["on_tight"].smoothed(11, 2)?;
    let on_l = res.series["on_loose"].smoothed(11, 2)?;
    let off_t = res.series["off_0.075_tight"].smoothed(11, 2)?;
    let off_l = res.series["off_0.075_loose"].smoothed(11, 2)?;
    println!("{:>8} {:>9} {:>9} {:>11} {:>11}", "len uv", "on tight", "on loose", "off tight", "off loose");
    for i in (0..on_t.bins.len()).step_by(25) {
        let get = |s: &covrage::metrics::MetricSeries| s.bins.get(i).map_or(f64::NAN, |b| b.mean);
        println!(
            "{:>8.3} {:>9.2} {:>9.2} {:>11.2} {:>11.2}",
            on_t.bin_center(i),
            get(&on_t),
            get(&on_l),
            get(&off_t),
            get(&off_l)
        );
    }
    Ok(())
}
