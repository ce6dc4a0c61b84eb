//! Loading a scenario from TOML over a preset and running a study to disk,
//! as the command-line tool does.
//!
//! `cargo run --release --example scenario_run -- out_dir`

use covrage::harness::{run_concentration, RunOptions, ScenarioConfig};

const SCENARIO: &str = r#"
preset = "paper-120ghz"
trajectories = 8
resolution = 256
seed = 42
"#;

fn main() -> covrage::Result<()> {
    let cfg = ScenarioConfig::from_toml_str(SCENARIO, None)?;
    println!("{} x {} elements at {:.0} GHz, {} trajectories", cfg.n_side, cfg.n_side, cfg.frequency_hz / 1e9, cfg.trajectories);
    let out = std::env::args().nth(1).unwrap_or_else(|| std::env::temp_dir().join("covrage-scenario").display().to_string());
    let summary = run_concentration(&cfg, &RunOptions::new(2, &out))?;
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    let manifest = std::fs::read_to_string(std::path::Path::new(&out).join("manifest.json"))?;
    println!("{manifest}");
    Ok(())
}
