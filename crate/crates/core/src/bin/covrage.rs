use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use covrage::harness::{self, RunOptions, ScenarioConfig};
use covrage::Error;

#[derive(Parser)]
#[command(name = "covrage", version, about = "Oblong multi-sub-beam receive beams and their evaluation studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gain map and trajectory polyline for one trajectory.
    Gainmap {
        #[command(flatten)]
        common: Common,
        /// Transmit power over noise (dB); adds an SNR column to the profiles.
        #[arg(long, value_name = "DB")]
        p_over_n0_db: Option<f64>,
    },
    /// On- and off-trajectory gain and gain variation, binned by length.
    Sweep(Common),
    /// Share of integrated gain near the trajectory.
    Concentration(Common),
    /// Gain error of quantized phase shifters.
    Quantize(Common),
    /// On-trajectory gain change under Rician multipath.
    Multipath(Common),
    /// Sliding-window statistics of a recorded head-motion trace.
    TraceStats(Common),
}

#[derive(Args)]
struct Common {
    /// TOML scenario file; missing keys come from the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Named preset (paper-120ghz, paper-60ghz).
    #[arg(long)]
    preset: Option<String>,
    /// Number of random trajectories.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Phase-shifter bits; for `quantize` a comma-separated list of depths.
    #[arg(long, value_delimiter = ',')]
    bits: Vec<u32>,
    /// Head-motion trace CSV (timestamp_ns,qw,qx,qy,qz).
    #[arg(long)]
    trace: Option<String>,
}

impl Common {
    fn resolve(&self, quantize: bool) -> Result<(ScenarioConfig, RunOptions), Error> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p, self.preset.as_deref())?,
            None => ScenarioConfig::preset(self.preset.as_deref().unwrap_or(harness::PRESET_120GHZ))?,
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.trajectories {
            cfg.trajectories = n;
        }
        if !self.bits.is_empty() {
            if quantize {
                cfg.quantization_bits = self.bits.clone();
            } else if let [b] = self.bits[..] {
                cfg.phase_bits = b;
            } else {
                return Err(Error::Config("--bits takes a single value here".into()));
            }
        }
        if let Some(t) = &self.trace {
            cfg.trace_file = Some(t.clone());
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.to_string_lossy().into_owned();
        }
        if self.threads == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        cfg.validate()?;
        let opts = RunOptions::new(self.threads, &cfg.output_dir);
        Ok((cfg, opts))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::CoverageInfeasible { .. } => 4,
        _ => 3,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gainmap { common, p_over_n0_db } => common.resolve(false).and_then(|(cfg, mut opts)| {
            opts.p_over_n0_db = *p_over_n0_db;
            harness::run_gainmap(&cfg, &opts)
        }),
        Command::Sweep(c) => c.resolve(false).and_then(|(cfg, o)| harness::run_sweep(&cfg, &o)),
        Command::Concentration(c) => c.resolve(false).and_then(|(cfg, o)| harness::run_concentration(&cfg, &o)),
        Command::Quantize(c) => c.resolve(true).and_then(|(cfg, o)| harness::run_quantization(&cfg, &o)),
        Command::Multipath(c) => c.resolve(false).and_then(|(cfg, o)| harness::run_multipath(&cfg, &o)),
        Command::TraceStats(c) => c.resolve(false).and_then(|(cfg, o)| harness::run_trace_stats(&cfg, &o)),
    };
    match result {
        Ok(summary) => {
            if summary.infeasible > 0 {
                log::warn!("{} beams could not fully cover their trajectory", summary.infeasible);
            }
            for f in &summary.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
