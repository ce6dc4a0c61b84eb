//! Seeded batch studies and their output files.
//!
//! Trajectory `i` draws from its own ChaCha8 stream (master seed, stream `i`),
//! so results never depend on how trajectories are spread across workers.
//! Per-trajectory results are collected in index order before reduction.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ScenarioConfig;
use crate::array::quantize_phases;
use crate::beam::{beam_from_plan, sample_trajectory, BeamConfig, BeamOutput, BeamType, TrajectoryPlan};
use crate::channel::{array_response, db_to_linear, linear_to_db, sample_channel, snr, ChannelModel};
use crate::error::{Error, Result};
use crate::metrics::savgol::{DEFAULT_ORDER, DEFAULT_WINDOW};
use crate::metrics::stats::{fmt_f, sorted_finite};
use crate::metrics::{
    default_delta_grid, gain_concentration, gain_map, gain_variation, isotropic_map,
    percentile_nearest_rank, read_trace, sample_endpoints, shift_trajectory, sliding_motion_stats,
    trajectory_gain_profile, BinAccumulator, DistanceField, GainMap, MetricSeries, MotionStats,
    PROFILE_STEP,
};
use crate::rotation::{direction_to_uv, SphericalDirection, UnitQuaternion};

const MAX_DRAW_ATTEMPTS: usize = 100_000;
// Separates the channel-draw streams from the trajectory streams.
const CHANNEL_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;
/// Directions where neither beam reaches this gain (dBi) are ignored by the
/// quantization study.
pub const QUANTIZATION_FLOOR_DBI: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub threads: usize,
    pub out_dir: PathBuf,
    /// Transmit power over noise power (dB). When set, gain-map runs also
    /// report the post-combining SNR along the trajectory.
    pub p_over_n0_db: Option<f64>,
}

impl RunOptions {
    pub fn new(threads: usize, out_dir: impl Into<PathBuf>) -> Self {
        RunOptions { threads, out_dir: out_dir.into(), p_over_n0_db: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub trajectories: usize,
    pub infeasible: usize,
}

/// One random trajectory of a batch.
#[derive(Debug, Clone)]
pub struct TrajectoryDraw {
    pub index: usize,
    pub q_start: UnitQuaternion,
    pub q_end: UnitQuaternion,
    pub ap_direction: SphericalDirection,
    pub plan: TrajectoryPlan,
}

fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws trajectory `index` of the batch. The access point is fixed at
/// broadside in the world frame; draws whose path leaves the front
/// hemisphere are rejected and redrawn from the same stream.
pub fn trajectory_draw(cfg: &ScenarioConfig, index: usize) -> Result<TrajectoryDraw> {
    let mut rng = trajectory_rng(cfg.seed, index);
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let (q_start, q_end) = sample_endpoints(&mut rng, cfg.min_angle_deg, cfg.max_angle_deg)?;
        let ap = q_start.conjugate().rotate_vector([0.0, 0.0, 1.0]);
        if ap[2] < 0.0 {
            continue;
        }
        let ap_direction = SphericalDirection::from_vector(ap);
        let plan = match sample_trajectory(&q_start, &q_end, &ap_direction, cfg.sample_spacing) {
            Ok(p) => p,
            Err(Error::DegenerateSlerp) => continue,
            Err(e) => return Err(e),
        };
        if plan.leaves_hemisphere() {
            continue;
        }
        return Ok(TrajectoryDraw { index, q_start, q_end, ap_direction, plan });
    }
    Err(Error::InvalidArgument(format!(
        "no front-hemisphere trajectory found for index {index} after {MAX_DRAW_ATTEMPTS} draws"
    )))
}

/// The configured fixed trajectory, or draw 0 of the batch.
pub fn single_trajectory(cfg: &ScenarioConfig) -> Result<TrajectoryDraw> {
    match cfg.fixed_endpoints()? {
        Some((q_start, q_end, ap_direction)) => {
            let plan = sample_trajectory(&q_start, &q_end, &ap_direction, cfg.sample_spacing)?;
            Ok(TrajectoryDraw { index: 0, q_start, q_end, ap_direction, plan })
        }
        None => trajectory_draw(cfg, 0),
    }
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {threads} worker threads: {e}")))
}

/// Runs `f` on every trajectory index in parallel and returns the results in
/// index order.
fn batch<T: Send>(
    cfg: &ScenarioConfig,
    threads: usize,
    count: usize,
    f: impl Fn(TrajectoryDraw) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    let pool = thread_pool(threads)?;
    pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| f(trajectory_draw(cfg, i)?))
            .collect::<Result<Vec<T>>>()
    })
}

fn beam_configs(cfg: &ScenarioConfig) -> Result<Vec<BeamConfig>> {
    cfg.beam_types.iter().map(|&bt| cfg.beam_config(bt)).collect()
}

fn build_beam(cfg: &ScenarioConfig, bc: &BeamConfig, plan: &TrajectoryPlan) -> Result<BeamOutput> {
    let out = beam_from_plan(plan, bc)?;
    if cfg.strict_coverage && out.plan.coverage_infeasible {
        let s = out.spec.subbeam_count();
        return Err(Error::CoverageInfeasible {
            spacing: plan.total_length() / (s.max(2) - 1) as f64,
            beamwidth: bc.subarray_beamwidth(),
        });
    }
    Ok(out)
}

fn profile_db(out: &BeamOutput, plan: &TrajectoryPlan) -> Vec<f64> {
    let geom = out.spec.partition.geometry();
    trajectory_gain_profile(geom, out.weights.values(), plan, PROFILE_STEP)
        .into_iter()
        .map(|p| p.gain_db)
        .filter(|g| g.is_finite())
        .collect()
}

fn shift_label(shift: f64) -> String {
    if shift == 0.0 {
        "on".to_string()
    } else {
        format!("off_{shift:.3}")
    }
}

// ---------------------------------------------------------------- gain map

#[derive(Debug, Clone)]
pub struct GainmapResult {
    pub trajectory: TrajectoryDraw,
    pub beams: Vec<(BeamOutput, GainMap)>,
}

pub fn compute_gainmap(cfg: &ScenarioConfig) -> Result<GainmapResult> {
    let trajectory = single_trajectory(cfg)?;
    let mut beams = Vec::new();
    for bc in beam_configs(cfg)? {
        let out = build_beam(cfg, &bc, &trajectory.plan)?;
        let map = gain_map(out.spec.partition.geometry(), out.weights.values(), cfg.resolution)?;
        beams.push((out, map));
    }
    Ok(GainmapResult { trajectory, beams })
}

pub fn run_gainmap(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let t0 = Instant::now();
    let res = compute_gainmap(cfg)?;
    let mut summary = RunSummary { trajectories: 1, ..Default::default() };
    let dir = &opts.out_dir;
    fs::create_dir_all(dir)?;

    let path = dir.join("trajectory.csv");
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    w.write_record(["arc_uv", "u", "v"])?;
    for (p, a) in res.trajectory.plan.samples.iter().zip(&res.trajectory.plan.arc) {
        w.write_record([fmt_f(*a), fmt_f(p.u), fmt_f(p.v)])?;
    }
    w.flush()?;
    summary.files.push(path);

    for (out, map) in &res.beams {
        let name = out.spec.beam_type.as_str();
        summary.infeasible += usize::from(out.plan.coverage_infeasible);
        for w in &out.warnings {
            log::warn!("{name} beam: {w}");
        }
        let csv_path = dir.join(format!("gainmap_{name}.csv"));
        map.write_csv(BufWriter::new(File::create(&csv_path)?))?;
        let bin_path = dir.join(format!("gainmap_{name}.bin"));
        map.write_binary(BufWriter::new(File::create(&bin_path)?))?;
        let json_path = dir.join(format!("beam_{name}.json"));
        fs::write(&json_path, serde_json::to_string_pretty(&out.describe())?)?;
        summary.files.extend([csv_path, bin_path, json_path]);

        let profile_path = dir.join(format!("profile_{name}.csv"));
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&profile_path)?));
        let mut header = vec!["arc_uv", "u", "v", "gain_db"];
        if opts.p_over_n0_db.is_some() {
            header.push("snr_db");
        }
        w.write_record(&header)?;
        let geom = out.spec.partition.geometry();
        for p in trajectory_gain_profile(geom, out.weights.values(), &res.trajectory.plan, PROFILE_STEP) {
            let mut row = vec![fmt_f(p.arc), fmt_f(p.point.u), fmt_f(p.point.v), fmt_f(p.gain_db)];
            if let Some(pn) = opts.p_over_n0_db {
                row.push(fmt_f(linear_to_db(snr(db_to_linear(p.gain_db), db_to_linear(pn), 1.0))));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        summary.files.push(profile_path);
    }
    finish_run(cfg, opts, "gainmap", t0, &mut summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- sweep

/// Length-binned series keyed by name, e.g. `on_tight`, `off_0.075_loose`,
/// `variation_tight`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub series: BTreeMap<String, MetricSeries>,
    pub infeasible: usize,
}

struct SweepItem {
    length: f64,
    infeasible: usize,
    values: Vec<(String, Vec<f64>)>,
}

pub fn compute_sweep(cfg: &ScenarioConfig, threads: usize) -> Result<SweepResult> {
    let configs = beam_configs(cfg)?;
    let items = batch(cfg, threads, cfg.trajectories, |draw| {
        let plan = &draw.plan;
        let mut values = Vec::new();
        let mut infeasible = 0;
        let shifted: Vec<(f64, Option<TrajectoryPlan>)> = cfg
            .shifts
            .iter()
            .map(|&s| {
                let p = if s == 0.0 || plan.is_degenerate() {
                    None
                } else {
                    Some(shift_trajectory(plan, s, cfg.normal_side)?)
                };
                Ok((s, p))
            })
            .collect::<Result<_>>()?;
        for bc in &configs {
            let out = build_beam(cfg, bc, plan)?;
            infeasible += usize::from(out.plan.coverage_infeasible);
            let name = bc.beam_type.as_str();
            for (s, p) in &shifted {
                let gains = profile_db(&out, p.as_ref().unwrap_or(plan));
                if *s == 0.0 && !gains.is_empty() {
                    values.push((format!("variation_{name}"), vec![gain_variation(&gains)?]));
                }
                values.push((format!("{}_{name}", shift_label(*s)), gains));
            }
        }
        Ok(SweepItem { length: plan.total_length(), infeasible, values })
    })?;

    let mut acc: BTreeMap<String, BinAccumulator> = BTreeMap::new();
    let mut infeasible = 0;
    for item in items {
        infeasible += item.infeasible;
        for (key, vals) in item.values {
            let a = match acc.get_mut(&key) {
                Some(a) => a,
                None => acc.entry(key).or_insert(BinAccumulator::new(cfg.bin_width)?),
            };
            a.extend(item.length, vals);
        }
    }
    Ok(SweepResult {
        series: acc.into_iter().map(|(k, a)| (k, a.finish())).collect(),
        infeasible,
    })
}

pub fn run_sweep(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let t0 = Instant::now();
    let res = compute_sweep(cfg, opts.threads)?;
    fs::create_dir_all(&opts.out_dir)?;
    let mut summary = RunSummary { trajectories: cfg.trajectories, infeasible: res.infeasible, ..Default::default() };
    for (key, series) in &res.series {
        let path = opts.out_dir.join(format!("sweep_{key}.csv"));
        series.write_csv(BufWriter::new(File::create(&path)?))?;
        summary.files.push(path);
        let path = opts.out_dir.join(format!("sweep_{key}_smoothed.csv"));
        series
            .smoothed(DEFAULT_WINDOW, DEFAULT_ORDER)?
            .write_csv(BufWriter::new(File::create(&path)?))?;
        summary.files.push(path);
    }
    finish_run(cfg, opts, "sweep", t0, &mut summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- concentration

/// Mean concentration curves over the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationResult {
    pub deltas: Vec<f64>,
    pub beams: Vec<(BeamType, Vec<f64>)>,
    pub isotropic: Vec<f64>,
}

pub fn compute_concentration(cfg: &ScenarioConfig, threads: usize) -> Result<ConcentrationResult> {
    let configs = beam_configs(cfg)?;
    let deltas = default_delta_grid();
    let cutoff = deltas.iter().copied().filter(|&d| d < 2.0).fold(0.0, f64::max);
    let iso = isotropic_map(cfg.resolution);
    let items = batch(cfg, threads, cfg.trajectories, |draw| {
        let field = DistanceField::new(cfg.resolution, &draw.plan.samples, cutoff)?;
        let mut curves = Vec::with_capacity(configs.len() + 1);
        for bc in &configs {
            let out = build_beam(cfg, bc, &draw.plan)?;
            let map = gain_map(out.spec.partition.geometry(), out.weights.values(), cfg.resolution)?;
            curves.push(gain_concentration(&map, &field, &deltas)?);
        }
        curves.push(gain_concentration(&iso, &field, &deltas)?);
        Ok(curves)
    })?;
    let n = items.len() as f64;
    let mut sums = vec![vec![0.0; deltas.len()]; configs.len() + 1];
    for curves in &items {
        for (s, c) in sums.iter_mut().zip(curves) {
            for (a, b) in s.iter_mut().zip(c) {
                *a += b;
            }
        }
    }
    let mut means: Vec<Vec<f64>> = sums.into_iter().map(|s| s.into_iter().map(|x| x / n).collect()).collect();
    let isotropic = means.pop().expect("isotropic curve");
    Ok(ConcentrationResult {
        deltas,
        beams: configs.iter().map(|c| c.beam_type).zip(means).collect(),
        isotropic,
    })
}

impl ConcentrationResult {
    pub fn curve(&self, beam: BeamType) -> Option<&[f64]> {
        self.beams.iter().find(|(b, _)| *b == beam).map(|(_, c)| c.as_slice())
    }

    /// Column `delta_uv`, one column per beam type, then `isotropic`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["delta_uv".to_string()];
        header.extend(self.beams.iter().map(|(b, _)| b.as_str().to_string()));
        header.push("isotropic".into());
        w.write_record(&header)?;
        for (i, d) in self.deltas.iter().enumerate() {
            let mut row = vec![fmt_f(*d)];
            row.extend(self.beams.iter().map(|(_, c)| fmt_f(c[i])));
            row.push(fmt_f(self.isotropic[i]));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_concentration(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let t0 = Instant::now();
    let res = compute_concentration(cfg, opts.threads)?;
    fs::create_dir_all(&opts.out_dir)?;
    let path = opts.out_dir.join("concentration.csv");
    res.write_csv(BufWriter::new(File::create(&path)?))?;
    let mut summary = RunSummary { files: vec![path], trajectories: cfg.trajectories, infeasible: 0 };
    finish_run(cfg, opts, "concentration", t0, &mut summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- quantization

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizationRow {
    pub bits: u32,
    pub p99: f64,
    pub p999: f64,
    pub worst: f64,
    pub n: usize,
}

/// Absolute dB difference between continuous and quantized gain maps on
/// cells where either reaches the 10 dBi floor, pooled over trajectories
/// and beam types.
pub fn compute_quantization(cfg: &ScenarioConfig, threads: usize) -> Result<Vec<QuantizationRow>> {
    let configs = beam_configs(cfg)?;
    let floor = 10f64.powf(QUANTIZATION_FLOOR_DBI / 10.0);
    let bits = cfg.quantization_bits.clone();
    let items = batch(cfg, threads, cfg.trajectories, |draw| {
        let mut diffs: Vec<Vec<f32>> = vec![Vec::new(); bits.len()];
        for bc in &configs {
            let out = build_beam(cfg, bc, &draw.plan)?;
            let geom = out.spec.partition.geometry();
            let cont = gain_map(geom, out.continuous.values(), cfg.resolution)?;
            for (k, &b) in bits.iter().enumerate() {
                let q = quantize_phases(&out.continuous, b)?;
                let qmap = gain_map(geom, q.values(), cfg.resolution)?;
                for (gc, gq) in cont.values().iter().zip(qmap.values()) {
                    if gc.is_nan() || (*gc < floor && *gq < floor) {
                        continue;
                    }
                    diffs[k].push((linear_to_db(*gc) - linear_to_db(*gq)).abs() as f32);
                }
            }
        }
        Ok(diffs)
    })?;
    bits.iter()
        .enumerate()
        .map(|(k, &b)| {
            let pooled: Vec<f64> = items.iter().flat_map(|d| d[k].iter().map(|&x| f64::from(x))).collect();
            let s = sorted_finite(&pooled);
            if s.is_empty() {
                return Ok(QuantizationRow { bits: b, p99: f64::NAN, p999: f64::NAN, worst: f64::NAN, n: 0 });
            }
            Ok(QuantizationRow {
                bits: b,
                p99: percentile_nearest_rank(&s, 99.0)?,
                p999: percentile_nearest_rank(&s, 99.9)?,
                worst: s[s.len() - 1],
                n: s.len(),
            })
        })
        .collect()
}

pub fn write_quantization_csv<W: Write>(rows: &[QuantizationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bits", "p99_db", "p999_db", "worst_db", "n"])?;
    for r in rows {
        w.write_record([r.bits.to_string(), fmt_f(r.p99), fmt_f(r.p999), fmt_f(r.worst), r.n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_quantization(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let t0 = Instant::now();
    let rows = compute_quantization(cfg, opts.threads)?;
    fs::create_dir_all(&opts.out_dir)?;
    let path = opts.out_dir.join("quantization.csv");
    write_quantization_csv(&rows, BufWriter::new(File::create(&path)?))?;
    let mut summary = RunSummary { files: vec![path], trajectories: cfg.trajectories, infeasible: 0 };
    finish_run(cfg, opts, "quantize", t0, &mut summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- multipath

/// Gain change from adding NLoS paths, for one K-factor and beam type.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathCase {
    pub k_factor_db: f64,
    pub beam_type: BeamType,
    /// Per trajectory point, the dB change averaged over channel draws.
    pub averaged_db: Vec<f64>,
    /// Every (point, draw) change, ascending.
    pub pooled_db: Vec<f64>,
}

impl MultipathCase {
    pub fn averaged_worst(&self) -> f64 {
        self.averaged_db.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn worst(&self) -> f64 {
        self.pooled_db.first().copied().unwrap_or(f64::NAN)
    }

    /// Lower-tail value exceeded by `p` percent of the pooled changes.
    pub fn tail(&self, p: f64) -> Result<f64> {
        percentile_nearest_rank(&self.pooled_db, 100.0 - p)
    }
}

pub fn compute_multipath(cfg: &ScenarioConfig, threads: usize) -> Result<Vec<MultipathCase>> {
    let configs = beam_configs(cfg)?;
    let ks = cfg.k_factors_db.clone();
    // Per trajectory: [k][beam] -> (averaged per point, pooled)
    let items = batch(cfg, threads, cfg.trajectories, |draw| {
        let points = draw.plan.resample(PROFILE_STEP);
        let beams: Vec<BeamOutput> = configs.iter().map(|bc| build_beam(cfg, bc, &draw.plan)).collect::<Result<_>>()?;
        let los: Vec<Vec<Complex64>> = beams
            .iter()
            .map(|b| {
                let g = b.spec.partition.geometry();
                points.iter().map(|p| array_response(g, b.weights.values(), p)).collect()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(CHANNEL_SEED_OFFSET));
        rng.set_stream(draw.index as u64);
        let mut out = Vec::with_capacity(ks.len());
        for &k in &ks {
            let mut sums = vec![vec![0.0; points.len()]; beams.len()];
            let mut pooled: Vec<Vec<f32>> = vec![Vec::with_capacity(points.len() * cfg.channel_draws); beams.len()];
            for _ in 0..cfg.channel_draws {
                let ch = sample_channel(cfg.paths, k, SphericalDirection::BROADSIDE, ChannelModel::Simplified, &mut rng)?;
                let los_gain = ch.los().gain;
                for (bi, b) in beams.iter().enumerate() {
                    let g = b.spec.partition.geometry();
                    let nlos: Complex64 = ch
                        .components
                        .iter()
                        .filter(|c| !c.is_los)
                        .map(|c| c.gain * array_response(g, b.weights.values(), &direction_to_uv(&c.aoa)))
                        .sum();
                    for (pi, r0) in los[bi].iter().enumerate() {
                        let d = linear_to_db((los_gain * r0 + nlos).norm_sqr()) - linear_to_db(r0.norm_sqr());
                        sums[bi][pi] += d;
                        pooled[bi].push(d as f32);
                    }
                }
            }
            let n = cfg.channel_draws as f64;
            let averaged: Vec<Vec<f64>> = sums.into_iter().map(|s| s.into_iter().map(|x| x / n).collect()).collect();
            out.push(averaged.into_iter().zip(pooled).collect::<Vec<_>>());
        }
        Ok(out)
    })?;

    let mut cases = Vec::new();
    for (ki, &k) in ks.iter().enumerate() {
        for (bi, bc) in configs.iter().enumerate() {
            let averaged_db: Vec<f64> = items.iter().flat_map(|t| t[ki][bi].0.iter().copied()).collect();
            let pooled: Vec<f64> = items.iter().flat_map(|t| t[ki][bi].1.iter().map(|&x| f64::from(x))).collect();
            cases.push(MultipathCase {
                k_factor_db: k,
                beam_type: bc.beam_type,
                averaged_db,
                pooled_db: sorted_finite(&pooled),
            });
        }
    }
    Ok(cases)
}

pub fn run_multipath(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let t0 = Instant::now();
    let cases = compute_multipath(cfg, opts.threads)?;
    fs::create_dir_all(&opts.out_dir)?;
    let mut summary = RunSummary { trajectories: cfg.trajectories, ..Default::default() };

    let path = opts.out_dir.join("multipath_table.csv");
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
    w.write_record(["k_factor_db", "beam_type", "averaged_worst_db", "p99_99_db", "p99_9999_db", "worst_db", "n"])?;
    for c in &cases {
        w.write_record([
            fmt_f(c.k_factor_db),
            c.beam_type.as_str().to_string(),
            fmt_f(c.averaged_worst()),
            fmt_f(c.tail(99.99)?),
            fmt_f(c.tail(99.9999)?),
            fmt_f(c.worst()),
            c.pooled_db.len().to_string(),
        ])?;
    }
    w.flush()?;
    summary.files.push(path);

    for c in &cases {
        let path = opts
            .out_dir
            .join(format!("multipath_cdf_k{}_{}.csv", c.k_factor_db, c.beam_type.as_str()));
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        w.write_record(["cdf", "diff_db"])?;
        let s = sorted_finite(&c.averaged_db);
        let n = s.len() as f64;
        for (i, d) in s.iter().enumerate() {
            w.write_record([fmt_f((i + 1) as f64 / n), fmt_f(*d)])?;
        }
        w.flush()?;
        summary.files.push(path);
    }
    finish_run(cfg, opts, "multipath", t0, &mut summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- traces

/// Sliding-window statistics of a recorded trace, one entry per window length.
pub fn ingest_trace(path: &Path, windows_ms: &[f64]) -> Result<Vec<MotionStats>> {
    let file = File::open(path).map_err(|e| Error::Config(format!("cannot open trace {}: {e}", path.display())))?;
    let trace = read_trace(file)?;
    if trace.len() < 2 {
        return Err(Error::Trace { line: trace.len() as u64, message: "trace needs at least two samples".into() });
    }
    windows_ms.iter().map(|&w| sliding_motion_stats(&trace, w)).collect()
}

pub fn run_trace_stats(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunSummary> {
    let t0 = Instant::now();
    let path = cfg
        .trace_file
        .as_ref()
        .ok_or_else(|| Error::Config("trace-stats needs trace_file (or --trace)".into()))?;
    let stats = ingest_trace(Path::new(path), &cfg.trace_windows_ms)?;
    fs::create_dir_all(&opts.out_dir)?;
    let mut summary = RunSummary::default();
    for s in &stats {
        let out = opts.out_dir.join(format!("trace_stats_{}ms.csv", s.window_ms));
        s.write_csv(BufWriter::new(File::create(&out)?))?;
        summary.files.push(out);
    }
    finish_run(cfg, opts, "trace-stats", t0, &mut summary)?;
    Ok(summary)
}

// ---------------------------------------------------------------- manifest

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    subcommand: &'a str,
    preset: &'a str,
    seed: u64,
    threads: usize,
    config_sha256: String,
    wall_time_s: f64,
    trajectories: usize,
    infeasible_coverage: usize,
    outputs: Vec<String>,
}

/// Echoes the resolved config and writes `manifest.json` next to the outputs.
fn finish_run(cfg: &ScenarioConfig, opts: &RunOptions, subcommand: &str, t0: Instant, summary: &mut RunSummary) -> Result<()> {
    let text = cfg.to_toml_string()?;
    let config_path = opts.out_dir.join("config.toml");
    fs::write(&config_path, &text)?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        preset: &cfg.preset,
        seed: cfg.seed,
        threads: opts.threads,
        config_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        wall_time_s: t0.elapsed().as_secs_f64(),
        trajectories: summary.trajectories,
        infeasible_coverage: summary.infeasible,
        outputs: summary
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
    };
    let manifest_path = opts.out_dir.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)?)?;
    summary.files.push(config_path);
    summary.files.push(manifest_path);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig { trajectories: 4, resolution: 64, channel_draws: 3, ..ScenarioConfig::default() }
    }

    #[test]
    fn draws_are_reproducible_and_in_front() {
        let cfg = small();
        for i in 0..4 {
            let a = trajectory_draw(&cfg, i).unwrap();
            let b = trajectory_draw(&cfg, i).unwrap();
            assert_eq!(a.plan.samples, b.plan.samples);
            assert!(!a.plan.leaves_hemisphere());
            let ang = a.q_start.angle_to(&a.q_end).to_degrees();
            assert!((20.0 - 1e-9..=180.0 + 1e-9).contains(&ang));
        }
        let other = trajectory_draw(&ScenarioConfig { seed: 2, ..cfg.clone() }, 0).unwrap();
        assert_ne!(other.plan.samples, trajectory_draw(&cfg, 0).unwrap().plan.samples);
    }

    #[test]
    fn sweep_series_names() {
        let res = compute_sweep(&small(), 1).unwrap();
        for key in ["on_tight", "on_loose", "off_0.075_loose", "variation_tight"] {
            assert!(res.series.contains_key(key), "{key}");
        }
    }

    #[test]
    fn multipath_single_path_is_lossless() {
        let cfg = ScenarioConfig { paths: 1, k_factors_db: vec![25.0], trajectories: 2, ..small() };
        for c in compute_multipath(&cfg, 1).unwrap() {
            assert!(c.worst().abs() < 1e-4);
        }
    }

    #[test]
    fn strict_mode_rejects_infeasible() {
        let cfg = ScenarioConfig {
            strict_coverage: true,
            start_quaternion: Some([1.0, 0.0, 0.0, 0.0]),
            end_quaternion: Some([0.0, 0.0, 1.0, 0.0]),
            ap_azimuth_deg: -85.0,
            resolution: 16,
            ..small()
        };
        // A 170° sweep across the whole disk cannot be covered by 14 sub-beams.
        let cfg = ScenarioConfig {
            end_quaternion: {
                let q = UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], -170f64.to_radians()).unwrap();
                Some(q.components())
            },
            ..cfg
        };
        assert!(matches!(compute_gainmap(&cfg), Err(Error::CoverageInfeasible { .. })));
    }
}
