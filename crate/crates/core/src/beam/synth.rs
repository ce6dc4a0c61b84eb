//! Sub-beam weight synthesis, inter-sub-beam phase alignment and the full
//! beam pipeline.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::layout::{assign, BeamSpec, BeamType};
use super::trajectory::{
    classify_trajectory, place_subbeams, sample_trajectory, Classification, TrajectoryPlan,
    DEFAULT_SAMPLE_SPACING,
};
use crate::array::{quantize_phases, ArrayGeometry, ArrayPartition, SubarrayKind, WeightVector};
use crate::channel::predicted_beamwidth_uv;
use crate::error::{Error, Result};
use crate::rotation::{uv_to_direction, SphericalDirection, UnitQuaternion, UvPoint};

/// Steers every assigned sub-array at its sub-beam direction. Elements outside
/// the assignment are disabled.
pub fn synthesize(spec: &BeamSpec, plan: &TrajectoryPlan) -> Result<WeightVector> {
    if plan.subbeam_dirs.len() != spec.subbeam_count() {
        return Err(Error::DimensionMismatch {
            expected: spec.subbeam_count(),
            got: plan.subbeam_dirs.len(),
        });
    }
    let geom = spec.partition.geometry();
    let k = geom.phase_scale();
    let mut phases = vec![0.0; geom.len()];
    let mut active = vec![false; geom.len()];
    for (group, dir) in spec.element_groups().iter().zip(&plan.subbeam_dirs) {
        for &e in group {
            let (x, y) = geom.coords(e);
            phases[e] = k * (x as f64 * dir.u + y as f64 * dir.v);
            active[e] = true;
        }
    }
    WeightVector::new(phases, active)
}

/// Phase of one sub-beam's response toward `p`: `arg(w_iᴴ a(p))` restricted to
/// the elements of that sub-array.
pub fn subbeam_phase(geometry: &ArrayGeometry, weights: &WeightVector, elements: &[usize], p: &UvPoint) -> f64 {
    let k = geometry.phase_scale();
    let sum: Complex64 = elements
        .iter()
        .map(|&e| {
            let (x, y) = geometry.coords(e);
            weights.values()[e].conj() * Complex64::from_polar(1.0, k * (x as f64 * p.u + y as f64 * p.v))
        })
        .sum();
    sum.arg()
}

/// Rotates each sub-beam so that its phase at the midpoint it shares with the
/// previous sub-beam matches the previous one. Applied in order, so every
/// later sub-beam inherits the corrections made before it.
pub fn sync_subbeams(weights: &WeightVector, spec: &BeamSpec, plan: &TrajectoryPlan) -> Result<WeightVector> {
    let groups = spec.element_groups();
    if plan.midpoints.len() + 1 != groups.len() && !(groups.len() <= 1 && plan.midpoints.is_empty()) {
        return Err(Error::DimensionMismatch {
            expected: groups.len().saturating_sub(1),
            got: plan.midpoints.len(),
        });
    }
    let geom = spec.partition.geometry();
    let mut w = weights.clone();
    for (i, m) in plan.midpoints.iter().enumerate() {
        let prev = subbeam_phase(geom, &w, &groups[i], m);
        let cur = subbeam_phase(geom, &w, &groups[i + 1], m);
        let delta = cur - prev;
        let mut phases = w.phases().to_vec();
        for &e in &groups[i + 1] {
            phases[e] += delta;
        }
        w = WeightVector::new(phases, w.active().to_vec())?;
    }
    Ok(w)
}

#[derive(Debug, Clone)]
pub struct BeamConfig {
    pub beam_type: BeamType,
    /// Base partition, before transitional sub-arrays are formed.
    pub partition: ArrayPartition,
    pub sample_spacing: f64,
    /// Phase-shifter resolution; `None` keeps continuous phases.
    pub phase_bits: Option<u32>,
}

impl BeamConfig {
    pub fn new(beam_type: BeamType, partition: ArrayPartition) -> Self {
        BeamConfig { beam_type, partition, sample_spacing: DEFAULT_SAMPLE_SPACING, phase_bits: None }
    }

    /// UV half-power beamwidth of one sub-array.
    pub fn subarray_beamwidth(&self) -> f64 {
        predicted_beamwidth_uv(
            self.partition.subarray_side(),
            self.partition.effective_spacing(),
            self.partition.geometry().wavelength(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct BeamOutput {
    pub plan: TrajectoryPlan,
    pub spec: BeamSpec,
    /// Synced weights before quantization.
    pub continuous: WeightVector,
    /// Final weights (quantized when requested).
    pub weights: WeightVector,
    pub warnings: Vec<String>,
}

/// Full pipeline from two headset orientations: sample the access-point path,
/// classify, assign sub-arrays, place and synthesize sub-beams, sync, quantize.
pub fn covrage_beam(
    q_now: &UnitQuaternion,
    q_predicted: &UnitQuaternion,
    ap_direction: &SphericalDirection,
    config: &BeamConfig,
) -> Result<BeamOutput> {
    let plan = sample_trajectory(q_now, q_predicted, ap_direction, config.sample_spacing)?;
    beam_from_plan(&plan, config)
}

/// Same pipeline starting from an already sampled path.
pub fn beam_from_plan(plan: &TrajectoryPlan, config: &BeamConfig) -> Result<BeamOutput> {
    let mut warnings = Vec::new();
    if plan.leaves_hemisphere() {
        warnings.push(format!("{} trajectory samples lie behind the array", plan.behind_samples));
    }
    let class = classify_trajectory(plan);
    let spec = assign(&config.partition, config.beam_type, &class)?;
    let placed = place_subbeams(plan, spec.subbeam_count(), config.subarray_beamwidth())?;
    if placed.coverage_infeasible {
        warnings.push(format!(
            "sub-beam spacing {:.4} uv exceeds sub-array beamwidth {:.4} uv",
            plan.total_length() / (spec.subbeam_count() - 1) as f64,
            config.subarray_beamwidth()
        ));
    }
    let raw = synthesize(&spec, &placed)?;
    let continuous = sync_subbeams(&raw, &spec, &placed)?;
    let weights = match config.phase_bits {
        Some(bits) => quantize_phases(&continuous, bits)?,
        None => continuous.clone(),
    };
    Ok(BeamOutput { plan: placed, spec, continuous, weights, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubbeamRecord {
    pub order: usize,
    pub subarray_id: usize,
    pub label: String,
    pub kind: SubarrayKind,
    pub u: f64,
    pub v: f64,
    pub azimuth_rad: f64,
    pub elevation_rad: f64,
}

/// JSON-friendly summary of a synthesized beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamDescription {
    pub beam_type: BeamType,
    pub classification: Classification,
    pub trajectory_length_uv: f64,
    pub coverage_infeasible: bool,
    pub subbeams: Vec<SubbeamRecord>,
    pub midpoints: Vec<UvPoint>,
    pub active_elements: usize,
    pub phases_rad: Vec<f64>,
    pub active: Vec<bool>,
    pub warnings: Vec<String>,
}

impl BeamOutput {
    pub fn describe(&self) -> BeamDescription {
        let subbeams = self
            .spec
            .assignment
            .iter()
            .zip(&self.plan.subbeam_dirs)
            .enumerate()
            .map(|(order, (&id, p))| {
                let info = self.spec.partition.subarray(id).expect("assigned sub-array exists");
                let dir = uv_to_direction(p).unwrap_or(SphericalDirection::BROADSIDE);
                SubbeamRecord {
                    order,
                    subarray_id: id,
                    label: info.label.clone(),
                    kind: info.kind,
                    u: p.u,
                    v: p.v,
                    azimuth_rad: dir.azimuth,
                    elevation_rad: dir.elevation,
                }
            })
            .collect();
        BeamDescription {
            beam_type: self.spec.beam_type,
            classification: self.spec.classification,
            trajectory_length_uv: self.plan.total_length(),
            coverage_infeasible: self.plan.coverage_infeasible,
            subbeams,
            midpoints: self.plan.midpoints.clone(),
            active_elements: self.weights.active_count(),
            phases_rad: self.weights.phases().to_vec(),
            active: self.weights.active().to_vec(),
            warnings: self.warnings.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{build_ura, partition_multiblock};
    use crate::channel::los_gain;
    use std::f64::consts::PI;

    fn line(from: UvPoint, to: UvPoint, n: usize) -> TrajectoryPlan {
        let pts = (0..=n).map(|i| from.lerp(&to, i as f64 / n as f64)).collect();
        TrajectoryPlan::from_samples(pts).unwrap()
    }

    fn config(bt: BeamType) -> BeamConfig {
        let g = build_ura(64, 0.25, 1.0).unwrap();
        BeamConfig::new(bt, partition_multiblock(&g, 2, 2).unwrap())
    }

    #[test]
    fn single_subarray_hits_full_subarray_gain() {
        let g = build_ura(32, 0.25, 1.0).unwrap();
        let part = partition_multiblock(&g, 1, 2).unwrap();
        let plan = TrajectoryPlan::from_samples(vec![UvPoint::new(0.2, -0.1)]).unwrap();
        let out = beam_from_plan(&plan, &BeamConfig::new(BeamType::Tight, part)).unwrap();
        // Four co-located sub-beams: full array gain toward the point.
        let gain = los_gain(&g, out.weights.values(), &UvPoint::new(0.2, -0.1));
        assert!((gain - 1024.0).abs() < 1e-6);
    }

    #[test]
    fn synthesized_subbeam_peaks_at_its_direction() {
        let cfg = config(BeamType::Tight);
        let plan = line(UvPoint::new(-0.1, 0.0), UvPoint::new(0.2, 0.05), 200);
        let out = beam_from_plan(&plan, &cfg).unwrap();
        let geom = cfg.partition.geometry();
        let groups = out.spec.element_groups();
        for (g, p) in groups.iter().zip(&out.plan.subbeam_dirs) {
            // A sub-beam's own elements sum coherently toward its direction.
            let k = geom.phase_scale();
            let sum: Complex64 = g
                .iter()
                .map(|&e| {
                    let (x, y) = geom.coords(e);
                    Complex64::from_polar(1.0, -out.continuous.phases()[e]) * Complex64::from_polar(1.0, k * (x as f64 * p.u + y as f64 * p.v))
                })
                .sum();
            assert!((sum.norm() - g.len() as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn sync_aligns_midpoint_phases() {
        for bt in [BeamType::Tight, BeamType::Loose] {
            let cfg = config(bt);
            let plan = line(UvPoint::new(-0.2, -0.05), UvPoint::new(0.1, 0.15), 300);
            let out = beam_from_plan(&plan, &cfg).unwrap();
            let groups = out.spec.element_groups();
            let geom = cfg.partition.geometry();
            for (i, m) in out.plan.midpoints.iter().enumerate() {
                let a = subbeam_phase(geom, &out.continuous, &groups[i], m);
                let b = subbeam_phase(geom, &out.continuous, &groups[i + 1], m);
                let d = (a - b).rem_euclid(2.0 * PI);
                assert!(d.min(2.0 * PI - d) < 1e-9, "{bt:?} midpoint {i}: {d}");
            }
        }
    }

    #[test]
    fn quantized_output_uses_levels() {
        let mut cfg = config(BeamType::Loose);
        cfg.phase_bits = Some(3);
        let plan = line(UvPoint::new(0.0, 0.0), UvPoint::new(0.3, 0.0), 150);
        let out = beam_from_plan(&plan, &cfg).unwrap();
        let step = 2.0 * PI / 8.0;
        for p in out.weights.phases() {
            let k = p / step;
            assert!((k - k.round()).abs() < 1e-9);
        }
        assert_eq!(out.weights.active(), out.continuous.active());
    }

    #[test]
    fn pipeline_from_orientations() {
        let cfg = config(BeamType::Tight);
        let q1 = UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], 20f64.to_radians()).unwrap();
        let out = covrage_beam(&UnitQuaternion::IDENTITY, &q1, &SphericalDirection::BROADSIDE, &cfg).unwrap();
        assert_eq!(out.spec.subbeam_count(), 14);
        assert_eq!(out.weights.active_count(), 14 * 256);
        let json = serde_json::to_string(&out.describe()).unwrap();
        assert!(json.contains("\"beam_type\":\"tight\""));
    }
}
