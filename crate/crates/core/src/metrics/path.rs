//! Metrics measured along and around a trajectory: gain profile, gain
//! variation, off-trajectory shift and gain concentration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gainmap::{cell_center, GainMap};
use crate::array::ArrayGeometry;
use crate::beam::TrajectoryPlan;
use crate::channel::{linear_to_db, los_gain};
use crate::error::{Error, Result};
use crate::rotation::UvPoint;

/// Arc-length step between evaluated points along a trajectory.
pub const PROFILE_STEP: f64 = 0.004;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NormalSide {
    #[default]
    Left,
    Right,
}

/// Displaces every sample by `dist` along the local unit normal, on the
/// chosen side of the direction of travel. Tangents use central differences
/// (one-sided at the ends). Shifted samples outside the unit disk are
/// counted in `outside_disk`.
pub fn shift_trajectory(plan: &TrajectoryPlan, dist: f64, side: NormalSide) -> Result<TrajectoryPlan> {
    let s = &plan.samples;
    if s.len() < 2 {
        return Err(Error::InvalidArgument("shifting needs at least two samples".into()));
    }
    let sign = match side {
        NormalSide::Left => 1.0,
        NormalSide::Right => -1.0,
    };
    let n = s.len();
    let shifted = (0..n)
        .map(|i| {
            let (a, b) = (s[i.saturating_sub(1)], s[(i + 1).min(n - 1)]);
            let (du, dv) = (b.u - a.u, b.v - a.v);
            let len = du.hypot(dv);
            if len == 0.0 {
                return s[i];
            }
            UvPoint::new(s[i].u - sign * dist * dv / len, s[i].v + sign * dist * du / len)
        })
        .collect();
    let out = TrajectoryPlan::from_samples(shifted)?;
    if out.outside_disk > 0 {
        log::debug!("{} shifted samples left the visible disk", out.outside_disk);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub arc: f64,
    pub point: UvPoint,
    pub gain_db: f64,
}

/// Gain in dBi at points every `step` of arc length (plus the end point).
/// Points outside the visible disk are skipped.
pub fn trajectory_gain_profile(
    geometry: &ArrayGeometry,
    weights: &[Complex64],
    plan: &TrajectoryPlan,
    step: f64,
) -> Vec<ProfilePoint> {
    let pts = plan.resample(step);
    let last = pts.len() - 1;
    pts.into_iter()
        .enumerate()
        .filter(|(_, p)| p.is_visible())
        .map(|(k, p)| ProfilePoint {
            arc: if k == last { plan.total_length() } else { k as f64 * step },
            point: p,
            gain_db: linear_to_db(los_gain(geometry, weights, &p)),
        })
        .collect()
}

/// Difference between the highest and lowest gain of a profile, in dB.
pub fn gain_variation(profile_db: &[f64]) -> Result<f64> {
    if profile_db.is_empty() {
        return Err(Error::InvalidArgument("gain variation of an empty profile".into()));
    }
    let (lo, hi) = profile_db
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    Ok(hi - lo)
}

/// Distance from `p` to the segment `a–b`.
pub fn point_segment_distance(p: &UvPoint, a: &UvPoint, b: &UvPoint) -> f64 {
    let (du, dv) = (b.u - a.u, b.v - a.v);
    let l2 = du * du + dv * dv;
    let t = if l2 > 0.0 { (((p.u - a.u) * du + (p.v - a.v) * dv) / l2).clamp(0.0, 1.0) } else { 0.0 };
    p.distance(&UvPoint::new(a.u + t * du, a.v + t * dv))
}

/// Distance from every grid cell center to a polyline, computed only up to
/// `cutoff`; cells farther away hold infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    resolution: usize,
    cutoff: f64,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn new(resolution: usize, polyline: &[UvPoint], cutoff: f64) -> Result<Self> {
        if polyline.is_empty() {
            return Err(Error::InvalidArgument("distance to an empty polyline".into()));
        }
        let mut dist = vec![f64::INFINITY; resolution * resolution];
        let cell = 2.0 / resolution as f64;
        let index = |c: f64| ((c + 1.0) / cell).floor().clamp(0.0, (resolution - 1) as f64) as usize;
        let segments: Vec<(UvPoint, UvPoint)> = if polyline.len() == 1 {
            vec![(polyline[0], polyline[0])]
        } else {
            polyline.windows(2).map(|w| (w[0], w[1])).collect()
        };
        for (a, b) in segments {
            let i0 = index(a.u.min(b.u) - cutoff);
            let i1 = index(a.u.max(b.u) + cutoff);
            let j0 = index(a.v.min(b.v) - cutoff);
            let j1 = index(a.v.max(b.v) + cutoff);
            for j in j0..=j1 {
                let v = cell_center(resolution, j);
                for i in i0..=i1 {
                    let p = UvPoint::new(cell_center(resolution, i), v);
                    let d = point_segment_distance(&p, &a, &b);
                    let slot = &mut dist[j * resolution + i];
                    if d <= cutoff && d < *slot {
                        *slot = d;
                    }
                }
            }
        }
        Ok(DistanceField { resolution, cutoff, dist })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }
}

/// δ values used for concentration curves: 0 to 0.2 uv in 0.002 steps, plus
/// 2 (the whole visible disk).
pub fn default_delta_grid() -> Vec<f64> {
    let mut d: Vec<f64> = (0..=100).map(|i| i as f64 * 0.002).collect();
    d.push(2.0);
    d
}

/// Fraction of the integrated gain over the visible disk lying within `δ`
/// of the trajectory, for each δ. δ ≥ 2 covers the whole disk and yields 1.
/// Finite δ must not exceed the field's cutoff.
pub fn gain_concentration(map: &GainMap, field: &DistanceField, deltas: &[f64]) -> Result<Vec<f64>> {
    if map.resolution() != field.resolution {
        return Err(Error::DimensionMismatch { expected: map.resolution(), got: field.resolution });
    }
    let mut near: Vec<(f64, f64)> = Vec::new();
    let mut total = 0.0;
    for (g, d) in map.values().iter().zip(&field.dist) {
        if g.is_nan() {
            continue;
        }
        total += g;
        if d.is_finite() {
            near.push((*d, *g));
        }
    }
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("gain map integrates to zero".into()));
    }
    near.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut prefix = Vec::with_capacity(near.len() + 1);
    prefix.push(0.0);
    for (_, g) in &near {
        prefix.push(prefix.last().unwrap() + g);
    }
    deltas
        .iter()
        .map(|&delta| {
            if delta >= 2.0 {
                Ok(1.0)
            } else if delta > field.cutoff + 1e-12 {
                Err(Error::InvalidArgument(format!(
                    "δ = {delta} exceeds the distance cutoff {}",
                    field.cutoff
                )))
            } else {
                let k = near.partition_point(|x| x.0 <= delta);
                Ok((prefix[k] / total).min(1.0))
            }
        })
        .collect()
}
