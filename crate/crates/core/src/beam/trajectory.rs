//! Predicted angle-of-arrival path in UV space, sub-beam placement and slope
//! classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotation::{active_rotation, SphericalDirection, UnitQuaternion, UvPoint};

/// Initial interpolation step in the rotation parameter.
pub const INITIAL_PARAM_STEP: f64 = 0.01;
/// Accepted deviation of a sample spacing from its target, as a fraction.
pub const SPACING_TOLERANCE: f64 = 0.2;
/// Default target UV distance between consecutive samples.
pub const DEFAULT_SAMPLE_SPACING: f64 = 0.002;

const MAX_RETRIES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeClass {
    NonDiagonal,
    SemiDiagonal,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// Sampled trajectory plus the sub-beam directions chosen along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPlan {
    /// Near-equidistant samples, start to end.
    pub samples: Vec<UvPoint>,
    /// Cumulative arc length at each sample; `arc[0] == 0`.
    pub arc: Vec<f64>,
    /// Rotation parameter of each sample (empty for plans built from UV points).
    pub params: Vec<f64>,
    /// Number of samples that fell behind the array plane.
    pub behind_samples: usize,
    /// Number of samples outside the unit disk (shifted paths only).
    pub outside_disk: usize,
    pub subbeam_dirs: Vec<UvPoint>,
    pub subbeam_arc: Vec<f64>,
    pub midpoints: Vec<UvPoint>,
    pub coverage_infeasible: bool,
}

fn cumulative_arc(samples: &[UvPoint]) -> Vec<f64> {
    let mut arc = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    for (i, p) in samples.iter().enumerate() {
        if i > 0 {
            acc += p.distance(&samples[i - 1]);
        }
        arc.push(acc);
    }
    arc
}

impl TrajectoryPlan {
    /// Plan over an explicit UV polyline.
    pub fn from_samples(samples: Vec<UvPoint>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("trajectory needs at least one sample".into()));
        }
        let arc = cumulative_arc(&samples);
        let outside_disk = samples.iter().filter(|p| !p.is_visible()).count();
        Ok(TrajectoryPlan {
            samples,
            arc,
            params: Vec::new(),
            behind_samples: 0,
            outside_disk,
            subbeam_dirs: Vec::new(),
            subbeam_arc: Vec::new(),
            midpoints: Vec::new(),
            coverage_infeasible: false,
        })
    }

    pub fn total_length(&self) -> f64 {
        *self.arc.last().unwrap_or(&0.0)
    }

    pub fn is_degenerate(&self) -> bool {
        self.samples.len() < 2
    }

    pub fn start(&self) -> UvPoint {
        self.samples[0]
    }

    pub fn end(&self) -> UvPoint {
        *self.samples.last().expect("plan has samples")
    }

    pub fn leaves_hemisphere(&self) -> bool {
        self.behind_samples > 0
    }

    /// Point at arc position `s`, linearly interpolated between samples.
    pub fn point_at_arc(&self, s: f64) -> UvPoint {
        if self.samples.len() == 1 || s <= 0.0 {
            return self.samples[0];
        }
        if s >= self.total_length() {
            return self.end();
        }
        let i = self.arc.partition_point(|&a| a <= s).max(1);
        let (a0, a1) = (self.arc[i - 1], self.arc[i]);
        let t = if a1 > a0 { (s - a0) / (a1 - a0) } else { 0.0 };
        self.samples[i - 1].lerp(&self.samples[i], t)
    }

    /// Points every `step` of arc length from the start, plus the end point.
    pub fn resample(&self, step: f64) -> Vec<UvPoint> {
        let t = self.total_length();
        if self.is_degenerate() || t == 0.0 {
            return vec![self.samples[0]];
        }
        let n = (t / step).floor() as usize;
        let mut out: Vec<UvPoint> = (0..=n).map(|k| self.point_at_arc(k as f64 * step)).collect();
        if t - n as f64 * step > step * 1e-9 {
            out.push(self.end());
        }
        out
    }

    fn nearest_sample(&self, s: f64) -> usize {
        let i = self.arc.partition_point(|&a| a < s);
        if i == 0 {
            0
        } else if i >= self.arc.len() {
            self.arc.len() - 1
        } else if (self.arc[i] - s) < (s - self.arc[i - 1]) {
            i
        } else {
            i - 1
        }
    }

    /// Mirror across the u = v diagonal.
    pub fn transposed(&self) -> TrajectoryPlan {
        let mut t = self.clone();
        t.samples.iter_mut().for_each(|p| *p = p.transposed());
        t.subbeam_dirs.iter_mut().for_each(|p| *p = p.transposed());
        t.midpoints.iter_mut().for_each(|p| *p = p.transposed());
        t
    }

    pub fn subbeam_directions(&self) -> Result<Vec<SphericalDirection>> {
        self.subbeam_dirs.iter().map(crate::rotation::uv_to_direction).collect()
    }
}

/// Adaptive sampling of the apparent access-point path while the headset
/// rotates from `q_start` to `q_end`.
///
/// The access point starts at `ap_direction` (headset frame) and follows the
/// active rotation `(q_start q_end*)^a`, `a ∈ [0, 1]`. After every candidate
/// the parameter step is rescaled by `target / actual`; candidates whose
/// spacing is more than 20% off target are retried with the rescaled step.
/// Only the final sample may be closer than that.
pub fn sample_trajectory(
    q_start: &UnitQuaternion,
    q_end: &UnitQuaternion,
    ap_direction: &SphericalDirection,
    target_spacing: f64,
) -> Result<TrajectoryPlan> {
    if !(target_spacing > 0.0 && target_spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "target sample spacing must be positive, got {target_spacing}"
        )));
    }
    let rotation = active_rotation(q_start, q_end);
    let d0 = ap_direction.to_vector();
    let at = |a: f64| -> Result<([f64; 3], UvPoint)> {
        let v = rotation.powf(a)?.rotate_vector(d0);
        Ok((v, UvPoint::new(v[0], v[1])))
    };

    let (v0, p0) = at(0.0)?;
    let mut samples = vec![p0];
    let mut params = vec![0.0];
    let mut behind = usize::from(v0[2] < 0.0);
    if rotation.angle() < 1e-12 {
        return finish(samples, params, behind);
    }

    let mut a = 0.0;
    let mut step = INITIAL_PARAM_STEP;
    while a < 1.0 {
        let last = *samples.last().unwrap();
        let mut retries = 0;
        loop {
            let next = (a + step).min(1.0);
            let (v, p) = at(next)?;
            let ds = p.distance(&last);
            let ratio = ds / target_spacing;
            let final_step = next >= 1.0;
            let accept = (ratio - 1.0).abs() <= SPACING_TOLERANCE
                || (final_step && ratio <= 1.0 + SPACING_TOLERANCE)
                || retries >= MAX_RETRIES;
            step = if ds > 0.0 { step * target_spacing / ds } else { step * 2.0 };
            if accept {
                samples.push(p);
                params.push(next);
                behind += usize::from(v[2] < 0.0);
                a = next;
                break;
            }
            retries += 1;
        }
    }
    finish(samples, params, behind)
}

fn finish(samples: Vec<UvPoint>, params: Vec<f64>, behind: usize) -> Result<TrajectoryPlan> {
    let mut plan = TrajectoryPlan::from_samples(samples)?;
    plan.params = params;
    plan.behind_samples = behind;
    // A rotation about the access-point direction itself leaves it in place.
    if plan.total_length() < 1e-12 && plan.samples.len() > 1 {
        plan.samples.truncate(1);
        plan.arc.truncate(1);
        plan.params.truncate(1);
    }
    Ok(plan)
}

/// Chooses `s` sub-beam directions spaced `t/(s-1)` apart along the path,
/// the first and last on the trajectory endpoints, and the midpoints between
/// each adjacent pair. Flags the plan when the spacing exceeds `beamwidth_uv`.
pub fn place_subbeams(plan: &TrajectoryPlan, s: usize, beamwidth_uv: f64) -> Result<TrajectoryPlan> {
    if s == 0 {
        return Err(Error::InvalidArgument("at least one sub-beam is required".into()));
    }
    let mut out = plan.clone();
    let t = plan.total_length();
    let mut idx = Vec::with_capacity(s);
    if s == 1 {
        idx.push(0);
    } else {
        let spacing = t / (s - 1) as f64;
        for k in 0..s {
            idx.push(if k == s - 1 { plan.samples.len() - 1 } else { plan.nearest_sample(k as f64 * spacing) });
        }
        out.coverage_infeasible = spacing > beamwidth_uv;
        if out.coverage_infeasible {
            log::warn!(
                "sub-beam spacing {spacing:.4} uv exceeds beamwidth {beamwidth_uv:.4} uv; coverage will have gaps"
            );
        }
    }
    out.subbeam_dirs = idx.iter().map(|&i| plan.samples[i]).collect();
    out.subbeam_arc = idx.iter().map(|&i| plan.arc[i]).collect();
    out.midpoints = out
        .subbeam_arc
        .windows(2)
        .map(|w| plan.samples[plan.nearest_sample(0.5 * (w[0] + w[1]))])
        .collect();
    Ok(out)
}

/// Slope class, orientation and the fitted slope magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub slope_class: SlopeClass,
    pub orientation: Orientation,
    pub slope: f64,
}

const NON_DIAGONAL_LIMIT: f64 = 1.0 / 3.0;
const DIAGONAL_LIMIT: f64 = 2.0 / 3.0;
// Slopes within this distance of 2/3 count as diagonal.
const BOUNDARY_EPS: f64 = 1e-9;

pub fn slope_class(slope: f64) -> SlopeClass {
    let m = slope.abs();
    if m < NON_DIAGONAL_LIMIT {
        SlopeClass::NonDiagonal
    } else if m >= DIAGONAL_LIMIT - BOUNDARY_EPS {
        SlopeClass::Diagonal
    } else {
        SlopeClass::SemiDiagonal
    }
}

/// Orientation from the larger axis range, slope from a least-squares line
/// fit in that orientation's frame (v on u when horizontal, u on v when vertical).
pub fn classify_trajectory(plan: &TrajectoryPlan) -> Classification {
    if plan.samples.len() < 2 {
        return Classification {
            slope_class: SlopeClass::NonDiagonal,
            orientation: Orientation::Horizontal,
            slope: 0.0,
        };
    }
    let range = |f: fn(&UvPoint) -> f64| {
        let (lo, hi) = plan
            .samples
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi - lo
    };
    let orientation = if range(|p| p.u) >= range(|p| p.v) {
        Orientation::Horizontal
    } else {
        Orientation::Vertical
    };
    let pts: Vec<(f64, f64)> = plan
        .samples
        .iter()
        .map(|p| match orientation {
            Orientation::Horizontal => (p.u, p.v),
            Orientation::Vertical => (p.v, p.u),
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Classification {
        slope_class: slope_class(slope),
        orientation,
        slope: slope.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(from: UvPoint, to: UvPoint, n: usize) -> TrajectoryPlan {
        let pts = (0..=n).map(|i| from.lerp(&to, i as f64 / n as f64)).collect();
        TrajectoryPlan::from_samples(pts).unwrap()
    }

    #[test]
    fn identical_endpoints_give_single_sample() {
        let q = UnitQuaternion::from_axis_angle([1.0, 2.0, 0.5], 0.7).unwrap();
        let ap = SphericalDirection::from_degrees(10.0, 20.0);
        let plan = sample_trajectory(&q, &q, &ap, 0.002).unwrap();
        assert_eq!(plan.samples.len(), 1);
        assert_eq!(plan.total_length(), 0.0);
        let p = crate::rotation::direction_to_uv(&ap);
        assert!(plan.samples[0].distance(&p) < 1e-15);
    }

    #[test]
    fn rotation_about_ap_axis_is_degenerate() {
        let ap = SphericalDirection::from_degrees(20.0, 10.0);
        let q = UnitQuaternion::from_axis_angle(ap.to_vector(), 1.0).unwrap();
        let plan = sample_trajectory(&UnitQuaternion::IDENTITY, &q, &ap, 0.002).unwrap();
        assert_eq!(plan.samples.len(), 1);
    }

    #[test]
    fn azimuth_sweep_from_broadside_stays_on_v_zero() {
        let q_end = UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], -30f64.to_radians()).unwrap();
        let plan = sample_trajectory(&UnitQuaternion::IDENTITY, &q_end, &SphericalDirection::BROADSIDE, 0.002).unwrap();
        for p in &plan.samples {
            assert!(p.v.abs() < 1e-12);
        }
        // u = sin θ runs from 0 to sin 30°.
        assert!((plan.total_length() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive_spacing() {
        let q = UnitQuaternion::IDENTITY;
        assert!(sample_trajectory(&q, &q, &SphericalDirection::BROADSIDE, 0.0).is_err());
    }

    #[test]
    fn straight_path_subbeam_spacing() {
        let plan = line(UvPoint::new(-0.15, 0.1), UvPoint::new(0.15, 0.1), 150);
        let placed = place_subbeams(&plan, 16, 0.11).unwrap();
        assert_eq!(placed.subbeam_dirs.len(), 16);
        assert_eq!(placed.midpoints.len(), 15);
        for w in placed.subbeam_dirs.windows(2) {
            assert!((w[0].distance(&w[1]) - 0.02).abs() < 1e-9);
        }
        assert_eq!(placed.subbeam_dirs[0], plan.start());
        assert_eq!(*placed.subbeam_dirs.last().unwrap(), plan.end());
        assert!(!placed.coverage_infeasible);
        let tight = place_subbeams(&plan, 16, 0.01).unwrap();
        assert!(tight.coverage_infeasible);
    }

    #[test]
    fn zero_length_path_stacks_subbeams() {
        let plan = TrajectoryPlan::from_samples(vec![UvPoint::new(0.2, 0.3)]).unwrap();
        let placed = place_subbeams(&plan, 14, 0.1).unwrap();
        assert!(placed.subbeam_dirs.iter().all(|p| *p == UvPoint::new(0.2, 0.3)));
        assert_eq!(placed.midpoints.len(), 13);
    }

    #[test]
    fn one_and_two_subbeams() {
        let plan = line(UvPoint::new(0.0, 0.0), UvPoint::new(0.1, 0.0), 50);
        let one = place_subbeams(&plan, 1, 0.1).unwrap();
        assert_eq!(one.subbeam_dirs, vec![plan.start()]);
        assert!(one.midpoints.is_empty());
        let two = place_subbeams(&plan, 2, 0.1).unwrap();
        assert_eq!(two.subbeam_dirs, vec![plan.start(), plan.end()]);
        assert!((two.midpoints[0].u - 0.05).abs() < 1e-12);
        assert!(place_subbeams(&plan, 0, 0.1).is_err());
    }

    #[test]
    fn classification_examples() {
        let c = classify_trajectory(&line(UvPoint::new(0.0, 0.0), UvPoint::new(0.5, 0.1), 100));
        assert_eq!((c.slope_class, c.orientation), (SlopeClass::NonDiagonal, Orientation::Horizontal));
        let c = classify_trajectory(&line(UvPoint::new(0.0, 0.0), UvPoint::new(0.4, -0.2), 100));
        assert_eq!((c.slope_class, c.orientation), (SlopeClass::SemiDiagonal, Orientation::Horizontal));
        let c = classify_trajectory(&line(UvPoint::new(0.0, 0.0), UvPoint::new(0.2, 0.3), 100));
        assert_eq!((c.slope_class, c.orientation), (SlopeClass::Diagonal, Orientation::Vertical));
        let c = classify_trajectory(&TrajectoryPlan::from_samples(vec![UvPoint::default()]).unwrap());
        assert_eq!((c.slope_class, c.orientation), (SlopeClass::NonDiagonal, Orientation::Horizontal));
    }

    #[test]
    fn resample_includes_endpoint() {
        let plan = line(UvPoint::new(0.0, 0.0), UvPoint::new(0.01, 0.0), 5);
        let r = plan.resample(0.004);
        assert_eq!(r.len(), 4);
        assert!((r[1].u - 0.004).abs() < 1e-15);
        assert_eq!(*r.last().unwrap(), plan.end());
    }
}
