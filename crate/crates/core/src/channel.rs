//! Steering vectors, geometric mmWave channels and beamforming gain.
//!
//! Gains follow the usual narrowband geometric model. With `μ = sqrt(N)` and a
//! unit-norm steering vector, the receive-side response `μ·wᴴa` reduces to
//! `Σ conj(w_e)·exp(j·kd·(x·u + y·v))`, which [`array_response`] evaluates
//! separably without any per-element trigonometry.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::rotation::{direction_to_uv, SphericalDirection, UvPoint};

/// Unit-norm array response to a plane wave, `a_{x,y}/sqrt(N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    entries: Vec<Complex64>,
}

impl SteeringVector {
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn phase_ramp(n: usize, step: f64) -> Vec<Complex64> {
    (0..n).map(|i| Complex64::from_polar(1.0, step * i as f64)).collect()
}

pub fn steering_vector(geometry: &ArrayGeometry, direction: &SphericalDirection) -> SteeringVector {
    steering_vector_uv(geometry, &direction_to_uv(direction))
}

pub fn steering_vector_uv(geometry: &ArrayGeometry, p: &UvPoint) -> SteeringVector {
    let k = geometry.phase_scale();
    let scale = 1.0 / (geometry.len() as f64).sqrt();
    let ex = phase_ramp(geometry.nx(), k * p.u);
    let ey = phase_ramp(geometry.ny(), k * p.v);
    let mut entries = Vec::with_capacity(geometry.len());
    for y in 0..geometry.ny() {
        for x in 0..geometry.nx() {
            entries.push(ex[x] * ey[y] * scale);
        }
    }
    SteeringVector { entries }
}

/// `sqrt(N)·wᴴ·a(u, v)` for arbitrary complex weights.
pub fn array_response(geometry: &ArrayGeometry, weights: &[Complex64], p: &UvPoint) -> Complex64 {
    let k = geometry.phase_scale();
    let ex = phase_ramp(geometry.nx(), k * p.u);
    let ey = phase_ramp(geometry.ny(), k * p.v);
    let nx = geometry.nx();
    let mut total = Complex64::new(0.0, 0.0);
    for (y, row) in weights.chunks_exact(nx).enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (w, e) in row.iter().zip(&ex) {
            acc += w.conj() * e;
        }
        total += acc * ey[y];
    }
    total
}

/// Line-of-sight receive gain `|μ wᴴ a|²` toward a UV direction.
pub fn los_gain(geometry: &ArrayGeometry, weights: &[Complex64], p: &UvPoint) -> f64 {
    array_response(geometry, weights, p).norm_sqr()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelModel {
    Full,
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipathComponent {
    pub gain: Complex64,
    pub aoa: SphericalDirection,
    /// Departure direction; only meaningful for the full model.
    pub aod: SphericalDirection,
    pub is_los: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelInstance {
    pub components: Vec<MultipathComponent>,
    /// Rician K-factor, linear.
    pub k_factor: f64,
    pub model: ChannelModel,
}

impl ChannelInstance {
    /// A single unit-gain line-of-sight path.
    pub fn line_of_sight(aoa: SphericalDirection, aod: SphericalDirection, model: ChannelModel) -> Self {
        ChannelInstance {
            components: vec![MultipathComponent {
                gain: Complex64::new(1.0, 0.0),
                aoa,
                aod,
                is_los: true,
            }],
            k_factor: f64::INFINITY,
            model,
        }
    }

    pub fn paths(&self) -> usize {
        self.components.len()
    }

    pub fn los(&self) -> &MultipathComponent {
        self.components.iter().find(|c| c.is_los).expect("channel has a LoS component")
    }

    /// Same paths with the LoS arrival direction replaced.
    pub fn with_los_aoa(&self, aoa: SphericalDirection) -> Self {
        let mut c = self.clone();
        for m in c.components.iter_mut().filter(|m| m.is_los) {
            m.aoa = aoa;
        }
        c
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.max(1e-300).log10()
}

// Azimuth and elevation each uniform on [0, 2π), folded back onto a proper direction.
fn uniform_angles<R: Rng + ?Sized>(rng: &mut R) -> SphericalDirection {
    let theta = rng.random_range(0.0..2.0 * PI);
    let psi = rng.random_range(0.0..2.0 * PI);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = psi.sin_cos();
    SphericalDirection::from_vector([cp * st, sp, cp * ct])
}

/// Draws a Rician multipath channel with `paths` components.
///
/// The LoS path arrives from `los_aoa` (and departs broadside) with random
/// phase; NLoS coefficients are circularly-symmetric complex Gaussian. Powers
/// are set so that in expectation the LoS path is `K` times the combined NLoS
/// power and the total power is 1. With a single path the LoS coefficient is
/// exactly 1.
pub fn sample_channel<R: Rng + ?Sized>(
    paths: usize,
    k_factor_db: f64,
    los_aoa: SphericalDirection,
    model: ChannelModel,
    rng: &mut R,
) -> Result<ChannelInstance> {
    if paths < 1 {
        return Err(Error::InvalidArgument("channel needs at least one path".into()));
    }
    if paths == 1 {
        return Ok(ChannelInstance::line_of_sight(los_aoa, SphericalDirection::BROADSIDE, model));
    }
    let k = db_to_linear(k_factor_db);
    let los_power = k / (k + 1.0);
    let nlos_var = 1.0 / ((k + 1.0) * (paths - 1) as f64);
    let mut components = Vec::with_capacity(paths);
    let phase = rng.random_range(0.0..2.0 * PI);
    components.push(MultipathComponent {
        gain: Complex64::from_polar(los_power.sqrt(), phase),
        aoa: los_aoa,
        aod: SphericalDirection::BROADSIDE,
        is_los: true,
    });
    let sigma = (nlos_var / 2.0).sqrt();
    for _ in 1..paths {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        components.push(MultipathComponent {
            gain: Complex64::new(re * sigma, im * sigma),
            aoa: uniform_angles(rng),
            aod: uniform_angles(rng),
            is_los: false,
        });
    }
    Ok(ChannelInstance { components, k_factor: k, model })
}

/// Dense `N_R × N_T` channel matrix (row-major) of the full model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

pub fn full_channel_matrix(
    rx: &ArrayGeometry,
    tx: &ArrayGeometry,
    channel: &ChannelInstance,
) -> ChannelMatrix {
    let (nr, nt) = (rx.len(), tx.len());
    let mu = ((nr * nt) as f64).sqrt();
    let mut data = vec![Complex64::new(0.0, 0.0); nr * nt];
    for c in &channel.components {
        let ar = steering_vector(rx, &c.aoa);
        let at = steering_vector(tx, &c.aod);
        for (r, a) in ar.entries().iter().enumerate() {
            let s = c.gain * a * mu;
            for (t, b) in at.entries().iter().enumerate() {
                data[r * nt + t] += s * b.conj();
            }
        }
    }
    ChannelMatrix { rows: nr, cols: nt, data }
}

/// Full-model gain `|w_Rᴴ H w_T|²`.
pub fn gain_full(w_r: &[Complex64], h: &ChannelMatrix, w_t: &[Complex64]) -> Result<f64> {
    if w_r.len() != h.rows {
        return Err(Error::DimensionMismatch { expected: h.rows, got: w_r.len() });
    }
    if w_t.len() != h.cols {
        return Err(Error::DimensionMismatch { expected: h.cols, got: w_t.len() });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (r, wr) in w_r.iter().enumerate() {
        let row = &h.data[r * h.cols..(r + 1) * h.cols];
        let hw: Complex64 = row.iter().zip(w_t).map(|(a, b)| a * b).sum();
        total += wr.conj() * hw;
    }
    Ok(total.norm_sqr())
}

/// Simplified-model gain `|w_Rᴴ H|²` with `H = sqrt(N_R) Σ γ_l a(aoa_l)`.
pub fn gain_simplified(geometry: &ArrayGeometry, w_r: &[Complex64], channel: &ChannelInstance) -> Result<f64> {
    if w_r.len() != geometry.len() {
        return Err(Error::DimensionMismatch { expected: geometry.len(), got: w_r.len() });
    }
    let total: Complex64 = channel
        .components
        .iter()
        .map(|c| c.gain * array_response(geometry, w_r, &direction_to_uv(&c.aoa)))
        .sum();
    Ok(total.norm_sqr())
}

/// Received symbol `sqrt(P)·wᴴ·H·s + wᴴ·n` for the simplified model.
pub fn received_symbol(
    geometry: &ArrayGeometry,
    w_r: &[Complex64],
    channel: &ChannelInstance,
    tx_power: f64,
    symbol: Complex64,
    noise: &[Complex64],
) -> Result<Complex64> {
    if noise.len() != w_r.len() {
        return Err(Error::DimensionMismatch { expected: w_r.len(), got: noise.len() });
    }
    let h: Complex64 = channel
        .components
        .iter()
        .map(|c| c.gain * array_response(geometry, w_r, &direction_to_uv(&c.aoa)))
        .sum();
    let wn: Complex64 = w_r.iter().zip(noise).map(|(w, n)| w.conj() * n).sum();
    Ok(tx_power.sqrt() * h * symbol + wn)
}

/// Post-combining SNR (linear) for a unit-norm receive vector: `P·G/N₀`.
pub fn snr(gain: f64, tx_power: f64, noise_power: f64) -> f64 {
    tx_power * gain / noise_power
}

/// Half-power beamwidth in radians when steered `steer` radians off broadside.
pub fn predicted_beamwidth(n_side: usize, spacing: f64, wavelength: f64, steer: f64) -> Result<f64> {
    let c = steer.cos();
    if steer.abs() >= PI / 2.0 || c <= 0.0 {
        return Err(Error::InvalidArgument("steering angle must be inside (-π/2, π/2)".into()));
    }
    Ok(0.886 * wavelength / (n_side as f64 * spacing * c))
}

/// Direction-independent half-power beamwidth in UV space, using the
/// per-side element count.
pub fn predicted_beamwidth_uv(n_side: usize, spacing: f64, wavelength: f64) -> f64 {
    0.886 * wavelength / (n_side as f64 * spacing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::build_ura;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn broadside_steering_is_flat() {
        let g = build_ura(4, 0.5, 1.0).unwrap();
        let a = steering_vector(&g, &SphericalDirection::BROADSIDE);
        for e in a.entries() {
            assert!((e - Complex64::new(0.25, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn steering_substitution_example() {
        let g = build_ura(2, 0.5, 1.0).unwrap();
        let a = steering_vector(&g, &SphericalDirection::from_degrees(30.0, 0.0));
        assert!((a.entries()[1] - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        assert!((a.entries()[0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_has_unit_norm() {
        let g = build_ura(8, 0.25, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let d = uniform_angles(&mut rng);
            let a = steering_vector(&g, &d);
            let n: f64 = a.entries().iter().map(|c| c.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
            assert!((a.entries()[0] - Complex64::new(0.125, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn response_matches_explicit_inner_product() {
        let g = build_ura(5, 0.3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w: Vec<Complex64> = (0..25)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let p = UvPoint::new(0.31, -0.42);
        let a = steering_vector_uv(&g, &p);
        let direct: Complex64 = w.iter().zip(a.entries()).map(|(w, a)| w.conj() * a).sum::<Complex64>() * 5.0;
        assert!((array_response(&g, &w, &p) - direct).norm() < 1e-12);
    }

    #[test]
    fn single_path_channel_is_unit_los() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_channel(1, 25.0, SphericalDirection::BROADSIDE, ChannelModel::Simplified, &mut rng).unwrap();
        assert_eq!(c.paths(), 1);
        assert_eq!(c.components[0].gain, Complex64::new(1.0, 0.0));
        assert!(sample_channel(0, 25.0, SphericalDirection::BROADSIDE, ChannelModel::Simplified, &mut rng).is_err());
    }

    #[test]
    fn matched_full_model_gain() {
        let rx = build_ura(2, 0.5, 1.0).unwrap();
        let tx = build_ura(2, 0.5, 1.0).unwrap();
        let aoa = SphericalDirection::from_degrees(20.0, 10.0);
        let aod = SphericalDirection::from_degrees(-35.0, 5.0);
        let ch = ChannelInstance::line_of_sight(aoa, aod, ChannelModel::Full);
        let h = full_channel_matrix(&rx, &tx, &ch);
        let wr = steering_vector(&rx, &aoa);
        let wt = steering_vector(&tx, &aod);
        let g = gain_full(wr.entries(), &h, wt.entries()).unwrap();
        assert!((g - 16.0).abs() < 1e-10);
        assert!(gain_full(&wr.entries()[..3], &h, wt.entries()).is_err());
    }

    #[test]
    fn orthogonal_dft_beam_has_zero_gain() {
        let g = build_ura(4, 0.5, 1.0).unwrap();
        // u = 0.5 is the next DFT beam for 4 half-wavelength elements.
        let w = steering_vector_uv(&g, &UvPoint::new(0.5, 0.0));
        let ch = ChannelInstance::line_of_sight(SphericalDirection::BROADSIDE, SphericalDirection::BROADSIDE, ChannelModel::Simplified);
        let gain = gain_simplified(&g, w.entries(), &ch).unwrap();
        assert!(gain < 1e-20, "{gain}");
    }

    #[test]
    fn beamwidth_formulas() {
        let b = predicted_beamwidth_uv(32, 0.5, 1.0);
        assert!((b - 0.055375).abs() < 1e-9);
        let b15 = predicted_beamwidth(32, 0.5, 1.0, 0.0).unwrap();
        assert_eq!(b, b15);
        assert!(predicted_beamwidth(32, 0.5, 1.0, PI / 2.0).is_err());
        let off = predicted_beamwidth(32, 0.5, 1.0, PI / 3.0).unwrap();
        assert!((off - 2.0 * b).abs() < 1e-12);
    }

    #[test]
    fn snr_scales_with_gain() {
        assert_eq!(snr(1024.0, 2.0, 4.0), 512.0);
    }

    #[test]
    fn received_symbol_without_noise_matches_gain() {
        let g = build_ura(4, 0.5, 1.0).unwrap();
        let aoa = SphericalDirection::from_degrees(10.0, 20.0);
        let w = steering_vector(&g, &aoa);
        let ch = ChannelInstance::line_of_sight(aoa, SphericalDirection::BROADSIDE, ChannelModel::Simplified);
        let noise = vec![Complex64::new(0.0, 0.0); 16];
        let y = received_symbol(&g, w.entries(), &ch, 4.0, Complex64::new(1.0, 0.0), &noise).unwrap();
        assert!((y.norm_sqr() - 4.0 * 16.0).abs() < 1e-9);
    }
}
