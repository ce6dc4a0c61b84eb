//! Uniform rectangular array geometry and antenna weight vectors.

mod partition;

pub use partition::{
    partition_multiblock, make_transitional, ArrayPartition, Axis, PartitionDescription,
    SubarrayInfo, SubarrayKind,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Element grid of a uniform rectangular array. Element `(x, y)` sits at
/// `(x·d, y·d)` and has flat index `x + nx·y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    nx: usize,
    ny: usize,
    spacing: f64,
    wavelength: f64,
}

/// Square URA with `n_side × n_side` elements.
pub fn build_ura(n_side: usize, spacing: f64, wavelength: f64) -> Result<ArrayGeometry> {
    ArrayGeometry::rectangular(n_side, n_side, spacing, wavelength)
}

impl ArrayGeometry {
    /// Rectangular grid. Only used for small illustrative layouts; the beam
    /// pipeline expects square arrays.
    pub fn rectangular(nx: usize, ny: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGeometry("element count must be at least 1".into()));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidGeometry(format!("spacing must be positive, got {spacing}")));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        Ok(ArrayGeometry { nx, ny, spacing, wavelength })
    }

    /// Square array from a carrier frequency and a spacing given in wavelengths.
    pub fn from_frequency(n_side: usize, spacing_wavelengths: f64, frequency_hz: f64) -> Result<Self> {
        if !(frequency_hz > 0.0) {
            return Err(Error::InvalidGeometry("frequency must be positive".into()));
        }
        let lambda = SPEED_OF_LIGHT / frequency_hz;
        build_ura(n_side, spacing_wavelengths * lambda, lambda)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn is_square(&self) -> bool {
        self.nx == self.ny
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2π d / λ`: phase advance per element per unit of u or v.
    pub fn phase_scale(&self) -> f64 {
        2.0 * PI * self.spacing / self.wavelength
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x + self.nx * y
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }

    /// Physical position of an element in meters.
    pub fn position(&self, index: usize) -> (f64, f64) {
        let (x, y) = self.coords(index);
        (x as f64 * self.spacing, y as f64 * self.spacing)
    }

    /// Physical side lengths `((nx-1)·d, (ny-1)·d)` spanned by element centers.
    pub fn extent(&self) -> (f64, f64) {
        (
            (self.nx - 1) as f64 * self.spacing,
            (self.ny - 1) as f64 * self.spacing,
        )
    }

    /// Geometry with x and y swapped.
    pub fn transposed(&self) -> ArrayGeometry {
        ArrayGeometry { nx: self.ny, ny: self.nx, ..*self }
    }
}

/// Per-element weights `ν·α·exp(jφ)` with 1-bit amplitude control.
///
/// The normalization factor ν is always `1/sqrt(active count)` so disabled
/// elements never contribute to the norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    phases: Vec<f64>,
    active: Vec<bool>,
    values: Vec<Complex64>,
    norm: f64,
}

impl WeightVector {
    /// Phases are wrapped into `[0, 2π)`; inactive entries are stored as phase 0.
    pub fn new(phases: Vec<f64>, active: Vec<bool>) -> Result<Self> {
        if phases.len() != active.len() {
            return Err(Error::DimensionMismatch { expected: active.len(), got: phases.len() });
        }
        let count = active.iter().filter(|a| **a).count();
        if count == 0 {
            return Err(Error::NoActiveElements);
        }
        let norm = 1.0 / (count as f64).sqrt();
        let phases: Vec<f64> = phases
            .iter()
            .zip(&active)
            .map(|(p, a)| if *a { wrap_phase(*p) } else { 0.0 })
            .collect();
        let values = phases
            .iter()
            .zip(&active)
            .map(|(p, a)| if *a { Complex64::from_polar(norm, *p) } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(WeightVector { phases, active, values, norm })
    }

    /// All elements active with phase 0 (a broadside beam).
    pub fn uniform(len: usize) -> Result<Self> {
        Self::new(vec![0.0; len], vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
    pub fn active(&self) -> &[bool] {
        &self.active
    }
    /// Normalized complex weights (unit 2-norm).
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn normalization(&self) -> f64 {
        self.norm
    }
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }

    /// Same weights with x and y swapped, for a geometry of `nx × ny` elements.
    pub fn transposed(&self, geometry: &ArrayGeometry) -> WeightVector {
        let t = geometry.transposed();
        let mut phases = vec![0.0; self.len()];
        let mut active = vec![false; self.len()];
        for i in 0..self.len() {
            let (x, y) = geometry.coords(i);
            let j = t.index(y, x);
            phases[j] = self.phases[i];
            active[j] = self.active[i];
        }
        WeightVector::new(phases, active).expect("transpose preserves active count")
    }
}

/// Wraps a phase into `[0, 2π)`.
pub fn wrap_phase(p: f64) -> f64 {
    let r = p.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Snaps every phase to the nearest of `2^bits` uniform levels `2πk/2^bits`.
/// Exact ties go to the lower level. Amplitudes are unchanged.
pub fn quantize_phases(w: &WeightVector, bits: u32) -> Result<WeightVector> {
    if bits < 1 {
        return Err(Error::InvalidArgument("quantization needs at least 1 bit".into()));
    }
    if bits > 48 {
        return Err(Error::InvalidArgument(format!("{bits} quantization bits exceeds 48")));
    }
    let levels = (1u64 << bits) as f64;
    let step = 2.0 * PI / levels;
    let phases = w
        .phases
        .iter()
        .map(|&p| {
            let k = p / step;
            let lower = k.floor();
            let level = if k - lower > 0.5 { lower + 1.0 } else { lower };
            (level.rem_euclid(levels)) * step
        })
        .collect();
    WeightVector::new(phases, w.active.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ura_120ghz_quarter_wavelength() {
        let lambda = SPEED_OF_LIGHT / 120e9;
        assert!((lambda - 2.498e-3).abs() < 1e-6);
        let g = build_ura(64, lambda / 4.0, lambda).unwrap();
        assert_eq!(g.len(), 4096);
        // 64 elements at λ/4 pitch cover about 4 cm.
        assert!((64.0 * g.spacing() - 0.04).abs() < 0.001);
    }

    #[test]
    fn ura_32_half_wavelength_coordinates() {
        let lambda = SPEED_OF_LIGHT / 60e9;
        let d = lambda / 2.0;
        let g = build_ura(32, d, lambda).unwrap();
        assert_eq!(g.len(), 1024);
        for idx in [0usize, 1, 31, 32, 33, 1023] {
            let (x, y) = (idx % 32, idx / 32);
            let (px, py) = g.position(idx);
            assert_eq!(px, x as f64 * d);
            assert_eq!(py, y as f64 * d);
        }
        assert!((g.extent().0 - 31.0 * d).abs() < 1e-15);
    }

    #[test]
    fn single_element_and_invalid_inputs() {
        let g = build_ura(1, 0.5, 1.0).unwrap();
        assert_eq!(g.len(), 1);
        assert!(build_ura(0, 0.5, 1.0).is_err());
        assert!(build_ura(4, 0.0, 1.0).is_err());
        assert!(build_ura(4, 0.5, -1.0).is_err());
    }

    #[test]
    fn weights_normalized_over_active_elements() {
        let w = WeightVector::new(vec![0.1, 0.2, 0.3, 0.4], vec![true, false, true, true]).unwrap();
        let n: f64 = w.values().iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
        assert_eq!(w.values()[1], Complex64::new(0.0, 0.0));
        assert!(WeightVector::new(vec![0.0; 2], vec![false; 2]).is_err());
    }

    #[test]
    fn quantize_nearest_level() {
        let w = WeightVector::new(vec![0.3, 1.4, 6.2], vec![true; 3]).unwrap();
        let q = quantize_phases(&w, 2).unwrap();
        assert_eq!(q.phases()[0], 0.0);
        assert!((q.phases()[1] - PI / 2.0).abs() < 1e-15);
        // 6.2 rad is nearest to 2π, which wraps to level 0.
        assert_eq!(q.phases()[2], 0.0);
        assert!(quantize_phases(&w, 0).is_err());
    }

    #[test]
    fn quantize_tie_rounds_down() {
        let w = WeightVector::new(vec![PI / 4.0], vec![true]).unwrap();
        let q = quantize_phases(&w, 2).unwrap();
        assert_eq!(q.phases()[0], 0.0);
    }

    #[test]
    fn quantize_30_bits_is_near_identity() {
        let phases: Vec<f64> = (0..100).map(|i| (i as f64 * 0.0637) % (2.0 * PI)).collect();
        let w = WeightVector::new(phases, vec![true; 100]).unwrap();
        let q = quantize_phases(&w, 30).unwrap();
        for (a, b) in w.phases().iter().zip(q.phases()) {
            let d = (a - b).abs();
            assert!(d.min(2.0 * PI - d) < 1e-8);
        }
    }
}
