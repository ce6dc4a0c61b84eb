//! Gain over the visible UV disk on a regular grid.

use num_complex::Complex64;
use std::io::{Read, Write};

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};
use crate::rotation::UvPoint;

pub const DEFAULT_RESOLUTION: usize = 512;

/// Linear gain on a `resolution × resolution` grid of cell centers over
/// `[-1, 1]²`. Row `j` holds `v_j`, column `i` holds `u_i`; cells outside the
/// unit disk are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMap {
    resolution: usize,
    values: Vec<f64>,
}

/// Center coordinate of cell `i` along one axis.
pub fn cell_center(resolution: usize, i: usize) -> f64 {
    -1.0 + (i as f64 + 0.5) * 2.0 / resolution as f64
}

impl GainMap {
    pub fn from_values(resolution: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != resolution * resolution {
            return Err(Error::DimensionMismatch { expected: resolution * resolution, got: values.len() });
        }
        Ok(GainMap { resolution, values })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cell_size(&self) -> f64 {
        2.0 / self.resolution as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_size() * self.cell_size()
    }

    pub fn point(&self, i: usize, j: usize) -> UvPoint {
        UvPoint::new(cell_center(self.resolution, i), cell_center(self.resolution, j))
    }

    /// Gain at column `i`, row `j`; `None` outside the visible disk.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let g = self.values[i + self.resolution * j];
        (!g.is_nan()).then_some(g)
    }

    /// Raw row-major values with NaN for invalid cells.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cell containing `p`, if inside `[-1, 1]²`.
    pub fn cell_of(&self, p: &UvPoint) -> Option<(usize, usize)> {
        let f = |c: f64| {
            let k = ((c + 1.0) / self.cell_size()).floor();
            (k >= 0.0 && k < self.resolution as f64).then_some(k as usize)
        };
        Some((f(p.u)?, f(p.v)?))
    }

    /// Highest valid gain and its cell.
    pub fn peak(&self) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for (k, &g) in self.values.iter().enumerate() {
            if !g.is_nan() && best.is_none_or(|b| g > b.0) {
                best = Some((g, k % self.resolution, k / self.resolution));
            }
        }
        best
    }

    /// Sum of valid gains times cell area.
    pub fn integrated_gain(&self) -> f64 {
        self.values.iter().filter(|g| !g.is_nan()).sum::<f64>() * self.cell_area()
    }

    /// CSV grid: header `v\u` followed by the u centers, then one row per v
    /// holding the v center and the linear gains (NaN when invalid).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["v\\u".to_string()];
        header.extend((0..self.resolution).map(|i| format!("{:.6}", cell_center(self.resolution, i))));
        w.write_record(&header)?;
        for j in 0..self.resolution {
            let mut row = vec![format!("{:.6}", cell_center(self.resolution, j))];
            row.extend(
                self.values[j * self.resolution..(j + 1) * self.resolution]
                    .iter()
                    .map(|&g| if g.is_nan() { "NaN".to_string() } else { format!("{g:.9e}") }),
            );
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Flat little-endian binary: `u32` resolution, `f64` UV extent (1.0),
    /// then `resolution²` row-major `f64` values.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.resolution as u32).to_le_bytes())?;
        out.write_all(&1.0f64.to_le_bytes())?;
        for g in &self.values {
            out.write_all(&g.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        input.read_exact(&mut b4)?;
        let resolution = u32::from_le_bytes(b4) as usize;
        input.read_exact(&mut b8)?;
        let extent = f64::from_le_bytes(b8);
        if extent != 1.0 {
            return Err(Error::InvalidArgument(format!("unsupported gain-map extent {extent}")));
        }
        let mut values = Vec::with_capacity(resolution * resolution);
        for _ in 0..resolution * resolution {
            input.read_exact(&mut b8)?;
            values.push(f64::from_le_bytes(b8));
        }
        GainMap::from_values(resolution, values)
    }
}

/// Gain `|Σ conj(w_e)·exp(j·kd·(x·u + y·v))|²` at every visible cell center.
///
/// Evaluated separably: per array row, a partial sum over x for every u
/// column, then a sum over rows for every v.
pub fn gain_map(geometry: &ArrayGeometry, weights: &[Complex64], resolution: usize) -> Result<GainMap> {
    if weights.len() != geometry.len() {
        return Err(Error::DimensionMismatch { expected: geometry.len(), got: weights.len() });
    }
    if resolution == 0 {
        return Err(Error::InvalidArgument("gain map resolution must be positive".into()));
    }
    let (nx, ny) = (geometry.nx(), geometry.ny());
    let k = geometry.phase_scale();
    let centers: Vec<f64> = (0..resolution).map(|i| cell_center(resolution, i)).collect();

    let rows: Vec<usize> = (0..ny)
        .filter(|&y| weights[y * nx..(y + 1) * nx].iter().any(|w| w.norm_sqr() > 0.0))
        .collect();
    // partial[r][i] = Σ_x conj(w[x, y_r]) e^{j k x u_i}
    let mut partial = vec![Complex64::new(0.0, 0.0); rows.len() * resolution];
    for (i, &u) in centers.iter().enumerate() {
        let ramp: Vec<Complex64> = (0..nx).map(|x| Complex64::from_polar(1.0, k * u * x as f64)).collect();
        for (r, &y) in rows.iter().enumerate() {
            let row = &weights[y * nx..(y + 1) * nx];
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, e) in row.iter().zip(&ramp) {
                acc += w.conj() * e;
            }
            partial[r * resolution + i] = acc;
        }
    }

    let mut values = vec![f64::NAN; resolution * resolution];
    let mut acc = vec![Complex64::new(0.0, 0.0); resolution];
    for (j, &v) in centers.iter().enumerate() {
        // Visible columns of this row form one contiguous run.
        let half = (1.0 - v * v).max(0.0).sqrt();
        let lo = centers.partition_point(|&u| u < -half);
        let hi = centers.partition_point(|&u| u <= half);
        let cols: Vec<usize> = (lo..hi).filter(|&i| centers[i] * centers[i] + v * v <= 1.0).collect();
        if cols.is_empty() {
            continue;
        }
        let (c0, c1) = (cols[0], cols[cols.len() - 1] + 1);
        acc[c0..c1].iter_mut().for_each(|a| *a = Complex64::new(0.0, 0.0));
        for (r, &y) in rows.iter().enumerate() {
            let e = Complex64::from_polar(1.0, k * v * y as f64);
            let src = &partial[r * resolution + c0..r * resolution + c1];
            for (a, p) in acc[c0..c1].iter_mut().zip(src) {
                *a += e * p;
            }
        }
        for &i in &cols {
            values[j * resolution + i] = acc[i].norm_sqr();
        }
    }
    Ok(GainMap { resolution, values })
}

/// Map of an isotropic element: gain 1 everywhere visible.
pub fn isotropic_map(resolution: usize) -> GainMap {
    let mut values = vec![f64::NAN; resolution * resolution];
    for j in 0..resolution {
        for i in 0..resolution {
            let (u, v) = (cell_center(resolution, i), cell_center(resolution, j));
            if u * u + v * v <= 1.0 {
                values[j * resolution + i] = 1.0;
            }
        }
    }
    GainMap { resolution, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::{build_ura, WeightVector};
    use crate::channel::{los_gain, steering_vector_uv};

    #[test]
    fn matches_direct_evaluation() {
        let g = build_ura(8, 0.25, 1.0).unwrap();
        let phases: Vec<f64> = (0..64).map(|i| (i * i) as f64 * 0.37).collect();
        let mut active = vec![true; 64];
        active[5] = false;
        active[40] = false;
        let w = WeightVector::new(phases, active).unwrap();
        let map = gain_map(&g, w.values(), 32).unwrap();
        for j in 0..32 {
            for i in 0..32 {
                let p = map.point(i, j);
                match map.get(i, j) {
                    Some(v) => assert!((v - los_gain(&g, w.values(), &p)).abs() < 1e-9),
                    None => assert!(!p.is_visible()),
                }
            }
        }
    }

    #[test]
    fn single_element_is_isotropic() {
        let g = build_ura(4, 0.5, 1.0).unwrap();
        let mut active = vec![false; 16];
        active[6] = true;
        let w = WeightVector::new(vec![1.0; 16], active).unwrap();
        let map = gain_map(&g, w.values(), 64).unwrap();
        let iso = isotropic_map(64);
        for (a, b) in map.values().iter().zip(iso.values()) {
            assert!(a.is_nan() && b.is_nan() || (a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn matched_peak_near_aim() {
        let g = build_ura(16, 0.5, 1.0).unwrap();
        let aim = UvPoint::new(0.31, -0.22);
        let a = steering_vector_uv(&g, &aim);
        let map = gain_map(&g, a.entries(), 128).unwrap();
        let (peak, i, j) = map.peak().unwrap();
        let (ci, cj) = map.cell_of(&aim).unwrap();
        assert!(i.abs_diff(ci) <= 1 && j.abs_diff(cj) <= 1);
        assert!(peak <= 256.0 + 1e-9 && peak > 200.0);
    }

    #[test]
    fn binary_round_trip() {
        let map = isotropic_map(8);
        let mut buf = Vec::new();
        map.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 8 + 64 * 8);
        let back = GainMap::read_binary(buf.as_slice()).unwrap();
        assert_eq!(back.resolution(), 8);
        for (a, b) in map.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
