//! Percentiles and length-binned aggregates.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::metrics::savgol::savgol_smooth;

/// Nearest-rank percentile of an ascending slice: the value at rank
/// `ceil(p/100 · n)` (1-based), rank clamped to `[1, n]`.
pub fn percentile_nearest_rank(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InvalidArgument("percentile of an empty set".into()));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("percentile {p} outside [0, 100]")));
    }
    let n = sorted.len();
    let rank = ((p / 100.0) * n as f64).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

/// Sorts finite values ascending (NaN are dropped).
pub fn sorted_finite(values: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Summary of one bin. All gain fields are in dB; empty bins hold NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub median: f64,
    pub p001: f64,
    pub p999: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub n: usize,
}

impl Aggregate {
    pub const EMPTY: Aggregate = Aggregate {
        median: f64::NAN,
        p001: f64::NAN,
        p999: f64::NAN,
        min: f64::NAN,
        max: f64::NAN,
        mean: f64::NAN,
        n: 0,
    };

    pub fn from_values(values: &[f64]) -> Aggregate {
        let s = sorted_finite(values);
        if s.is_empty() {
            return Aggregate::EMPTY;
        }
        let pct = |p| percentile_nearest_rank(&s, p).expect("non-empty");
        Aggregate {
            median: pct(50.0),
            p001: pct(0.1),
            p999: pct(99.9),
            min: s[0],
            max: s[s.len() - 1],
            mean: s.iter().sum::<f64>() / s.len() as f64,
            n: s.len(),
        }
    }
}

/// Aggregates keyed by trajectory length, in contiguous bins of fixed width
/// starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub bin_width: f64,
    pub bins: Vec<Aggregate>,
}

/// Accumulates `(length, value)` pairs into length bins.
#[derive(Debug, Clone, Default)]
pub struct BinAccumulator {
    bin_width: f64,
    bins: Vec<Vec<f64>>,
}

impl BinAccumulator {
    pub fn new(bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("bin width must be positive, got {bin_width}")));
        }
        Ok(BinAccumulator { bin_width, bins: Vec::new() })
    }

    pub fn bin_index(&self, length: f64) -> usize {
        (length.max(0.0) / self.bin_width).floor() as usize
    }

    pub fn push(&mut self, length: f64, value: f64) {
        self.extend(length, std::iter::once(value));
    }

    pub fn extend(&mut self, length: f64, values: impl IntoIterator<Item = f64>) {
        let b = self.bin_index(length);
        if self.bins.len() <= b {
            self.bins.resize_with(b + 1, Vec::new);
        }
        self.bins[b].extend(values);
    }

    /// Merges another accumulator with the same bin width.
    pub fn merge(&mut self, other: BinAccumulator) {
        if self.bins.len() < other.bins.len() {
            self.bins.resize_with(other.bins.len(), Vec::new);
        }
        for (dst, src) in self.bins.iter_mut().zip(other.bins) {
            dst.extend(src);
        }
    }

    pub fn finish(&self) -> MetricSeries {
        MetricSeries {
            bin_width: self.bin_width,
            bins: self.bins.iter().map(|v| Aggregate::from_values(v)).collect(),
        }
    }
}

impl MetricSeries {
    pub fn bin_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.bin_width
    }

    /// Savitzky–Golay smoothing of every aggregate column, applied across the
    /// non-empty bins only. Counts are kept.
    pub fn smoothed(&self, window: usize, order: usize) -> Result<MetricSeries> {
        let filled: Vec<usize> = (0..self.bins.len()).filter(|&i| self.bins[i].n > 0).collect();
        let column = |f: fn(&Aggregate) -> f64| -> Result<Vec<f64>> {
            let raw: Vec<f64> = filled.iter().map(|&i| f(&self.bins[i])).collect();
            savgol_smooth(&raw, window, order)
        };
        let cols = [
            column(|a| a.median)?,
            column(|a| a.p001)?,
            column(|a| a.p999)?,
            column(|a| a.min)?,
            column(|a| a.max)?,
            column(|a| a.mean)?,
        ];
        let mut bins = self.bins.clone();
        for (k, &i) in filled.iter().enumerate() {
            let b = &mut bins[i];
            b.median = cols[0][k];
            b.p001 = cols[1][k];
            b.p999 = cols[2][k];
            b.min = cols[3][k];
            b.max = cols[4][k];
            b.mean = cols[5][k];
        }
        Ok(MetricSeries { bin_width: self.bin_width, bins })
    }

    /// Writes `bin_center_uv,median_db,p001_db,p999_db,min_db,max_db,mean_db,n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_center_uv", "median_db", "p001_db", "p999_db", "min_db", "max_db", "mean_db", "n"])?;
        for (i, b) in self.bins.iter().enumerate() {
            w.write_record([
                format!("{:.6}", self.bin_center(i)),
                fmt_f(b.median),
                fmt_f(b.p001),
                fmt_f(b.p999),
                fmt_f(b.min),
                fmt_f(b.max),
                fmt_f(b.mean),
                b.n.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.6}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank_examples() {
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(percentile_nearest_rank(&v, 50.0).unwrap(), 5.0);
        assert_eq!(percentile_nearest_rank(&v, 0.1).unwrap(), 1.0);
        assert_eq!(percentile_nearest_rank(&v, 99.9).unwrap(), 10.0);
        assert_eq!(percentile_nearest_rank(&v, 0.0).unwrap(), 1.0);
        assert_eq!(percentile_nearest_rank(&v, 100.0).unwrap(), 10.0);
        assert!(percentile_nearest_rank(&[], 50.0).is_err());
    }

    #[test]
    fn bins_are_contiguous_with_empty_gaps() {
        let mut acc = BinAccumulator::new(0.004).unwrap();
        acc.push(0.001, 1.0);
        acc.extend(0.0101, [2.0, 4.0]);
        let s = acc.finish();
        assert_eq!(s.bins.len(), 3);
        assert_eq!(s.bins[0].n, 1);
        assert_eq!(s.bins[1].n, 0);
        assert!(s.bins[1].median.is_nan());
        assert_eq!(s.bins[2].mean, 3.0);
        assert!((s.bin_center(2) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let mut acc = BinAccumulator::new(0.5).unwrap();
        acc.push(0.2, -3.0);
        let mut buf = Vec::new();
        acc.finish().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "bin_center_uv,median_db,p001_db,p999_db,min_db,max_db,mean_db,n");
        assert!(lines.next().unwrap().starts_with("0.250000,-3.000000"));
    }
}
