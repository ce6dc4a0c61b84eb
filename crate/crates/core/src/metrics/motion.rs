//! Rotation statistics of recorded head-motion traces.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::metrics::stats::fmt_f;
use crate::rotation::UnitQuaternion;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t_ns: i64,
    pub orientation: UnitQuaternion,
}

/// Reads `timestamp_ns,qw,qx,qy,qz` rows. A first row that does not parse as numbers is
/// treated as a header. Timestamps must strictly increase.
pub fn read_trace<R: Read>(reader: R) -> Result<Vec<TraceSample>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out: Vec<TraceSample> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        let err = |message: String| Error::Trace { line, message };
        if rec.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", rec.len())));
        }
        let t = match rec[0].parse::<i64>() {
            Ok(t) => t,
            Err(_) if i == 0 => continue,
            Err(e) => return Err(err(format!("bad timestamp '{}': {e}", &rec[0]))),
        };
        let mut c = [0.0; 4];
        for k in 0..4 {
            c[k] = rec[k + 1]
                .parse()
                .map_err(|e| err(format!("bad quaternion component '{}': {e}", &rec[k + 1])))?;
        }
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            log::warn!("line {line}: quaternion norm {norm:.6} renormalized");
        }
        let q = UnitQuaternion::new(c[0], c[1], c[2], c[3]).map_err(|e| err(e.to_string()))?;
        if let Some(prev) = out.last() {
            if t <= prev.t_ns {
                return Err(err(format!("timestamp {t} does not increase past {}", prev.t_ns)));
            }
        }
        out.push(TraceSample { t_ns: t, orientation: q });
    }
    Ok(out)
}

/// Rotation amount within fixed-length windows, one window per start sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionStats {
    pub window_ms: f64,
    /// Accumulated rotation per window, degrees.
    pub lengths_deg: Vec<f64>,
    /// Length divided by the nominal window duration, degrees per second.
    pub velocities_deg_s: Vec<f64>,
    /// Sampling intervals longer than twice the median interval.
    pub gaps: usize,
}

/// Slides a window of `window_ms` over the trace, starting at every sample
/// whose window fits inside the trace. Each window accumulates the angles
/// between consecutive orientations up to the last sample within it.
pub fn sliding_motion_stats(trace: &[TraceSample], window_ms: f64) -> Result<MotionStats> {
    if !(window_ms > 0.0) {
        return Err(Error::InvalidArgument(format!("window must be positive, got {window_ms} ms")));
    }
    let mut cum = Vec::with_capacity(trace.len());
    let mut acc = 0.0;
    for (i, s) in trace.iter().enumerate() {
        if i > 0 {
            acc += trace[i - 1].orientation.angle_to(&s.orientation).to_degrees();
        }
        cum.push(acc);
    }
    let mut intervals: Vec<i64> = trace.windows(2).map(|w| w[1].t_ns - w[0].t_ns).collect();
    intervals.sort_unstable();
    let gaps = if intervals.is_empty() {
        0
    } else {
        let median = intervals[(intervals.len() - 1) / 2];
        intervals.iter().filter(|&&d| d > 2 * median).count()
    };
    if gaps > 0 {
        log::warn!("trace has {gaps} sampling gaps longer than twice the median interval");
    }

    let window_ns = (window_ms * 1e6).round() as i64;
    let mut lengths = Vec::new();
    if let Some(last) = trace.last() {
        let mut j = 0;
        for i in 0..trace.len() {
            let end = trace[i].t_ns + window_ns;
            if end > last.t_ns {
                break;
            }
            j = j.max(i);
            while j + 1 < trace.len() && trace[j + 1].t_ns <= end {
                j += 1;
            }
            lengths.push(cum[j] - cum[i]);
        }
    }
    let secs = window_ms / 1000.0;
    let velocities_deg_s = lengths.iter().map(|l| l / secs).collect();
    Ok(MotionStats { window_ms, lengths_deg: lengths, velocities_deg_s, gaps })
}

impl MotionStats {
    /// Empirical CDF rows `(cdf, length_deg, velocity_deg_s)`, ascending.
    pub fn cdf(&self) -> Vec<(f64, f64, f64)> {
        let mut l = self.lengths_deg.clone();
        l.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = l.len() as f64;
        let secs = self.window_ms / 1000.0;
        l.iter()
            .enumerate()
            .map(|(i, &x)| ((i + 1) as f64 / n, x, x / secs))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["cdf", "length_deg", "velocity_deg_s"])?;
        for (c, l, v) in self.cdf() {
            w.write_record([fmt_f(c), fmt_f(l), fmt_f(v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yaw_trace(rate_deg_s: f64, dt_ms: i64, n: usize) -> Vec<TraceSample> {
        (0..n)
            .map(|i| {
                let t = i as i64 * dt_ms * 1_000_000;
                let ang = (rate_deg_s * t as f64 / 1e9).to_radians();
                TraceSample { t_ns: t, orientation: UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], ang).unwrap() }
            })
            .collect()
    }

    #[test]
    fn constant_rate_window_length() {
        let trace = yaw_trace(90.0, 10, 101);
        let s = sliding_motion_stats(&trace, 200.0).unwrap();
        assert_eq!(s.lengths_deg.len(), 81);
        for (l, v) in s.lengths_deg.iter().zip(&s.velocities_deg_s) {
            assert!((l - 18.0).abs() < 1e-9);
            assert!((v - 90.0).abs() < 1e-7);
        }
        assert_eq!(s.gaps, 0);
    }

    #[test]
    fn detects_gaps() {
        let mut trace = yaw_trace(10.0, 10, 20);
        for s in trace.iter_mut().skip(10) {
            s.t_ns += 50_000_000;
        }
        assert_eq!(sliding_motion_stats(&trace, 100.0).unwrap().gaps, 1);
    }

    #[test]
    fn parses_with_header_and_rejects_disorder() {
        let text = "t_ns,w,x,y,z\n0,1,0,0,0\n1000,1,0,0,0\n";
        assert_eq!(read_trace(text.as_bytes()).unwrap().len(), 2);
        let bad = "0,1,0,0,0\n5,1,0,0,0\n5,1,0,0,0\n";
        match read_trace(bad.as_bytes()) {
            Err(Error::Trace { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(read_trace("0,1,0,0\n".as_bytes()).is_err());
    }
}
