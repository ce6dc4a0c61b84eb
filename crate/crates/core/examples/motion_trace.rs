//! Sliding-window head-motion statistics of a synthetic trace: a steady
//! 90 deg/s yaw sampled at 1 kHz with a brief pause.

use covrage::metrics::{read_trace, sliding_motion_stats};
use covrage::rotation::UnitQuaternion;
use std::fmt::Write;

fn main() -> covrage::Result<()> {
    let mut text = String::from("timestamp_ns,qw,qx,qy,qz\n");
    let mut angle: f64 = 0.0;
    for i in 0..3000i64 {
        if !(1000..1300).contains(&i) {
            angle += 90f64.to_radians() / 1000.0;
        }
        let q = UnitQuaternion::from_axis_angle([0.0, 1.0, 0.0], angle)?;
        let [w, x, y, z] = q.components();
        writeln!(text, "{},{w},{x},{y},{z}", i * 1_000_000).unwrap();
    }
    let trace = read_trace(text.as_bytes())?;
    println!("{} samples", trace.len());
    for window in [100.0, 200.0, 500.0, 1000.0] {
        let s = sliding_motion_stats(&trace, window)?;
        let cdf = s.cdf();
        let (_, len_med, vel_med) = cdf[cdf.len() / 2];
        let (_, len_max, vel_max) = cdf[cdf.len() - 1];
        println!(
            "{window:>6} ms: median {len_med:6.2} deg ({vel_med:6.1} deg/s), max {len_max:6.2} deg ({vel_max:6.1} deg/s)"
        );
    }
    Ok(())
}
