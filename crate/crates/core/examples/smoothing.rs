//! Savitzky-Golay smoothing of a noisy series, as applied to binned curves.

use covrage::metrics::savgol_smooth;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> covrage::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let clean: Vec<f64> = (0..60).map(|i| 20.0 - 0.004 * (i as f64 - 20.0).powi(2)).collect();
    let noisy: Vec<f64> = clean.iter().map(|c| c + rng.random_range(-1.0..1.0)).collect();
    let smooth = savgol_smooth(&noisy, 11, 2)?;
    let rms = |a: &[f64]| (a.iter().zip(&clean).map(|(x, c)| (x - c).powi(2)).sum::<f64>() / a.len() as f64).sqrt();
    println!("rms error raw {:.3}, smoothed {:.3}", rms(&noisy), rms(&smooth));
    for i in (0..60).step_by(6) {
        println!("{i:>3} {:>8.3} {:>8.3} {:>8.3}", clean[i], noisy[i], smooth[i]);
    }
    Ok(())
}
