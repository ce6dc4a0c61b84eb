//! Rician multipath channels: draws, normalization and the gain a fixed beam
//! sees under each model.

use covrage::array::{build_ura, WeightVector};
use covrage::channel::{
    full_channel_matrix, gain_full, gain_simplified, linear_to_db, sample_channel, ChannelModel,
};
use covrage::rotation::{direction_to_uv, SphericalDirection};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> covrage::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let wavelength = 299_792_458.0 / 60e9;
    let geom = build_ura(8, wavelength / 2.0, wavelength)?;
    let aoa = SphericalDirection::from_degrees(12.0, -4.0);

    let a = covrage::channel::steering_vector(&geom, &aoa);
    let w = WeightVector::new(a.entries().iter().map(|x| x.arg()).collect(), vec![true; geom.len()])?;

    for k_db in [25.0, 15.0, 10.0] {
        let draws = 20_000;
        let (mut los, mut nlos, mut gain) = (0.0, 0.0, 0.0);
        for _ in 0..draws {
            let ch = sample_channel(3, k_db, aoa, ChannelModel::Simplified, &mut rng)?;
            los += ch.los().gain.norm_sqr();
            nlos += ch.components.iter().filter(|c| !c.is_los).map(|c| c.gain.norm_sqr()).sum::<f64>();
            gain += gain_simplified(&geom, w.values(), &ch)?;
        }
        let n = draws as f64;
        println!(
            "K = {k_db:>4} dB: E|los|^2 {:.4}, E nlos {:.4}, K est {:.2} dB, mean gain {:.2} dBi",
            los / n,
            nlos / n,
            linear_to_db(los / nlos),
            linear_to_db(gain / n)
        );
    }

    // With a single-element transmitter the full model reduces to the simplified one.
    let ch = sample_channel(3, 10.0, aoa, ChannelModel::Full, &mut rng)?;
    let tx = build_ura(1, wavelength / 2.0, wavelength)?;
    let h = full_channel_matrix(&geom, &tx, &ch);
    let full = gain_full(w.values(), &h, &[Complex64::new(1.0, 0.0)])?;
    let simple = gain_simplified(&geom, w.values(), &ch)?;
    println!("full {full:.6} vs simplified {simple:.6}");
    println!("LoS arrives at uv {:?}", direction_to_uv(&aoa));
    Ok(())
}
