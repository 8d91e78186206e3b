//! Experiment drivers. Each returns its rows in sweep order.

pub mod design;
pub mod loopback;
pub mod ofdm;
pub mod sequence;

use anyhow::Result;
use jbmocz::channel::ebn0_to_noise_var;
use jbmocz::stability::{default_radius_grid, optimize_radius};
use jbmocz::zeros::{conventional_huffman_radius, ConstellationParams};
use jbmocz::Bit;
use rand::Rng;

/// Bins used when evaluating stability for radius selection.
pub const STABILITY_BINS: usize = 1024;

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Bit> {
    (0..k).map(|_| rng.random_range(0..2u8)).collect()
}

/// `N_0` per coefficient; an infinite `E_b/N_0` is noiseless.
pub fn noise_var(ebn0_db: f64, info_bits: usize, energy: f64) -> Result<f64> {
    if ebn0_db == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(ebn0_to_noise_var(ebn0_db, info_bits, energy)?)
}

/// `radius`, or the conventional Huffman radius for `ζ = 1` and `R_*(K, ζ)`
/// on the default grid otherwise.
pub fn resolve_params(k: usize, radius: Option<f64>, zeta: f64) -> Result<ConstellationParams> {
    let r = match radius {
        Some(r) => r,
        None if zeta == 1.0 => conventional_huffman_radius(k),
        None => optimize_radius(k, zeta, &default_radius_grid(k), STABILITY_BINS)?.r_star,
    };
    Ok(ConstellationParams::new(k, r, zeta)?)
}

/// Pads `bits` with zeros to `len`.
pub fn padded(bits: &[Bit], len: usize) -> Vec<Bit> {
    let mut v = bits.to_vec();
    v.resize(len, 0);
    v
}
