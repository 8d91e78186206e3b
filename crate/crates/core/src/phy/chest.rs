//! Blind channel estimation from a time-mapped preamble and MMSE equalization.
//!
//! Each subcarrier of the preamble carries one Huffman polynomial across
//! `K_tm + 1` symbols. DiZeT decodes it without any channel knowledge; the
//! re-encoded polynomial then acts as a pilot for a least-squares gain.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dizet::{dizet_hard, ReceivedSequence};
use crate::error::check_len;
use crate::phy::ofdm::ResourceGrid;
use crate::zeros::{encode, ConstellationParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub gains: Vec<Complex64>,
    pub noise_var: f64,
    pub equalizer: Vec<Complex64>,
}

/// `F = conj(H) / (|H|² + N_0)`.
pub fn mmse_equalizer(gains: &[Complex64], noise_var: f64) -> Vec<Complex64> {
    gains
        .iter()
        .map(|h| {
            let d = h.norm_sqr() + noise_var;
            if d > 0.0 {
                h.conj() / d
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Per subcarrier: DiZeT, re-encode at unit symbol power, then
/// `Ĥ = Σ conj(x̂) y / Σ |x̂|²`.
pub fn blind_chest(
    preamble: &ResourceGrid,
    params: &ConstellationParams,
    noise_var: f64,
) -> Result<ChannelEstimate> {
    check_len(params.k() + 1, preamble.symbols())?;
    let energy = (params.k() + 1) as f64;
    let gains = (0..preamble.subcarriers())
        .map(|l| {
            let y = preamble.subcarrier(l);
            let bits = dizet_hard(&ReceivedSequence::new(y.clone(), 1)?, params)?;
            let x = encode(&bits, params, energy)?;
            let num: Complex64 = x.coeffs().iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
            Ok(num / energy)
        })
        .collect::<Result<Vec<_>>>()?;
    let equalizer = mmse_equalizer(&gains, noise_var);
    Ok(ChannelEstimate {
        gains,
        noise_var,
        equalizer,
    })
}

/// Mean `|cell|²` over cells known to carry no signal.
pub fn estimate_noise_var(null_cells: &[Complex64]) -> Result<f64> {
    if null_cells.is_empty() {
        return Err(Error::InvalidArgument("no null cells"));
    }
    Ok(null_cells.iter().map(|c| c.norm_sqr()).sum::<f64>() / null_cells.len() as f64)
}

/// Applies `F_ℓ` to every symbol of a frequency-mapped grid.
pub fn equalize(grid: &mut ResourceGrid, estimate: &ChannelEstimate) -> Result<()> {
    check_len(estimate.equalizer.len(), grid.subcarriers())?;
    for m in 0..grid.symbols() {
        for (c, f) in grid.symbol_mut(m).iter_mut().zip(&estimate.equalizer) {
            *c *= f;
        }
    }
    Ok(())
}
