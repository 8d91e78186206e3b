//! Half-symbol-repetition preamble and Schmidl-Cox timing/CFO acquisition.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dizet::{dizet_hard, ReceivedSequence};
use crate::error::check_len;
use crate::phy::ofdm::Numerology;
use crate::zeros::{encode, ConstellationParams};
use crate::{Bit, Error, Result};

pub const DEFAULT_LAMBDA: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    pub tau_hat: usize,
    pub cfo_hat: f64,
    pub gamma_max: f64,
}

/// Subcarrier cells of the sync symbol: a Huffman codeword of `K'` zeros on
/// the even subcarriers `0, 2, .., 2K'` of an `s`-subcarrier column.
pub fn build_sync_symbol(
    header_bits: &[Bit],
    params: &ConstellationParams,
    subcarriers: usize,
    energy: f64,
) -> Result<Vec<Complex64>> {
    if !params.is_huffman() {
        return Err(Error::InvalidArgument("sync preamble uses Huffman BMOCZ"));
    }
    check_len(params.k(), header_bits.len())?;
    if 2 * params.k() + 1 > subcarriers {
        return Err(Error::InvalidArgument(
            "sync codeword does not fit the even subcarriers",
        ));
    }
    let cw = encode(header_bits, params, energy)?;
    let mut col = vec![Complex64::new(0.0, 0.0); subcarriers];
    for (i, &c) in cw.coeffs().iter().enumerate() {
        col[2 * i] = c;
    }
    Ok(col)
}

/// Recovers the header from the even subcarriers of a demodulated sync symbol.
pub fn decode_sync_symbol(cells: &[Complex64], params: &ConstellationParams) -> Result<Vec<Bit>> {
    let k = params.k();
    if cells.len() < 2 * k + 1 {
        return Err(Error::LengthMismatch {
            expected: 2 * k + 1,
            found: cells.len(),
        });
    }
    let y: Vec<Complex64> = (0..=k).map(|i| cells[2 * i]).collect();
    dizet_hard(&ReceivedSequence::new(y, 1)?, params)
}

/// Odd subcarriers of a sync symbol, which carry only noise.
pub fn null_cells(cells: &[Complex64]) -> Vec<Complex64> {
    cells.iter().skip(1).step_by(2).copied().collect()
}

/// `(U_τ, V_τ)` for every candidate `τ ∈ 0..=len-N`.
pub fn correlation_metric(samples: &[Complex64], n_idft: usize) -> Result<Vec<(Complex64, f64)>> {
    if n_idft < 2 || samples.len() < n_idft {
        return Err(Error::InvalidArgument("stream shorter than one symbol"));
    }
    let half = n_idft / 2;
    Ok((0..=samples.len() - n_idft)
        .map(|tau| {
            let mut u = Complex64::new(0.0, 0.0);
            let mut v = 0.0;
            for i in 0..half {
                let late = samples[tau + i + half];
                u += samples[tau + i] * late.conj();
                v += late.norm_sqr();
            }
            (u, v)
        })
        .collect())
}

/// Largest `τ` with `Γ_τ = |U_τ|/V_τ ≥ λ Γ_max`, plus the CFO read from
/// `Arg(U_τ)`. Windows with `V_τ = 0` are skipped. Every sample offered is a
/// candidate start, so callers pass only the acquisition region.
pub fn sync_search(
    samples: &[Complex64],
    numerology: &Numerology,
    lambda: f64,
) -> Result<SyncResult> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument("lambda must lie in (0, 1]"));
    }
    let n = numerology.n_idft;
    let metric = correlation_metric(samples, n)?;
    let gamma: Vec<Option<f64>> = metric
        .iter()
        .map(|&(u, v)| if v > 0.0 { Some(u.norm() / v) } else { None })
        .collect();
    let gamma_max = gamma
        .iter()
        .flatten()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if !gamma_max.is_finite() {
        return Err(Error::Numerical("no window with signal energy"));
    }
    let tau_hat = gamma
        .iter()
        .rposition(|g| g.is_some_and(|g| g >= lambda * gamma_max))
        .ok_or(Error::Numerical("no candidate offset"))?;
    let u = metric[tau_hat].0;
    let cfo_hat = -u.arg() / (2.0 * PI * (n / 2) as f64) * numerology.sample_rate;
    Ok(SyncResult {
        tau_hat,
        cfo_hat,
        gamma_max,
    })
}

/// Multiplies sample `n` by `e^{-j2π cfo n / f_s}`.
pub fn correct_cfo(samples: &mut [Complex64], cfo_hz: f64, sample_rate: f64) {
    let step = -2.0 * PI * cfo_hz / sample_rate;
    for (n, s) in samples.iter_mut().enumerate() {
        *s *= Complex64::from_polar(1.0, step * n as f64);
    }
}
