//! Channel impairments: Rayleigh tapped delay lines, sequence-level
//! convolution with AWGN, and the sample-level OFDM channel with timing
//! offset, CFO and sampling-clock drift.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dizet::ReceivedSequence;
use crate::{poly, Error, Result};

/// Circularly-symmetric complex Gaussian sample with variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

/// Tap `l` of `taps` is the complex gain at a delay of `l` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CirRealization {
    pub taps: Vec<Complex64>,
}

impl CirRealization {
    pub fn identity() -> Self {
        Self {
            taps: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// `L_e`.
    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// `H_ℓ = Σ_l h_l e^{-j2πℓl/N}`.
    pub fn frequency_response(&self, l: usize, n: usize) -> Complex64 {
        self.taps
            .iter()
            .enumerate()
            .map(|(d, &h)| h * Complex64::from_polar(1.0, -2.0 * PI * (l * d) as f64 / n as f64))
            .sum()
    }
}

/// Power-delay profile of a tapped delay line with integer-sample taps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerDelayProfile {
    Uniform {
        taps: usize,
    },
    /// Tap `l` has power proportional to `e^{-l/decay}`.
    Exponential {
        taps: usize,
        decay: f64,
    },
}

impl PowerDelayProfile {
    pub fn flat() -> Self {
        Self::Uniform { taps: 1 }
    }

    /// Five-tap exponential profile; `decay = 1` sample is about 87 ns RMS
    /// delay spread at 10 MHz.
    pub fn selective() -> Self {
        Self::Exponential {
            taps: 5,
            decay: 1.0,
        }
    }

    pub fn taps(&self) -> usize {
        match *self {
            Self::Uniform { taps } | Self::Exponential { taps, .. } => taps,
        }
    }

    /// Normalized tap powers summing to one.
    pub fn powers(&self) -> Result<Vec<f64>> {
        let raw: Vec<f64> = match *self {
            Self::Uniform { taps } => vec![1.0; taps],
            Self::Exponential { taps, decay } => {
                if !(decay > 0.0) {
                    return Err(Error::InvalidArgument("decay must be positive"));
                }
                (0..taps).map(|l| (-(l as f64) / decay).exp()).collect()
            }
        };
        if raw.is_empty() {
            return Err(Error::InvalidArgument("channel needs at least one tap"));
        }
        let total: f64 = raw.iter().sum();
        Ok(raw.into_iter().map(|p| p / total).collect())
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CirRealization> {
        Ok(CirRealization {
            taps: self
                .powers()?
                .into_iter()
                .map(|p| complex_gaussian(rng, p))
                .collect(),
        })
    }
}

/// `L_e` i.i.d. taps with `E|h_l|² = 1/L_e`.
pub fn draw_cir<R: Rng + ?Sized>(l_e: usize, rng: &mut R) -> Result<CirRealization> {
    if l_e == 0 {
        return Err(Error::InvalidArgument("channel needs at least one tap"));
    }
    PowerDelayProfile::Uniform { taps: l_e }.draw(rng)
}

/// `y = x * h + w` with `w` i.i.d. of variance `noise_var`.
pub fn convolve_channel<R: Rng + ?Sized>(
    x: &[Complex64],
    h: &CirRealization,
    noise_var: f64,
    rng: &mut R,
) -> Result<ReceivedSequence> {
    let mut y = poly::convolve(x, &h.taps);
    add_noise(&mut y, noise_var, rng);
    ReceivedSequence::new(y, h.len())
}

pub fn add_noise<R: Rng + ?Sized>(samples: &mut [Complex64], noise_var: f64, rng: &mut R) {
    if noise_var > 0.0 {
        for s in samples {
            *s += complex_gaussian(rng, noise_var);
        }
    }
}

/// `N_0 = E / (B · 10^{ebn0/10})`.
pub fn ebn0_to_noise_var(ebn0_db: f64, info_bits: usize, energy: f64) -> Result<f64> {
    if info_bits == 0 || !(energy > 0.0) || !ebn0_db.is_finite() {
        return Err(Error::InvalidArgument(
            "need positive bits and energy and finite Eb/N0",
        ));
    }
    Ok(energy / (info_bits as f64 * 10f64.powf(ebn0_db / 10.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RotationSpec {
    #[default]
    None,
    Fixed(f64),
    /// `φ ~ U[0, 2π)` per codeword.
    Uniform,
}

impl RotationSpec {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Fixed(phi) => phi,
            Self::Uniform => rng.random::<f64>() * 2.0 * PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImpairmentSpec {
    pub timing_offset_samples: usize,
    pub cfo_hz: f64,
    pub drift_ppm: f64,
    pub noise_var: f64,
    pub rotation: RotationSpec,
}

fn lagrange_cubic(x: &[Complex64], t: f64) -> Complex64 {
    let i = t.floor();
    let mu = t - i;
    let i = i as i64;
    let w = [
        -mu * (mu - 1.0) * (mu - 2.0) / 6.0,
        (mu + 1.0) * (mu - 1.0) * (mu - 2.0) / 2.0,
        -(mu + 1.0) * mu * (mu - 2.0) / 2.0,
        (mu + 1.0) * mu * (mu - 1.0) / 6.0,
    ];
    let mut acc = Complex64::new(0.0, 0.0);
    for (o, &wi) in w.iter().enumerate() {
        let idx = i - 1 + o as i64;
        if idx >= 0 && (idx as usize) < x.len() {
            acc += x[idx as usize] * wi;
        }
    }
    acc
}

/// Tapped-delay-line convolution, integer delay, sampling-clock drift,
/// `e^{j2πΔf n/f_s}` and AWGN, in that order. With drift the receive clock
/// slips by `drift_ppm · 1e-6` samples per sample, realized by cubic Lagrange
/// interpolation.
pub fn apply_ofdm_channel<R: Rng + ?Sized>(
    samples: &[Complex64],
    cir: &CirRealization,
    spec: &ImpairmentSpec,
    sample_rate: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if !(spec.noise_var >= 0.0) {
        return Err(Error::InvalidArgument(
            "noise variance must be non-negative",
        ));
    }
    if !(sample_rate > 0.0) {
        return Err(Error::InvalidArgument("sample rate must be positive"));
    }
    let z = poly::convolve(samples, &cir.taps);
    let delay = spec.timing_offset_samples;
    let mut out = if spec.drift_ppm == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); delay];
        v.extend_from_slice(&z);
        v
    } else {
        let rate = spec.drift_ppm * 1e-6;
        let base = z.len() + delay;
        let len = base + (rate.abs() * base as f64).ceil() as usize + 1;
        (0..len)
            .map(|n| lagrange_cubic(&z, n as f64 - delay as f64 - rate * n as f64))
            .collect()
    };
    if spec.cfo_hz != 0.0 {
        let step = 2.0 * PI * spec.cfo_hz / sample_rate;
        for (n, s) in out.iter_mut().enumerate() {
            *s *= Complex64::from_polar(1.0, step * n as f64);
        }
    }
    add_noise(&mut out, spec.noise_var, rng);
    Ok(out)
}
