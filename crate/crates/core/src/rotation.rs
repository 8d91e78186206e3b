//! Uniform zero rotation and its template-correlation estimate.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::check_len;
use crate::fft::Fft;
use crate::zeros::Template;
use crate::{Error, Result};

const TIE_TOL: f64 = 1e-12;

/// Multiplies coefficient `ℓ` by `e^{-jφℓ}`, which rotates every root by `e^{jφ}`.
pub fn apply_rotation(coeffs: &[Complex64], phi: f64) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(l, &c)| c * Complex64::from_polar(1.0, -phi * l as f64))
        .collect()
}

pub fn correct_rotation(coeffs: &[Complex64], phi_hat: f64) -> Vec<Complex64> {
    apply_rotation(coeffs, -phi_hat)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationEstimate {
    pub bin: usize,
    pub phi_hat: f64,
    pub score: f64,
}

/// Cyclic correlation against a fixed template, computed in the frequency
/// domain.
#[derive(Debug, Clone)]
pub struct RotationEstimator {
    fft: Fft,
    // conj(DFT(T)) / N
    spectrum: Vec<Complex64>,
}

impl RotationEstimator {
    pub fn new(template: &Template) -> Self {
        let n = template.len();
        let fft = Fft::new(n);
        let mut spectrum: Vec<Complex64> = template
            .samples()
            .iter()
            .map(|&t| Complex64::new(t, 0.0))
            .collect();
        fft.forward(&mut spectrum);
        let scale = 1.0 / n as f64;
        for s in &mut spectrum {
            *s = s.conj() * scale;
        }
        Self { fft, spectrum }
    }

    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }

    /// `score_n = Σ_i v_i T_{(i-n) mod N}` for every shift `n`.
    pub fn scores(&self, magnitudes: &[f64]) -> Result<Vec<f64>> {
        check_len(self.len(), magnitudes.len())?;
        let mut buf: Vec<Complex64> = magnitudes.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.fft.inverse(&mut buf);
        Ok(buf.iter().map(|c| c.re).collect())
    }

    pub fn estimate(&self, magnitudes: &[f64]) -> Result<RotationEstimate> {
        let scores = self.scores(magnitudes)?;
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Numerical("non-finite correlation"));
        }
        let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let floor = max - TIE_TOL * max.abs().max(f64::MIN_POSITIVE);
        let bin = scores.iter().position(|&s| s >= floor).unwrap_or(0);
        let n = self.len();
        Ok(RotationEstimate {
            bin,
            phi_hat: 2.0 * PI * bin as f64 / n as f64,
            score: scores[bin],
        })
    }
}

pub fn estimate_rotation(magnitudes: &[f64], template: &Template) -> Result<RotationEstimate> {
    RotationEstimator::new(template).estimate(magnitudes)
}

/// `(1/P) Σ min{(φ_p - φ̂_p)², (φ_p - (2π - φ̂_p))²}`.
pub fn rotation_mse(true_phis: &[f64], est_phis: &[f64]) -> Result<f64> {
    check_len(true_phis.len(), est_phis.len())?;
    if true_phis.is_empty() {
        return Err(Error::InvalidArgument("no estimates"));
    }
    let sum: f64 = true_phis
        .iter()
        .zip(est_phis)
        .map(|(&p, &e)| {
            let a = p - e;
            let b = p - (2.0 * PI - e);
            (a * a).min(b * b)
        })
        .sum();
    Ok(sum / true_phis.len() as f64)
}
