//! Capacity-based zero reliability and constellation-parameter design.
//!
//! Deflating a zero `α_k` out of a unit-energy codeword leaves `H_k(z)`, the
//! frequency-selective channel seen by that zero. Its reliability is the
//! capacity of the parallel channel with unit noise on an `N`-point grid,
//! `Ĉ_k = (1/N) Σ_n log₂(1 + |H_k(e^{j2πn/N})|²)`.
//!
//! For BMOCZ codewords `|X(e^{jω})|²` is shared by the whole codebook, so
//! `|H_k|² = A(e^{jω}) / ((K+1) |e^{jω} - α_k|²)` depends only on `α_k`.
//! [`SpectralStability`] tabulates `Ĉ_k` for both candidate zeros of every
//! index, which makes codebook-wide quantities cheap.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fft::Fft;
use crate::phy::papr::template_papr;
use crate::zeros::{jutted_spectrum, ConstellationParams};
use crate::{poly, Bit, Error, Result};

pub const DEFAULT_GRID: usize = 1024;

const DEFLATE_TOL: f64 = 1e-8;
const EXACT_MAX_K: usize = 16;
const RANDOM_CHECKS: usize = 64;
const MIN_SEED: u64 = 0x6a09_e667_f3bc_c908;

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub per_zero: Vec<f64>,
    pub poly: f64,
}

impl StabilityReport {
    fn from_per_zero(per_zero: Vec<f64>) -> Self {
        let poly = per_zero.iter().sum::<f64>() / per_zero.len().max(1) as f64;
        Self { per_zero, poly }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignCurvePoint {
    pub zeta: f64,
    pub r_star: f64,
    pub min_stability: f64,
    pub template_papr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusOptimum {
    pub r_star: f64,
    pub min_stability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookMode {
    Exact,
    Sampled { count: usize, seed: u64 },
}

fn unit(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let e = poly::energy(coeffs);
    if !(e > 0.0) {
        return Err(Error::InvalidArgument("zero polynomial"));
    }
    let s = e.sqrt().recip();
    Ok(coeffs.iter().map(|c| c * s).collect())
}

/// `H_k(z) = X(z)/(z - α_k)` by synthetic division.
pub fn deflate(coeffs: &[Complex64], root: Complex64) -> Result<Vec<Complex64>> {
    let (q, rel) = poly::divide_root(coeffs, root);
    if !(rel <= DEFLATE_TOL) {
        return Err(Error::Numerical("deflation point is not a root"));
    }
    Ok(q)
}

/// `Ĉ_k` of one zero of `coeffs`, after normalizing to unit energy.
pub fn zero_reliability(coeffs: &[Complex64], root: Complex64, n: usize) -> Result<f64> {
    if n < coeffs.len().saturating_sub(1) || n == 0 {
        return Err(Error::InvalidArgument(
            "grid smaller than the deflated degree",
        ));
    }
    let h = deflate(&unit(coeffs)?, root)?;
    let vals = Fft::new(n).eval_on_circle(&h);
    Ok(vals
        .iter()
        .map(|v| (1.0 + v.norm_sqr()).log2())
        .sum::<f64>()
        / n as f64)
}

/// `C_x` together with every `Ĉ_k`.
pub fn poly_stability(
    coeffs: &[Complex64],
    roots: &[Complex64],
    n: usize,
) -> Result<StabilityReport> {
    let per_zero = roots
        .iter()
        .map(|&r| zero_reliability(coeffs, r, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport::from_per_zero(per_zero))
}

/// `Ĉ_k` for both candidate zeros of every index of one constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralStability {
    // [k][bit]
    table: Vec<[f64; 2]>,
}

impl SpectralStability {
    pub fn new(params: &ConstellationParams, n: usize) -> Self {
        let kp1 = (params.k() + 1) as f64;
        let grid: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let w = 2.0 * PI * i as f64 / n as f64;
                (w, jutted_spectrum(params, w) / kp1)
            })
            .collect();
        let table = (0..params.k())
            .map(|k| {
                let psi = params.phase(k);
                let mut pair = [0.0; 2];
                for (bit, slot) in pair.iter_mut().enumerate() {
                    let r = params.zero(k, bit as Bit).norm();
                    let sum: f64 = grid
                        .iter()
                        .map(|&(w, s)| {
                            let d = 1.0 + r * r - 2.0 * r * (w - psi).cos();
                            (1.0 + s / d).log2()
                        })
                        .sum();
                    *slot = sum / n as f64;
                }
                pair
            })
            .collect();
        Self { table }
    }

    pub fn k(&self) -> usize {
        self.table.len()
    }

    pub fn zero(&self, k: usize, bit: Bit) -> f64 {
        self.table[k][usize::from(bit != 0)]
    }

    pub fn report(&self, bits: &[Bit]) -> Result<StabilityReport> {
        crate::error::check_len(self.k(), bits.len())?;
        Ok(StabilityReport::from_per_zero(
            bits.iter()
                .enumerate()
                .map(|(k, &b)| self.zero(k, b))
                .collect(),
        ))
    }

    pub fn poly(&self, bits: &[Bit]) -> f64 {
        bits.iter()
            .enumerate()
            .map(|(k, &b)| self.zero(k, b))
            .sum::<f64>()
            / self.k() as f64
    }

    /// Codebook average `C̄`. Since `C_x` is a mean of independent per-index
    /// terms, averaging over all `2^K` codewords reduces to the table mean.
    pub fn codebook_mean(&self) -> f64 {
        self.table.iter().map(|p| 0.5 * (p[0] + p[1])).sum::<f64>() / self.k() as f64
    }
}

pub fn codeword_stability(
    params: &ConstellationParams,
    bits: &[Bit],
    n: usize,
) -> Result<StabilityReport> {
    SpectralStability::new(params, n).report(bits)
}

fn random_bits(rng: &mut impl Rng, k: usize) -> Vec<Bit> {
    (0..k).map(|_| Bit::from(rng.random::<bool>())).collect()
}

/// `C̄` over the whole codebook or a random subset of it.
pub fn codebook_stability(
    params: &ConstellationParams,
    n: usize,
    mode: CodebookMode,
) -> Result<f64> {
    let table = SpectralStability::new(params, n);
    match mode {
        CodebookMode::Exact => {
            if params.k() > EXACT_MAX_K {
                return Err(Error::InvalidArgument(
                    "exact enumeration is limited to K <= 16",
                ));
            }
            Ok(table.codebook_mean())
        }
        CodebookMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidArgument("sample count must be positive"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sum: f64 = (0..count)
                .map(|_| table.poly(&random_bits(&mut rng, params.k())))
                .sum();
            Ok(sum / count as f64)
        }
    }
}

/// Minimum `C_x` over the codebook: exact for `K <= 16`, otherwise the
/// all-outside and all-inside codewords plus a seeded random sample.
pub fn min_codebook_stability(params: &ConstellationParams, n: usize) -> f64 {
    min_from_table(&SpectralStability::new(params, n))
}

fn min_from_table(table: &SpectralStability) -> f64 {
    let k = table.k();
    if k <= EXACT_MAX_K {
        return table.table.iter().map(|p| p[0].min(p[1])).sum::<f64>() / k as f64;
    }
    let mut best = table.poly(&vec![1; k]).min(table.poly(&vec![0; k]));
    let mut rng = ChaCha8Rng::seed_from_u64(MIN_SEED ^ k as u64);
    for _ in 0..RANDOM_CHECKS {
        best = best.min(table.poly(&random_bits(&mut rng, k)));
    }
    best
}

/// Grid argmax of the minimum codebook stability; ties go to the smaller radius.
pub fn optimize_radius(k: usize, zeta: f64, r_grid: &[f64], n: usize) -> Result<RadiusOptimum> {
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("radius grid is empty"));
    }
    let mut best: Option<RadiusOptimum> = None;
    for &r in r_grid {
        let params = ConstellationParams::new(k, r, zeta)?;
        let c = min_codebook_stability(&params, n);
        if best.is_none_or(|b| c > b.min_stability) {
            best = Some(RadiusOptimum {
                r_star: r,
                min_stability: c,
            });
        }
    }
    best.ok_or(Error::InvalidArgument("radius grid is empty"))
}

/// Template PAPR grid used for design curves.
pub const PAPR_GRID: usize = 8192;

pub fn zeta_sweep(
    k: usize,
    zeta_grid: &[f64],
    r_grid: &[f64],
    n: usize,
) -> Result<Vec<DesignCurvePoint>> {
    if zeta_grid.is_empty() {
        return Err(Error::InvalidArgument("asymmetry grid is empty"));
    }
    zeta_grid
        .iter()
        .map(|&zeta| {
            let opt = optimize_radius(k, zeta, r_grid, n)?;
            let params = ConstellationParams::new(k, opt.r_star, zeta)?;
            Ok(DesignCurvePoint {
                zeta,
                r_star: opt.r_star,
                min_stability: opt.min_stability,
                template_papr_db: 10.0 * template_papr(&params, PAPR_GRID).log10(),
            })
        })
        .collect()
}

/// `1.001..=1.5` in steps of `0.001` for `K >= 32`, else `1.005..=2.0` in
/// steps of `0.005`.
pub fn default_radius_grid(k: usize) -> Vec<f64> {
    let (step, count) = if k >= 32 { (0.001, 500) } else { (0.005, 200) };
    (1..=count).map(|i| 1.0 + step * i as f64).collect()
}
