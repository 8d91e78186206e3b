//! Zero constellations, bit/zero/coefficient conversion, the AACF and the
//! template transform.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::check_len;
use crate::fft::Fft;
use crate::{poly, Bit, Error, Result};

/// `(K, R, ζ)` of a jutted zero constellation. `ζ = 1` is Huffman BMOCZ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationParams {
    k: usize,
    radius: f64,
    zeta: f64,
}

impl ConstellationParams {
    pub fn new(k: usize, radius: f64, zeta: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument("K must be at least 2"));
        }
        if !(radius > 1.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(
                "radius must be finite and greater than 1",
            ));
        }
        if !(zeta >= 1.0) || !zeta.is_finite() {
            return Err(Error::InvalidArgument(
                "asymmetry factor must be finite and at least 1",
            ));
        }
        Ok(Self { k, radius, zeta })
    }

    pub fn huffman(k: usize, radius: f64) -> Result<Self> {
        Self::new(k, radius, 1.0)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn is_huffman(&self) -> bool {
        self.zeta == 1.0
    }

    /// `θ_K = 2π/K`.
    pub fn base_angle(&self) -> f64 {
        2.0 * PI / self.k as f64
    }

    /// `ψ_k = 2πk/K`.
    pub fn phase(&self, k: usize) -> f64 {
        self.base_angle() * k as f64
    }

    /// `ρ_0 = ζR`, `ρ_k = R` otherwise.
    pub fn rho(&self, k: usize) -> f64 {
        if k == 0 {
            self.zeta * self.radius
        } else {
            self.radius
        }
    }

    /// The candidate zero for bit value `bit` at index `k`.
    pub fn zero(&self, k: usize, bit: Bit) -> Complex64 {
        let rho = self.rho(k);
        let r = if bit != 0 { rho } else { rho.recip() };
        Complex64::from_polar(r, self.phase(k))
    }

    /// `η_H = 1/(R^K + R^{-K})`.
    pub fn eta_h(&self) -> f64 {
        let rk = self.radius.powi(self.k as i32);
        1.0 / (rk + rk.recip())
    }

    /// `a = ζR + 1/(ζR)`.
    pub fn a(&self) -> f64 {
        let zr = self.zeta * self.radius;
        zr + zr.recip()
    }

    /// `b = R + 1/R`.
    pub fn b(&self) -> f64 {
        self.radius + self.radius.recip()
    }
}

/// Conventional Huffman radius `√(1 + sin(π/K))`.
pub fn conventional_huffman_radius(k: usize) -> f64 {
    (1.0 + (PI / k as f64).sin()).sqrt()
}

/// Ordered zeros `α_0..α_{K-1}` of a codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroPattern(Vec<Complex64>);

impl ZeroPattern {
    pub fn new(zeros: Vec<Complex64>) -> Self {
        Self(zeros)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }
}

/// `K+1` polynomial coefficients scaled to a fixed energy, with `x_K` real
/// and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    coeffs: Vec<Complex64>,
    energy: f64,
}

impl Codeword {
    /// Rescales `coeffs` to squared norm `energy` and rotates `x_K` onto the
    /// positive real axis.
    pub fn from_coeffs(coeffs: Vec<Complex64>, energy: f64) -> Result<Self> {
        if !(energy > 0.0) {
            return Err(Error::InvalidArgument("energy must be positive"));
        }
        let lead = *coeffs
            .last()
            .ok_or(Error::InvalidArgument("empty coefficient vector"))?;
        let norm = poly::energy(&coeffs).sqrt();
        if lead.norm() == 0.0 || !norm.is_finite() {
            return Err(Error::Numerical("leading coefficient vanishes"));
        }
        let scale = Complex64::from_polar(energy.sqrt() / norm, -lead.arg());
        let mut coeffs: Vec<Complex64> = coeffs.into_iter().map(|c| c * scale).collect();
        if let Some(last) = coeffs.last_mut() {
            *last = Complex64::new(last.norm(), 0.0);
        }
        Ok(Self { coeffs, energy })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Polynomial degree `K`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }
}

pub fn encode_bits(bits: &[Bit], params: &ConstellationParams) -> Result<ZeroPattern> {
    check_len(params.k, bits.len())?;
    Ok(ZeroPattern(
        bits.iter()
            .enumerate()
            .map(|(k, &b)| params.zero(k, b))
            .collect(),
    ))
}

/// Expands `∏ (z - α_k)` and scales it to the requested energy.
///
/// The product is sampled on a unit-circle grid of at least `K+1` points and
/// brought back to coefficients with one inverse transform. For the large
/// dynamic range of Huffman coefficients this is far more accurate than
/// multiplying out the linear factors.
pub fn zeros_to_coeffs(pattern: &ZeroPattern, energy: f64) -> Result<Codeword> {
    let k = pattern.len();
    let m = (k + 1).next_power_of_two();
    let fft = Fft::new(m);
    let mut vals: Vec<Complex64> = (0..m)
        .map(|i| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / m as f64);
            pattern
                .0
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &a| acc * (w - a))
        })
        .collect();
    fft.forward(&mut vals);
    vals.truncate(k + 1);
    Codeword::from_coeffs(vals, energy)
}

pub fn encode(bits: &[Bit], params: &ConstellationParams, energy: f64) -> Result<Codeword> {
    zeros_to_coeffs(&encode_bits(bits, params)?, energy)
}

/// The `K` roots of a codeword, in no particular order.
pub fn coeffs_to_zeros(codeword: &Codeword) -> Result<Vec<Complex64>> {
    poly::roots(codeword.coeffs())
}

/// Maps each root to the nearest phase slot and reads the bit from which side
/// of the unit circle it lies on.
pub fn demap_nearest(roots: &[Complex64], params: &ConstellationParams) -> Result<Vec<Bit>> {
    check_len(params.k, roots.len())?;
    let mut bits = vec![0; params.k];
    let mut seen = vec![false; params.k];
    for r in roots {
        let slot = (r.arg() / params.base_angle()).round() as i64;
        let slot = slot.rem_euclid(params.k as i64) as usize;
        if seen[slot] {
            return Err(Error::Numerical("two roots share one phase slot"));
        }
        seen[slot] = true;
        bits[slot] = Bit::from(r.norm() > 1.0);
    }
    Ok(bits)
}

/// Aperiodic autocorrelation `a_{-K}..a_K`, stored at offset `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Aacf(Vec<Complex64>);

impl Aacf {
    pub fn coeffs(&self) -> &[Complex64] {
        &self.0
    }

    /// Largest lag `K`.
    pub fn max_lag(&self) -> usize {
        self.0.len() / 2
    }

    /// `a_ℓ`; zero outside `[-K, K]`.
    pub fn lag(&self, l: isize) -> Complex64 {
        let idx = l + self.max_lag() as isize;
        if idx < 0 || idx as usize >= self.0.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.0[idx as usize]
        }
    }
}

pub fn aacf(codeword: &Codeword) -> Aacf {
    let x = codeword.coeffs();
    let k = x.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
    for l in 0..=k {
        let a: Complex64 = (0..=k - l).map(|i| x[i].conj() * x[i + l]).sum();
        out[k + l] = a;
        out[k - l] = a.conj();
    }
    Aacf(out)
}

/// `η_J`, which scales the jutted AACF to `a_0 = K+1`. Equals `η_H` at `ζ = 1`.
pub fn eta_j(params: &ConstellationParams) -> f64 {
    let (k, r, z) = (params.k as i32, params.radius, params.zeta);
    if params.is_huffman() {
        return params.eta_h();
    }
    let geo = (r.powi(k - 1) - r.powi(-(k - 1))) / (r - r.recip());
    1.0 / (z * r.powi(k) + r.powi(-k) / z - (1.0 - z) * (1.0 - z.recip()) * geo)
}

// Coefficients of (z^K - R^K)(z - ζR)/(z - R).
fn jutted_factor(k: usize, r: f64, zeta: f64) -> Vec<f64> {
    let mut c = vec![0.0; k + 1];
    c[0] = -zeta * r.powi(k as i32);
    for (i, ci) in c.iter_mut().enumerate().take(k).skip(1) {
        *ci = (1.0 - zeta) * r.powi((k - i) as i32);
    }
    c[k] = 1.0;
    c
}

/// Closed-form AACF shared by every codeword of the constellation, scaled to
/// the given codeword energy.
pub fn closed_form_aacf(params: &ConstellationParams, energy: f64) -> Aacf {
    let k = params.k;
    let p = jutted_factor(k, params.radius, params.zeta);
    let q = jutted_factor(k, params.radius.recip(), params.zeta.recip());
    let scale = -eta_j(params) * energy;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * k + 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            out[i + j] += Complex64::new(scale * pi * qj, 0.0);
        }
    }
    Aacf(out)
}

/// `A_J(e^{jω})` at codeword energy `K+1`.
pub fn jutted_spectrum(params: &ConstellationParams, omega: f64) -> f64 {
    let k = params.k as f64;
    let eh = params.eta_h();
    let c = 2.0 * omega.cos();
    let huff = (k + 1.0) * (1.0 - 2.0 * eh * (k * omega).cos());
    let v = if params.is_huffman() {
        huff
    } else {
        eta_j(params) / eh * (c - params.a()) / (c - params.b()) * huff
    };
    v.max(0.0)
}

/// Sampled template transform `T_n = √A_J(2πn/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    samples: Vec<f64>,
    params: ConstellationParams,
}

impl Template {
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn params(&self) -> &ConstellationParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn make_template(params: &ConstellationParams, n: usize) -> Result<Template> {
    if n < 2 * params.k + 2 {
        return Err(Error::InvalidArgument(
            "template needs at least 2K+2 samples",
        ));
    }
    let samples = (0..n)
        .map(|i| jutted_spectrum(params, 2.0 * PI * i as f64 / n as f64).sqrt())
        .collect();
    Ok(Template {
        samples,
        params: *params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jutted8() -> ConstellationParams {
        ConstellationParams::new(8, 1.176, 1.15).unwrap()
    }

    fn bits_from(mut s: u64, k: usize) -> Vec<Bit> {
        (0..k)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s & 1) as Bit
            })
            .collect()
    }

    fn brute_aacf(x: &[Complex64], l: isize) -> Complex64 {
        let k = x.len() as isize - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=k {
            let j = i + l;
            if (0..=k).contains(&j) {
                acc += x[i as usize].conj() * x[j as usize];
            }
        }
        acc
    }

    #[test]
    fn params_validation() {
        assert!(ConstellationParams::new(1, 1.2, 1.0).is_err());
        assert!(ConstellationParams::new(4, 1.0, 1.0).is_err());
        assert!(ConstellationParams::new(4, 1.2, 0.99).is_err());
        assert!(ConstellationParams::new(4, f64::NAN, 1.0).is_err());
        assert!(jutted8().rho(0) > jutted8().rho(1));
    }

    #[test]
    fn jutted_k8_pattern() {
        let p = encode_bits(&[1, 0, 1, 1, 1, 0, 0, 1], &jutted8()).unwrap();
        let a0 = p.as_slice()[0];
        assert!((a0.re - 1.3524).abs() < 1e-12 && a0.im == 0.0);
        assert!((p.as_slice()[1].norm() - 1.0 / 1.176).abs() < 1e-12);
        for (k, z) in p.as_slice().iter().enumerate() {
            let d = (z.arg() - 2.0 * PI * k as f64 / 8.0).rem_euclid(2.0 * PI);
            assert!(d < 1e-12 || 2.0 * PI - d < 1e-12);
        }
    }

    #[test]
    fn k2_substitution() {
        let params = ConstellationParams::huffman(2, 1.5).unwrap();
        let p = encode_bits(&[0, 1], &params).unwrap();
        assert!((p.as_slice()[0] - Complex64::new(2.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((p.as_slice()[1] - Complex64::new(-1.5, 0.0)).norm() < 1e-12);
        let cw = zeros_to_coeffs(&p, 3.0).unwrap();
        let raw = [-1.0, 5.0 / 6.0, 1.0];
        let s = (3.0 / raw.iter().map(|v| v * v).sum::<f64>()).sqrt();
        for (c, r) in cw.coeffs().iter().zip(raw) {
            assert!((c - Complex64::new(r * s, 0.0)).norm() < 1e-12);
        }
        assert!(encode_bits(&[0, 1, 1], &params).is_err());
    }

    #[test]
    fn all_ones_huffman_is_uniform() {
        let params = ConstellationParams::huffman(8, 1.2).unwrap();
        let p = encode_bits(&[1; 8], &params).unwrap();
        for z in p.as_slice() {
            assert!((z.norm() - 1.2).abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_matches_direct_at_small_k() {
        let params = jutted8();
        let pat = encode_bits(&[1, 0, 1, 1, 1, 0, 0, 1], &params).unwrap();
        let cw = zeros_to_coeffs(&pat, 9.0).unwrap();
        let direct = Codeword::from_coeffs(poly::expand_roots_direct(pat.as_slice()), 9.0).unwrap();
        for (a, b) in cw.coeffs().iter().zip(direct.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((poly::energy(cw.coeffs()) - 9.0).abs() < 1e-9);
        assert_eq!(cw.coeffs()[8].im, 0.0);
        assert!(cw.coeffs()[8].re > 0.0);
    }

    #[test]
    fn round_trip_recovers_bits() {
        for &k in &[4usize, 16, 32, 64] {
            let params = ConstellationParams::new(k, 1.0 + 0.6 / k as f64 + 0.02, 1.1).unwrap();
            for seed in 1..4u64 {
                let bits = bits_from(seed * 7919 + k as u64, k);
                let pat = encode_bits(&bits, &params).unwrap();
                let cw = zeros_to_coeffs(&pat, (k + 1) as f64).unwrap();
                let roots = coeffs_to_zeros(&cw).unwrap();
                for z in pat.as_slice() {
                    let d = roots
                        .iter()
                        .map(|r| (r - z).norm())
                        .fold(f64::INFINITY, f64::min);
                    assert!(d < 1e-6, "K={k}: zero off by {d}");
                }
                assert_eq!(demap_nearest(&roots, &params).unwrap(), bits);
            }
        }
    }

    #[test]
    fn huffman_aacf_is_impulsive() {
        let params = ConstellationParams::huffman(8, 1.176).unwrap();
        let cw = encode(&bits_from(3, 8), &params, 9.0).unwrap();
        let a = aacf(&cw);
        let eh = params.eta_h();
        assert!((a.lag(0).re - 9.0).abs() < 1e-9);
        for l in 1..8 {
            assert!(a.lag(l).norm() < 1e-9);
            assert!(a.lag(-l).norm() < 1e-9);
        }
        assert!((a.lag(8) - Complex64::new(-eh * 9.0, 0.0)).norm() < 1e-9);
        assert!((a.lag(-8) - Complex64::new(-eh * 9.0, 0.0)).norm() < 1e-9);
        assert_eq!(a.lag(9), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn aacf_matches_brute_force_and_closed_form() {
        let params = jutted8();
        let closed = closed_form_aacf(&params, 9.0);
        for seed in 0..20u64 {
            let cw = encode(&bits_from(seed + 11, 8), &params, 9.0).unwrap();
            let a = aacf(&cw);
            for l in -8isize..=8 {
                assert!((a.lag(l) - brute_aacf(cw.coeffs(), l)).norm() < 1e-9);
                assert!((a.lag(l) - closed.lag(l)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn eta_values() {
        let h = ConstellationParams::huffman(8, 1.176).unwrap();
        let cw = encode(&[1, 1, 0, 1, 0, 0, 1, 0], &h, 9.0).unwrap();
        assert!((eta_j(&h) + aacf(&cw).lag(8).re / 9.0).abs() < 1e-12);
        assert!((eta_j(&h) - 0.25436).abs() < 1e-5);
        let h2 = ConstellationParams::huffman(2, 2.0).unwrap();
        assert!((eta_j(&h2) - 4.0 / 17.0).abs() < 1e-15);
        // Jutted: read -a_K/(K+1) off an explicit codeword.
        let p = jutted8();
        let cw = encode(&[0, 1, 1, 0, 1, 0, 0, 0], &p, 9.0).unwrap();
        let v = -aacf(&cw).lag(8).re / 9.0;
        assert!((eta_j(&p) - v).abs() < 1e-9);
        // Same identity with ζ slightly above one goes through the general formula.
        let q = ConstellationParams::new(8, 1.176, 1.0 + 1e-9).unwrap();
        assert!((eta_j(&q) - h.eta_h()).abs() < 1e-8);
    }

    #[test]
    fn spectrum_properties() {
        let h = ConstellationParams::huffman(8, 1.176).unwrap();
        let peak = jutted_spectrum(&h, PI / 8.0);
        assert!((peak - 9.0 * (1.0 + 2.0 * h.eta_h())).abs() < 1e-12);

        let p = jutted8();
        let n = 4096;
        let grid: Vec<f64> = (0..n)
            .map(|i| jutted_spectrum(&p, 2.0 * PI * i as f64 / n as f64))
            .collect();
        assert!(grid.iter().all(|&v| v >= 0.0));
        let mean = grid.iter().sum::<f64>() / n as f64;
        assert!((mean - 9.0).abs() < 1e-9);

        let cw = encode(&[1, 0, 1, 1, 1, 0, 0, 1], &p, 9.0).unwrap();
        for (i, &v) in grid.iter().enumerate().step_by(37) {
            let z = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / n as f64);
            let x = poly::eval(cw.coeffs(), z).norm_sqr();
            assert!((x - v).abs() < 1e-8 * v.max(1.0));
        }
    }

    #[test]
    fn template_shapes() {
        let h = ConstellationParams::huffman(8, 1.176).unwrap();
        assert!(make_template(&h, 17).is_err());
        let t = make_template(&h, 64).unwrap();
        for i in 0..64 {
            assert!((t.samples()[i] - t.samples()[(i + 8) % 64]).abs() < 1e-9);
        }

        let j = ConstellationParams::new(16, 1.093, 1.15).unwrap();
        let t = make_template(&j, 1024).unwrap();
        let (imax, _) = t
            .samples()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        assert!(imax < 1024 / 32 || imax > 1024 - 1024 / 32);

        let cw = encode(&bits_from(5, 16), &j, 17.0).unwrap();
        let mags = crate::fft::circle_magnitudes(cw.coeffs(), 1024);
        for (a, b) in mags.iter().zip(t.samples()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
