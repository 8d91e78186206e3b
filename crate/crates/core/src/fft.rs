//! Discrete Fourier transforms.
//!
//! Power-of-two sizes use an iterative radix-2 transform; any other size falls
//! back to the direct O(n²) sum over a precomputed root-of-unity table.
//!
//! Sign conventions: [`Fft::forward`] computes `X_k = Σ x_n e^{-j2πkn/N}` and
//! [`Fft::inverse`] computes `x_n = Σ X_k e^{+j2πkn/N}` without the `1/N`
//! factor, so `inverse` of a coefficient vector evaluates the polynomial at the
//! N-th roots of unity.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    // roots[k] = e^{-j2πk/n}
    roots: Vec<Complex64>,
    // Twiddles of the butterfly stage of half-size h at [h-1, 2h-1), forward
    // and inverse.
    stages: [Vec<Complex64>; 2],
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "transform size must be positive");
        let roots: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        let (mut bitrev, mut forward) = (Vec::new(), Vec::new());
        if n.is_power_of_two() {
            let bits = n.trailing_zeros();
            bitrev = (0..n)
                .map(|i| {
                    if bits == 0 {
                        0
                    } else {
                        i.reverse_bits() >> (usize::BITS - bits)
                    }
                })
                .collect();
            let mut half = 1;
            while half < n {
                forward.extend((0..half).map(|k| roots[k * n / (2 * half)]));
                half *= 2;
            }
        }
        let inverse = forward.iter().map(|w: &Complex64| w.conj()).collect();
        Self {
            n,
            roots,
            stages: [forward, inverse],
            bitrev,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, false);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, true);
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        assert_eq!(buf.len(), self.n, "buffer length must equal transform size");
        if self.bitrev.is_empty() {
            self.direct(buf, inverse);
        } else {
            self.radix2(buf, inverse);
        }
    }

    fn root(&self, idx: usize, inverse: bool) -> Complex64 {
        let w = self.roots[idx];
        if inverse {
            w.conj()
        } else {
            w
        }
    }

    fn radix2(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let stages = &self.stages[usize::from(inverse)];
        let mut half = 1;
        if n >= 4 {
            // The first two stages fused; their twiddles are 1 and ∓j.
            let w = stages[2];
            for c in buf.chunks_exact_mut(4) {
                let (a0, a1) = (c[0] + c[1], c[0] - c[1]);
                let (a2, a3) = (c[2] + c[3], (c[2] - c[3]) * w);
                c[0] = a0 + a2;
                c[2] = a0 - a2;
                c[1] = a1 + a3;
                c[3] = a1 - a3;
            }
            half = 4;
        }
        while half < n {
            let tw = &stages[half - 1..2 * half - 1];
            for chunk in buf.chunks_exact_mut(2 * half) {
                let (lo, hi) = chunk.split_at_mut(half);
                for ((a, b), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(tw) {
                    let t = *b * w;
                    *b = *a - t;
                    *a += t;
                }
            }
            half *= 2;
        }
    }

    fn direct(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let input = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &x) in input.iter().enumerate() {
                acc += x * self.root((k * i) % n, inverse);
            }
            *out = acc;
        }
    }

    /// Evaluates the polynomial `Σ c_l z^l` at `z = e^{j2πi/n}` for every
    /// `i ∈ [n]`. Coefficients beyond `n` alias onto `l mod n`.
    pub fn eval_on_circle(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for (l, &c) in coeffs.iter().enumerate() {
            buf[l % self.n] += c;
        }
        self.inverse(&mut buf);
        buf
    }
}

/// `|X(e^{j2πi/n})|` for `i ∈ [n]`.
pub fn circle_magnitudes(coeffs: &[Complex64], n: usize) -> Vec<f64> {
    Fft::new(n)
        .eval_on_circle(coeffs)
        .iter()
        .map(|v| v.norm())
        .collect()
}
