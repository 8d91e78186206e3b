//! Polar codes with generator `F^{⊗n}`, `F = [[1,0],[1,1]]`, in natural
//! (non-bit-reversed) order, and min-sum successive-cancellation decoding.
//!
//! LLRs follow the DiZeT convention: positive means bit 1.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::check_len;
use crate::{Bit, Error, Result};

/// Default design `E_b/N_0` in dB for [`polar_construct`].
pub const DEFAULT_DESIGN_EBN0_DB: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarSpec {
    n: usize,
    k: usize,
    frozen: Vec<usize>,
    mask: Vec<bool>,
}

impl PolarSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sorted frozen indices.
    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.mask[i]
    }
}

/// Bhattacharyya parameters of the `n` synthetic channels for a BPSK AWGN
/// channel at the given design `E_b/N_0`.
pub fn bhattacharyya(n: usize, k: usize, design_ebn0_db: f64) -> Vec<f64> {
    let rate = k as f64 / n as f64;
    let ebn0 = 10f64.powf(design_ebn0_db / 10.0);
    let mut z = vec![(-rate * ebn0).exp()];
    while z.len() < n {
        z = z.iter().flat_map(|&v| [2.0 * v - v * v, v * v]).collect();
    }
    z
}

/// Freezes the `n - k` synthetic channels with the largest Bhattacharyya
/// parameter.
pub fn polar_construct(n: usize, k: usize, design_ebn0_db: f64) -> Result<PolarSpec> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(
            "block length must be a power of two",
        ));
    }
    if k > n {
        return Err(Error::InvalidArgument(
            "more information bits than the block length",
        ));
    }
    let z = bhattacharyya(n, k.max(1), design_ebn0_db);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut frozen = order[..n - k].to_vec();
    frozen.sort_unstable();
    let mut mask = vec![false; n];
    for &i in &frozen {
        mask[i] = true;
    }
    Ok(PolarSpec { n, k, frozen, mask })
}

fn transform(x: &mut [Bit]) {
    let n = x.len();
    let mut h = 1;
    while h < n {
        for block in x.chunks_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (u, v) in a.iter_mut().zip(b.iter()) {
                *u ^= v;
            }
        }
        h *= 2;
    }
}

pub fn polar_encode(info: &[Bit], spec: &PolarSpec) -> Result<Vec<Bit>> {
    check_len(spec.k, info.len())?;
    let mut u = vec![0; spec.n];
    let mut bits = info.iter();
    for (i, slot) in u.iter_mut().enumerate() {
        if !spec.mask[i] {
            *slot = *bits.next().unwrap_or(&0) & 1;
        }
    }
    transform(&mut u);
    Ok(u)
}

#[inline]
fn f(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    if (a < 0.0) != (b < 0.0) {
        -m
    } else {
        m
    }
}

#[inline]
fn g(a: f64, b: f64, u: Bit) -> f64 {
    if u == 0 {
        b + a
    } else {
        b - a
    }
}

// `l` holds log P(0)/P(1) for the sub-codeword; decisions for the matching
// block of `u` are written to `u`, and the re-encoded sub-codeword is returned
// in `x`.
fn sc(l: &[f64], mask: &[bool], u: &mut [Bit], x: &mut [Bit]) {
    let n = l.len();
    if n == 1 {
        let bit = if mask[0] { 0 } else { Bit::from(l[0] < 0.0) };
        u[0] = bit;
        x[0] = bit;
        return;
    }
    let h = n / 2;
    let (l1, l2) = l.split_at(h);
    let (ua, ub) = u.split_at_mut(h);
    let (xa, xb) = x.split_at_mut(h);
    let la: Vec<f64> = l1.iter().zip(l2).map(|(&a, &b)| f(a, b)).collect();
    sc(&la, &mask[..h], ua, xa);
    let lb: Vec<f64> = l1
        .iter()
        .zip(l2)
        .zip(xa.iter())
        .map(|((&a, &b), &c)| g(a, b, c))
        .collect();
    sc(&lb, &mask[h..], ub, xb);
    for (a, &b) in xa.iter_mut().zip(xb.iter()) {
        *a ^= b;
    }
}

/// Successive-cancellation decoding; frozen positions are forced to 0 and
/// zero LLRs decide 0.
pub fn polar_decode_sc(llrs: &[f64], spec: &PolarSpec) -> Result<Vec<Bit>> {
    check_len(spec.n, llrs.len())?;
    let l: Vec<f64> = llrs.iter().map(|&v| -v).collect();
    let mut u = vec![0; spec.n];
    let mut x = vec![0; spec.n];
    sc(&l, &spec.mask, &mut u, &mut x);
    Ok(u.iter()
        .zip(&spec.mask)
        .filter(|(_, &m)| !m)
        .map(|(&b, _)| b)
        .collect())
}
