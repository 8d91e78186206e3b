//! Deterministic parallel Monte-Carlo batches.
//!
//! Every batch draws from its own generator, seeded by hashing the master
//! seed with the sweep point and batch index, so results do not depend on the
//! worker count or scheduling.

use std::ops::AddAssign;

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BATCH: usize = 256;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of stream `stream` under `master`; chains compose, e.g.
/// `derive(derive(master, series), point)`.
pub fn derive(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

pub fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, batch as u64))
}

/// Runs `trials` trials in batches of [`BATCH`]; `f` receives the batch
/// generator, the batch index and its trial count. Results keep batch order.
pub fn run_batches<T, F>(seed: u64, trials: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize, usize) -> Result<T> + Sync,
{
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = BATCH.min(trials - b * BATCH);
            f(&mut batch_rng(seed, b), b, n)
        })
        .collect()
}

/// Bit and block error tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCounts {
    pub bits: u64,
    pub bit_errors: u64,
    pub blocks: u64,
    pub block_errors: u64,
}

impl ErrorCounts {
    /// Tallies one block of `sent` against `got`.
    pub fn block(sent: &[u8], got: &[u8]) -> Self {
        let errors = sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64;
        Self {
            bits: sent.len() as u64,
            bit_errors: errors,
            blocks: 1,
            block_errors: u64::from(errors > 0),
        }
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors, self.bits)
    }

    pub fn bler(&self) -> f64 {
        ratio(self.block_errors, self.blocks)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl AddAssign for ErrorCounts {
    fn add_assign(&mut self, o: Self) {
        self.bits += o.bits;
        self.bit_errors += o.bit_errors;
        self.blocks += o.blocks;
        self.block_errors += o.block_errors;
    }
}

impl std::iter::Sum for ErrorCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |mut a, b| {
            a += b;
            a
        })
    }
}
