//! Raw I/Q files: interleaved 32-bit little-endian float pairs `(I, Q)`.

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context, Result};
use jbmocz::Complex64;

pub fn encode_iq(samples: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_iq(bytes: &[u8]) -> Result<Vec<Complex64>> {
    ensure!(
        bytes.len() % 8 == 0,
        "I/Q data length {} is not a multiple of 8 bytes",
        bytes.len()
    );
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(f64::from(re), f64::from(im))
        })
        .collect())
}

pub fn write_iq(path: &Path, samples: &[Complex64]) -> Result<()> {
    fs::write(path, encode_iq(samples)).with_context(|| format!("writing {}", path.display()))
}

pub fn read_iq(path: &Path) -> Result<Vec<Complex64>> {
    decode_iq(&fs::read(path).with_context(|| format!("reading {}", path.display()))?)
}
