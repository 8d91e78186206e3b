//! Resource mapping and CP-OFDM symbol synthesis.
//!
//! Subcarriers `0..S` of the `N`-point transform carry data. Modulation has no
//! `1/N` factor, so a frequency-mapped symbol body is literally the polynomial
//! evaluated at the `N`-th roots of unity; demodulation divides by `N`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::check_len;
use crate::fft::Fft;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mapping {
    /// One polynomial per OFDM symbol, coefficients across subcarriers.
    Frequency,
    /// One polynomial per subcarrier, coefficients across OFDM symbols.
    Time,
}

/// Transform size, cyclic prefix and sample rate of the waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerology {
    pub n_idft: usize,
    pub n_cp: usize,
    pub sample_rate: f64,
}

impl Numerology {
    pub fn new(n_idft: usize, n_cp: usize, sample_rate: f64) -> Result<Self> {
        if n_idft == 0 || n_idft % 2 != 0 {
            return Err(Error::InvalidArgument(
                "IDFT size must be positive and even",
            ));
        }
        if n_cp > n_idft {
            return Err(Error::InvalidArgument(
                "cyclic prefix longer than the symbol",
            ));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::InvalidArgument("sample rate must be positive"));
        }
        Ok(Self {
            n_idft,
            n_cp,
            sample_rate,
        })
    }

    /// `N + N_cp`.
    pub fn symbol_len(&self) -> usize {
        self.n_idft + self.n_cp
    }

    /// Subcarrier spacing `F_s = f_s / N`.
    pub fn spacing(&self) -> f64 {
        self.sample_rate / self.n_idft as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub numerology: Numerology,
    pub subcarriers: usize,
    pub symbols: usize,
    pub mapping: Mapping,
}

impl OfdmConfig {
    pub fn new(
        numerology: Numerology,
        subcarriers: usize,
        symbols: usize,
        mapping: Mapping,
    ) -> Result<Self> {
        if subcarriers == 0 || subcarriers > numerology.n_idft {
            return Err(Error::InvalidArgument(
                "active subcarriers must be in 1..=N",
            ));
        }
        Ok(Self {
            numerology,
            subcarriers,
            symbols,
            mapping,
        })
    }

    pub fn stream_len(&self) -> usize {
        self.symbols * self.numerology.symbol_len()
    }
}

/// `S x M` cells `d_{ℓ,m}`, stored symbol by symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceGrid {
    subcarriers: usize,
    symbols: usize,
    cells: Vec<Complex64>,
}

impl ResourceGrid {
    pub fn zeros(subcarriers: usize, symbols: usize) -> Self {
        Self {
            subcarriers,
            symbols,
            cells: vec![Complex64::new(0.0, 0.0); subcarriers * symbols],
        }
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn get(&self, l: usize, m: usize) -> Complex64 {
        self.cells[m * self.subcarriers + l]
    }

    pub fn set(&mut self, l: usize, m: usize, v: Complex64) {
        self.cells[m * self.subcarriers + l] = v;
    }

    /// All subcarriers of symbol `m`.
    pub fn symbol(&self, m: usize) -> &[Complex64] {
        &self.cells[m * self.subcarriers..(m + 1) * self.subcarriers]
    }

    pub fn symbol_mut(&mut self, m: usize) -> &mut [Complex64] {
        &mut self.cells[m * self.subcarriers..(m + 1) * self.subcarriers]
    }

    /// All symbols of subcarrier `l`.
    pub fn subcarrier(&self, l: usize) -> Vec<Complex64> {
        (0..self.symbols).map(|m| self.get(l, m)).collect()
    }

    pub fn push_symbol(&mut self, column: &[Complex64]) -> Result<()> {
        check_len(self.subcarriers, column.len())?;
        self.cells.extend_from_slice(column);
        self.symbols += 1;
        Ok(())
    }
}

fn common_len<T: AsRef<[Complex64]>>(codewords: &[T]) -> Result<usize> {
    let first = codewords
        .first()
        .ok_or(Error::InvalidArgument("no codewords"))?;
    let len = first.as_ref().len();
    for c in codewords {
        check_len(len, c.as_ref().len())?;
    }
    Ok(len)
}

/// `d_{ℓ,m} = x_{ℓ,m}`: coefficient `ℓ` of polynomial `m`.
pub fn map_fm<T: AsRef<[Complex64]>>(codewords: &[T]) -> Result<ResourceGrid> {
    let s = common_len(codewords)?;
    let mut grid = ResourceGrid::zeros(s, 0);
    for c in codewords {
        grid.push_symbol(c.as_ref())?;
    }
    Ok(grid)
}

/// `d_{ℓ,m} = x_{m,ℓ}`: coefficient `m` of polynomial `ℓ`.
pub fn map_tm<T: AsRef<[Complex64]>>(codewords: &[T]) -> Result<ResourceGrid> {
    let m = common_len(codewords)?;
    let mut grid = ResourceGrid::zeros(codewords.len(), m);
    for (l, c) in codewords.iter().enumerate() {
        for (i, &v) in c.as_ref().iter().enumerate() {
            grid.set(l, i, v);
        }
    }
    Ok(grid)
}

pub fn demap(grid: &ResourceGrid, mapping: Mapping) -> Vec<Vec<Complex64>> {
    match mapping {
        Mapping::Frequency => (0..grid.symbols).map(|m| grid.symbol(m).to_vec()).collect(),
        Mapping::Time => (0..grid.subcarriers).map(|l| grid.subcarrier(l)).collect(),
    }
}

/// One CP-OFDM symbol from the first `cells.len()` subcarriers.
pub fn modulate_symbol(fft: &Fft, cells: &[Complex64], n_cp: usize) -> Vec<Complex64> {
    let n = fft.len();
    let mut body = vec![Complex64::new(0.0, 0.0); n];
    body[..cells.len()].copy_from_slice(cells);
    fft.inverse(&mut body);
    let mut out = Vec::with_capacity(n + n_cp);
    out.extend_from_slice(&body[n - n_cp..]);
    out.extend_from_slice(&body);
    out
}

/// All `N` bins of one symbol body, scaled by `1/N`.
pub fn demodulate_body(fft: &Fft, body: &[Complex64]) -> Vec<Complex64> {
    let mut buf = body.to_vec();
    fft.forward(&mut buf);
    let scale = 1.0 / fft.len() as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

pub fn ofdm_modulate(grid: &ResourceGrid, config: &OfdmConfig) -> Result<Vec<Complex64>> {
    check_len(config.subcarriers, grid.subcarriers)?;
    check_len(config.symbols, grid.symbols)?;
    let num = config.numerology;
    let fft = Fft::new(num.n_idft);
    let mut out = Vec::with_capacity(config.stream_len());
    for m in 0..grid.symbols {
        out.extend(modulate_symbol(&fft, grid.symbol(m), num.n_cp));
    }
    Ok(out)
}

pub fn ofdm_demodulate(samples: &[Complex64], config: &OfdmConfig) -> Result<ResourceGrid> {
    check_len(config.stream_len(), samples.len())?;
    let num = config.numerology;
    let fft = Fft::new(num.n_idft);
    let mut grid = ResourceGrid::zeros(config.subcarriers, 0);
    for sym in samples.chunks(num.symbol_len()) {
        let bins = demodulate_body(&fft, &sym[num.n_cp..]);
        grid.push_symbol(&bins[..config.subcarriers])?;
    }
    Ok(grid)
}
