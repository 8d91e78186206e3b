//! Hybrid OFDM-BMOCZ packet.
//!
//! Symbol order: an optional Huffman sync symbol with half-symbol repetition,
//! an optional time-mapped Huffman preamble for blind channel estimation, then
//! `P` frequency-mapped payload symbols. The first payload symbol uses JBMOCZ
//! so the receiver can estimate the residual timing offset; the rest use
//! Huffman BMOCZ. Every symbol carries the same energy per active subcarrier.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dizet::{pllr, ReceivedSequence, SoftOutput};
use crate::error::check_len;
use crate::fft::Fft;
use crate::phy::chest::{blind_chest, equalize, estimate_noise_var, ChannelEstimate};
use crate::phy::ofdm::{demodulate_body, map_tm, modulate_symbol, Numerology, ResourceGrid};
use crate::phy::sync::{build_sync_symbol, decode_sync_symbol};
use crate::rotation::{correct_rotation, RotationEstimate, RotationEstimator};
use crate::zeros::{encode, make_template, ConstellationParams};
use crate::{Bit, Error, Result};

#[derive(Debug, Clone)]
pub struct PacketLayout {
    numerology: Numerology,
    timing: ConstellationParams,
    payload: ConstellationParams,
    sync: Option<ConstellationParams>,
    chest: Option<ConstellationParams>,
    estimator: RotationEstimator,
    fft: Fft,
}

/// Bits carried by one packet. `chest` holds one block of `K_tm` bits per
/// active subcarrier; `payload` one block of `K` bits per payload symbol.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PacketBits {
    pub header: Vec<Bit>,
    pub chest: Vec<Vec<Bit>>,
    pub payload: Vec<Vec<Bit>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RxOptions {
    /// Equalize the payload with the blind channel estimate.
    pub equalize: bool,
    /// Estimate and undo the residual timing offset on the JBMOCZ symbol.
    pub correct_timing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacketRx {
    pub header: Option<Vec<Bit>>,
    pub payload: Vec<SoftOutput>,
    pub rotation: Option<RotationEstimate>,
    pub channel: Option<ChannelEstimate>,
    pub noise_var: f64,
}

impl PacketRx {
    pub fn payload_bits(&self) -> Vec<Vec<Bit>> {
        self.payload
            .iter()
            .map(SoftOutput::hard_decisions)
            .collect()
    }
}

impl PacketLayout {
    pub fn new(
        numerology: Numerology,
        timing: ConstellationParams,
        payload: ConstellationParams,
        sync: Option<ConstellationParams>,
        chest: Option<ConstellationParams>,
    ) -> Result<Self> {
        let k = timing.k();
        check_len(k, payload.k())?;
        if k + 1 > numerology.n_idft {
            return Err(Error::InvalidArgument("payload does not fit the transform"));
        }
        if !payload.is_huffman() {
            return Err(Error::InvalidArgument("payload symbols use Huffman BMOCZ"));
        }
        if let Some(s) = &sync {
            check_len(k / 2, s.k())?;
        }
        if let Some(c) = &chest {
            if !c.is_huffman() {
                return Err(Error::InvalidArgument(
                    "channel-estimation preamble uses Huffman BMOCZ",
                ));
            }
        }
        let estimator = RotationEstimator::new(&make_template(&timing, numerology.n_idft)?);
        let fft = Fft::new(numerology.n_idft);
        Ok(Self {
            numerology,
            timing,
            payload,
            sync,
            chest,
            estimator,
            fft,
        })
    }

    pub fn numerology(&self) -> &Numerology {
        &self.numerology
    }

    pub fn timing(&self) -> &ConstellationParams {
        &self.timing
    }

    pub fn payload(&self) -> &ConstellationParams {
        &self.payload
    }

    pub fn sync(&self) -> Option<&ConstellationParams> {
        self.sync.as_ref()
    }

    pub fn chest(&self) -> Option<&ConstellationParams> {
        self.chest.as_ref()
    }

    pub fn k(&self) -> usize {
        self.timing.k()
    }

    /// `S = K + 1`.
    pub fn subcarriers(&self) -> usize {
        self.k() + 1
    }

    fn chest_symbols(&self) -> usize {
        self.chest.map_or(0, |c| c.k() + 1)
    }

    /// Symbols before the first payload symbol.
    pub fn preamble_symbols(&self) -> usize {
        usize::from(self.sync.is_some()) + self.chest_symbols()
    }

    pub fn packet_len(&self, payload_symbols: usize) -> usize {
        (self.preamble_symbols() + payload_symbols) * self.numerology.symbol_len()
    }

    /// Sample index of the first payload symbol's CP.
    pub fn payload_start(&self) -> usize {
        self.preamble_symbols() * self.numerology.symbol_len()
    }

    /// Energy of every codeword that fills `S` subcarriers.
    fn symbol_energy(&self) -> f64 {
        self.subcarriers() as f64
    }

    pub fn build(&self, bits: &PacketBits) -> Result<Vec<Complex64>> {
        if bits.payload.is_empty() {
            return Err(Error::InvalidArgument(
                "packet needs at least one payload block",
            ));
        }
        let s = self.subcarriers();
        let n_cp = self.numerology.n_cp;
        let mut out = Vec::with_capacity(self.packet_len(bits.payload.len()));
        if let Some(p) = &self.sync {
            let col = build_sync_symbol(&bits.header, p, s, self.symbol_energy())?;
            out.extend(modulate_symbol(&self.fft, &col, n_cp));
        }
        if let Some(p) = &self.chest {
            check_len(s, bits.chest.len())?;
            let energy = (p.k() + 1) as f64;
            let cws = bits
                .chest
                .iter()
                .map(|b| Ok(encode(b, p, energy)?.into_coeffs()))
                .collect::<Result<Vec<_>>>()?;
            let grid = map_tm(&cws)?;
            for m in 0..grid.symbols() {
                out.extend(modulate_symbol(&self.fft, grid.symbol(m), n_cp));
            }
        }
        for (i, b) in bits.payload.iter().enumerate() {
            let params = if i == 0 { &self.timing } else { &self.payload };
            let cw = encode(b, params, self.symbol_energy())?;
            out.extend(modulate_symbol(&self.fft, cw.coeffs(), n_cp));
        }
        Ok(out)
    }

    /// Runs the receive chain on `samples`, whose first sample is taken as the
    /// start of the packet. Symbol windows follow the nominal grid, so a
    /// residual timing offset shows up as zero rotation.
    pub fn receive(
        &self,
        samples: &[Complex64],
        payload_symbols: usize,
        opts: RxOptions,
    ) -> Result<PacketRx> {
        let needed = self.packet_len(payload_symbols);
        if samples.len() < needed {
            return Err(Error::LengthMismatch {
                expected: needed,
                found: samples.len(),
            });
        }
        let num = self.numerology;
        let (n, s) = (num.n_idft, self.subcarriers());
        let body = |m: usize| {
            let start = m * num.symbol_len() + num.n_cp;
            &samples[start..start + n]
        };
        let bins: Vec<Vec<Complex64>> = (0..self.preamble_symbols() + payload_symbols)
            .map(|m| demodulate_body(&self.fft, body(m)))
            .collect();

        let mut null = Vec::new();
        let mut next = 0;
        if self.sync.is_some() {
            null.extend(bins[0].iter().skip(1).step_by(2));
            next = 1;
        }
        let mut channel = None;
        let mut noise_var = 0.0;
        if let Some(p) = &self.chest {
            let syms = &bins[next..next + self.chest_symbols()];
            if self.sync.is_none() {
                for b in syms {
                    null.extend_from_slice(&b[s..]);
                }
            }
            if !null.is_empty() {
                noise_var = estimate_noise_var(&null)?;
            }
            let mut grid = ResourceGrid::zeros(s, 0);
            for b in syms {
                grid.push_symbol(&b[..s])?;
            }
            channel = Some(blind_chest(&grid, p, noise_var)?);
            next += self.chest_symbols();
        } else if !null.is_empty() {
            noise_var = estimate_noise_var(&null)?;
        }

        let mut payload = ResourceGrid::zeros(s, 0);
        for b in &bins[next..next + payload_symbols] {
            payload.push_symbol(&b[..s])?;
        }
        let mut equalized = false;
        if opts.equalize {
            let est = channel.as_ref().ok_or(Error::InvalidArgument(
                "equalization needs the chest preamble",
            ))?;
            equalize(&mut payload, est)?;
            equalized = true;
        }

        let mut rotation = None;
        let mut polys: Vec<Vec<Complex64>> = (0..payload_symbols)
            .map(|m| payload.symbol(m).to_vec())
            .collect();
        if opts.correct_timing && payload_symbols > 0 {
            let mags: Vec<f64> = if equalized {
                self.fft
                    .eval_on_circle(&polys[0])
                    .iter()
                    .map(|v| v.norm())
                    .collect()
            } else {
                body(next).iter().map(|v| v.norm()).collect()
            };
            let est = self.estimator.estimate(&mags)?;
            for p in &mut polys {
                *p = correct_rotation(p, est.phi_hat);
            }
            rotation = Some(est);
        }

        let header = match &self.sync {
            Some(p) => {
                let cells = &bins[0][..s];
                let cells = match &rotation {
                    Some(est) => correct_rotation(cells, est.phi_hat),
                    None => cells.to_vec(),
                };
                Some(decode_sync_symbol(&cells, p)?)
            }
            None => None,
        };

        let payload = polys
            .into_iter()
            .enumerate()
            .map(|(i, y)| {
                let params = if i == 0 { &self.timing } else { &self.payload };
                pllr(&ReceivedSequence::new(y, 1)?, params)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PacketRx {
            header,
            payload,
            rotation,
            channel,
            noise_var,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn layout(with_chest: bool) -> PacketLayout {
        let num = Numerology::new(64, 4, 1e6).unwrap();
        let timing = ConstellationParams::new(16, 1.093, 1.15).unwrap();
        let payload = ConstellationParams::huffman(16, 1.09).unwrap();
        let sync = ConstellationParams::huffman(8, 1.2).unwrap();
        let chest = with_chest.then(|| ConstellationParams::huffman(4, 1.307).unwrap());
        PacketLayout::new(num, timing, payload, Some(sync), chest).unwrap()
    }

    fn bits(k: usize, seed: usize) -> Vec<Bit> {
        (0..k)
            .map(|i| ((i * 7 + seed * 3) % 5 % 2) as Bit)
            .collect()
    }

    fn packet(l: &PacketLayout) -> PacketBits {
        PacketBits {
            header: bits(8, 1),
            chest: if l.chest().is_some() {
                (0..17).map(|i| bits(4, i)).collect()
            } else {
                Vec::new()
            },
            payload: (0..3).map(|i| bits(16, i + 2)).collect(),
        }
    }

    #[test]
    fn noiseless_round_trip() {
        for chest in [false, true] {
            let l = layout(chest);
            let tx = packet(&l);
            let s = l.build(&tx).unwrap();
            assert_eq!(s.len(), l.packet_len(3));
            let opts = RxOptions {
                equalize: chest,
                correct_timing: true,
            };
            let rx = l.receive(&s, 3, opts).unwrap();
            assert_eq!(rx.header.as_ref().unwrap(), &tx.header);
            assert_eq!(rx.payload_bits(), tx.payload);
            assert_eq!(rx.rotation.unwrap().bin, 0);
        }
    }

    #[test]
    fn early_window_is_corrected() {
        let l = layout(false);
        let tx = packet(&l);
        let s = l.build(&tx).unwrap();
        // Start the receiver 3 samples into the CP of the payload: prepend a
        // dummy lead so the sync and payload windows shift by 3.
        let mut shifted = vec![Complex64::new(0.0, 0.0); 3];
        shifted.extend_from_slice(&s);
        let rx = l.receive(
            &shifted[..s.len()],
            3,
            RxOptions {
                equalize: false,
                correct_timing: true,
            },
        );
        let rx = rx.unwrap();
        assert_eq!(rx.rotation.unwrap().bin, 3);
        assert_eq!(rx.payload_bits(), tx.payload);
        assert_eq!(rx.header.unwrap(), tx.header);
    }

    #[test]
    fn equalize_without_preamble_is_refused() {
        let l = layout(false);
        let s = l.build(&packet(&l)).unwrap();
        assert!(l
            .receive(
                &s,
                3,
                RxOptions {
                    equalize: true,
                    correct_timing: false
                }
            )
            .is_err());
        assert!(l.receive(&s[1..], 3, RxOptions::default()).is_err());
    }
}
