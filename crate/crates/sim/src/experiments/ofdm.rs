//! Sample-level OFDM link simulations of the FM, FM+CHEST and TM schemes.
//!
//! `E_b/N_0` counts the energy of every transmitted subcarrier cell,
//! preamble included, per information bit; cyclic prefixes are not counted.

use anyhow::Result;
use jbmocz::channel::{apply_ofdm_channel, CirRealization, ImpairmentSpec};
use jbmocz::dizet::{pllr, ReceivedSequence, SoftOutput};
use jbmocz::phy::ofdm::{
    demap, map_tm, ofdm_demodulate, ofdm_modulate, Mapping, Numerology, OfdmConfig,
};
use jbmocz::phy::packet::{PacketBits, PacketLayout, RxOptions};
use jbmocz::polar::{
    polar_construct, polar_decode_sc, polar_encode, PolarSpec, DEFAULT_DESIGN_EBN0_DB,
};
use jbmocz::zeros::{encode, ConstellationParams};
use jbmocz::{Bit, Complex64};
use rand::Rng;

use super::{noise_var, padded, random_bits, resolve_params};
use crate::config::{BerOfdmConfig, OfdmScheme, StepBack};
use crate::metrics::MetricRow;
use crate::runner::{batch_rng, derive, run_batches, ErrorCounts};

/// Silent samples ahead of the packet, so the receiver can step back.
const GUARD: usize = 16;
const STEP_BACK_STREAM: u64 = 0x5374_6570;

/// One scheme's transmitter and receiver.
pub struct OfdmLink {
    pub scheme: OfdmScheme,
    cfg: BerOfdmConfig,
    num: Numerology,
    huffman: ConstellationParams,
    code: Option<PolarSpec>,
    layout: Option<PacketLayout>,
    tm: OfdmConfig,
}

impl OfdmLink {
    pub fn new(cfg: &BerOfdmConfig, scheme: OfdmScheme) -> Result<Self> {
        let k = cfg.k;
        let num = Numerology::new(cfg.n_idft, cfg.n_cp, cfg.sample_rate)?;
        let huffman = resolve_params(k, cfg.huffman_radius, 1.0)?;
        let code = if cfg.block_bits < k {
            Some(polar_construct(k, cfg.block_bits, DEFAULT_DESIGN_EBN0_DB)?)
        } else {
            None
        };
        let layout = match scheme {
            OfdmScheme::Tm => None,
            OfdmScheme::Fm | OfdmScheme::FmChest => {
                let timing = resolve_params(k, cfg.timing_radius, cfg.zeta)?;
                let chest = if scheme == OfdmScheme::FmChest {
                    Some(resolve_params(cfg.chest_k, cfg.chest_radius, 1.0)?)
                } else {
                    None
                };
                Some(PacketLayout::new(num, timing, huffman, None, chest)?)
            }
        };
        let tm = OfdmConfig::new(num, cfg.blocks(), k + 1, Mapping::Time)?;
        Ok(Self {
            scheme,
            cfg: cfg.clone(),
            num,
            huffman,
            code,
            layout,
            tm,
        })
    }

    /// Energy of all transmitted cells.
    pub fn packet_energy(&self) -> f64 {
        let payload = (self.cfg.blocks() * (self.cfg.k + 1)) as f64;
        match self.layout.as_ref().and_then(PacketLayout::chest) {
            Some(c) => payload + ((self.cfg.k + 1) * (c.k() + 1)) as f64,
            None => payload,
        }
    }

    fn encode_block(&self, info: &[Bit]) -> Result<Vec<Bit>> {
        Ok(match &self.code {
            Some(spec) => polar_encode(info, spec)?,
            None => info.to_vec(),
        })
    }

    fn decode_block(&self, soft: &SoftOutput) -> Result<Vec<Bit>> {
        Ok(match &self.code {
            Some(spec) => polar_decode_sc(&soft.pllrs, spec)?,
            None => soft.hard_decisions(),
        })
    }

    fn transmit<R: Rng + ?Sized>(
        &self,
        blocks: &[Vec<Bit>],
        rng: &mut R,
    ) -> Result<Vec<Complex64>> {
        let coded = blocks
            .iter()
            .map(|b| self.encode_block(b))
            .collect::<Result<Vec<_>>>()?;
        match &self.layout {
            Some(layout) => {
                let chest = match layout.chest() {
                    Some(c) => (0..layout.subcarriers())
                        .map(|_| random_bits(rng, c.k()))
                        .collect(),
                    None => Vec::new(),
                };
                Ok(layout.build(&PacketBits {
                    header: Vec::new(),
                    chest,
                    payload: coded,
                })?)
            }
            None => {
                let energy = (self.cfg.k + 1) as f64;
                let cws = coded
                    .iter()
                    .map(|b| Ok(encode(b, &self.huffman, energy)?.into_coeffs()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ofdm_modulate(&map_tm(&cws)?, &self.tm)?)
            }
        }
    }

    /// Soft outputs of every payload polynomial; `samples` starts at the
    /// receiver's window for the first symbol.
    fn receive(&self, samples: &[Complex64]) -> Result<Vec<SoftOutput>> {
        match &self.layout {
            Some(layout) => {
                let equalize = layout.chest().is_some();
                let opts = RxOptions {
                    equalize,
                    correct_timing: true,
                };
                Ok(layout.receive(samples, self.cfg.blocks(), opts)?.payload)
            }
            None => {
                let grid = ofdm_demodulate(&samples[..self.tm.stream_len()], &self.tm)?;
                demap(&grid, Mapping::Time)
                    .into_iter()
                    .map(|y| Ok(pllr(&ReceivedSequence::new(y, 1)?, &self.huffman)?))
                    .collect()
            }
        }
    }

    /// One packet at per-cell noise variance `n0`, received `step_back`
    /// samples early.
    pub fn packet<R: Rng + ?Sized>(
        &self,
        n0: f64,
        step_back: usize,
        rng: &mut R,
    ) -> Result<ErrorCounts> {
        let b = self.cfg.block_bits;
        let total = self.cfg.info_bits_total;
        let blocks: Vec<Vec<Bit>> = (0..self.cfg.blocks())
            .map(|i| padded(&random_bits(rng, b.min(total - i * b)), b))
            .collect();
        let mut stream = vec![Complex64::new(0.0, 0.0); GUARD];
        stream.extend(self.transmit(&blocks, rng)?);
        let cir = match self.cfg.profile.profile() {
            Some(p) => p.draw(rng)?,
            None => CirRealization::identity(),
        };
        let spec = ImpairmentSpec {
            noise_var: n0 * self.num.n_idft as f64,
            ..Default::default()
        };
        let rx = apply_ofdm_channel(&stream, &cir, &spec, self.num.sample_rate, rng)?;
        let soft = self.receive(&rx[GUARD - step_back..])?;
        let mut counts = ErrorCounts::default();
        for (i, (sent, s)) in blocks.iter().zip(&soft).enumerate() {
            let real = b.min(total - i * b);
            counts += ErrorCounts::block(&sent[..real], &self.decode_block(s)?[..real]);
        }
        Ok(counts)
    }
}

fn draw_step_back<R: Rng + ?Sized>(step: StepBack, rng: &mut R) -> usize {
    match step {
        StepBack::None => 0,
        StepBack::Fixed(n) => n,
        StepBack::Random(max) => rng.random_range(1..=max),
    }
}

pub fn run_ber_ofdm(cfg: &BerOfdmConfig, seed: u64) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    for &scheme in &cfg.schemes {
        let link = OfdmLink::new(cfg, scheme)?;
        let id = format!("ber_ofdm:{}", scheme.id());
        let energy = link.packet_energy();
        for (pi, &ebn0) in cfg.ebn0_db.iter().enumerate() {
            let n0 = noise_var(ebn0, cfg.info_bits_total, energy)?;
            // Every scheme sees the same stream of draws at a sweep point.
            let point_seed = derive(seed, pi as u64);
            let counts: ErrorCounts = run_batches(point_seed, cfg.trials, |rng, batch, n| {
                let mut steps = batch_rng(derive(point_seed, STEP_BACK_STREAM), batch);
                (0..n)
                    .map(|_| link.packet(n0, draw_step_back(cfg.step_back, &mut steps), rng))
                    .sum::<Result<ErrorCounts>>()
            })?
            .into_iter()
            .sum();
            let t = cfg.trials as u64;
            rows.push(MetricRow::new(
                &id,
                ("ebn0_db", ebn0),
                "ber",
                counts.ber(),
                t,
                seed,
            ));
            rows.push(MetricRow::new(
                &id,
                ("ebn0_db", ebn0),
                "bler",
                counts.bler(),
                t,
                seed,
            ));
        }
    }
    Ok(rows)
}
