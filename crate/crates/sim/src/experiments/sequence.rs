//! Sequence-level simulations: one codeword, one channel realization.

use std::f64::consts::PI;

use anyhow::Result;
use jbmocz::channel::{convolve_channel, draw_cir, CirRealization};
use jbmocz::dizet::{dizet_hard, pllr, ReceivedSequence};
use jbmocz::fft::Fft;
use jbmocz::polar::{polar_construct, polar_decode_sc, polar_encode, PolarSpec};
use jbmocz::rotation::{apply_rotation, correct_rotation, rotation_mse, RotationEstimator};
use jbmocz::zeros::{encode, make_template, ConstellationParams};
use jbmocz::Bit;
use rand::Rng;

use super::{noise_var, random_bits, resolve_params};
use crate::config::{BerSequenceConfig, Coding, RotationMseConfig, SchemeConfig, SequenceChannel};
use crate::metrics::MetricRow;
use crate::runner::{derive, run_batches, ErrorCounts};

fn draw_channel<R: Rng + ?Sized>(channel: SequenceChannel, rng: &mut R) -> Result<CirRealization> {
    Ok(match channel {
        SequenceChannel::Awgn => CirRealization::identity(),
        SequenceChannel::Rayleigh { taps } => draw_cir(taps, rng)?,
    })
}

/// Template estimator with its transform.
struct Estimator {
    fft: Fft,
    inner: RotationEstimator,
}

impl Estimator {
    fn new(params: &ConstellationParams, bins: usize) -> Result<Self> {
        Ok(Self {
            fft: Fft::new(bins),
            inner: RotationEstimator::new(&make_template(params, bins)?),
        })
    }

    fn phi_hat(&self, y: &[jbmocz::Complex64]) -> Result<f64> {
        let mags: Vec<f64> = self
            .fft
            .eval_on_circle(y)
            .iter()
            .map(|v| v.norm())
            .collect();
        Ok(self.inner.estimate(&mags)?.phi_hat)
    }
}

/// A scheme with its radius, code and estimator resolved.
pub struct Scheme {
    pub label: String,
    pub params: ConstellationParams,
    code: Option<PolarSpec>,
    rotation: bool,
    estimator: Option<Estimator>,
}

impl Scheme {
    pub fn new(cfg: &SchemeConfig, k: usize, bins: usize) -> Result<Self> {
        let params = resolve_params(k, cfg.radius, cfg.zeta)?;
        let code = match cfg.coding {
            Coding::Uncoded => None,
            Coding::Polar {
                info_bits,
                design_ebn0_db,
            } => Some(polar_construct(k, info_bits, design_ebn0_db)?),
        };
        let estimator = if cfg.correct_rotation {
            Some(Estimator::new(&params, bins)?)
        } else {
            None
        };
        Ok(Self {
            label: cfg.label.clone(),
            params,
            code,
            rotation: cfg.rotation,
            estimator,
        })
    }

    /// Information bits per codeword.
    pub fn info_bits(&self) -> usize {
        self.code.as_ref().map_or(self.params.k(), PolarSpec::k)
    }

    fn trial<R: Rng + ?Sized>(
        &self,
        channel: SequenceChannel,
        n0: f64,
        rng: &mut R,
    ) -> Result<ErrorCounts> {
        let k = self.params.k();
        let info = random_bits(rng, self.info_bits());
        let bits = match &self.code {
            Some(spec) => polar_encode(&info, spec)?,
            None => info.clone(),
        };
        let cw = encode(&bits, &self.params, (k + 1) as f64)?;
        let h = draw_channel(channel, rng)?;
        let mut y = convolve_channel(cw.coeffs(), &h, n0, rng)?
            .coeffs()
            .to_vec();
        if self.rotation {
            y = apply_rotation(&y, rng.random::<f64>() * 2.0 * PI);
        }
        if let Some(est) = &self.estimator {
            y = correct_rotation(&y, est.phi_hat(&y)?);
        }
        let y = ReceivedSequence::new(y, h.len())?;
        let decided: Vec<Bit> = match &self.code {
            Some(spec) => polar_decode_sc(&pllr(&y, &self.params)?.pllrs, spec)?,
            None => dizet_hard(&y, &self.params)?,
        };
        Ok(ErrorCounts::block(&info, &decided))
    }
}

pub fn run_ber_sequence(cfg: &BerSequenceConfig, seed: u64) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    for (si, sc) in cfg.schemes.iter().enumerate() {
        let scheme = Scheme::new(sc, cfg.k, cfg.template_bins)?;
        let id = format!("ber_sequence:{}", scheme.label);
        for (pi, &ebn0) in cfg.ebn0_db.iter().enumerate() {
            let n0 = noise_var(ebn0, scheme.info_bits(), (cfg.k + 1) as f64)?;
            let point_seed = derive(derive(seed, si as u64), pi as u64);
            let counts: ErrorCounts = run_batches(point_seed, cfg.trials, |rng, _, n| {
                (0..n)
                    .map(|_| scheme.trial(cfg.channel, n0, rng))
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

pub fn run_rotation_mse(cfg: &RotationMseConfig, seed: u64) -> Result<Vec<MetricRow>> {
    let params = resolve_params(cfg.k, cfg.radius, cfg.zeta)?;
    let k = cfg.k;
    let mut rows = Vec::new();
    for &bins in &cfg.bins {
        let est = Estimator::new(&params, bins)?;
        let id = format!("rotation_mse:N={bins}");
        for (pi, &ebn0) in cfg.ebn0_db.iter().enumerate() {
            let n0 = noise_var(ebn0, k, (k + 1) as f64)?;
            // Every estimator size sees the same codewords, noise and rotations.
            let point_seed = derive(seed, pi as u64);
            let pairs: Vec<Vec<(f64, f64)>> = run_batches(point_seed, cfg.trials, |rng, _, n| {
                (0..n)
                    .map(|_| {
                        let cw = encode(&random_bits(rng, k), &params, (k + 1) as f64)?;
                        let h = draw_channel(cfg.channel, rng)?;
                        let y = convolve_channel(cw.coeffs(), &h, n0, rng)?;
                        let phi = rng.random::<f64>() * 2.0 * PI;
                        let rotated = apply_rotation(y.coeffs(), phi);
                        Ok((phi, est.phi_hat(&rotated)?))
                    })
                    .collect()
            })?;
            let (truth, hats): (Vec<f64>, Vec<f64>) = pairs.into_iter().flatten().unzip();
            let mse = rotation_mse(&truth, &hats)?;
            rows.push(MetricRow::new(
                &id,
                ("ebn0_db", ebn0),
                "mse",
                mse,
                cfg.trials as u64,
                seed,
            ));
        }
    }
    Ok(rows)
}
