//! Software loopback of the hybrid packet through an I/Q file.

use std::path::Path;

use anyhow::{ensure, Result};
use jbmocz::channel::{apply_ofdm_channel, CirRealization, ImpairmentSpec};
use jbmocz::phy::ofdm::Numerology;
use jbmocz::phy::packet::{PacketBits, PacketLayout, RxOptions};
use jbmocz::phy::papr::{measured_papr, to_db};
use jbmocz::phy::sync::{correct_cfo, sync_search};
use jbmocz::zeros::ConstellationParams;
use jbmocz::{Bit, Complex64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{padded, random_bits, resolve_params};
use crate::config::LoopbackConfig;
use crate::iq::{read_iq, write_iq};
use crate::metrics::MetricRow;
use crate::runner::derive;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LoopbackReport {
    pub packets: usize,
    pub header_bit_errors: u64,
    pub payload_bit_errors: u64,
    /// Largest `|τ̂ - offset|` over packets.
    pub timing_error_max: usize,
    pub cfo_error_hz_max: f64,
    pub papr_db_sync: f64,
    pub papr_db_timing: f64,
    pub papr_db_payload: f64,
    /// Mean SNR estimated from the null subcarriers, when there is noise.
    pub snr_db_est: Option<f64>,
}

pub fn layout(cfg: &LoopbackConfig) -> Result<PacketLayout> {
    let num = Numerology::new(cfg.n_idft, cfg.n_cp, cfg.sample_rate)?;
    let timing = ConstellationParams::new(cfg.k, cfg.timing_radius, cfg.zeta)?;
    let payload = resolve_params(cfg.k, cfg.payload_radius, 1.0)?;
    let sync = ConstellationParams::huffman(cfg.header_bits, cfg.sync_radius)?;
    Ok(PacketLayout::new(num, timing, payload, Some(sync), None)?)
}

/// The stream sent for one packet: leading silence so that the sync-symbol
/// body starts at `offset`, the packet, and one symbol of trailing silence.
pub fn transmit_stream(
    layout: &PacketLayout,
    cfg: &LoopbackConfig,
    bits: &PacketBits,
) -> Result<Vec<Complex64>> {
    let num = layout.numerology();
    let mut out = vec![Complex64::new(0.0, 0.0); cfg.offset - num.n_cp];
    out.extend(layout.build(bits)?);
    out.extend(std::iter::repeat_n(
        Complex64::new(0.0, 0.0),
        num.symbol_len(),
    ));
    Ok(out)
}

fn random_packet(cfg: &LoopbackConfig, rng: &mut ChaCha8Rng) -> PacketBits {
    let info = padded(&random_bits(rng, cfg.info_bits_total), cfg.blocks() * cfg.k);
    PacketBits {
        header: random_bits(rng, cfg.header_bits),
        chest: Vec::new(),
        payload: info.chunks(cfg.k).map(<[Bit]>::to_vec).collect(),
    }
}

fn symbol_papr(stream: &[Complex64], layout: &PacketLayout, cfg: &LoopbackConfig, m: usize) -> f64 {
    let num = layout.numerology();
    let start = cfg.offset + m * num.symbol_len();
    to_db(measured_papr(&stream[start..start + num.n_idft]))
}

pub fn run_loopback(
    cfg: &LoopbackConfig,
    seed: u64,
    iq_path: &Path,
) -> Result<(LoopbackReport, Vec<MetricRow>)> {
    let layout = layout(cfg)?;
    let num = *layout.numerology();
    let packet_len = layout.packet_len(cfg.blocks());
    let mut report = LoopbackReport {
        packets: cfg.packets,
        ..Default::default()
    };
    let mut snr_sum = 0.0;
    for p in 0..cfg.packets {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, p as u64));
        let bits = random_packet(cfg, &mut rng);
        let tx = transmit_stream(&layout, cfg, &bits)?;
        if p == 0 {
            report.papr_db_sync = symbol_papr(&tx, &layout, cfg, 0);
            report.papr_db_timing = symbol_papr(&tx, &layout, cfg, 1);
            report.papr_db_payload = symbol_papr(&tx, &layout, cfg, 2);
        }
        write_iq(iq_path, &tx)?;
        let samples = read_iq(iq_path)?;
        ensure!(
            samples.len() == tx.len(),
            "I/Q file length changed on re-read"
        );

        let packet = &samples[cfg.offset - num.n_cp..cfg.offset - num.n_cp + packet_len];
        let power = packet.iter().map(|s| s.norm_sqr()).sum::<f64>() / packet_len as f64;
        let noise_var = cfg.snr_db.map_or(0.0, |snr| power / 10f64.powf(snr / 10.0));
        let spec = ImpairmentSpec {
            cfo_hz: cfg.cfo_hz,
            noise_var,
            ..Default::default()
        };
        let mut rx = apply_ofdm_channel(
            &samples,
            &CirRealization::identity(),
            &spec,
            num.sample_rate,
            &mut rng,
        )?;

        let region = (cfg.search_len() + num.n_idft).min(rx.len());
        let sync = sync_search(&rx[..region], &num, cfg.lambda)?;
        report.timing_error_max = report
            .timing_error_max
            .max(sync.tau_hat.abs_diff(cfg.offset));
        report.cfo_error_hz_max = report
            .cfo_error_hz_max
            .max((sync.cfo_hat - cfg.cfo_hz).abs());
        correct_cfo(&mut rx, sync.cfo_hat, num.sample_rate);
        let start = sync.tau_hat.saturating_sub(num.n_cp + cfg.step_back);
        ensure!(
            rx.len() >= start + packet_len,
            "acquired packet runs past the capture"
        );
        let out = layout.receive(
            &rx[start..],
            cfg.blocks(),
            RxOptions {
                equalize: false,
                correct_timing: true,
            },
        )?;

        let header = out.header.as_deref().unwrap_or_default();
        report.header_bit_errors += errors(&bits.header, header);
        let sent: Vec<Bit> = bits.payload.concat();
        let got: Vec<Bit> = out.payload_bits().concat();
        report.payload_bit_errors +=
            errors(&sent[..cfg.info_bits_total], &got[..cfg.info_bits_total]);
        if noise_var > 0.0 {
            let window = &rx[start..start + packet_len];
            let total = window.iter().map(|s| s.norm_sqr()).sum::<f64>() / packet_len as f64;
            let noise = out.noise_var * num.n_idft as f64;
            snr_sum += to_db((total - noise) / noise);
        }
    }
    if cfg.snr_db.is_some() {
        report.snr_db_est = Some(snr_sum / cfg.packets as f64);
    }
    let rows = report_rows(&report, cfg, seed);
    Ok((report, rows))
}

fn errors(a: &[Bit], b: &[Bit]) -> u64 {
    let missing = a.len().abs_diff(b.len());
    (a.iter().zip(b).filter(|(x, y)| x != y).count() + missing) as u64
}

fn report_rows(r: &LoopbackReport, cfg: &LoopbackConfig, seed: u64) -> Vec<MetricRow> {
    let at = ("snr_db", cfg.snr_db.unwrap_or(f64::INFINITY));
    let t = r.packets as u64;
    let payload_bits = (cfg.info_bits_total * r.packets) as f64;
    let mut rows = vec![
        MetricRow::new(
            "loopback",
            at,
            "header_bit_errors",
            r.header_bit_errors as f64,
            t,
            seed,
        ),
        MetricRow::new(
            "loopback",
            at,
            "payload_bit_errors",
            r.payload_bit_errors as f64,
            t,
            seed,
        ),
        MetricRow::new(
            "loopback",
            at,
            "ber",
            r.payload_bit_errors as f64 / payload_bits,
            t,
            seed,
        ),
        MetricRow::new(
            "loopback",
            at,
            "timing_error_max",
            r.timing_error_max as f64,
            t,
            seed,
        ),
        MetricRow::new(
            "loopback",
            at,
            "cfo_error_hz_max",
            r.cfo_error_hz_max,
            t,
            seed,
        ),
        MetricRow::new("loopback", at, "papr_db_sync", r.papr_db_sync, t, seed),
        MetricRow::new("loopback", at, "papr_db_timing", r.papr_db_timing, t, seed),
        MetricRow::new(
            "loopback",
            at,
            "papr_db_payload",
            r.papr_db_payload,
            t,
            seed,
        ),
    ];
    if let Some(s) = r.snr_db_est {
        rows.push(MetricRow::new("loopback", at, "snr_db_est", s, t, seed));
    }
    rows
}
