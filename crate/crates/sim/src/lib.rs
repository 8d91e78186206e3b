//! Experiment harness for the `jbmocz` crate: TOML configs, deterministic
//! parallel Monte-Carlo runs, CSV results and I/Q files.

pub mod config;
pub mod experiments;
pub mod iq;
pub mod metrics;
pub mod runner;

use std::path::{Path, PathBuf};

use anyhow::Result;

use config::{Experiment, ExperimentConfig};
use metrics::MetricRow;

/// I/Q path of a loopback run: configured, else beside `out`, else the
/// working directory.
pub fn loopback_iq_path(config: &ExperimentConfig) -> PathBuf {
    if let Experiment::Loopback(c) = &config.experiment {
        if let Some(p) = &c.iq_path {
            return p.clone();
        }
    }
    match &config.out {
        Some(out) => out.with_extension("iq"),
        None => Path::new("loopback.iq").to_path_buf(),
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Vec<MetricRow>> {
    config.validate()?;
    let seed = config.seed;
    use experiments::*;
    match &config.experiment {
        Experiment::BerSequence(c) => sequence::run_ber_sequence(c, seed),
        Experiment::RotationMse(c) => sequence::run_rotation_mse(c, seed),
        Experiment::BerOfdm(c) => ofdm::run_ber_ofdm(c, seed),
        Experiment::DesignCurves(c) => design::run_design_curves(c, seed),
        Experiment::PaprTable(c) => design::run_papr_table(c, seed),
        Experiment::StabilityReport(c) => design::run_stability_report(c, seed),
        Experiment::Loopback(c) => {
            Ok(loopback::run_loopback(c, seed, &loopback_iq_path(config))?.1)
        }
    }
}
