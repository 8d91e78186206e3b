//! TOML experiment descriptions.
//!
//! A file holds the shared keys `seed` and `out`, the `experiment` kind, and
//! that kind's parameters at the top level. Missing parameters take the
//! defaults of [`Experiment::default_for`].

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use jbmocz::channel::PowerDelayProfile;
use jbmocz::polar::DEFAULT_DESIGN_EBN0_DB;
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 0x6a62_6d6f_637a;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BerSequence,
    BerOfdm,
    RotationMse,
    DesignCurves,
    PaprTable,
    StabilityReport,
    Loopback,
}

impl ExperimentKind {
    pub fn id(self) -> &'static str {
        match self {
            Self::BerSequence => "ber_sequence",
            Self::BerOfdm => "ber_ofdm",
            Self::RotationMse => "rotation_mse",
            Self::DesignCurves => "design_curves",
            Self::PaprTable => "papr_table",
            Self::StabilityReport => "stability_report",
            Self::Loopback => "loopback",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(flatten)]
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Experiment {
    BerSequence(BerSequenceConfig),
    BerOfdm(BerOfdmConfig),
    RotationMse(RotationMseConfig),
    DesignCurves(DesignCurvesConfig),
    PaprTable(ConstellationTable),
    StabilityReport(StabilityReportConfig),
    Loopback(LoopbackConfig),
}

impl Experiment {
    pub fn default_for(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::BerSequence => Self::BerSequence(BerSequenceConfig::default()),
            ExperimentKind::BerOfdm => Self::BerOfdm(BerOfdmConfig::default()),
            ExperimentKind::RotationMse => Self::RotationMse(RotationMseConfig::default()),
            ExperimentKind::DesignCurves => Self::DesignCurves(DesignCurvesConfig::default()),
            ExperimentKind::PaprTable => Self::PaprTable(ConstellationTable::default()),
            ExperimentKind::StabilityReport => {
                Self::StabilityReport(StabilityReportConfig::default())
            }
            ExperimentKind::Loopback => Self::Loopback(LoopbackConfig::default()),
        }
    }

    pub fn kind(&self) -> ExperimentKind {
        match self {
            Self::BerSequence(_) => ExperimentKind::BerSequence,
            Self::BerOfdm(_) => ExperimentKind::BerOfdm,
            Self::RotationMse(_) => ExperimentKind::RotationMse,
            Self::DesignCurves(_) => ExperimentKind::DesignCurves,
            Self::PaprTable(_) => ExperimentKind::PaprTable,
            Self::StabilityReport(_) => ExperimentKind::StabilityReport,
            Self::Loopback(_) => ExperimentKind::Loopback,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            seed: DEFAULT_SEED,
            out: None,
            experiment,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).context("parsing experiment config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.experiment {
            Experiment::BerSequence(c) => c.validate(),
            Experiment::BerOfdm(c) => c.validate(),
            Experiment::RotationMse(c) => c.validate(),
            Experiment::DesignCurves(c) => c.validate(),
            Experiment::PaprTable(c) => c.validate(),
            Experiment::StabilityReport(c) => c.validate(),
            Experiment::Loopback(c) => c.validate(),
        }
    }
}

fn check_sweep(ebn0_db: &[f64], trials: usize) -> Result<()> {
    ensure!(trials > 0, "trial count must be positive");
    ensure!(!ebn0_db.is_empty(), "Eb/N0 sweep is empty");
    ensure!(
        ebn0_db.iter().all(|v| !v.is_nan()),
        "Eb/N0 sweep contains NaN"
    );
    Ok(())
}

fn check_zeta(zeta: f64) -> Result<()> {
    ensure!(zeta >= 1.0 && zeta.is_finite(), "zeta must be at least 1");
    Ok(())
}

fn sweep(from: i32, to: i32, step: i32) -> Vec<f64> {
    (from..=to).step_by(step as usize).map(f64::from).collect()
}

/// Sequence-level channel: `y = x + w` or `y = x * h + w` with a uniform PDP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceChannel {
    Awgn,
    Rayleigh { taps: usize },
}

impl SequenceChannel {
    pub fn taps(self) -> usize {
        match self {
            Self::Awgn => 1,
            Self::Rayleigh { taps } => taps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Coding {
    #[default]
    Uncoded,
    /// `(K, info_bits)` polar code with SC decoding of the PLLRs.
    Polar {
        info_bits: usize,
        #[serde(default = "default_design_ebn0")]
        design_ebn0_db: f64,
    },
}

fn default_design_ebn0() -> f64 {
    DEFAULT_DESIGN_EBN0_DB
}

fn default_zeta() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub label: String,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    /// Defaults to `√(1 + sin(π/K))` for Huffman and `R_*(K, ζ)` otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Uniform random zero rotation per codeword.
    #[serde(default)]
    pub rotation: bool,
    /// Estimate and undo the rotation with the template estimator.
    #[serde(default)]
    pub correct_rotation: bool,
    #[serde(default)]
    pub coding: Coding,
}

impl SchemeConfig {
    pub fn new(label: &str, zeta: f64) -> Self {
        Self {
            label: label.into(),
            zeta,
            radius: None,
            rotation: false,
            correct_rotation: false,
            coding: Coding::Uncoded,
        }
    }

    pub fn rotated(mut self, correct: bool) -> Self {
        self.rotation = true;
        self.correct_rotation = correct;
        self
    }

    pub fn polar(mut self, info_bits: usize) -> Self {
        self.coding = Coding::Polar {
            info_bits,
            design_ebn0_db: DEFAULT_DESIGN_EBN0_DB,
        };
        self
    }

    fn validate(&self, k: usize) -> Result<()> {
        check_zeta(self.zeta)?;
        if let Some(r) = self.radius {
            ensure!(r > 1.0, "scheme {}: radius must exceed 1", self.label);
        }
        if let Coding::Polar { info_bits, .. } = self.coding {
            ensure!(
                k.is_power_of_two(),
                "scheme {}: polar coding needs K a power of two",
                self.label
            );
            ensure!(
                info_bits > 0 && info_bits <= k,
                "scheme {}: polar info bits must lie in 1..=K",
                self.label
            );
        }
        ensure!(
            !self.correct_rotation || self.zeta > 1.0,
            "scheme {}: rotation estimation needs zeta > 1",
            self.label
        );
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerSequenceConfig {
    pub k: usize,
    pub channel: SequenceChannel,
    pub ebn0_db: Vec<f64>,
    /// Codewords per sweep point and scheme.
    pub trials: usize,
    /// Bins of the rotation estimator.
    pub template_bins: usize,
    pub schemes: Vec<SchemeConfig>,
}

impl Default for BerSequenceConfig {
    fn default() -> Self {
        Self {
            k: 64,
            channel: SequenceChannel::Rayleigh { taps: 5 },
            ebn0_db: sweep(0, 24, 2),
            trials: 20_000,
            template_bins: 1024,
            schemes: vec![
                SchemeConfig::new("huffman", 1.0),
                SchemeConfig::new("jbmocz", 1.072),
                SchemeConfig::new("huffman-rotation", 1.0).rotated(false),
                SchemeConfig::new("jbmocz-rotation", 1.072).rotated(true),
            ],
        }
    }
}

impl BerSequenceConfig {
    fn validate(&self) -> Result<()> {
        check_sweep(&self.ebn0_db, self.trials)?;
        ensure!(self.k >= 1, "K must be positive");
        ensure!(self.channel.taps() >= 1, "channel needs at least one tap");
        ensure!(
            self.template_bins >= 2 * self.k,
            "template needs at least 2K bins"
        );
        ensure!(!self.schemes.is_empty(), "no schemes configured");
        self.schemes.iter().try_for_each(|s| s.validate(self.k))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RotationMseConfig {
    pub k: usize,
    pub zeta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub channel: SequenceChannel,
    /// Estimator sizes `N`; one series each.
    pub bins: Vec<usize>,
    /// `inf` denotes a noiseless point.
    pub ebn0_db: Vec<f64>,
    pub trials: usize,
}

impl Default for RotationMseConfig {
    fn default() -> Self {
        Self {
            k: 31,
            zeta: 1.15,
            radius: None,
            channel: SequenceChannel::Awgn,
            bins: vec![64, 1024],
            ebn0_db: sweep(0, 20, 2),
            trials: 10_000,
        }
    }
}

impl RotationMseConfig {
    fn validate(&self) -> Result<()> {
        check_sweep(&self.ebn0_db, self.trials)?;
        check_zeta(self.zeta)?;
        ensure!(self.zeta > 1.0, "rotation estimation needs zeta > 1");
        ensure!(!self.bins.is_empty(), "no estimator sizes");
        ensure!(
            self.bins.iter().all(|&n| n >= 2 * self.k),
            "estimator needs at least 2K bins"
        );
        Ok(())
    }
}

/// Power-delay profile of the sample-level channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileConfig {
    /// Unit gain, no fading.
    Static,
    /// One Rayleigh tap.
    Flat,
    /// Five-tap exponential preset standing in for an indoor channel.
    Selective,
    Uniform {
        taps: usize,
    },
    Exponential {
        taps: usize,
        decay: f64,
    },
}

impl ProfileConfig {
    /// `None` for the static channel.
    pub fn profile(self) -> Option<PowerDelayProfile> {
        match self {
            Self::Static => None,
            Self::Flat => Some(PowerDelayProfile::flat()),
            Self::Selective => Some(PowerDelayProfile::selective()),
            Self::Uniform { taps } => Some(PowerDelayProfile::Uniform { taps }),
            Self::Exponential { taps, decay } => {
                Some(PowerDelayProfile::Exponential { taps, decay })
            }
        }
    }
}

/// Receiver window offset after perfect synchronization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepBack {
    None,
    Fixed(usize),
    /// Uniform on `1..=max`.
    Random(usize),
}

impl StepBack {
    pub fn max(self) -> usize {
        match self {
            Self::None => 0,
            Self::Fixed(n) | Self::Random(n) => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OfdmScheme {
    /// Hybrid frequency-mapped packet with a JBMOCZ first symbol.
    Fm,
    /// `Fm` behind a time-mapped Huffman preamble used for blind equalization.
    FmChest,
    /// One Huffman polynomial per subcarrier across symbols.
    Tm,
}

impl OfdmScheme {
    pub fn id(self) -> &'static str {
        match self {
            Self::Fm => "fm",
            Self::FmChest => "fm_chest",
            Self::Tm => "tm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BerOfdmConfig {
    pub k: usize,
    pub info_bits_total: usize,
    /// Information bits per polynomial. Equal to `K` for an uncoded link,
    /// otherwise a `(K, block_bits)` polar code.
    pub block_bits: usize,
    pub n_idft: usize,
    pub n_cp: usize,
    pub sample_rate: f64,
    pub zeta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub huffman_radius: Option<f64>,
    pub chest_k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chest_radius: Option<f64>,
    pub profile: ProfileConfig,
    pub step_back: StepBack,
    pub schemes: Vec<OfdmScheme>,
    pub ebn0_db: Vec<f64>,
    /// Packets per sweep point and scheme.
    pub trials: usize,
}

impl Default for BerOfdmConfig {
    fn default() -> Self {
        Self {
            k: 32,
            info_bits_total: 512,
            block_bits: 16,
            n_idft: 256,
            n_cp: 8,
            sample_rate: 10e6,
            zeta: 1.15,
            timing_radius: None,
            huffman_radius: None,
            chest_k: 4,
            chest_radius: None,
            profile: ProfileConfig::Selective,
            step_back: StepBack::Random(6),
            schemes: vec![OfdmScheme::Fm, OfdmScheme::FmChest, OfdmScheme::Tm],
            ebn0_db: sweep(0, 30, 3),
            trials: 200,
        }
    }
}

impl BerOfdmConfig {
    pub fn blocks(&self) -> usize {
        self.info_bits_total.div_ceil(self.block_bits)
    }

    fn validate(&self) -> Result<()> {
        check_sweep(&self.ebn0_db, self.trials)?;
        check_zeta(self.zeta)?;
        ensure!(self.zeta > 1.0, "the timing symbol needs zeta > 1");
        ensure!(self.k >= 2, "K must be at least 2");
        ensure!(self.info_bits_total > 0, "no information bits");
        ensure!(
            self.block_bits > 0 && self.block_bits <= self.k,
            "block bits must lie in 1..=K"
        );
        if self.block_bits < self.k {
            ensure!(
                self.k.is_power_of_two(),
                "polar coding needs K a power of two"
            );
        }
        ensure!(
            self.n_idft % 2 == 0 && self.n_idft > 0,
            "transform size must be even"
        );
        ensure!(
            self.k + 1 <= self.n_idft && self.blocks() <= self.n_idft,
            "packet does not fit the transform"
        );
        ensure!(
            self.step_back.max() <= self.n_cp,
            "step-back must stay inside the cyclic prefix"
        );
        ensure!(self.chest_k >= 1, "chest preamble needs at least one zero");
        ensure!(!self.schemes.is_empty(), "no schemes configured");
        if let ProfileConfig::Uniform { taps } | ProfileConfig::Exponential { taps, .. } =
            self.profile
        {
            ensure!(taps >= 1, "channel needs at least one tap");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignCurvesConfig {
    pub k: Vec<usize>,
    pub zeta: Vec<f64>,
    /// Radius grid; the default grid for each `K` when empty.
    pub radius_grid: Vec<f64>,
    pub stability_bins: usize,
}

impl Default for DesignCurvesConfig {
    fn default() -> Self {
        Self {
            k: vec![16, 32, 64, 128],
            zeta: (0..=12).map(|i| 1.0 + 0.025 * f64::from(i)).collect(),
            radius_grid: Vec::new(),
            stability_bins: 1024,
        }
    }
}

impl DesignCurvesConfig {
    fn validate(&self) -> Result<()> {
        ensure!(
            !self.k.is_empty() && self.k.iter().all(|&k| k >= 2),
            "K list must be nonempty with K >= 2"
        );
        ensure!(!self.zeta.is_empty(), "zeta sweep is empty");
        self.zeta.iter().try_for_each(|&z| check_zeta(z))?;
        ensure!(
            self.radius_grid.iter().all(|&r| r > 1.0),
            "radii must exceed 1"
        );
        ensure!(
            self.stability_bins >= 2,
            "stability needs at least two bins"
        );
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationEntry {
    pub label: String,
    pub k: usize,
    /// Defaults to `√(1 + sin(π/K))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
}

impl ConstellationEntry {
    pub fn new(label: &str, k: usize, radius: Option<f64>, zeta: f64) -> Self {
        Self {
            label: label.into(),
            k,
            radius,
            zeta,
        }
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.k >= 1, "{}: K must be positive", self.label);
        check_zeta(self.zeta)?;
        if let Some(r) = self.radius {
            ensure!(r > 1.0, "{}: radius must exceed 1", self.label);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstellationTable {
    pub entries: Vec<ConstellationEntry>,
    /// Transform size of the measured time-domain symbol.
    pub n_idft: usize,
}

impl Default for ConstellationTable {
    fn default() -> Self {
        Self {
            entries: vec![
                ConstellationEntry::new("sync", 63, Some(1.025), 1.0),
                ConstellationEntry::new("payload", 127, None, 1.0),
                ConstellationEntry::new("timing", 127, Some(1.018), 1.03),
                ConstellationEntry::new("ofdm-timing", 32, Some(1.044), 1.15),
                ConstellationEntry::new("ofdm-huffman", 32, None, 1.0),
            ],
            n_idft: 4096,
        }
    }
}

impl ConstellationTable {
    fn validate(&self) -> Result<()> {
        ensure!(!self.entries.is_empty(), "no constellations listed");
        ensure!(
            self.entries.iter().all(|e| e.k < self.n_idft),
            "transform too small for K"
        );
        self.entries
            .iter()
            .try_for_each(ConstellationEntry::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityReportConfig {
    pub entries: Vec<ConstellationEntry>,
    pub stability_bins: usize,
    /// Codewords drawn for the mean when `K > 16`.
    pub samples: usize,
}

impl Default for StabilityReportConfig {
    fn default() -> Self {
        Self {
            entries: vec![
                ConstellationEntry::new("example1", 8, Some(1.176), 1.0),
                ConstellationEntry::new("example1-jutted", 8, Some(1.176), 1.15),
                ConstellationEntry::new("huffman64", 64, None, 1.0),
                ConstellationEntry::new("jbmocz64", 64, None, 1.072),
            ],
            stability_bins: 1024,
            samples: 10_000,
        }
    }
}

impl StabilityReportConfig {
    fn validate(&self) -> Result<()> {
        ensure!(!self.entries.is_empty(), "no constellations listed");
        ensure!(self.samples > 0, "sample count must be positive");
        ensure!(
            self.stability_bins >= 2,
            "stability needs at least two bins"
        );
        self.entries
            .iter()
            .try_for_each(ConstellationEntry::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoopbackConfig {
    pub k: usize,
    pub info_bits_total: usize,
    pub header_bits: usize,
    pub n_idft: usize,
    pub n_cp: usize,
    pub sample_rate: f64,
    pub timing_radius: f64,
    pub zeta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload_radius: Option<f64>,
    pub sync_radius: f64,
    /// Sample index at which the sync-symbol body starts.
    pub offset: usize,
    pub cfo_hz: f64,
    /// Per-sample SNR over the packet; omitted for a noiseless run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    pub lambda: f64,
    /// Samples the receiver steps back from the acquired symbol boundary.
    pub step_back: usize,
    /// Candidate sync offsets searched from the start of the capture;
    /// `offset + N` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_len: Option<usize>,
    pub packets: usize,
    /// Where the transmitted packet is written; next to the CSV by default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iq_path: Option<PathBuf>,
}

impl Default for LoopbackConfig {
    fn default() -> Self {
        Self {
            k: 127,
            info_bits_total: 424,
            header_bits: 63,
            n_idft: 512,
            n_cp: 8,
            sample_rate: 20e6,
            timing_radius: 1.018,
            zeta: 1.03,
            payload_radius: None,
            sync_radius: 1.025,
            offset: 100,
            cfo_hz: 0.0,
            snr_db: None,
            lambda: jbmocz::phy::sync::DEFAULT_LAMBDA,
            step_back: 6,
            search_len: None,
            packets: 1,
            iq_path: None,
        }
    }
}

impl LoopbackConfig {
    pub fn blocks(&self) -> usize {
        self.info_bits_total.div_ceil(self.k)
    }

    pub fn search_len(&self) -> usize {
        self.search_len.unwrap_or(self.offset + self.n_idft)
    }

    fn validate(&self) -> Result<()> {
        ensure!(self.packets > 0, "packet count must be positive");
        check_zeta(self.zeta)?;
        ensure!(self.zeta > 1.0, "the timing symbol needs zeta > 1");
        ensure!(
            self.header_bits == self.k / 2,
            "the sync symbol carries floor(K/2) header bits"
        );
        ensure!(self.info_bits_total > 0, "no information bits");
        ensure!(
            self.n_idft % 2 == 0 && self.k < self.n_idft,
            "transform must be even and hold K+1 subcarriers"
        );
        ensure!(
            self.offset >= self.n_cp,
            "offset must leave room for the cyclic prefix"
        );
        ensure!(
            self.lambda > 0.0 && self.lambda <= 1.0,
            "lambda must lie in (0, 1]"
        );
        if self.offset < self.n_cp + self.step_back {
            bail!("offset too small for the step-back");
        }
        Ok(())
    }
}
