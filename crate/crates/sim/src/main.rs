use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use jbmocz_sim::config::{Experiment, ExperimentConfig, ExperimentKind};
use jbmocz_sim::metrics::write_csv;

#[derive(Parser)]
#[command(
    name = "jbmocz",
    version,
    about = "JBMOCZ and Huffman BMOCZ experiments, written as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence-level BER and BLER.
    BerSeq(Common),
    /// OFDM packet BER and BLER for FM, FM+CHEST and TM.
    BerOfdm(Common),
    /// Rotation-estimator MSE.
    RotationMse(Common),
    /// Optimized radius, minimum stability and template PAPR over ζ.
    DesignCurves(Common),
    /// FM PAPR of listed constellations.
    PaprTable(Common),
    /// Mean and minimum codebook stability.
    Stability(Common),
    /// Hybrid packet through an I/Q file and the full receiver.
    Loopback(Common),
    /// Print the default config of an experiment as TOML.
    DefaultConfig {
        /// Subcommand name or experiment id, e.g. `ber-seq` or `ber_sequence`.
        kind: String,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path, overriding the config; stdout when unset.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    threads: Option<usize>,
}

fn kind_from_name(name: &str) -> Result<ExperimentKind> {
    let id = match name {
        "ber-seq" => "ber_sequence",
        "stability" => "stability_report",
        other => other,
    };
    let value = toml::Value::String(id.replace('-', "_"));
    value
        .try_into()
        .with_context(|| format!("unknown experiment `{name}`"))
}

fn run(kind: ExperimentKind, args: Common) -> Result<()> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(Experiment::default_for(kind)),
    };
    if config.experiment.kind() != kind {
        bail!(
            "config describes `{}` but the command runs `{}`",
            config.experiment.kind().id(),
            kind.id()
        );
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.out.is_some() {
        config.out = args.out;
    }
    let rows = jbmocz_sim::run(&config)?;
    match &config.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_csv(&rows, BufWriter::new(f))
        }
        None => write_csv(&rows, io::stdout().lock()),
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::BerSeq(a) => (ExperimentKind::BerSequence, a),
        Command::BerOfdm(a) => (ExperimentKind::BerOfdm, a),
        Command::RotationMse(a) => (ExperimentKind::RotationMse, a),
        Command::DesignCurves(a) => (ExperimentKind::DesignCurves, a),
        Command::PaprTable(a) => (ExperimentKind::PaprTable, a),
        Command::Stability(a) => (ExperimentKind::StabilityReport, a),
        Command::Loopback(a) => (ExperimentKind::Loopback, a),
        Command::DefaultConfig { kind } => {
            let config = ExperimentConfig::new(Experiment::default_for(kind_from_name(&kind)?));
            print!("{}", config.to_toml()?);
            return Ok(());
        }
    };
    run(kind, args)
}
