use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jbmocz_sim::config::{Experiment, ExperimentConfig, ExperimentKind};
use jbmocz_sim::metrics::{lookup, read_csv, MetricRow};

const SUBCOMMANDS: [&str; 7] = [
    "ber-seq",
    "ber-ofdm",
    "rotation-mse",
    "design-curves",
    "papr-table",
    "stability",
    "loopback",
];

fn jbmocz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jbmocz"))
        .args(args)
        .env("RUST_BACKTRACE", "0")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = jbmocz(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL_SEQ: &str = r#"
experiment = "ber_sequence"
k = 16
channel = "awgn"
ebn0_db = [4.0, 8.0]
trials = 300
template_bins = 256

[[schemes]]
label = "huffman"
zeta = 1.0

[[schemes]]
label = "jbmocz-rotation"
zeta = 1.15
rotation = true
correct_rotation = true
"#;

#[test]
fn default_configs_parse_back() {
    for name in SUBCOMMANDS {
        let text = String::from_utf8(ok(&["default-config", name])).unwrap();
        let config = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(config.to_toml().unwrap(), text, "{name}");
    }
    let by_id = ok(&["default-config", "ber_sequence"]);
    assert_eq!(by_id, ok(&["default-config", "ber-seq"]));
    assert!(!jbmocz(&["default-config", "nonsense"]).status.success());
}

#[test]
fn every_kind_has_a_valid_default() {
    for kind in [
        ExperimentKind::BerSequence,
        ExperimentKind::BerOfdm,
        ExperimentKind::RotationMse,
        ExperimentKind::DesignCurves,
        ExperimentKind::PaprTable,
        ExperimentKind::StabilityReport,
        ExperimentKind::Loopback,
    ] {
        let config = ExperimentConfig::new(Experiment::default_for(kind));
        config.validate().unwrap();
        assert_eq!(config.experiment.kind(), kind);
    }
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "seq.toml", SMALL_SEQ);
    let a = ok(&["ber-seq", "--config", &cfg]);
    let b = ok(&["ber-seq", "--config", &cfg, "--threads", "1"]);
    assert_eq!(a, b);
    let c = ok(&["ber-seq", "--config", &cfg, "--seed", "7"]);
    assert_ne!(a, c);

    let rows = read_csv(a.as_slice()).unwrap();
    assert_eq!(rows.len() % 2, 0);
    assert!(rows.iter().all(|r| r.experiment.starts_with("ber_sequence:")));
    let header = String::from_utf8(a).unwrap();
    assert!(header.starts_with("experiment,param_name,param_value,metric,value,trials,seed\n"));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "seq.toml", SMALL_SEQ);
    let out = dir.path().join("ber.csv");
    let stdout = ok(&["ber-seq", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(stdout.is_empty());
    let rows: Vec<MetricRow> = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.value >= 0.0 && r.value <= 1.0));
}

#[test]
fn noiseless_sequence_run_is_error_free() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_SEQ.replace("ebn0_db = [4.0, 8.0]", "ebn0_db = [inf]");
    let cfg = write(dir.path(), "seq.toml", &text);
    let csv = ok(&["ber-seq", "--config", &cfg]);
    let rows = read_csv(csv.as_slice()).unwrap();
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(r.param_value.is_infinite());
        assert_eq!(r.value, 0.0, "{r:?}");
    }
}

#[test]
fn mismatched_or_invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "seq.toml", SMALL_SEQ);
    let out = jbmocz(&["ber-ofdm", "--config", &cfg]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("ber_sequence"));

    let bad = write(
        dir.path(),
        "bad.toml",
        &SMALL_SEQ.replace("trials = 300", "trials = 0"),
    );
    assert!(!jbmocz(&["ber-seq", "--config", &bad]).status.success());
    let missing = dir.path().join("absent.toml");
    assert!(!jbmocz(&["ber-seq", "--config", missing.to_str().unwrap()])
        .status
        .success());
}

#[test]
fn loopback_writes_iq_and_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(ok(&["default-config", "loopback"])).unwrap();
    let text = text.replace("cfo_hz = 0.0", "cfo_hz = 11718.75\nsnr_db = 19.0");
    let cfg = write(dir.path(), "loop.toml", &text);
    let out = dir.path().join("loop.csv");
    ok(&["loopback", "--config", &cfg, "--out", out.to_str().unwrap()]);

    let iq = fs::metadata(dir.path().join("loop.iq")).unwrap();
    assert!(iq.len() > 0);
    let rows = read_csv(fs::File::open(&out).unwrap()).unwrap();
    let at = |m: &str| lookup(&rows, "loopback", m, 19.0).unwrap();
    assert_eq!(at("header_bit_errors"), 0.0);
    assert_eq!(at("payload_bit_errors"), 0.0);
    assert!((at("snr_db_est") - 19.0).abs() < 1.0);
}
