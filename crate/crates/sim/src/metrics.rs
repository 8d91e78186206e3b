//! CSV result records.

use std::io::Write;

use anyhow::{ensure, Result};
use serde::{Deserialize, Serialize};

pub const COLUMNS: [&str; 7] = [
    "experiment",
    "param_name",
    "param_value",
    "metric",
    "value",
    "trials",
    "seed",
];

/// One value of one metric at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub experiment: String,
    pub param_name: String,
    #[serde(deserialize_with = "float")]
    pub param_value: f64,
    pub metric: String,
    #[serde(deserialize_with = "float")]
    pub value: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Accepts the `inf` spelling the writer uses for noiseless sweep points.
fn float<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

impl MetricRow {
    pub fn new(
        experiment: &str,
        param: (&str, f64),
        metric: &str,
        value: f64,
        trials: u64,
        seed: u64,
    ) -> Self {
        Self {
            experiment: experiment.into(),
            param_name: param.0.into(),
            param_value: param.1,
            metric: metric.into(),
            value,
            trials,
            seed,
        }
    }

    pub fn check(&self) -> Result<()> {
        ensure!(
            self.value.is_finite(),
            "{}/{}: non-finite value",
            self.experiment,
            self.metric
        );
        if matches!(self.metric.as_str(), "ber" | "bler") {
            ensure!(
                (0.0..=1.0).contains(&self.value),
                "{}/{}: rate out of range",
                self.experiment,
                self.metric
            );
        }
        Ok(())
    }
}

pub fn write_csv<W: Write>(rows: &[MetricRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(COLUMNS)?;
    for r in rows {
        r.check()?;
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<MetricRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize()
        .collect::<std::result::Result<Vec<MetricRow>, _>>()?)
}

/// Value of `metric` for `experiment` at `param_value`, if present.
pub fn lookup(rows: &[MetricRow], experiment: &str, metric: &str, param_value: f64) -> Option<f64> {
    rows.iter()
        .find(|r| r.experiment == experiment && r.metric == metric && r.param_value == param_value)
        .map(|r| r.value)
}

/// `(param_value, value)` pairs of one series in sweep order.
pub fn series(rows: &[MetricRow], experiment: &str, metric: &str) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.experiment == experiment && r.metric == metric)
        .map(|r| (r.param_value, r.value))
        .collect()
}
