//! Design curves, PAPR table and stability report.

use anyhow::Result;
use jbmocz::fft::Fft;
use jbmocz::phy::ofdm::modulate_symbol;
use jbmocz::phy::papr::{measured_papr, papr_fm_huffman, papr_fm_jutted, template_papr, to_db};
use jbmocz::stability::{
    codebook_stability, default_radius_grid, min_codebook_stability, zeta_sweep, CodebookMode,
};
use jbmocz::zeros::{encode, ConstellationParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{random_bits, resolve_params};
use crate::config::{
    ConstellationEntry, ConstellationTable, DesignCurvesConfig, StabilityReportConfig,
};
use crate::metrics::MetricRow;
use crate::runner::derive;

/// Dense grid for numeric PAPR.
pub const PAPR_GRID: usize = 8192;

/// Rows per `(K, ζ)`: `r_star`, `c_min`, `c_min_relative` (to the `ζ = 1`
/// row, or the first row without one) and `papr_db` of the template.
pub fn run_design_curves(cfg: &DesignCurvesConfig, seed: u64) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    for &k in &cfg.k {
        let grid = if cfg.radius_grid.is_empty() {
            default_radius_grid(k)
        } else {
            cfg.radius_grid.clone()
        };
        let points = zeta_sweep(k, &cfg.zeta, &grid, cfg.stability_bins)?;
        let reference = points
            .iter()
            .find(|p| p.zeta == 1.0)
            .unwrap_or(&points[0])
            .min_stability;
        let id = format!("design_curves:K={k}");
        for p in &points {
            let at = ("zeta", p.zeta);
            rows.push(MetricRow::new(&id, at, "r_star", p.r_star, 1, seed));
            rows.push(MetricRow::new(&id, at, "c_min", p.min_stability, 1, seed));
            rows.push(MetricRow::new(
                &id,
                at,
                "c_min_relative",
                p.min_stability / reference,
                1,
                seed,
            ));
            rows.push(MetricRow::new(
                &id,
                at,
                "papr_db",
                p.template_papr_db,
                1,
                seed,
            ));
        }
    }
    Ok(rows)
}

fn entry_params(e: &ConstellationEntry) -> Result<ConstellationParams> {
    resolve_params(e.k, e.radius, e.zeta)
}

/// Rows per constellation: `papr_db` (closed form where it applies),
/// `papr_db_numeric` on a dense grid and `papr_db_measured` on one
/// time-domain symbol of random data.
pub fn run_papr_table(cfg: &ConstellationTable, seed: u64) -> Result<Vec<MetricRow>> {
    let fft = Fft::new(cfg.n_idft);
    let mut rows = Vec::new();
    for (i, e) in cfg.entries.iter().enumerate() {
        let p = entry_params(e)?;
        let analytic = if p.is_huffman() {
            papr_fm_huffman(&p)?
        } else {
            papr_fm_jutted(&p, PAPR_GRID)?.0
        };
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, i as u64));
        let cw = encode(&random_bits(&mut rng, p.k()), &p, (p.k() + 1) as f64)?;
        let body = &modulate_symbol(&fft, cw.coeffs(), 0);
        let id = format!("papr_table:{}", e.label);
        let at = ("k", p.k() as f64);
        rows.push(MetricRow::new(&id, at, "papr_db", analytic, 1, seed));
        rows.push(MetricRow::new(
            &id,
            at,
            "papr_db_numeric",
            to_db(template_papr(&p, PAPR_GRID)),
            1,
            seed,
        ));
        rows.push(MetricRow::new(
            &id,
            at,
            "papr_db_measured",
            to_db(measured_papr(body)),
            1,
            seed,
        ));
        rows.push(MetricRow::new(&id, at, "radius", p.radius(), 1, seed));
    }
    Ok(rows)
}

/// Rows per constellation: `c_bar` (exact for `K <= 16`, else sampled) and
/// `c_min`.
pub fn run_stability_report(cfg: &StabilityReportConfig, seed: u64) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    for (i, e) in cfg.entries.iter().enumerate() {
        let p = entry_params(e)?;
        let (mode, trials) = if p.k() <= 16 {
            (CodebookMode::Exact, 1u64 << p.k())
        } else {
            (
                CodebookMode::Sampled {
                    count: cfg.samples,
                    seed: derive(seed, i as u64),
                },
                cfg.samples as u64,
            )
        };
        let c_bar = codebook_stability(&p, cfg.stability_bins, mode)?;
        let c_min = min_codebook_stability(&p, cfg.stability_bins);
        let id = format!("stability_report:{}", e.label);
        let at = ("k", p.k() as f64);
        rows.push(MetricRow::new(&id, at, "c_bar", c_bar, trials, seed));
        rows.push(MetricRow::new(&id, at, "c_min", c_min, trials, seed));
        rows.push(MetricRow::new(&id, at, "radius", p.radius(), 1, seed));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::lookup;
    use jbmocz::stability::optimize_radius;

    #[test]
    fn design_rows_pass_through_the_sweep() {
        let cfg = DesignCurvesConfig {
            k: vec![16],
            zeta: vec![1.0, 1.1, 1.2],
            radius_grid: Vec::new(),
            stability_bins: 512,
        };
        let rows = run_design_curves(&cfg, 0).unwrap();
        assert_eq!(rows.len(), 12);
        let direct = optimize_radius(16, 1.1, &default_radius_grid(16), 512).unwrap();
        assert_eq!(
            lookup(&rows, "design_curves:K=16", "r_star", 1.1),
            Some(direct.r_star)
        );
        assert_eq!(
            lookup(&rows, "design_curves:K=16", "c_min", 1.1),
            Some(direct.min_stability)
        );
        assert_eq!(
            lookup(&rows, "design_curves:K=16", "c_min_relative", 1.0),
            Some(1.0)
        );
    }

    #[test]
    fn papr_table_agrees_with_itself() {
        let cfg = ConstellationTable {
            entries: vec![
                ConstellationEntry::new("h", 16, None, 1.0),
                ConstellationEntry::new("j", 16, Some(1.093), 1.15),
            ],
            n_idft: 4096,
        };
        let rows = run_papr_table(&cfg, 0).unwrap();
        for label in ["papr_table:h", "papr_table:j"] {
            let a = lookup(&rows, label, "papr_db", 16.0).unwrap();
            let n = lookup(&rows, label, "papr_db_numeric", 16.0).unwrap();
            let m = lookup(&rows, label, "papr_db_measured", 16.0).unwrap();
            assert!(
                (a - n).abs() < 0.01 && (n - m).abs() < 0.01,
                "{label}: {a} {n} {m}"
            );
        }
    }

    #[test]
    fn stability_report_matches_huffman_k8() {
        let cfg = StabilityReportConfig {
            entries: vec![ConstellationEntry::new("e1", 8, Some(1.176), 1.0)],
            ..Default::default()
        };
        let rows = run_stability_report(&cfg, 0).unwrap();
        assert!((rows[0].value - 1.149).abs() < 0.005);
        assert!((rows[1].value - 1.048).abs() < 0.005);
        assert_eq!(rows[0].trials, 256);
    }
}
