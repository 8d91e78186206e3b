use std::f64::consts::PI;

use jbmocz::dizet::{dizet_hard, ReceivedSequence};
use jbmocz::fft::circle_magnitudes;
use jbmocz::rotation::{
    apply_rotation, correct_rotation, estimate_rotation, rotation_mse, RotationEstimator,
};
use jbmocz::zeros::{encode, make_template, ConstellationParams};
use jbmocz::Bit;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn jutted16() -> ConstellationParams {
    ConstellationParams::new(16, 1.093, 1.15).unwrap()
}

fn magnitudes(p: &ConstellationParams, bits: &[Bit], phi: f64, n: usize) -> Vec<f64> {
    let cw = encode(bits, p, (p.k() + 1) as f64).unwrap();
    circle_magnitudes(&apply_rotation(cw.coeffs(), phi), n)
}

#[test]
fn known_rotation_is_estimated_and_undone() {
    let p = ConstellationParams::new(8, 1.176, 1.15).unwrap();
    let bits: Vec<Bit> = vec![1, 0, 1, 1, 1, 0, 0, 1];
    let cw = encode(&bits, &p, 9.0).unwrap();
    let phi = 12.0 / 7.0 * p.base_angle();
    let rx = apply_rotation(cw.coeffs(), phi);
    let rotated = dizet_hard(&ReceivedSequence::new(rx.clone(), 1).unwrap(), &p).unwrap();
    assert_ne!(rotated, bits);
    let template = make_template(&p, 1024).unwrap();
    let est = estimate_rotation(&circle_magnitudes(&rx, 1024), &template).unwrap();
    assert!(circular_distance(est.phi_hat, phi) <= PI / 1024.0 + 1e-12);
    let fixed = correct_rotation(&rx, est.phi_hat);
    assert_eq!(
        dizet_hard(&ReceivedSequence::new(fixed, 1).unwrap(), &p).unwrap(),
        bits
    );
}

#[test]
fn one_bin_off_still_decodes() {
    let p = ConstellationParams::new(8, 1.176, 1.15).unwrap();
    let n = 1024;
    let bin = 2.0 * PI / n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..500 {
        let bits: Vec<Bit> = (0..8).map(|_| rng.random_range(0..2u8)).collect();
        let phi = rng.random::<f64>() * 2.0 * PI;
        let cw = encode(&bits, &p, 9.0).unwrap();
        let rx = apply_rotation(cw.coeffs(), phi);
        let est =
            estimate_rotation(&circle_magnitudes(&rx, n), &make_template(&p, n).unwrap()).unwrap();
        for off in [-bin, bin] {
            let fixed = correct_rotation(&rx, est.phi_hat + off);
            assert_eq!(
                dizet_hard(&ReceivedSequence::new(fixed, 1).unwrap(), &p).unwrap(),
                bits
            );
        }
    }
}

#[test]
fn nearest_bin_for_arbitrary_rotations() {
    let p = jutted16();
    let n = 256;
    let est = RotationEstimator::new(&make_template(&p, n).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let bits: Vec<Bit> = (0..16).map(|_| rng.random_range(0..2u8)).collect();
        let phi = rng.random::<f64>() * 2.0 * PI;
        let e = est.estimate(&magnitudes(&p, &bits, phi, n)).unwrap();
        assert!(
            circular_distance(e.phi_hat, phi) <= PI / n as f64 + 1e-9,
            "{phi} -> {}",
            e.phi_hat
        );
        assert!(e.phi_hat >= 0.0 && e.phi_hat < 2.0 * PI);
    }
}

#[test]
fn quantization_floor_of_the_mse() {
    let p = jutted16();
    let n = 64;
    let est = RotationEstimator::new(&make_template(&p, n).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let trials = 4000;
    let (mut truth, mut hats) = (Vec::new(), Vec::new());
    for i in 0..trials {
        let bits: Vec<Bit> = (0..16).map(|_| rng.random_range(0..2u8)).collect();
        let phi = (i as f64 + rng.random::<f64>()) / trials as f64 * 2.0 * PI;
        truth.push(phi);
        hats.push(
            est.estimate(&magnitudes(&p, &bits, phi, n))
                .unwrap()
                .phi_hat,
        );
    }
    let mse = rotation_mse(&truth, &hats).unwrap();
    let floor = (2.0 * PI / n as f64).powi(2) / 12.0;
    assert!((mse / floor - 1.0).abs() < 0.05, "{mse} vs {floor}");
    assert!(rotation_mse(&truth, &hats[1..]).is_err());
}

#[test]
fn template_length_must_match() {
    let t = make_template(&jutted16(), 128).unwrap();
    assert!(estimate_rotation(&[1.0; 64], &t).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimator_is_shift_equivariant(seed in any::<u64>(), m in 0usize..128, c in 0.01f64..100.0) {
        let p = jutted16();
        let n = 128;
        let est = RotationEstimator::new(&make_template(&p, n).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<Bit> = (0..16).map(|_| rng.random_range(0..2u8)).collect();
        let mags = magnitudes(&p, &bits, rng.random::<f64>() * 2.0 * PI, n);
        let base = est.estimate(&mags).unwrap().bin;
        let shifted: Vec<f64> = (0..n).map(|i| mags[(i + n - m) % n]).collect();
        prop_assert_eq!(est.estimate(&shifted).unwrap().bin, (base + m) % n);
        let scaled: Vec<f64> = mags.iter().map(|v| v * c).collect();
        prop_assert_eq!(est.estimate(&scaled).unwrap().bin, base);
    }

    #[test]
    fn huffman_scores_repeat_every_base_angle(seed in any::<u64>()) {
        let p = ConstellationParams::huffman(16, 1.093).unwrap();
        let n = 256;
        let est = RotationEstimator::new(&make_template(&p, n).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<Bit> = (0..16).map(|_| rng.random_range(0..2u8)).collect();
        let s = est.scores(&magnitudes(&p, &bits, rng.random::<f64>() * 2.0 * PI, n)).unwrap();
        for i in 0..n {
            prop_assert!((s[i] - s[(i + 16) % n]).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_bins_are_recovered(seed in any::<u64>(), m in 0usize..512) {
        let p = jutted16();
        let n = 512;
        let est = RotationEstimator::new(&make_template(&p, n).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<Bit> = (0..16).map(|_| rng.random_range(0..2u8)).collect();
        let mags = magnitudes(&p, &bits, 2.0 * PI * m as f64 / n as f64, n);
        prop_assert_eq!(est.estimate(&mags).unwrap().bin, m);
    }
}
