use std::f64::consts::PI;

use jbmocz::channel::{complex_gaussian, convolve_channel, draw_cir, CirRealization};
use jbmocz::dizet::{dizet_hard, pllr, ReceivedSequence};
use jbmocz::rotation::apply_rotation;
use jbmocz::zeros::{encode, ConstellationParams};
use jbmocz::{Bit, Complex64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(rng: &mut impl Rng, k: usize) -> Vec<Bit> {
    (0..k).map(|_| rng.random_range(0..2u8)).collect()
}

#[test]
fn noiseless_multipath_decodes_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [4usize, 8, 16, 31, 64] {
        let p = ConstellationParams::new(k, 1.0 + 1.5 / k as f64, 1.15).unwrap();
        for l_e in [1usize, 3, 5, 8] {
            for _ in 0..10 {
                let b = random_bits(&mut rng, k);
                let cw = encode(&b, &p, (k + 1) as f64).unwrap();
                let h = draw_cir(l_e, &mut rng).unwrap();
                let y = convolve_channel(cw.coeffs(), &h, 0.0, &mut rng).unwrap();
                assert_eq!(dizet_hard(&y, &p).unwrap(), b, "K={k} L_e={l_e}");
                let soft = pllr(&y, &p).unwrap();
                for (v, &bit) in soft.pllrs.iter().zip(&b) {
                    assert_eq!(*v > 0.0, bit == 1);
                }
            }
        }
    }
}

#[test]
fn pure_noise_is_a_coin_flip() {
    let p = ConstellationParams::huffman(8, 1.176).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let trials = 10_000;
    let mut ones = 0usize;
    for _ in 0..trials {
        let y: Vec<Complex64> = (0..9).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
        let bits = dizet_hard(&ReceivedSequence::new(y, 1).unwrap(), &p).unwrap();
        ones += bits.iter().map(|&b| b as usize).sum::<usize>();
    }
    let rate = ones as f64 / (trials * 8) as f64;
    assert!((rate - 0.5).abs() < 0.02, "{rate}");
}

#[test]
fn pllr_sign_matches_hard_decisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = ConstellationParams::new(16, 1.093, 1.15).unwrap();
    let mut disagreements = 0;
    for t in 0..100_000 {
        let b = random_bits(&mut rng, 16);
        let cw = encode(&b, &p, 17.0).unwrap();
        let l_e = 1 + t % 3;
        let h = if l_e == 1 {
            CirRealization::identity()
        } else {
            draw_cir(l_e, &mut rng).unwrap()
        };
        let y = convolve_channel(cw.coeffs(), &h, 0.5, &mut rng).unwrap();
        let hard = dizet_hard(&y, &p).unwrap();
        let soft = pllr(&y, &p).unwrap();
        assert!(soft.pllrs.iter().all(|v| v.is_finite()));
        if soft.hard_decisions() != hard {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
}

#[test]
fn huffman_rotation_by_base_angle_shifts_bits() {
    let p = ConstellationParams::huffman(8, 1.176).unwrap();
    let b: Vec<Bit> = vec![1, 0, 1, 1, 1, 0, 0, 1];
    let cw = encode(&b, &p, 9.0).unwrap();
    for m in 0..8 {
        let rot = apply_rotation(cw.coeffs(), m as f64 * 2.0 * PI / 8.0);
        let out = dizet_hard(&ReceivedSequence::new(rot, 1).unwrap(), &p).unwrap();
        let expect: Vec<Bit> = (0..8).map(|k| b[(k + 8 - m) % 8]).collect();
        assert_eq!(out, expect, "m = {m}");
    }
}

#[test]
fn all_zero_input_is_refused() {
    let p = ConstellationParams::huffman(4, 1.3).unwrap();
    let y = ReceivedSequence::new(vec![Complex64::new(0.0, 0.0); 5], 1).unwrap();
    assert!(pllr(&y, &p).is_err());
    let short = ReceivedSequence::new(vec![Complex64::new(1.0, 0.0); 6], 1).unwrap();
    assert!(dizet_hard(&short, &p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decisions_ignore_complex_scaling(seed in any::<u64>(), re in -5.0f64..5.0, im in -5.0f64..5.0, pos in 0.01f64..100.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ConstellationParams::new(12, 1.12, 1.2).unwrap();
        let cw = encode(&random_bits(&mut rng, 12), &p, 13.0).unwrap();
        let h = draw_cir(2, &mut rng).unwrap();
        let y = convolve_channel(cw.coeffs(), &h, 1.0, &mut rng).unwrap();
        let c = Complex64::new(re, im);
        let scaled = ReceivedSequence::new(y.coeffs().iter().map(|v| v * c).collect(), 2).unwrap();
        prop_assert_eq!(dizet_hard(&scaled, &p).unwrap(), dizet_hard(&y, &p).unwrap());
        let positive = ReceivedSequence::new(y.coeffs().iter().map(|v| v * pos).collect(), 2).unwrap();
        let a = pllr(&y, &p).unwrap();
        let b = pllr(&positive, &p).unwrap();
        for (u, v) in a.pllrs.iter().zip(&b.pllrs) {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1e-12));
        }
    }
}
