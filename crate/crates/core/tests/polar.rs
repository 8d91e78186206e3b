use jbmocz::polar::{
    polar_construct, polar_decode_sc, polar_encode, PolarSpec, DEFAULT_DESIGN_EBN0_DB,
};
use jbmocz::Bit;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_bits(rng: &mut impl Rng, k: usize) -> Vec<Bit> {
    (0..k).map(|_| rng.random_range(0..2u8)).collect()
}

/// `F^{⊗n}` built by explicit Kronecker products.
fn kronecker_generator(n: usize) -> Vec<Vec<Bit>> {
    let mut g = vec![vec![1u8]];
    while g.len() < n {
        let m = g.len();
        let mut next = vec![vec![0u8; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = g[i][j];
                next[i + m][j] = g[i][j];
                next[i + m][j + m] = g[i][j];
            }
        }
        g = next;
    }
    g
}

fn place(info: &[Bit], spec: &PolarSpec) -> Vec<Bit> {
    let mut it = info.iter();
    (0..spec.n())
        .map(|i| {
            if spec.is_frozen(i) {
                0
            } else {
                *it.next().unwrap()
            }
        })
        .collect()
}

fn llrs(cw: &[Bit], mag: f64) -> Vec<f64> {
    cw.iter()
        .map(|&b| if b == 1 { mag } else { -mag })
        .collect()
}

#[test]
fn encoder_matches_the_kronecker_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for n in [2usize, 8, 32, 128] {
        let spec = polar_construct(n, n / 2, DEFAULT_DESIGN_EBN0_DB).unwrap();
        let g = kronecker_generator(n);
        for _ in 0..20 {
            let info = random_bits(&mut rng, n / 2);
            let u = place(&info, &spec);
            let expect: Vec<Bit> = (0..n)
                .map(|j| (0..n).fold(0, |acc, i| acc ^ (u[i] & g[i][j])))
                .collect();
            assert_eq!(polar_encode(&info, &spec).unwrap(), expect);
        }
    }
}

#[test]
fn noiseless_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    let spec = polar_construct(512, 424, DEFAULT_DESIGN_EBN0_DB).unwrap();
    for _ in 0..10_000 {
        let info = random_bits(&mut rng, 424);
        let cw = polar_encode(&info, &spec).unwrap();
        assert_eq!(polar_decode_sc(&llrs(&cw, 4.0), &spec).unwrap(), info);
    }
}

#[test]
fn awgn_errors_fall_with_snr() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let (n, k) = (256, 128);
    let spec = polar_construct(n, k, DEFAULT_DESIGN_EBN0_DB).unwrap();
    let mut prev = f64::INFINITY;
    for ebn0_db in [0.0, 2.0, 4.0] {
        let sigma2 = 1.0 / (2.0 * (k as f64 / n as f64) * 10f64.powf(ebn0_db / 10.0));
        let mut errors = 0usize;
        let trials = 300;
        for _ in 0..trials {
            let info = random_bits(&mut rng, k);
            let cw = polar_encode(&info, &spec).unwrap();
            let l: Vec<f64> = cw
                .iter()
                .map(|&b| {
                    let s = if b == 1 { 1.0 } else { -1.0 };
                    let nz: f64 = StandardNormal.sample(&mut rng);
                    2.0 * (s + sigma2.sqrt() * nz) / sigma2
                })
                .collect();
            let dec = polar_decode_sc(&l, &spec).unwrap();
            errors += dec.iter().zip(&info).filter(|(a, b)| a != b).count();
        }
        let ber = errors as f64 / (trials * k) as f64;
        assert!(ber < prev, "{ebn0_db} dB: {ber}");
        prev = ber;
    }
    assert!(prev < 1e-3, "{prev}");
}

#[test]
fn construction_keeps_the_strongest_channels() {
    let spec = polar_construct(1024, 512, DEFAULT_DESIGN_EBN0_DB).unwrap();
    assert_eq!(spec.frozen().len(), 512);
    assert!(spec.is_frozen(0));
    assert!(!spec.is_frozen(1023));
    assert!(polar_construct(1000, 10, 2.0).is_err());
    assert!(polar_construct(8, 9, 2.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_is_linear(seed in any::<u64>(), log_n in 1u32..9) {
        let n = 1usize << log_n;
        let k = (seed as usize % n) + 1;
        let spec = polar_construct(n, k, DEFAULT_DESIGN_EBN0_DB).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_bits(&mut rng, k);
        let b = random_bits(&mut rng, k);
        let ab: Vec<Bit> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ca = polar_encode(&a, &spec).unwrap();
        let cb = polar_encode(&b, &spec).unwrap();
        let sum: Vec<Bit> = ca.iter().zip(&cb).map(|(x, y)| x ^ y).collect();
        prop_assert_eq!(polar_encode(&ab, &spec).unwrap(), sum);
        prop_assert!(polar_encode(&vec![0; k], &spec).unwrap().iter().all(|&v| v == 0));
    }

    #[test]
    fn reliable_llrs_always_decode(seed in any::<u64>(), mag in 0.1f64..50.0) {
        let spec = polar_construct(64, 32, DEFAULT_DESIGN_EBN0_DB).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info = random_bits(&mut rng, 32);
        let cw = polar_encode(&info, &spec).unwrap();
        prop_assert_eq!(polar_decode_sc(&llrs(&cw, mag), &spec).unwrap(), info);
    }
}
