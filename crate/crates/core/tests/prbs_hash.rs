use concurrent_codes::prbs::{default_taps, HashConfig};
use proptest::prelude::*;

const VECTORS: &str = include_str!("data/prbs11_vectors.txt");

#[test]
fn golden_vectors() {
    let mut checked = 0;
    for line in VECTORS.lines().filter(|l| !l.starts_with('#') && !l.is_empty()) {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let seed = u64::from_str_radix(fields[0], 16).unwrap();
        let bits: Vec<bool> = fields[1].chars().map(|c| c == '1').collect();
        let want: Vec<usize> = fields[2]
            .split(',')
            .map(|a| usize::from_str_radix(a, 16).unwrap())
            .collect();
        let got = HashConfig::prbs11(seed).unwrap().hash_prefix(&bits).unwrap();
        assert_eq!(got, want, "seed {seed:#x} bits {}", fields[1]);
        checked += 1;
    }
    assert!(checked >= 40);
}

#[test]
fn ten_zeros_from_seed_one() {
    let got = HashConfig::default().hash_prefix(&[false; 10]).unwrap();
    assert_eq!(
        got,
        vec![0x002, 0x004, 0x008, 0x010, 0x020, 0x040, 0x080, 0x100, 0x201, 0x402]
    );
}

#[test]
fn default_taps_are_maximal_length() {
    for width in 4..=20 {
        let cfg = HashConfig::with_default_taps(width, 1).unwrap();
        let mut state = cfg.init();
        let mut period = 0u64;
        loop {
            state = cfg.absorb(state, false).0;
            period += 1;
            if state.register() == 1 {
                break;
            }
            assert!(period < 1 << width, "width {width} taps {:?} cycles too long", default_taps(width));
        }
        assert_eq!(period, (1 << width) - 1, "width {width}");
    }
}

#[test]
fn address_occupancy_is_uniform() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let cfg = HashConfig::default();
    let bins = 2048usize;
    let samples = 20_000usize;
    let mut counts = vec![0u32; bins];
    for _ in 0..samples {
        // 10 bits reach only 1024 of the 2048 states
        let bits: Vec<bool> = (0..16).map(|_| rng.random()).collect();
        let last = *cfg.hash_prefix(&bits).unwrap().last().unwrap();
        counts[last] += 1;
    }
    let expected = samples as f64 / bins as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // chi-square upper 0.001 quantile with 2047 degrees of freedom
    let dof = (bins - 1) as f64;
    let z = 3.090_232_306;
    let quantile = dof * (1.0 - 2.0 / (9.0 * dof) + z * (2.0 / (9.0 * dof)).sqrt()).powi(3);
    assert!(chi2 < quantile, "chi2 = {chi2}, quantile = {quantile}");
}

proptest! {
    #[test]
    fn prefix_consistency(seed in 1u64..2048, bits in prop::collection::vec(any::<bool>(), 1..40), cut in 1usize..40) {
        let cfg = HashConfig::prbs11(seed).unwrap();
        let full = cfg.hash_prefix(&bits).unwrap();
        let cut = cut.min(bits.len());
        prop_assert_eq!(&full[..cut], &cfg.hash_prefix(&bits[..cut]).unwrap()[..]);
    }

    #[test]
    fn addresses_fit_register(seed in 1u64..2048, clocks in 1u32..4, bits in prop::collection::vec(any::<bool>(), 1..30)) {
        let cfg = HashConfig::prbs11(seed).unwrap().with_clocks_per_bit(clocks).unwrap();
        prop_assert!(cfg.hash_prefix(&bits).unwrap().iter().all(|&a| a < 2048));
    }
}
