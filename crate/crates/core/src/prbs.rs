//! Progressive LFSR hash.
//!
//! A Fibonacci shift register absorbs one message bit per step. On each
//! clock the feedback bit is the XOR of the tapped register bits and the
//! input bit; the register shifts left and the feedback enters at bit 0.
//! The register value after each absorbed bit is the address of a mark, so
//! the address of prefix `b[0..=i]` depends on every earlier bit.
//!
//! The default wiring is the PRBS11 polynomial `x^11 + x^9 + 1`
//! (taps at register bits 10 and 8).

use crate::error::{Error, Result};

/// Smallest register width accepted.
pub const MIN_WIDTH: u32 = 4;
/// Largest register width accepted (codewords are `2^width` bits).
pub const MAX_WIDTH: u32 = 24;

/// Default register width.
pub const DEFAULT_WIDTH: u32 = 11;
/// Default seed.
pub const DEFAULT_SEED: u64 = 0x001;

/// Maximal-length tap sets, indexed by width. Each entry lists the 0-based
/// register bits XORed into the feedback.
const DEFAULT_TAPS: [(u32, &[u32]); 17] = [
    (4, &[3, 2]),
    (5, &[4, 2]),
    (6, &[5, 4]),
    (7, &[6, 5]),
    (8, &[7, 5, 4, 3]),
    (9, &[8, 4]),
    (10, &[9, 6]),
    (11, &[10, 8]),
    (12, &[11, 5, 3, 0]),
    (13, &[12, 3, 2, 0]),
    (14, &[13, 4, 2, 0]),
    (15, &[14, 13]),
    (16, &[15, 14, 12, 3]),
    (17, &[16, 13]),
    (18, &[17, 10]),
    (19, &[18, 5, 1, 0]),
    (20, &[19, 16]),
];

/// Maximal-length taps for `width`, when a default is known.
pub fn default_taps(width: u32) -> Option<&'static [u32]> {
    DEFAULT_TAPS
        .iter()
        .find(|(w, _)| *w == width)
        .map(|(_, taps)| *taps)
}

/// Register wiring and initial state of the hash.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HashConfig {
    width: u32,
    tap_mask: u64,
    seed: u64,
    clocks_per_bit: u32,
}

impl HashConfig {
    /// Validated configuration.
    ///
    /// Rejects widths outside `MIN_WIDTH..=MAX_WIDTH`, empty or out-of-range
    /// taps, a zero seed, a seed that does not fit the register, and zero
    /// clocks per bit.
    pub fn new(width: u32, taps: &[u32], seed: u64, clocks_per_bit: u32) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidHashConfig(msg));
        if !(MIN_WIDTH..=MAX_WIDTH).contains(&width) {
            return bad(format!("width {width} outside {MIN_WIDTH}..={MAX_WIDTH}"));
        }
        if taps.is_empty() {
            return bad("tap set is empty".into());
        }
        if let Some(t) = taps.iter().find(|&&t| t >= width) {
            return bad(format!("tap {t} outside register of width {width}"));
        }
        if clocks_per_bit == 0 {
            return bad("clocks_per_bit must be at least 1".into());
        }
        let tap_mask = taps.iter().fold(0u64, |m, &t| m | 1 << t);
        let cfg = Self {
            width,
            tap_mask,
            seed: 1,
            clocks_per_bit,
        };
        cfg.with_seed(seed)
    }

    /// PRBS11 (`x^11 + x^9 + 1`) with the given seed and one clock per bit.
    pub fn prbs11(seed: u64) -> Result<Self> {
        Self::new(DEFAULT_WIDTH, default_taps(DEFAULT_WIDTH).unwrap(), seed, 1)
    }

    /// Configuration for `width` using its default maximal-length taps.
    pub fn with_default_taps(width: u32, seed: u64) -> Result<Self> {
        let taps = default_taps(width).ok_or_else(|| {
            Error::InvalidHashConfig(format!("no default taps for width {width}; pass taps"))
        })?;
        Self::new(width, taps, seed, 1)
    }

    /// Same wiring, different seed.
    pub fn with_seed(&self, seed: u64) -> Result<Self> {
        if seed == 0 {
            return Err(Error::InvalidHashConfig(
                "seed 0 is the all-zero lock-up state".into(),
            ));
        }
        if seed >= 1 << self.width {
            return Err(Error::InvalidHashConfig(format!(
                "seed {seed:#x} does not fit a {}-bit register",
                self.width
            )));
        }
        Ok(Self { seed, ..self.clone() })
    }

    /// Same wiring and seed, different number of clocks per absorbed bit.
    pub fn with_clocks_per_bit(&self, clocks_per_bit: u32) -> Result<Self> {
        if clocks_per_bit == 0 {
            return Err(Error::InvalidHashConfig(
                "clocks_per_bit must be at least 1".into(),
            ));
        }
        Ok(Self {
            clocks_per_bit,
            ..self.clone()
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn clocks_per_bit(&self) -> u32 {
        self.clocks_per_bit
    }

    /// Tap indices in ascending order.
    pub fn taps(&self) -> Vec<u32> {
        (0..self.width)
            .filter(|t| self.tap_mask >> t & 1 == 1)
            .collect()
    }

    /// Codeword length addressed by the register, `2^width`.
    pub fn address_space(&self) -> usize {
        1 << self.width
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1 << self.width) - 1
    }

    /// Fresh state holding the seed.
    pub fn init(&self) -> HashState {
        HashState {
            register: self.seed,
            absorbed: 0,
        }
    }

    /// Absorbs one bit and returns the new state with its address.
    #[inline]
    pub fn absorb(&self, state: HashState, bit: bool) -> (HashState, usize) {
        let mut reg = state.register;
        for _ in 0..self.clocks_per_bit {
            let feedback = ((reg & self.tap_mask).count_ones() as u64 & 1) ^ bit as u64;
            reg = (reg << 1 & self.mask()) | feedback;
        }
        let next = HashState {
            register: reg,
            absorbed: state.absorbed + 1,
        };
        (next, reg as usize)
    }

    /// Address after each prefix of `bits`; `out[i]` hashes `bits[0..=i]`.
    pub fn hash_prefix(&self, bits: &[bool]) -> Result<Vec<usize>> {
        if bits.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut state = self.init();
        Ok(bits
            .iter()
            .map(|&b| {
                let (next, addr) = self.absorb(state, b);
                state = next;
                addr
            })
            .collect())
    }
}

impl Default for HashConfig {
    fn default() -> Self {
        Self::prbs11(DEFAULT_SEED).unwrap()
    }
}

/// Evolving hash register; its value is the current mark address.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HashState {
    register: u64,
    absorbed: u32,
}

impl HashState {
    pub fn register(&self) -> u64 {
        self.register
    }

    /// Number of bits absorbed since `init`.
    pub fn absorbed(&self) -> u32 {
        self.absorbed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(register: u64) -> HashState {
        HashState {
            register,
            absorbed: 0,
        }
    }

    #[test]
    fn init_holds_seed() {
        let cfg = HashConfig::prbs11(0x001).unwrap();
        assert_eq!(cfg.init().register(), 0x001);
        assert_eq!(cfg.init().absorbed(), 0);
        assert_eq!(HashConfig::prbs11(0x7FF).unwrap().init().register(), 0x7FF);
    }

    #[test]
    fn config_rejects_degenerate_settings() {
        assert!(HashConfig::prbs11(0).is_err());
        assert!(HashConfig::prbs11(0x800).is_err());
        assert!(HashConfig::new(3, &[2, 1], 1, 1).is_err());
        assert!(HashConfig::new(11, &[], 1, 1).is_err());
        assert!(HashConfig::new(11, &[11], 1, 1).is_err());
        assert!(HashConfig::new(11, &[10, 8], 1, 0).is_err());
    }

    #[test]
    fn single_steps() {
        let cfg = HashConfig::default();
        let (s, a) = cfg.absorb(state(0x001), false);
        assert_eq!((s.register(), a), (0x002, 0x002));
        let (s, a) = cfg.absorb(state(0x002), true);
        assert_eq!((s.register(), a), (0x005, 0x005));
        let (s, a) = cfg.absorb(state(0x300), false);
        assert_eq!((s.register(), a), (0x601, 0x601));
        assert_eq!(s.absorbed(), 1);
    }

    #[test]
    fn zero_register_is_reachable() {
        // 0x400: r10 = 1, r8 = 0, input 1 -> feedback 0 and the top bit shifts out.
        let (s, a) = HashConfig::default().absorb(state(0x400), true);
        assert_eq!((s.register(), a), (0, 0));
    }

    #[test]
    fn empty_prefix_rejected() {
        assert_eq!(HashConfig::default().hash_prefix(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn multiple_clocks_repeat_the_input() {
        let one = HashConfig::default();
        let three = one.with_clocks_per_bit(3).unwrap();
        let mut s = one.init();
        for _ in 0..3 {
            s = one.absorb(s, true).0;
        }
        assert_eq!(three.absorb(three.init(), true).0.register(), s.register());
    }

    #[test]
    fn default_taps_cover_table() {
        assert_eq!(default_taps(11), Some(&[10u32, 8][..]));
        assert!(default_taps(21).is_none());
        assert!(HashConfig::with_default_taps(21, 1).is_err());
    }
}
