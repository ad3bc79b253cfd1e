//! Channel corruption: OR-noise, burst erasures, symmetric bit flips and an
//! analog amplitude layer with threshold detection.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::codeword::Codeword;
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Marks of one encoded message at the default geometry; the 0 dB reference.
pub const DEFAULT_MARKS_PER_MESSAGE: usize = 10;

/// `round(marks_per_message * 10^{level_db / 10})`.
pub fn db_to_marks(level_db: f64, marks_per_message: usize) -> usize {
    (marks_per_message as f64 * 10f64.powf(level_db / 10.0)).round() as usize
}

/// Amount of random noise, in dB relative to one message or as a mark count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    Db(f64),
    Marks(usize),
}

impl NoiseSpec {
    pub fn resolve(&self, marks_per_message: usize) -> usize {
        match *self {
            NoiseSpec::Db(db) => db_to_marks(db, marks_per_message),
            NoiseSpec::Marks(n) => n,
        }
    }
}

/// Seeded deterministic random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    /// Name of the underlying generator.
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for trial `index` of a run with `master` seed: `master ^ index`.
    pub fn for_trial(master: u64, index: u64) -> Self {
        Self::new(master ^ index)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        Self::ALGORITHM
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

fn distinct_positions(len: usize, count: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    if count > len {
        return Err(Error::TooManyMarks {
            count,
            codeword_len: len,
        });
    }
    Ok(index::sample(rng.rng(), len, count).into_vec())
}

/// Sets `count` distinct, uniformly chosen positions. Existing marks stay.
pub fn add_random_marks(codeword: &Codeword, count: usize, rng: &mut RngStream) -> Result<Codeword> {
    let mut out = codeword.clone();
    for j in distinct_positions(codeword.len(), count, rng)? {
        out.set(j);
    }
    Ok(out)
}

/// Zeros `[start, start + len)`. `start` must be a valid position.
pub fn cut_gap(codeword: &Codeword, start: usize, len: usize) -> Result<Codeword> {
    if start >= codeword.len() {
        return Err(Error::OutOfRange {
            start,
            len,
            codeword_len: codeword.len(),
        });
    }
    let mut out = codeword.clone();
    out.clear_range(start, len)?;
    Ok(out)
}

/// Gap of `round(frac * C)` bits at a uniformly random valid start.
/// Returns the corrupted codeword and the start used.
pub fn cut_random_gap(codeword: &Codeword, frac: f64, rng: &mut RngStream) -> Result<(Codeword, usize)> {
    use rand::Rng;
    let len = gap_len(frac, codeword.len())?;
    let start = rng.rng().random_range(0..=codeword.len() - len.max(1));
    Ok((cut_gap(codeword, start, len)?, start))
}

/// `round(frac * C)`, checking `0 <= frac <= 1`.
pub fn gap_len(frac: f64, codeword_len: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&frac) {
        return Err(Error::Domain(format!("gap fraction {frac} outside [0, 1]")));
    }
    Ok((frac * codeword_len as f64).round() as usize)
}

/// Binary symmetric noise: toggles `count` distinct random positions.
pub fn flip_random_bits(codeword: &Codeword, count: usize, rng: &mut RngStream) -> Result<Codeword> {
    let mut out = codeword.clone();
    for j in distinct_positions(codeword.len(), count, rng)? {
        out.toggle(j);
    }
    Ok(out)
}

/// Received amplitudes: `s * bit + N(μ, σ)` per position.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogCodeword<T> {
    amplitudes: Vec<T>,
    signal: T,
    mu: T,
    sigma: T,
}

impl<T: Real> AnalogCodeword<T> {
    pub fn amplitudes(&self) -> &[T] {
        &self.amplitudes
    }

    pub fn signal(&self) -> T {
        self.signal
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// Modulates `codeword` at amplitude `s` and adds independent Gaussian noise.
pub fn to_analog<T: Real>(codeword: &Codeword, s: T, mu: T, sigma: T, rng: &mut RngStream) -> Result<AnalogCodeword<T>> {
    if sigma.is_nan() || sigma < T::zero() {
        return Err(Error::Domain(format!("noise width {sigma} is negative")));
    }
    let amplitudes = (0..codeword.len())
        .map(|j| {
            let z: f64 = StandardNormal.sample(rng.rng());
            let base = if codeword.get(j) { s } else { T::zero() };
            base + mu + sigma * lit::<T>(z)
        })
        .collect();
    Ok(AnalogCodeword {
        amplitudes,
        signal: s,
        mu,
        sigma,
    })
}

/// Marks every position whose amplitude exceeds `e_t`.
pub fn threshold_detect<T: Real>(analog: &AnalogCodeword<T>, e_t: T) -> Result<Codeword> {
    let len = analog.len();
    if !len.is_power_of_two() {
        return Err(Error::InvalidParams(format!(
            "analog length {len} is not a power of two"
        )));
    }
    Codeword::from_marks(
        len.trailing_zeros(),
        analog
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a > e_t)
            .map(|(j, _)| j),
    )
}
