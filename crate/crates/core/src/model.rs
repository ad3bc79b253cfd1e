//! Closed-form predictions for concurrent codes.
//!
//! Symbols: `m` encoded messages, `L` absorbed bits per message, `k`
//! checksum bits, `b = L - k` data bits, `C` codeword length, `n` and `g`
//! the noise and gap fractions of `C`, `q = n + g`. The round at which the
//! prefix tree outgrows the message count is `a = log2 m`, floored or not
//! according to [`ExponentMode`].

use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};
use crate::special::{erfinv, lambert_w_series};

/// How `a = log2 m` enters the branch exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentMode {
    #[default]
    Floor,
    Continuous,
}

impl ExponentMode {
    pub fn a<T: Real>(self, m: u64) -> T {
        let a = count::<T>(m).log2();
        match self {
            ExponentMode::Floor => a.floor(),
            ExponentMode::Continuous => a,
        }
    }
}

impl std::str::FromStr for ExponentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "floor" => Ok(Self::Floor),
            "continuous" => Ok(Self::Continuous),
            _ => Err(Error::InvalidModel(format!(
                "unknown exponent mode {s:?} (floor|continuous)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    m: u64,
    message_bits: u32,
    checksum_bits: u32,
    codeword_len: usize,
    noise: T,
    gap: T,
    a_mode: ExponentMode,
}

impl<T: Real> ModelParams<T> {
    /// Noise- and gap-free parameters for `m` messages.
    pub fn new(m: u64, message_bits: u32, checksum_bits: u32, codeword_len: usize) -> Result<Self> {
        let p = Self {
            m,
            message_bits,
            checksum_bits,
            codeword_len,
            noise: T::zero(),
            gap: T::zero(),
            a_mode: ExponentMode::Floor,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_noise(self, noise: T) -> Result<Self> {
        let p = Self { noise, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_gap(self, gap: T) -> Result<Self> {
        let p = Self { gap, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn with_a_mode(self, a_mode: ExponentMode) -> Self {
        Self { a_mode, ..self }
    }

    pub fn with_m(self, m: u64) -> Result<Self> {
        let p = Self { m, ..self };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.message_bits > 62 || self.checksum_bits >= self.message_bits {
            return bad(format!(
                "need 1 <= L - k with L <= 62 (L = {}, k = {})",
                self.message_bits, self.checksum_bits
            ));
        }
        if self.m > 1 << self.data_bits() {
            return bad(format!("m = {} exceeds 2^b = {}", self.m, 1u64 << self.data_bits()));
        }
        if self.codeword_len == 0 {
            return bad("codeword length must be positive".into());
        }
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(self.noise) || !unit(self.gap) || !unit(self.noise + self.gap) {
            return bad(format!(
                "need n, g, n + g in [0, 1] (n = {}, g = {})",
                self.noise, self.gap
            ));
        }
        Ok(())
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn message_bits(&self) -> u32 {
        self.message_bits
    }

    pub fn checksum_bits(&self) -> u32 {
        self.checksum_bits
    }

    /// `b = L - k`.
    pub fn data_bits(&self) -> u32 {
        self.message_bits - self.checksum_bits
    }

    pub fn codeword_len(&self) -> usize {
        self.codeword_len
    }

    pub fn noise(&self) -> T {
        self.noise
    }

    pub fn gap(&self) -> T {
        self.gap
    }

    pub fn a_mode(&self) -> ExponentMode {
        self.a_mode
    }

    /// `q = n + g`, the chance a false branch survives one round.
    pub fn q(&self) -> T {
        self.noise + self.gap
    }

    pub fn a(&self) -> T {
        self.a_mode.a(self.m)
    }
}

impl<T: Real> Default for ModelParams<T> {
    fn default() -> Self {
        Self::new(1, 10, 2, 2048).unwrap()
    }
}

/// Expected distinct marks of `m` messages, `Z(m) = L m - m log2 m`.
/// Defined for real `m >= 0` with `Z(0) = 0`.
pub fn marks_expected<T: Real>(m: T, message_bits: u32) -> T {
    if m <= T::zero() {
        return T::zero();
    }
    count::<T>(message_bits.into()) * m - m * m.log2()
}

/// Message count maximizing `Z`, `2^L / e`.
pub fn marks_argmax<T: Real>(message_bits: u32) -> T {
    lit::<T>(2.0).powi(message_bits as i32) / T::E()
}

/// Inverts `Z` through the Lambert W form `m = -Z ln2 / W(-2^{-L} Z ln2)`
/// with `W` the principal-branch series.
///
/// Since the principal branch is used this returns the large root of
/// `Z(m) = z` (e.g. about 1017 for `z = 10, L = 10`), not the small one.
pub fn messages_from_marks_series<T: Real>(z: T, message_bits: u32, terms: usize) -> Result<T> {
    if z == T::zero() {
        return Ok(T::zero());
    }
    let x = -z * T::LN_2() / lit::<T>(2.0).powi(message_bits as i32);
    let w = lambert_w_series(x, terms)?;
    if w == T::zero() {
        return Err(Error::Domain("lambert series evaluated to zero".into()));
    }
    Ok(-z * T::LN_2() / w)
}

/// The root of `Z(m) = z` on `[0, 2^L/e]`, by bisection.
pub fn messages_from_marks_numeric<T: Real>(z: T, message_bits: u32) -> Result<T> {
    let hi_m = marks_argmax::<T>(message_bits);
    let z_max = marks_expected(hi_m, message_bits);
    if z.is_nan() || z < T::zero() {
        return Err(Error::Domain(format!("mark count {z} is negative")));
    }
    if z > z_max {
        return Err(Error::Domain(format!(
            "mark count {z} exceeds the attainable maximum {z_max}"
        )));
    }
    if z == T::zero() {
        return Ok(T::zero());
    }
    // Z is flat at the maximum, where bisection only resolves m to ~sqrt(eps)
    if z == z_max {
        return Ok(hi_m);
    }
    let (mut lo, mut hi) = (T::zero(), hi_m);
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if marks_expected(mid, message_bits) < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / lit(2.0))
}

/// Chance that a given run of `e` positions holds no mark, times the
/// placement factor `(C - E) / C`, for Poisson marks of density `Z(m)/C`.
pub fn gap_block_probability<T: Real>(m: u64, e: usize, codeword_len: usize, message_bits: u32) -> T {
    if e >= codeword_len {
        return T::zero();
    }
    let c = count::<T>(codeword_len as u64);
    let density = marks_expected(count::<T>(m), message_bits) / c;
    let e_t = count::<T>(e as u64);
    (c - e_t) / c * (-density * e_t).exp()
}

/// Expected live branches after round `i` (`1 <= i <= L`).
pub fn live_branches<T: Real>(i: u32, p: &ModelParams<T>) -> T {
    let two = lit::<T>(2.0);
    let m = count::<T>(p.m);
    let pow_i = two.powi(i as i32);
    if pow_i <= m {
        return pow_i;
    }
    let exponent = count::<T>(i.into()) - p.a() + T::one();
    let survivors = p.q().powf(exponent);
    let b = p.data_bits();
    let width = if i <= b { pow_i } else { two.powi(b as i32) };
    m + (width - m) * survivors
}

/// `B_i` for every round `1..=L`.
pub fn branch_profile<T: Real>(p: &ModelParams<T>) -> Vec<T> {
    (1..=p.message_bits).map(|i| live_branches(i, p)).collect()
}

/// Expected hallucinations, `H = B_L - m`.
pub fn expected_hallucinations<T: Real>(p: &ModelParams<T>) -> T {
    live_branches(p.message_bits, p) - count::<T>(p.m)
}

/// Expected hash calls of a decode: every branch alive entering round `i`
/// costs 2 calls in a data round and 1 in a checksum round (`B_0 = 1`).
pub fn computational_load<T: Real>(p: &ModelParams<T>) -> T {
    let b = p.data_bits();
    (1..=p.message_bits).fold(T::zero(), |acc, i| {
        let entering = if i == 1 {
            T::one()
        } else {
            live_branches(i - 1, p)
        };
        let calls = if i <= b { lit::<T>(2.0) } else { T::one() };
        acc + calls * entering
    })
}

/// Noise-plus-gap fraction at which one hallucination is expected,
/// `(1 / (2^b - m))^{1 / (L - a + 1)}`.
pub fn threshold_ng<T: Real>(m: u64, message_bits: u32, checksum_bits: u32, a_mode: ExponentMode) -> Result<T> {
    if m == 0 || checksum_bits >= message_bits || message_bits > 62 {
        return Err(Error::InvalidModel(format!(
            "threshold needs m >= 1 and k < L (m = {m}, L = {message_bits}, k = {checksum_bits})"
        )));
    }
    let b = message_bits - checksum_bits;
    if m >= 1 << b {
        return Err(Error::Domain(format!("m = {m} must be below 2^b = {}", 1u64 << b)));
    }
    let spare = count::<T>((1u64 << b) - m);
    let exponent = count::<T>(message_bits.into()) - a_mode.a::<T>(m) + T::one();
    Ok(spare.recip().powf(exponent.recip()))
}

/// `(m, C (n+g)_t(m) + Z(m))` for every `m`: marks in a codeword at the
/// hallucination threshold.
pub fn marks_threshold_curve<T: Real>(
    ms: impl IntoIterator<Item = u64>,
    message_bits: u32,
    checksum_bits: u32,
    codeword_len: usize,
    a_mode: ExponentMode,
) -> Result<Vec<(u64, T)>> {
    let c = count::<T>(codeword_len as u64);
    ms.into_iter()
        .map(|m| {
            let t = threshold_ng::<T>(m, message_bits, checksum_bits, a_mode)?;
            Ok((m, c * t + marks_expected(count::<T>(m), message_bits)))
        })
        .collect()
}

/// The `m` minimizing [`marks_threshold_curve`] over `ms` (first on ties).
pub fn marks_threshold_minimizer<T: Real>(
    ms: impl IntoIterator<Item = u64>,
    message_bits: u32,
    checksum_bits: u32,
    codeword_len: usize,
    a_mode: ExponentMode,
) -> Result<(u64, T)> {
    marks_threshold_curve::<T>(ms, message_bits, checksum_bits, codeword_len, a_mode)?
        .into_iter()
        .fold(None, |best: Option<(u64, T)>, cur| match best {
            Some(b) if b.1 <= cur.1 => Some(b),
            _ => Some(cur),
        })
        .ok_or(Error::EmptyInput)
}

/// Detection threshold `E_t = sqrt(2) σ erfinv(1 - 2 n_t) + μ` at which
/// Gaussian noise `N(μ, σ)` exceeds `E_t` with probability `n_t`.
pub fn signal_threshold<T: Real>(mu: T, sigma: T, n_t: T) -> Result<T> {
    if n_t.is_nan() || n_t <= T::zero() || n_t >= T::one() {
        return Err(Error::Domain(format!(
            "noise probability {n_t} must lie strictly between 0 and 1"
        )));
    }
    let z = erfinv(T::one() - lit::<T>(2.0) * n_t)?;
    Ok(T::SQRT_2() * sigma * z + mu)
}

/// `E_t / μ` needed to keep the false-mark rate at `(n+g)_t(m)`.
pub fn required_snr<T: Real>(
    sigma_over_mu: T,
    m: u64,
    message_bits: u32,
    checksum_bits: u32,
    a_mode: ExponentMode,
) -> Result<T> {
    let n_t = threshold_ng::<T>(m, message_bits, checksum_bits, a_mode)?;
    signal_threshold(T::one(), sigma_over_mu, n_t)
}
