//! Fixed-length codeword bit array.
//!
//! A codeword has `C = 2^W` positions; a set bit is a *mark*. Storage is a
//! packed `u64` block vector, bit `j` of the codeword living in bit `j % 64`
//! of block `j / 64`.
//!
//! The text form (`CCW v1`) is a header line followed by the bits as
//! lowercase hex, one digit per four positions, LSB-first within a digit:
//!
//! ```text
//! CCW v1 W=11 marks=10
//! 0000...
//! ```

use std::fmt;

use crate::error::{Error, Result};

const BLOCK: usize = 64;

/// Largest supported address width.
pub const MAX_WIDTH: u32 = 30;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    width: u32,
    blocks: Vec<u64>,
}

impl Codeword {
    /// All-zero codeword of length `2^width`.
    pub fn zeros(width: u32) -> Result<Self> {
        if !(2..=MAX_WIDTH).contains(&width) {
            return Err(Error::InvalidParams(format!(
                "codeword width {width} outside 2..={MAX_WIDTH}"
            )));
        }
        let len = 1usize << width;
        Ok(Self {
            width,
            blocks: vec![0; len.div_ceil(BLOCK)],
        })
    }

    /// All-one codeword of length `2^width`.
    pub fn ones(width: u32) -> Result<Self> {
        let mut cw = Self::zeros(width)?;
        cw.blocks.iter_mut().for_each(|b| *b = u64::MAX);
        cw.trim_tail();
        Ok(cw)
    }

    /// Builds a codeword from explicit bits; `bits.len()` must be a power of two.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let len = bits.len();
        if len < 4 || !len.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "codeword length {len} is not a power of two >= 4"
            )));
        }
        let mut cw = Self::zeros(len.trailing_zeros())?;
        for (j, _) in bits.iter().enumerate().filter(|(_, b)| **b) {
            cw.set(j);
        }
        Ok(cw)
    }

    /// Builds a codeword with marks at the given positions.
    pub fn from_marks(width: u32, marks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut cw = Self::zeros(width)?;
        for j in marks {
            if j >= cw.len() {
                return Err(Error::OutOfRange {
                    start: j,
                    len: 1,
                    codeword_len: cw.len(),
                });
            }
            cw.set(j);
        }
        Ok(cw)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Number of positions, `2^width`.
    pub fn len(&self) -> usize {
        1usize << self.width
    }

    /// Always false: a codeword has at least four positions.
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len());
        self.blocks[j / BLOCK] >> (j % BLOCK) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize) {
        debug_assert!(j < self.len());
        self.blocks[j / BLOCK] |= 1 << (j % BLOCK);
    }

    #[inline]
    pub fn clear(&mut self, j: usize) {
        debug_assert!(j < self.len());
        self.blocks[j / BLOCK] &= !(1 << (j % BLOCK));
    }

    #[inline]
    pub fn toggle(&mut self, j: usize) {
        debug_assert!(j < self.len());
        self.blocks[j / BLOCK] ^= 1 << (j % BLOCK);
    }

    /// Number of marks (set bits).
    pub fn mark_count(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Positions of all marks in ascending order.
    pub fn marks(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(i, &block)| {
            let mut rest = block;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * BLOCK + tz)
            })
        })
    }

    /// Clears `[start, start + len)`.
    pub fn clear_range(&mut self, start: usize, len: usize) -> Result<()> {
        self.check_range(start, len)?;
        for j in start..start + len {
            self.clear(j);
        }
        Ok(())
    }

    /// True when every mark of `other` is also a mark of `self`.
    pub fn covers(&self, other: &Codeword) -> bool {
        self.width == other.width
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| b & !a == 0)
    }

    /// Bitwise OR of `other` into `self`.
    pub fn union_with(&mut self, other: &Codeword) -> Result<()> {
        self.same_len(other)?;
        self.blocks
            .iter_mut()
            .zip(&other.blocks)
            .for_each(|(a, b)| *a |= b);
        Ok(())
    }

    /// Number of positions where the two codewords differ.
    pub fn hamming_distance(&self, other: &Codeword) -> Result<usize> {
        self.same_len(other)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub(crate) fn check_range(&self, start: usize, len: usize) -> Result<()> {
        let end = start.checked_add(len);
        if start >= self.len() && len > 0 || end.is_none_or(|e| e > self.len()) {
            return Err(Error::OutOfRange {
                start,
                len,
                codeword_len: self.len(),
            });
        }
        Ok(())
    }

    fn same_len(&self, other: &Codeword) -> Result<()> {
        if self.width != other.width {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(())
    }

    fn trim_tail(&mut self) {
        let rem = self.len() % BLOCK;
        if rem != 0 {
            let last = self.blocks.len() - 1;
            self.blocks[last] &= (1u64 << rem) - 1;
        }
    }

    /// Serializes to the `CCW v1` text format (header, hex body, trailing newline).
    pub fn to_ccw(&self) -> String {
        let digits = self.len() / 4;
        let mut out = format!("CCW v1 W={} marks={}\n", self.width, self.mark_count());
        out.reserve(digits + 1);
        for d in 0..digits {
            let nibble = (0..4).fold(0u32, |acc, k| acc | (self.get(4 * d + k) as u32) << k);
            out.push(char::from_digit(nibble, 16).unwrap());
        }
        out.push('\n');
        out
    }

    /// Parses the `CCW v1` text format. Whitespace inside the hex body is ignored.
    pub fn from_ccw(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing CCW header".into(),
        })?;
        let (width, marks) = parse_header(header)?;
        let mut cw = Self::zeros(width).map_err(|e| Error::Parse {
            line: 1,
            msg: e.to_string(),
        })?;
        let digits = cw.len() / 4;
        let mut d = 0usize;
        for (lineno, line) in lines.enumerate() {
            for ch in line.chars().filter(|c| !c.is_whitespace()) {
                let nibble = match ch {
                    '0'..='9' | 'a'..='f' => ch.to_digit(16).unwrap(),
                    _ => {
                        return Err(Error::Parse {
                            line: lineno + 2,
                            msg: format!("invalid hex digit {ch:?}"),
                        })
                    }
                };
                if d >= digits {
                    return Err(Error::Parse {
                        line: lineno + 2,
                        msg: format!("more than {digits} hex digits"),
                    });
                }
                for k in 0..4 {
                    if nibble >> k & 1 == 1 {
                        cw.set(4 * d + k);
                    }
                }
                d += 1;
            }
        }
        if d != digits {
            return Err(Error::Parse {
                line: 2,
                msg: format!("expected {digits} hex digits, found {d}"),
            });
        }
        if cw.mark_count() != marks {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "header declares {marks} marks but body has {}",
                    cw.mark_count()
                ),
            });
        }
        Ok(cw)
    }
}

fn parse_header(header: &str) -> Result<(u32, usize)> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let mut fields = header.split_whitespace();
    if fields.next() != Some("CCW") || fields.next() != Some("v1") {
        return Err(bad(format!("expected `CCW v1` header, got {header:?}")));
    }
    let mut width = None;
    let mut marks = None;
    for field in fields {
        match field.split_once('=') {
            Some(("W", v)) => width = v.parse::<u32>().ok(),
            Some(("marks", v)) => marks = v.parse::<usize>().ok(),
            _ => return Err(bad(format!("unexpected header field {field:?}"))),
        }
    }
    match (width, marks) {
        (Some(w), Some(m)) => Ok((w, m)),
        _ => Err(bad("header needs W=<int> and marks=<int>".into())),
    }
}

impl fmt::Debug for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Codeword")
            .field("width", &self.width)
            .field("marks", &self.mark_count())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_and_ones() {
        let z = Codeword::zeros(11).unwrap();
        assert_eq!(z.len(), 2048);
        assert_eq!(z.mark_count(), 0);
        let o = Codeword::ones(11).unwrap();
        assert_eq!(o.mark_count(), 2048);
        let small = Codeword::ones(3).unwrap();
        assert_eq!(small.mark_count(), 8);
    }

    #[test]
    fn marks_iterates_in_order() {
        let cw = Codeword::from_marks(8, [200, 3, 64, 63]).unwrap();
        assert_eq!(cw.marks().collect::<Vec<_>>(), vec![3, 63, 64, 200]);
    }

    #[test]
    fn hex_digit_layout_is_lsb_first() {
        // bit 0 -> digit 0 value 1; bit 5 -> digit 1 value 2
        let cw = Codeword::from_marks(3, [0, 5]).unwrap();
        assert_eq!(cw.to_ccw(), "CCW v1 W=3 marks=2\n12\n");
    }

    #[test]
    fn ccw_rejects_bad_input() {
        assert!(Codeword::from_ccw("").is_err());
        assert!(Codeword::from_ccw("CCW v2 W=3 marks=0\n00\n").is_err());
        assert!(Codeword::from_ccw("CCW v1 W=3 marks=1\n00\n").is_err());
        assert!(Codeword::from_ccw("CCW v1 W=3 marks=0\n000\n").is_err());
        assert!(Codeword::from_ccw("CCW v1 W=3 marks=0\n0g\n").is_err());
        assert!(Codeword::from_ccw("CCW v1 W=3 marks=0\n0\n").is_err());
        assert!(Codeword::from_ccw("CCW v1 W=3 marks=0\n0\n0\n").is_ok());
    }

    #[test]
    fn range_checks() {
        let mut cw = Codeword::ones(4).unwrap();
        assert!(cw.clear_range(0, 16).is_ok());
        assert_eq!(cw.mark_count(), 0);
        assert!(cw.clear_range(15, 2).is_err());
        assert!(cw.clear_range(16, 0).is_ok());
        assert!(cw.clear_range(17, 0).is_err());
    }

    #[test]
    fn covers_is_bitwise_superset() {
        let a = Codeword::from_marks(5, [1, 2, 3]).unwrap();
        let b = Codeword::from_marks(5, [1, 3]).unwrap();
        assert!(a.covers(&b));
        assert!(!b.covers(&a));
    }
}
