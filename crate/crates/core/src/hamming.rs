//! Interleaved extended Hamming(8,4) baseline.
//!
//! Each 8-bit message is split into two nibbles, each encoded as an
//! extended Hamming byte, giving a 16-bit word (low nibble in the low byte).
//! 128 words fill a 2048-bit frame of 16 sections of 128 bits. Section `s`
//! carries word bit `s / 2` for even `s` and `8 + (s - 1) / 2` for odd `s`,
//! so adjacent sections always belong to different Hamming bytes and any
//! gap spanning at most two sections costs each byte at most one bit.
//!
//! Byte layout: data `d0..d3` in bits 0-3, parity `p0..p2` in bits 4-6 and
//! the overall parity in bit 7, with `p0 = d0^d1^d3`, `p1 = d0^d2^d3`,
//! `p2 = d1^d2^d3`.

use crate::codeword::Codeword;
use crate::error::{Error, Result};

/// Message slots per frame.
pub const SLOTS: usize = 128;
/// Interleaver sections per frame.
pub const SECTIONS: usize = 16;
/// Frame width: `2^11 = SLOTS * SECTIONS` bits.
pub const FRAME_WIDTH: u32 = 11;

/// Outcome of decoding one Hamming byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    Corrected,
    Uncorrectable,
}

// syndrome (s0 | s1 << 1 | s2 << 2) -> bit position in error
const SYNDROME_POS: [u8; 8] = [u8::MAX, 4, 5, 0, 6, 1, 2, 3];

fn bit(x: u8, i: u32) -> u8 {
    x >> i & 1
}

/// Extended Hamming codeword of the low four bits of `nibble`.
pub fn encode(nibble: u8) -> u8 {
    debug_assert!(nibble < 16);
    let d = nibble & 0xF;
    let p0 = bit(d, 0) ^ bit(d, 1) ^ bit(d, 3);
    let p1 = bit(d, 0) ^ bit(d, 2) ^ bit(d, 3);
    let p2 = bit(d, 1) ^ bit(d, 2) ^ bit(d, 3);
    let seven = d | p0 << 4 | p1 << 5 | p2 << 6;
    seven | ((seven.count_ones() & 1) as u8) << 7
}

/// Corrects single-bit errors; double errors are reported and the data bits
/// are returned as received.
pub fn decode(byte: u8) -> (u8, Status) {
    let s0 = bit(byte, 4) ^ bit(byte, 0) ^ bit(byte, 1) ^ bit(byte, 3);
    let s1 = bit(byte, 5) ^ bit(byte, 0) ^ bit(byte, 2) ^ bit(byte, 3);
    let s2 = bit(byte, 6) ^ bit(byte, 1) ^ bit(byte, 2) ^ bit(byte, 3);
    let syndrome = s0 | s1 << 1 | s2 << 2;
    let odd = byte.count_ones() & 1 == 1;
    match (syndrome, odd) {
        (0, false) => (byte & 0xF, Status::Clean),
        (0, true) => (byte & 0xF, Status::Corrected),
        (s, true) => {
            let fixed = byte ^ 1 << SYNDROME_POS[s as usize];
            (fixed & 0xF, Status::Corrected)
        }
        (_, false) => (byte & 0xF, Status::Uncorrectable),
    }
}

/// 16-bit word of one message: low nibble's byte, then the high nibble's.
pub fn encode_word(message: u8) -> u16 {
    encode(message & 0xF) as u16 | (encode(message >> 4) as u16) << 8
}

/// Message from a word, with the worse of the two byte statuses.
pub fn decode_word(word: u16) -> (u8, Status) {
    let (lo, s_lo) = decode(word as u8);
    let (hi, s_hi) = decode((word >> 8) as u8);
    let status = match (s_lo, s_hi) {
        (Status::Uncorrectable, _) | (_, Status::Uncorrectable) => Status::Uncorrectable,
        (Status::Corrected, _) | (_, Status::Corrected) => Status::Corrected,
        _ => Status::Clean,
    };
    (lo | hi << 4, status)
}

/// Word bit carried by section `s`.
pub fn section_word_bit(s: usize) -> usize {
    if s % 2 == 0 {
        s / 2
    } else {
        8 + (s - 1) / 2
    }
}

/// Frame bit `s * 128 + w` holds bit `section_word_bit(s)` of word `w`.
pub fn interleave(words: &[u16]) -> Result<Codeword> {
    if words.len() != SLOTS {
        return Err(Error::LengthMismatch {
            expected: SLOTS,
            actual: words.len(),
        });
    }
    let mut frame = Codeword::zeros(FRAME_WIDTH)?;
    for s in 0..SECTIONS {
        let wb = section_word_bit(s);
        for (w, word) in words.iter().enumerate() {
            if word >> wb & 1 == 1 {
                frame.set(s * SLOTS + w);
            }
        }
    }
    Ok(frame)
}

pub fn deinterleave(frame: &Codeword) -> Result<Vec<u16>> {
    if frame.len() != SLOTS * SECTIONS {
        return Err(Error::LengthMismatch {
            expected: SLOTS * SECTIONS,
            actual: frame.len(),
        });
    }
    let mut words = vec![0u16; SLOTS];
    for s in 0..SECTIONS {
        let wb = section_word_bit(s);
        for (w, word) in words.iter_mut().enumerate() {
            if frame.get(s * SLOTS + w) {
                *word |= 1 << wb;
            }
        }
    }
    Ok(words)
}

/// Encodes up to 128 messages into a frame; unused slots are zero.
pub fn encode_frame(messages: &[u8]) -> Result<Codeword> {
    if messages.len() > SLOTS {
        return Err(Error::InvalidParams(format!(
            "{} messages exceed the {SLOTS} frame slots",
            messages.len()
        )));
    }
    let mut words = vec![0u16; SLOTS];
    for (slot, &msg) in words.iter_mut().zip(messages) {
        *slot = encode_word(msg);
    }
    interleave(&words)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HammingReport {
    /// Decoded message of every slot.
    pub decoded: Vec<u8>,
    pub statuses: Vec<Status>,
    /// Wrong messages among the genuine slots over the number of genuine slots.
    pub error_fraction: f64,
}

/// Decodes every slot and scores the first `genuine.len()` slots against
/// `genuine`.
pub fn decode_frame(frame: &Codeword, genuine: &[u8]) -> Result<HammingReport> {
    if genuine.len() > SLOTS {
        return Err(Error::InvalidParams(format!(
            "{} genuine messages exceed the {SLOTS} frame slots",
            genuine.len()
        )));
    }
    let (decoded, statuses): (Vec<u8>, Vec<Status>) =
        deinterleave(frame)?.into_iter().map(decode_word).unzip();
    let wrong = decoded.iter().zip(genuine).filter(|(d, g)| d != g).count();
    let error_fraction = if genuine.is_empty() {
        0.0
    } else {
        wrong as f64 / genuine.len() as f64
    };
    Ok(HammingReport {
        decoded,
        statuses,
        error_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_maps_to_zero() {
        assert_eq!(encode(0), 0);
        assert_eq!(encode(0xF), 0xFF);
    }

    #[test]
    fn linear() {
        for a in 0..16u8 {
            for b in 0..16u8 {
                assert_eq!(encode(a ^ b), encode(a) ^ encode(b));
            }
        }
    }

    #[test]
    fn minimum_distance_four() {
        for a in 0..16u8 {
            for b in (a + 1)..16 {
                assert!((encode(a) ^ encode(b)).count_ones() >= 4);
            }
        }
    }

    #[test]
    fn clean_single_double() {
        for x in 0..16u8 {
            let c = encode(x);
            assert_eq!(decode(c), (x, Status::Clean));
            for i in 0..8 {
                assert_eq!(decode(c ^ 1 << i), (x, Status::Corrected));
                for j in (i + 1)..8 {
                    let bad = c ^ 1 << i ^ 1 << j;
                    assert_eq!(decode(bad), (bad & 0xF, Status::Uncorrectable));
                }
            }
        }
    }

    #[test]
    fn section_map_alternates_blocks() {
        let bits: Vec<usize> = (0..SECTIONS).map(section_word_bit).collect();
        assert_eq!(bits, vec![0, 8, 1, 9, 2, 10, 3, 11, 4, 12, 5, 13, 6, 14, 7, 15]);
        for s in 0..SECTIONS - 1 {
            assert_ne!(bits[s] / 8, bits[s + 1] / 8);
        }
    }

    #[test]
    fn frame_round_trip() {
        let msgs: Vec<u8> = (0..10).map(|i| i * 23 + 7).collect();
        let frame = encode_frame(&msgs).unwrap();
        let r = decode_frame(&frame, &msgs).unwrap();
        assert_eq!(r.error_fraction, 0.0);
        assert_eq!(&r.decoded[..10], &msgs[..]);
        assert!(r.decoded[10..].iter().all(|&d| d == 0));
        assert!(encode_frame(&[0; 129]).is_err());
        assert!(interleave(&[0; 127]).is_err());
    }
}
