//! Concurrent-code encoder and tree decoder.
//!
//! A message of `L_d` data bits is extended with `k` zero checksum bits and
//! absorbed LSB-first into the hash; each of the `L = L_d + k` addresses
//! becomes a mark. Message sets are superimposed by OR.
//!
//! Decoding is a breadth-first walk of the prefix tree. Every live branch
//! carries its hash state; in data rounds it is extended with 0 and 1, in
//! checksum rounds with 0 only. A child survives when its address is marked
//! or lies inside a declared gap. Marks of encoded messages cannot be
//! removed by added noise, so the output always contains every encoded
//! message whose erased marks are covered by the gap mask.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use crate::codeword::Codeword;
use crate::error::{Error, Result};
use crate::model;
use crate::prbs::HashConfig;

/// Default number of data bits per message.
pub const DEFAULT_DATA_BITS: u32 = 8;
/// Default number of checksum bits per message.
pub const DEFAULT_CHECKSUM_BITS: u32 = 2;

/// A message value of at most `L_d` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageWord(u64);

impl MessageWord {
    pub fn new(value: u64, data_bits: u32) -> Result<Self> {
        if data_bits < 64 && value >> data_bits != 0 {
            return Err(Error::MessageOutOfRange {
                value,
                bits: data_bits,
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for MessageWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:02x}", self.0)
    }
}

/// Message geometry, hash wiring and the seeds messages are encoded under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecParams {
    data_bits: u32,
    checksum_bits: u32,
    hash: HashConfig,
    seeds: Vec<u64>,
}

impl CodecParams {
    /// Validated parameters. `seeds` must be nonempty, pairwise distinct and
    /// valid for the hash register; `data_bits + checksum_bits <= 64`.
    pub fn new(data_bits: u32, checksum_bits: u32, hash: HashConfig, seeds: Vec<u64>) -> Result<Self> {
        if data_bits == 0 {
            return Err(Error::InvalidParams("data_bits must be at least 1".into()));
        }
        if data_bits + checksum_bits > 64 {
            return Err(Error::InvalidParams(format!(
                "message length {} exceeds 64 bits",
                data_bits + checksum_bits
            )));
        }
        if seeds.is_empty() {
            return Err(Error::InvalidParams("at least one seed is required".into()));
        }
        let distinct: BTreeSet<_> = seeds.iter().collect();
        if distinct.len() != seeds.len() {
            return Err(Error::InvalidParams("seeds must be pairwise distinct".into()));
        }
        for &s in &seeds {
            hash.with_seed(s)?;
        }
        Ok(Self {
            data_bits,
            checksum_bits,
            hash,
            seeds,
        })
    }

    /// Parameters using `hash`'s own seed as the single encoding seed.
    pub fn with_hash(data_bits: u32, checksum_bits: u32, hash: HashConfig) -> Result<Self> {
        let seed = hash.seed();
        Self::new(data_bits, checksum_bits, hash, vec![seed])
    }

    /// Same geometry, different seed list.
    pub fn with_seeds(&self, seeds: Vec<u64>) -> Result<Self> {
        Self::new(self.data_bits, self.checksum_bits, self.hash.clone(), seeds)
    }

    pub fn data_bits(&self) -> u32 {
        self.data_bits
    }

    pub fn checksum_bits(&self) -> u32 {
        self.checksum_bits
    }

    /// Absorbed bits per message, `L = L_d + k`.
    pub fn message_bits(&self) -> u32 {
        self.data_bits + self.checksum_bits
    }

    pub fn hash(&self) -> &HashConfig {
        &self.hash
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    /// Address width `W`.
    pub fn width(&self) -> u32 {
        self.hash.width()
    }

    /// Codeword length `C = 2^W`.
    pub fn codeword_len(&self) -> usize {
        self.hash.address_space()
    }

    /// Number of distinct message values, `2^L_d`.
    pub fn message_space(&self) -> u64 {
        if self.data_bits >= 64 {
            u64::MAX
        } else {
            1 << self.data_bits
        }
    }

    pub fn message(&self, value: u64) -> Result<MessageWord> {
        MessageWord::new(value, self.data_bits)
    }

    fn hash_for(&self, seed: u64) -> Result<HashConfig> {
        self.hash.with_seed(seed)
    }
}

impl Default for CodecParams {
    fn default() -> Self {
        Self::with_hash(DEFAULT_DATA_BITS, DEFAULT_CHECKSUM_BITS, HashConfig::default()).unwrap()
    }
}

/// Mark addresses of one message under `seed`: the hash of every prefix of
/// `(d_0, …, d_{L_d-1}, 0^k)`, `d_0` being the LSB.
pub fn encode_message(params: &CodecParams, msg: MessageWord, seed: u64) -> Result<Vec<usize>> {
    let hash = params.hash_for(seed)?;
    let mut state = hash.init();
    Ok((0..params.message_bits())
        .map(|i| {
            let bit = i < params.data_bits && msg.value() >> i & 1 == 1;
            let (next, addr) = hash.absorb(state, bit);
            state = next;
            addr
        })
        .collect())
}

/// OR-superposition of every message under every seed of `params`.
pub fn encode_set<'a>(
    params: &CodecParams,
    msgs: impl IntoIterator<Item = &'a MessageWord>,
) -> Result<Codeword> {
    let mut cw = Codeword::zeros(params.width())?;
    let msgs: Vec<&MessageWord> = msgs.into_iter().collect();
    for &seed in params.seeds() {
        for msg in &msgs {
            for addr in encode_message(params, **msg, seed)? {
                cw.set(addr);
            }
        }
    }
    Ok(cw)
}

/// Half-open span `[start, start + len)` of codeword positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn contains(&self, j: usize) -> bool {
        (self.start..self.end()).contains(&j)
    }
}

/// Sorted, non-overlapping erasure intervals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GapMask {
    intervals: Vec<Interval>,
}

impl GapMask {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validated mask; intervals must be sorted, non-empty and disjoint.
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if let Some(iv) = intervals.iter().find(|iv| iv.len == 0) {
            return Err(Error::InvalidGapMask(format!(
                "interval at {} has zero length",
                iv.start
            )));
        }
        for pair in intervals.windows(2) {
            if pair[1].start < pair[0].end() {
                return Err(Error::InvalidGapMask(format!(
                    "intervals at {} and {} overlap or are unsorted",
                    pair[0].start, pair[1].start
                )));
            }
        }
        Ok(Self { intervals })
    }

    /// Mask with a single interval (empty mask when `len == 0`).
    pub fn single(start: usize, len: usize) -> Self {
        if len == 0 {
            return Self::empty();
        }
        Self {
            intervals: vec![Interval { start, len }],
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total number of covered positions.
    pub fn covered(&self) -> usize {
        self.intervals.iter().map(|iv| iv.len).sum()
    }

    pub fn contains(&self, j: usize) -> bool {
        let idx = self.intervals.partition_point(|iv| iv.end() <= j);
        self.intervals.get(idx).is_some_and(|iv| iv.contains(j))
    }

    /// True when every interval of `other` lies inside some interval of `self`.
    pub fn covers(&self, other: &GapMask) -> bool {
        other.intervals.iter().all(|iv| {
            let idx = self.intervals.partition_point(|s| s.end() <= iv.start);
            self.intervals
                .get(idx)
                .is_some_and(|s| s.start <= iv.start && iv.end() <= s.end())
        })
    }

    /// Checks every interval against a codeword length.
    pub fn check_len(&self, codeword_len: usize) -> Result<()> {
        match self.intervals.last() {
            Some(iv) if iv.end() > codeword_len => Err(Error::OutOfRange {
                start: iv.start,
                len: iv.len,
                codeword_len,
            }),
            _ => Ok(()),
        }
    }
}

/// Every maximal run of zeros of length at least `min_gap`. Runs do not wrap.
pub fn detect_gaps(codeword: &Codeword, min_gap: usize) -> GapMask {
    let min_gap = min_gap.max(1);
    let mut intervals = Vec::new();
    let mut prev_end = 0usize;
    for mark in codeword.marks().chain(std::iter::once(codeword.len())) {
        let run = mark - prev_end;
        if run >= min_gap {
            intervals.push(Interval {
                start: prev_end,
                len: run,
            });
        }
        prev_end = mark + 1;
    }
    GapMask { intervals }
}

/// Smallest block length `E` whose chance of arising naturally between the
/// marks of `m_min` messages is at most `p_max`; `C` when none is.
pub fn gap_threshold(m_min: u64, codeword_len: usize, message_bits: u32, p_max: f64) -> Result<usize> {
    if m_min == 0 {
        return Err(Error::Domain("m_min must be at least 1".into()));
    }
    if !(p_max > 0.0 && p_max < 1.0) {
        return Err(Error::Domain(format!("p_max {p_max} outside (0, 1)")));
    }
    Ok((1..codeword_len)
        .find(|&e| {
            model::gap_block_probability::<f64>(m_min, e, codeword_len, message_bits) <= p_max
        })
        .unwrap_or(codeword_len))
}

/// Decode output for one encoding seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedDecode {
    pub seed: u64,
    /// Decoded messages, ascending.
    pub messages: Vec<MessageWord>,
    /// Live branches after each round `1..=L`.
    pub branches_per_round: Vec<usize>,
    pub hash_calls: u64,
    /// Child branches kept only because their address was inside a gap.
    pub gap_retained: u64,
    /// Decoded messages whose path touched at least one gap address.
    pub gap_assisted: Vec<MessageWord>,
}

/// Result of [`decode`].
#[derive(Debug, Clone)]
pub struct DecodeReport {
    /// Union of the per-seed message sets, ascending.
    pub messages: Vec<MessageWord>,
    /// Live branches per round, summed over seeds.
    pub branches_per_round: Vec<usize>,
    /// Hash evaluations, summed over seeds.
    pub hash_calls: u64,
    pub gaps: GapMask,
    pub duration: Duration,
    pub per_seed: Vec<SeedDecode>,
}

impl DecodeReport {
    /// Messages decoded under every seed.
    pub fn intersection(&self) -> Vec<MessageWord> {
        let mut sets = self
            .per_seed
            .iter()
            .map(|s| s.messages.iter().copied().collect::<BTreeSet<_>>());
        let first = sets.next().unwrap_or_default();
        sets.fold(first, |acc, s| &acc & &s).into_iter().collect()
    }

    pub fn contains(&self, msg: MessageWord) -> bool {
        self.messages.binary_search(&msg).is_ok()
    }
}

#[derive(Clone, Copy)]
struct Branch {
    value: u64,
    state: crate::prbs::HashState,
    via_gap: bool,
}

/// Tree decode of `received`, tolerating marks missing inside `gaps`.
pub fn decode(params: &CodecParams, received: &Codeword, gaps: Option<&GapMask>) -> Result<DecodeReport> {
    if received.len() != params.codeword_len() {
        return Err(Error::LengthMismatch {
            expected: params.codeword_len(),
            actual: received.len(),
        });
    }
    let gaps = gaps.cloned().unwrap_or_default();
    gaps.check_len(received.len())?;

    let started = Instant::now();
    let per_seed = params
        .seeds()
        .iter()
        .map(|&seed| decode_seed(params, seed, received, &gaps))
        .collect::<Result<Vec<_>>>()?;

    let messages: BTreeSet<MessageWord> = per_seed
        .iter()
        .flat_map(|s| s.messages.iter().copied())
        .collect();
    let rounds = params.message_bits() as usize;
    let branches_per_round = (0..rounds)
        .map(|i| per_seed.iter().map(|s| s.branches_per_round[i]).sum())
        .collect();
    Ok(DecodeReport {
        messages: messages.into_iter().collect(),
        branches_per_round,
        hash_calls: per_seed.iter().map(|s| s.hash_calls).sum(),
        gaps,
        duration: started.elapsed(),
        per_seed,
    })
}

fn decode_seed(params: &CodecParams, seed: u64, received: &Codeword, gaps: &GapMask) -> Result<SeedDecode> {
    let hash = params.hash_for(seed)?;
    let mut frontier = vec![Branch {
        value: 0,
        state: hash.init(),
        via_gap: false,
    }];
    let mut branches_per_round = Vec::with_capacity(params.message_bits() as usize);
    let mut hash_calls = 0u64;
    let mut gap_retained = 0u64;

    for round in 0..params.message_bits() {
        let extensions: &[bool] = if round < params.data_bits() {
            &[false, true]
        } else {
            &[false]
        };
        let mut next = Vec::with_capacity(frontier.len() * extensions.len());
        for branch in &frontier {
            for &bit in extensions {
                hash_calls += 1;
                let (state, addr) = hash.absorb(branch.state, bit);
                let marked = received.get(addr);
                let in_gap = !marked && gaps.contains(addr);
                if marked || in_gap {
                    gap_retained += in_gap as u64;
                    next.push(Branch {
                        value: branch.value | (bit as u64) << round,
                        state,
                        via_gap: branch.via_gap || in_gap,
                    });
                }
            }
        }
        branches_per_round.push(next.len());
        frontier = next;
    }

    let mut messages: Vec<MessageWord> = frontier.iter().map(|b| MessageWord(b.value)).collect();
    messages.sort_unstable();
    messages.dedup();
    let mut gap_assisted: Vec<MessageWord> = frontier
        .iter()
        .filter(|b| b.via_gap)
        .map(|b| MessageWord(b.value))
        .collect();
    gap_assisted.sort_unstable();
    gap_assisted.dedup();
    Ok(SeedDecode {
        seed,
        messages,
        branches_per_round,
        hash_calls,
        gap_retained,
        gap_assisted,
    })
}

/// Number of decoded messages that were never encoded.
pub fn count_hallucinations(report: &DecodeReport, truth: &[MessageWord]) -> usize {
    let truth: BTreeSet<_> = truth.iter().collect();
    report.messages.iter().filter(|m| !truth.contains(m)).count()
}

/// Number of `truth` messages missing from the report.
pub fn count_missing(report: &DecodeReport, truth: &[MessageWord]) -> usize {
    truth.iter().filter(|m| !report.contains(**m)).count()
}
