//! Monte-Carlo sweeps and model tables, emitted as CSV.
//!
//! Every trial draws from its own stream seeded with `master_seed ^ trial`,
//! so the same trial index sees the same message set at every grid point.
//! Trials run in parallel and are reduced in trial order; a table is a pure
//! function of its [`ExperimentSpec`].

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::channel::{self, RngStream};
use crate::codec::{self, CodecParams, GapMask, MessageWord};
use crate::codeword::Codeword;
use crate::error::{Error, Result};
use crate::hamming;
use crate::model::{self, ExponentMode, ModelParams};

/// Gap detection threshold used when none is given: the run length that 5
/// messages leave empty by chance with probability 2%.
pub const DEFAULT_GAP_M_MIN: u64 = 5;
pub const DEFAULT_GAP_P_MAX: f64 = 0.02;

/// Seeds used by multi-seed runs, in order; runs with `k` seeds take the
/// first `k`. Picked with [`run_seed_screen`] paired against seed 1.
pub const DEFAULT_MULTISEED_SEEDS: [u64; 4] = [0x001, 0x17e, 0x1da, 0x1fd];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    NoiseSweep,
    GapSweep,
    MarksVsMessages,
    BranchProfile,
    ModelCurve,
    HammingCompare,
    Multiseed,
    SeedScreen,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        Self::NoiseSweep,
        Self::GapSweep,
        Self::MarksVsMessages,
        Self::BranchProfile,
        Self::ModelCurve,
        Self::HammingCompare,
        Self::Multiseed,
        Self::SeedScreen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::NoiseSweep => "noise_sweep",
            Self::GapSweep => "gap_sweep",
            Self::MarksVsMessages => "marks_vs_messages",
            Self::BranchProfile => "branch_profile",
            Self::ModelCurve => "model_curve",
            Self::HammingCompare => "hamming_compare",
            Self::Multiseed => "multiseed",
            Self::SeedScreen => "seed_screen",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Experiment(format!("unknown experiment kind {s:?}")))
    }
}

/// Where a burst erasure is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapPosition {
    /// Uniform over valid starts, per trial.
    #[default]
    Random,
    Fixed(usize),
}

impl fmt::Display for GapPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapPosition::Random => f.write_str("random"),
            GapPosition::Fixed(s) => write!(f, "{s}"),
        }
    }
}

/// A sweep: its kind, codec, grid and Monte-Carlo settings.
///
/// The grid's meaning depends on the kind: noise level in dB
/// (`noise_sweep`, and the noise half of `hamming_compare`), gap fraction
/// (`gap_sweep`), message count (`marks_vs_messages`, `model_curve`),
/// noise fraction (`branch_profile`), number of seeds (`multiseed`) or
/// candidate seed (`seed_screen`).
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub codec: CodecParams,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    /// Messages encoded per trial.
    pub messages: usize,
    /// Gap detection threshold; `None` uses [`default_min_gap`].
    pub min_gap: Option<usize>,
    pub gap_position: GapPosition,
    /// Gap fractions for the gap half of `hamming_compare`.
    pub gap_grid: Vec<f64>,
    pub a_mode: ExponentMode,
    /// Codeword length used by `model_curve`.
    pub model_codeword_len: usize,
    /// `seed_screen`: also encode under this seed and require both decodes exact.
    pub partner_seed: Option<u64>,
}

/// `start, start + step, …` up to `stop` inclusive, rounded to 1e-9.
pub fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

impl ExperimentSpec {
    /// Defaults for `kind` with the default codec.
    pub fn new(kind: ExperimentKind) -> Self {
        let (grid, messages) = match kind {
            ExperimentKind::NoiseSweep => (range(0.0, 22.0, 1.0), 10),
            ExperimentKind::GapSweep => (range(0.0, 0.6, 0.05), 30),
            ExperimentKind::MarksVsMessages => {
                let mut g = vec![1.0];
                g.extend(range(10.0, 100.0, 10.0));
                (g, 0)
            }
            ExperimentKind::BranchProfile => (vec![0.1, 0.25, 0.35, 0.45], 32),
            ExperimentKind::ModelCurve => (range(1.0, 100.0, 1.0), 0),
            ExperimentKind::HammingCompare => (range(0.0, 20.0, 1.0), 10),
            ExperimentKind::Multiseed => (vec![1.0, 2.0, 3.0, 4.0], 10),
            ExperimentKind::SeedScreen => (range(1.0, 2047.0, 1.0), 80),
        };
        let codec = if kind == ExperimentKind::Multiseed {
            CodecParams::default()
                .with_seeds(DEFAULT_MULTISEED_SEEDS.to_vec())
                .unwrap()
        } else {
            CodecParams::default()
        };
        Self {
            kind,
            codec,
            grid,
            trials: 100,
            master_seed: 0x5EED,
            messages,
            min_gap: None,
            gap_position: GapPosition::Random,
            gap_grid: range(0.0, 0.5, 0.025),
            a_mode: ExponentMode::Floor,
            model_codeword_len: 1024,
            partner_seed: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Experiment(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if self.grid.iter().any(|x| !x.is_finite()) {
            return bad("grid values must be finite".into());
        }
        if self.messages as u64 > self.codec.message_space() {
            return bad(format!(
                "{} messages exceed the {}-value message space",
                self.messages,
                self.codec.message_space()
            ));
        }
        if self.codec.data_bits() > 32 {
            return bad("experiments support at most 32 data bits".into());
        }
        Ok(())
    }

    /// Detection threshold in effect.
    pub fn effective_min_gap(&self) -> Result<usize> {
        match self.min_gap {
            Some(g) => Ok(g),
            None => default_min_gap(&self.codec),
        }
    }

    fn expect(&self, kind: ExperimentKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Experiment(format!(
                "spec is for {} but {} was requested",
                self.kind, kind
            )));
        }
        self.validate()
    }

    fn header(&self) -> Vec<String> {
        let c = &self.codec;
        let h = c.hash();
        let list = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
        let mut out = vec![
            format!("experiment={}", self.kind),
            format!(
                "data_bits={} checksum_bits={} width={} codeword_len={} taps={:?} clocks_per_bit={}",
                c.data_bits(),
                c.checksum_bits(),
                c.width(),
                c.codeword_len(),
                h.taps(),
                h.clocks_per_bit()
            ),
            format!(
                "seeds={}",
                c.seeds()
                    .iter()
                    .map(|s| format!("{s:#05x}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            format!(
                "trials={} master_seed={} rng={} messages={}",
                self.trials,
                self.master_seed,
                RngStream::ALGORITHM,
                self.messages
            ),
            format!("grid={}", list(&self.grid)),
        ];
        match self.kind {
            ExperimentKind::GapSweep => out.push(format!(
                "min_gap={} gap_position={} a_mode={:?}",
                self.effective_min_gap().unwrap_or(0),
                self.gap_position,
                self.a_mode
            )),
            ExperimentKind::HammingCompare => out.push(format!(
                "gap_grid={} gap_position={}",
                list(&self.gap_grid),
                self.gap_position
            )),
            ExperimentKind::ModelCurve => out.push(format!(
                "model_codeword_len={} a_mode={:?}",
                self.model_codeword_len, self.a_mode
            )),
            ExperimentKind::BranchProfile => out.push(format!("a_mode={:?}", self.a_mode)),
            ExperimentKind::SeedScreen => out.push(format!(
                "partner_seed={}",
                self.partner_seed
                    .map_or("none".to_string(), |s| format!("{s:#05x}"))
            )),
            _ => {}
        }
        out
    }
}

/// `gap_threshold(5, C, L, 0.02)` for `params`.
pub fn default_min_gap(params: &CodecParams) -> Result<usize> {
    codec::gap_threshold(
        DEFAULT_GAP_M_MIN,
        params.codeword_len(),
        params.message_bits(),
        DEFAULT_GAP_P_MAX,
    )
}

/// Comment header, column names and string cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(comments: Vec<String>, columns: &[&str]) -> Self {
        Self {
            comments,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|x| num(*x)).collect());
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of column `name`.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .column_index(name)
            .ok_or_else(|| Error::Experiment(format!("no column {name:?}")))?;
        self.rows
            .iter()
            .map(|r| {
                r[idx]
                    .parse::<f64>()
                    .map_err(|_| Error::Experiment(format!("cell {:?} in {name} is not numeric", r[idx])))
            })
            .collect()
    }

    /// Writes `# ` comment lines, then the header row and data rows.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for c in &self.comments {
            writeln!(w, "# {c}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Shortest round-trip text of `x`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Sample mean and standard deviation (`n - 1` denominator; 0 for one sample).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `m` distinct uniformly random messages, ascending.
pub fn random_messages(params: &CodecParams, m: usize, rng: &mut RngStream) -> Result<Vec<MessageWord>> {
    let space = params.message_space();
    if m as u64 > space {
        return Err(Error::Experiment(format!(
            "cannot draw {m} distinct messages from {space}"
        )));
    }
    let mut out: Vec<MessageWord> = index::sample(rng.rng(), space as usize, m)
        .into_iter()
        .map(|v| params.message(v as u64))
        .collect::<Result<_>>()?;
    out.sort_unstable();
    Ok(out)
}

fn run_trials<R: Send>(
    trials: usize,
    master: u64,
    f: impl Fn(&mut RngStream) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut RngStream::for_trial(master, t as u64)))
        .collect()
}

fn gap_start(position: GapPosition, len: usize, codeword_len: usize, rng: &mut RngStream) -> Result<usize> {
    match position {
        GapPosition::Random => Ok(rng.rng().random_range(0..=codeword_len - len.max(1))),
        GapPosition::Fixed(s) if s + len <= codeword_len && s < codeword_len => Ok(s),
        GapPosition::Fixed(s) => Err(Error::OutOfRange {
            start: s,
            len,
            codeword_len,
        }),
    }
}

fn grid_count(x: f64, what: &str) -> Result<u64> {
    if x < 0.0 || x.fract() != 0.0 {
        return Err(Error::Experiment(format!(
            "{what} grid value {x} is not a nonnegative integer"
        )));
    }
    Ok(x as u64)
}

/// Dispatches on `spec.kind`.
pub fn run(spec: &ExperimentSpec) -> Result<CsvTable> {
    match spec.kind {
        ExperimentKind::NoiseSweep => run_noise_sweep(spec),
        ExperimentKind::GapSweep => run_gap_sweep(spec),
        ExperimentKind::MarksVsMessages => run_marks_vs_messages(spec),
        ExperimentKind::BranchProfile => run_branch_profile(spec),
        ExperimentKind::ModelCurve => run_model_curve(spec),
        ExperimentKind::HammingCompare => run_hamming_compare(spec),
        ExperimentKind::Multiseed => run_multiseed(spec),
        ExperimentKind::SeedScreen => run_seed_screen(spec),
    }
}

struct TrialOutcome {
    hallucinations: usize,
    missing: usize,
    hash_calls: u64,
}

/// Hallucinations versus random OR-noise in dB (0 dB = `L` marks).
pub fn run_noise_sweep(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::NoiseSweep)?;
    let params = &spec.codec;
    let mut table = CsvTable::new(
        spec.header(),
        &[
            "noise_db",
            "noise_marks",
            "mean_hallucinations",
            "sd",
            "mean_hash_calls",
            "genuine_recovered_fraction",
        ],
    );
    for &db in &spec.grid {
        let marks = channel::db_to_marks(db, params.message_bits() as usize);
        let outcomes = run_trials(spec.trials, spec.master_seed, |rng| {
            let truth = random_messages(params, spec.messages, rng)?;
            let clean = codec::encode_set(params, &truth)?;
            let noisy = channel::add_random_marks(&clean, marks, rng)?;
            let report = codec::decode(params, &noisy, None)?;
            Ok(TrialOutcome {
                hallucinations: codec::count_hallucinations(&report, &truth),
                missing: codec::count_missing(&report, &truth),
                hash_calls: report.hash_calls,
            })
        })?;
        let (mean, sd) = mean_sd(&outcomes.iter().map(|o| o.hallucinations as f64).collect::<Vec<_>>());
        let calls = outcomes.iter().map(|o| o.hash_calls as f64).sum::<f64>() / spec.trials as f64;
        table.push_nums(&[
            db,
            marks as f64,
            mean,
            sd,
            calls,
            recovered_fraction(&outcomes, spec.messages),
        ]);
    }
    Ok(table)
}

fn recovered_fraction(outcomes: &[TrialOutcome], messages: usize) -> f64 {
    let total = outcomes.len() * messages;
    if total == 0 {
        return 1.0;
    }
    let missing: usize = outcomes.iter().map(|o| o.missing).sum();
    1.0 - missing as f64 / total as f64
}

/// Hallucinations versus burst-erasure size, decoding with detected gaps.
pub fn run_gap_sweep(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::GapSweep)?;
    let params = &spec.codec;
    let c = params.codeword_len();
    let min_gap = spec.effective_min_gap()?;
    let mut table = CsvTable::new(
        spec.header(),
        &[
            "gap_frac",
            "gap_len",
            "mean_hallucinations",
            "sd",
            "zero_hallucination_fraction",
            "predicted_h",
            "genuine_recovered_fraction",
            "gap_detected_fraction",
        ],
    );
    for &frac in &spec.grid {
        let len = channel::gap_len(frac, c)?;
        let detected_flags = run_trials(spec.trials, spec.master_seed, |rng| {
            let truth = random_messages(params, spec.messages, rng)?;
            let clean = codec::encode_set(params, &truth)?;
            let start = gap_start(spec.gap_position, len, c, rng)?;
            let received = channel::cut_gap(&clean, start, len)?;
            let gaps = codec::detect_gaps(&received, min_gap);
            let detected = len == 0 || gaps.covers(&GapMask::single(start, len));
            let report = codec::decode(params, &received, Some(&gaps))?;
            Ok((
                TrialOutcome {
                    hallucinations: codec::count_hallucinations(&report, &truth),
                    missing: codec::count_missing(&report, &truth),
                    hash_calls: report.hash_calls,
                },
                detected,
            ))
        })?;
        let (outcomes, detected): (Vec<_>, Vec<_>) = detected_flags.into_iter().unzip();
        let h: Vec<f64> = outcomes.iter().map(|o| o.hallucinations as f64).collect();
        let (mean, sd) = mean_sd(&h);
        let zero = h.iter().filter(|&&x| x == 0.0).count() as f64 / h.len() as f64;
        let predicted = predicted_gap_hallucinations(params, spec.messages as u64, frac, spec.a_mode)?;
        let detected = detected.iter().filter(|&&d| d).count() as f64 / detected.len() as f64;
        table.push_nums(&[
            frac,
            len as f64,
            mean,
            sd,
            zero,
            predicted,
            recovered_fraction(&outcomes, spec.messages),
            detected,
        ]);
    }
    Ok(table)
}

fn predicted_gap_hallucinations(params: &CodecParams, m: u64, frac: f64, a_mode: ExponentMode) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    let p = ModelParams::<f64>::new(m, params.message_bits(), params.checksum_bits(), params.codeword_len())?
        .with_gap(frac)?
        .with_a_mode(a_mode);
    Ok(model::expected_hallucinations(&p))
}

/// Least-squares cubic `y = c0 + c1 x + c2 x^2 + c3 x^3`.
pub fn fit_cubic(xs: &[f64], ys: &[f64]) -> Result<[f64; 4]> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 4 {
        return Err(Error::Experiment("a cubic fit needs at least 4 points".into()));
    }
    // scale x into [-1, 1]-ish for conditioning
    let scale = xs.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let a = DMatrix::from_fn(xs.len(), 4, |r, c| (xs[r] / scale).powi(c as i32));
    let b = DVector::from_column_slice(ys);
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Experiment(format!("cubic fit failed: {e}")))?;
    Ok([
        sol[0],
        sol[1] / scale,
        sol[2] / scale.powi(2),
        sol[3] / scale.powi(3),
    ])
}

pub fn eval_cubic(c: &[f64; 4], x: f64) -> f64 {
    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}

/// Measured distinct marks versus message count, beside `Z(m)`, plus a cubic
/// fit of `m` against the measured mark count for inversion.
pub fn run_marks_vs_messages(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::MarksVsMessages)?;
    let params = &spec.codec;
    let mut stats = Vec::with_capacity(spec.grid.len());
    for &mx in &spec.grid {
        let m = grid_count(mx, "message count")?;
        let marks = run_trials(spec.trials, spec.master_seed, |rng| {
            let truth = random_messages(params, m as usize, rng)?;
            Ok(codec::encode_set(params, &truth)?.mark_count() as f64)
        })?;
        let (mean, sd) = mean_sd(&marks);
        stats.push((m, mean, sd));
    }
    let fit = {
        let xs: Vec<f64> = stats.iter().map(|s| s.1).collect();
        let ys: Vec<f64> = stats.iter().map(|s| s.0 as f64).collect();
        fit_cubic(&xs, &ys).ok()
    };
    let mut header = spec.header();
    header.push(match &fit {
        Some(c) => format!(
            "cubic m(marks) = {} + {} x + {} x^2 + {} x^3",
            num(c[0]),
            num(c[1]),
            num(c[2]),
            num(c[3])
        ),
        None => "cubic fit unavailable (fewer than 4 grid points)".into(),
    });
    let mut table = CsvTable::new(header, &["m", "mean_marks", "sd", "z_eq2", "m_from_fit"]);
    for (m, mean, sd) in stats {
        let z = model::marks_expected(m as f64, params.message_bits());
        let fitted = fit.map_or(f64::NAN, |c| eval_cubic(&c, mean));
        table.push_nums(&[m as f64, mean, sd, z, fitted]);
    }
    Ok(table)
}

/// Measured live branches per decoding round beside the model, for each
/// noise fraction in the grid.
pub fn run_branch_profile(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::BranchProfile)?;
    let params = &spec.codec;
    let c = params.codeword_len();
    let rounds = params.message_bits() as usize;
    let mut table = CsvTable::new(
        spec.header(),
        &[
            "noise_frac",
            "noise_marks",
            "round",
            "mean_branches",
            "sd",
            "predicted_branches",
        ],
    );
    for &n in &spec.grid {
        if !(0.0..=1.0).contains(&n) {
            return Err(Error::Experiment(format!("noise fraction {n} outside [0, 1]")));
        }
        let marks = (n * c as f64).round() as usize;
        let profiles = run_trials(spec.trials, spec.master_seed, |rng| {
            let truth = random_messages(params, spec.messages, rng)?;
            let clean = codec::encode_set(params, &truth)?;
            let noisy = channel::add_random_marks(&clean, marks, rng)?;
            Ok(codec::decode(params, &noisy, None)?.branches_per_round)
        })?;
        let model_p = if spec.messages > 0 {
            Some(
                ModelParams::<f64>::new(
                    spec.messages as u64,
                    params.message_bits(),
                    params.checksum_bits(),
                    c,
                )?
                .with_noise(n)?
                .with_a_mode(spec.a_mode),
            )
        } else {
            None
        };
        for r in 0..rounds {
            let xs: Vec<f64> = profiles.iter().map(|p| p[r] as f64).collect();
            let (mean, sd) = mean_sd(&xs);
            let predicted = model_p
                .as_ref()
                .map_or(0.0, |p| model::live_branches(r as u32 + 1, p));
            table.push_nums(&[n, marks as f64, (r + 1) as f64, mean, sd, predicted]);
        }
    }
    Ok(table)
}

/// Hallucination threshold and the marks-at-threshold curve over `m`.
pub fn run_model_curve(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::ModelCurve)?;
    let p = &spec.codec;
    let mut table = CsvTable::new(
        spec.header(),
        &["m", "threshold_ng", "marks_threshold", "z_eq2", "required_snr_sigma1"],
    );
    for &mx in &spec.grid {
        let m = grid_count(mx, "message count")?;
        let t = model::threshold_ng::<f64>(m, p.message_bits(), p.checksum_bits(), spec.a_mode)?;
        let z = model::marks_expected(m as f64, p.message_bits());
        let snr = model::required_snr(1.0, m, p.message_bits(), p.checksum_bits(), spec.a_mode)?;
        table.push_nums(&[m as f64, t, spec.model_codeword_len as f64 * t + z, z, snr]);
    }
    Ok(table)
}

/// Interleaved Hamming error fraction under symmetric bit flips (grid, dB)
/// and zeroed bursts (`gap_grid`, fraction of the frame).
pub fn run_hamming_compare(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::HammingCompare)?;
    if spec.messages > hamming::SLOTS {
        return Err(Error::Experiment(format!(
            "{} messages exceed the {} Hamming slots",
            spec.messages,
            hamming::SLOTS
        )));
    }
    let params = &spec.codec;
    let frame_len = hamming::SLOTS * hamming::SECTIONS;
    let mut table = CsvTable::new(
        spec.header(),
        &[
            "channel",
            "level",
            "corrupted_bits",
            "mean_error_fraction",
            "sd",
            "trials_with_errors",
        ],
    );
    let byte_messages = |rng: &mut RngStream| -> Result<Vec<u8>> {
        Ok(index::sample(rng.rng(), 256, spec.messages)
            .into_iter()
            .map(|v| v as u8)
            .collect())
    };
    let emit = |table: &mut CsvTable, label: &str, level: f64, bits: usize, fr: Vec<f64>| {
        let (mean, sd) = mean_sd(&fr);
        let with = fr.iter().filter(|&&x| x > 0.0).count();
        let mut row = vec![label.to_string()];
        row.extend([level, bits as f64, mean, sd, with as f64].iter().map(|x| num(*x)));
        table.push(row);
    };
    for &db in &spec.grid {
        let flips = channel::db_to_marks(db, params.message_bits() as usize);
        let fr = run_trials(spec.trials, spec.master_seed, |rng| {
            let msgs = byte_messages(rng)?;
            let frame = hamming::encode_frame(&msgs)?;
            let noisy = channel::flip_random_bits(&frame, flips, rng)?;
            Ok(hamming::decode_frame(&noisy, &msgs)?.error_fraction)
        })?;
        emit(&mut table, "bsc_flip_db", db, flips, fr);
    }
    for &frac in &spec.gap_grid {
        let len = channel::gap_len(frac, frame_len)?;
        let fr = run_trials(spec.trials, spec.master_seed, |rng| {
            let msgs = byte_messages(rng)?;
            let frame = hamming::encode_frame(&msgs)?;
            let start = gap_start(spec.gap_position, len, frame_len, rng)?;
            let cut = channel::cut_gap(&frame, start, len)?;
            Ok(hamming::decode_frame(&cut, &msgs)?.error_fraction)
        })?;
        emit(&mut table, "gap_zero_frac", frac, len, fr);
    }
    Ok(table)
}

/// Per-seed decode correctness when the same list is encoded under the
/// first `k` seeds of the codec, for each `k` in the grid.
pub fn run_multiseed(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::Multiseed)?;
    let mut table = CsvTable::new(
        spec.header(),
        &[
            "seeds",
            "exact_fraction",
            "trials_with_hallucinations",
            "mean_union_hallucinations",
            "sd",
            "mean_intersection_hallucinations",
            "genuine_recovered_fraction",
        ],
    );
    for &kx in &spec.grid {
        let k = grid_count(kx, "seed count")? as usize;
        if k == 0 || k > spec.codec.seeds().len() {
            return Err(Error::Experiment(format!(
                "seed count {k} outside 1..={}",
                spec.codec.seeds().len()
            )));
        }
        let params = spec.codec.with_seeds(spec.codec.seeds()[..k].to_vec())?;
        let rows = run_trials(spec.trials, spec.master_seed, |rng| {
            let truth = random_messages(&params, spec.messages, rng)?;
            let cw = codec::encode_set(&params, &truth)?;
            let report = codec::decode(&params, &cw, None)?;
            let exact = report.per_seed.iter().all(|s| s.messages == truth);
            let truth_set: BTreeSet<_> = truth.iter().collect();
            let inter_h = report
                .intersection()
                .iter()
                .filter(|m| !truth_set.contains(m))
                .count();
            let any_h = report
                .per_seed
                .iter()
                .any(|s| s.messages.iter().any(|m| !truth_set.contains(m)));
            Ok((
                exact,
                any_h,
                TrialOutcome {
                    hallucinations: codec::count_hallucinations(&report, &truth),
                    missing: codec::count_missing(&report, &truth),
                    hash_calls: report.hash_calls,
                },
                inter_h,
            ))
        })?;
        let n = rows.len() as f64;
        let exact = rows.iter().filter(|r| r.0).count() as f64 / n;
        let with_h = rows.iter().filter(|r| r.1).count();
        let h: Vec<f64> = rows.iter().map(|r| r.2.hallucinations as f64).collect();
        let (mean, sd) = mean_sd(&h);
        let inter = rows.iter().map(|r| r.3 as f64).sum::<f64>() / n;
        let outcomes: Vec<TrialOutcome> = rows.into_iter().map(|r| r.2).collect();
        table.push_nums(&[
            k as f64,
            exact,
            with_h as f64,
            mean,
            sd,
            inter,
            recovered_fraction(&outcomes, spec.messages),
        ]);
    }
    Ok(table)
}

/// Zero-noise round-trip cleanliness of each candidate seed (optionally
/// paired with `partner_seed`, both decodes required exact; the partner
/// itself is skipped).
pub fn run_seed_screen(spec: &ExperimentSpec) -> Result<CsvTable> {
    spec.expect(ExperimentKind::SeedScreen)?;
    let mut table = CsvTable::new(
        spec.header(),
        &["seed", "clean_trials", "trials", "mean_hallucinations", "clean"],
    );
    let candidates: Vec<u64> = spec
        .grid
        .iter()
        .map(|&s| grid_count(s, "seed"))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&s| Some(s) != spec.partner_seed)
        .collect();
    let results: Vec<(usize, f64)> = candidates
        .par_iter()
        .map(|&seed| {
            let seeds = match spec.partner_seed {
                Some(p) => vec![p, seed],
                None => vec![seed],
            };
            let params = spec.codec.with_seeds(seeds)?;
            let outcomes: Vec<(bool, usize)> = (0..spec.trials)
                .map(|t| {
                    let mut rng = RngStream::for_trial(spec.master_seed, t as u64);
                    let truth = random_messages(&params, spec.messages, &mut rng)?;
                    let cw = codec::encode_set(&params, &truth)?;
                    let report = codec::decode(&params, &cw, None)?;
                    let exact = report.per_seed.iter().all(|s| s.messages == truth);
                    Ok((exact, codec::count_hallucinations(&report, &truth)))
                })
                .collect::<Result<_>>()?;
            let clean = outcomes.iter().filter(|o| o.0).count();
            let mean = outcomes.iter().map(|o| o.1 as f64).sum::<f64>() / spec.trials as f64;
            Ok((clean, mean))
        })
        .collect::<Result<_>>()?;
    for (seed, (clean, mean)) in candidates.iter().zip(results) {
        table.push_nums(&[
            *seed as f64,
            clean as f64,
            spec.trials as f64,
            mean,
            (clean == spec.trials) as u8 as f64,
        ]);
    }
    Ok(table)
}

/// Pure-model tables for the `model` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelCurve {
    /// `(i, B_i)` for one parameter set.
    Branches,
    /// `(m, Z)`.
    Marks,
    /// `(m, C (n+g)_t + Z)`.
    Threshold,
    /// `(m, P_B)` for a fixed block length.
    Gap,
    /// `(m, expected hash calls)`.
    Load,
}

impl FromStr for ModelCurve {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "branches" => Ok(Self::Branches),
            "marks" => Ok(Self::Marks),
            "threshold" => Ok(Self::Threshold),
            "gap" => Ok(Self::Gap),
            "load" => Ok(Self::Load),
            _ => Err(Error::InvalidModel(format!(
                "unknown curve {s:?} (branches|marks|threshold|gap|load)"
            ))),
        }
    }
}

/// Inputs of [`model_table`].
#[derive(Debug, Clone)]
pub struct ModelTableSpec {
    pub curve: ModelCurve,
    pub message_bits: u32,
    pub checksum_bits: u32,
    pub codeword_len: usize,
    /// Message counts for the curves over `m`.
    pub ms: Vec<u64>,
    /// Message count for `branches`.
    pub m: u64,
    pub noise: f64,
    pub gap: f64,
    /// Block length for `gap`.
    pub block: usize,
    pub a_mode: ExponentMode,
}

impl Default for ModelTableSpec {
    fn default() -> Self {
        Self {
            curve: ModelCurve::Marks,
            message_bits: 10,
            checksum_bits: 2,
            codeword_len: 2048,
            ms: (1..=100).collect(),
            m: 32,
            noise: 0.45,
            gap: 0.0,
            block: 205,
            a_mode: ExponentMode::Floor,
        }
    }
}

pub fn model_table(spec: &ModelTableSpec) -> Result<CsvTable> {
    let header = vec![
        format!("model curve={:?}", spec.curve),
        format!(
            "message_bits={} checksum_bits={} codeword_len={} a_mode={:?}",
            spec.message_bits, spec.checksum_bits, spec.codeword_len, spec.a_mode
        ),
        match spec.curve {
            ModelCurve::Branches | ModelCurve::Load => {
                format!("m={} noise={} gap={}", spec.m, num(spec.noise), num(spec.gap))
            }
            ModelCurve::Gap => format!("block={}", spec.block),
            _ => String::new(),
        },
    ]
    .into_iter()
    .filter(|s| !s.is_empty())
    .collect();
    let params = |m: u64| -> Result<ModelParams<f64>> {
        Ok(
            ModelParams::<f64>::new(m, spec.message_bits, spec.checksum_bits, spec.codeword_len)?
                .with_noise(spec.noise)?
                .with_gap(spec.gap)?
                .with_a_mode(spec.a_mode),
        )
    };
    let mut table;
    match spec.curve {
        ModelCurve::Branches => {
            table = CsvTable::new(header, &["i", "b_i"]);
            let p = params(spec.m)?;
            for (i, b) in model::branch_profile(&p).into_iter().enumerate() {
                table.push_nums(&[(i + 1) as f64, b]);
            }
        }
        ModelCurve::Marks => {
            table = CsvTable::new(header, &["m", "z"]);
            for &m in &spec.ms {
                table.push_nums(&[m as f64, model::marks_expected(m as f64, spec.message_bits)]);
            }
        }
        ModelCurve::Threshold => {
            table = CsvTable::new(header, &["m", "marks_threshold"]);
            let curve = model::marks_threshold_curve::<f64>(
                spec.ms.iter().copied(),
                spec.message_bits,
                spec.checksum_bits,
                spec.codeword_len,
                spec.a_mode,
            )?;
            for (m, v) in curve {
                table.push_nums(&[m as f64, v]);
            }
        }
        ModelCurve::Gap => {
            table = CsvTable::new(header, &["m", "p_b"]);
            for &m in &spec.ms {
                let p = model::gap_block_probability::<f64>(m, spec.block, spec.codeword_len, spec.message_bits);
                table.push_nums(&[m as f64, p]);
            }
        }
        ModelCurve::Load => {
            table = CsvTable::new(header, &["m", "hash_calls"]);
            for &m in &spec.ms {
                table.push_nums(&[m as f64, model::computational_load(&params(m)?)]);
            }
        }
    }
    Ok(table)
}

/// Reads back a table written by [`CsvTable::write_to`].
pub fn read_table(text: &str) -> Result<CsvTable> {
    let mut comments = Vec::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix("# ") {
            Some(c) if body.is_empty() => comments.push(c.to_string()),
            _ => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let columns = rdr.headers()?.iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(CsvTable {
        comments,
        columns,
        rows,
    })
}

/// Codeword of `messages` under `params` with `marks` random marks added.
pub fn noisy_codeword(
    params: &CodecParams,
    messages: &[MessageWord],
    marks: usize,
    rng: &mut RngStream,
) -> Result<Codeword> {
    let clean = codec::encode_set(params, messages)?;
    channel::add_random_marks(&clean, marks, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in ExperimentKind::ALL {
            assert_eq!(k.name().parse::<ExperimentKind>().unwrap(), k);
        }
        assert_eq!("noise-sweep".parse::<ExperimentKind>().unwrap(), ExperimentKind::NoiseSweep);
        assert!("bogus".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(range(0.0, 0.6, 0.05).len(), 13);
        assert_eq!(range(0.0, 0.6, 0.05)[3], 0.15);
        assert_eq!(ExperimentSpec::new(ExperimentKind::NoiseSweep).grid.len(), 23);
    }

    #[test]
    fn spec_validation() {
        let mut s = ExperimentSpec::new(ExperimentKind::NoiseSweep);
        s.trials = 0;
        assert!(s.validate().is_err());
        s.trials = 1;
        s.grid.clear();
        assert!(s.validate().is_err());
        let mut s = ExperimentSpec::new(ExperimentKind::NoiseSweep);
        s.messages = 257;
        assert!(s.validate().is_err());
    }

    #[test]
    fn mismatched_kind_is_rejected() {
        let s = ExperimentSpec::new(ExperimentKind::NoiseSweep);
        assert!(run_gap_sweep(&s).is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(mean_sd(&[2.0]), (2.0, 0.0));
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((sd - 1.290_994_448_735_805_6).abs() < 1e-12);
    }

    #[test]
    fn cubic_fit_recovers_polynomial() {
        let c = [1.5, -0.2, 0.03, 0.0004];
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 40.0).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| eval_cubic(&c, x)).collect();
        let fit = fit_cubic(&xs, &ys).unwrap();
        for (a, b) in fit.iter().zip(c) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{fit:?}");
        }
        assert!(fit_cubic(&xs[..3], &ys[..3]).is_err());
    }

    #[test]
    fn default_min_gap_matches_two_percent_point() {
        assert_eq!(default_min_gap(&CodecParams::default()).unwrap(), 204);
    }

    #[test]
    fn small_noise_sweep_is_deterministic() {
        let mut s = ExperimentSpec::new(ExperimentKind::NoiseSweep);
        s.grid = vec![0.0, 10.0];
        s.trials = 5;
        let a = run(&s).unwrap().to_csv_string().unwrap();
        let b = run(&s).unwrap().to_csv_string().unwrap();
        assert_eq!(a, b);
        let t = read_table(&a).unwrap();
        assert_eq!(t.column("genuine_recovered_fraction").unwrap(), vec![1.0, 1.0]);
        assert!(t.comments[0].contains("noise_sweep"));
    }

    #[test]
    fn model_tables_have_rows() {
        for (curve, rows) in [
            (ModelCurve::Branches, 10),
            (ModelCurve::Marks, 100),
            (ModelCurve::Threshold, 100),
            (ModelCurve::Gap, 100),
            (ModelCurve::Load, 100),
        ] {
            let t = model_table(&ModelTableSpec {
                curve,
                ..Default::default()
            })
            .unwrap();
            assert_eq!(t.rows.len(), rows, "{curve:?}");
        }
    }
}
