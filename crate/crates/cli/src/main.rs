//! `ccode`: encode, decode and corrupt codeword files, run Monte-Carlo
//! experiments and print model curves as CSV.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use concurrent_codes::channel::{self, RngStream};
use concurrent_codes::codec::{self, CodecParams};
use concurrent_codes::experiment::{
    self, ExperimentKind, ExperimentSpec, GapPosition, ModelCurve, ModelTableSpec,
};
use concurrent_codes::messages::{format_messages, parse_messages};
use concurrent_codes::model::{self, ExponentMode};
use concurrent_codes::prbs::{self, HashConfig};
use concurrent_codes::Codeword;

#[derive(Parser)]
#[command(name = "ccode", version, about = "Concurrent codes over an OR channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a message list (one hex value per line) into a CCW codeword file.
    Encode {
        /// Message list; `-` for stdin.
        #[arg(long, short)]
        input: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Decode a CCW codeword file and print the sorted message list.
    Decode {
        /// Codeword file; `-` for stdin.
        #[arg(long, short)]
        input: PathBuf,
        /// Find zero runs and treat them as erasures.
        #[arg(long)]
        detect_gaps: bool,
        /// Shortest zero run treated as an erasure (default: 5-message, 2% run length).
        #[arg(long)]
        min_gap: Option<usize>,
        #[command(flatten)]
        codec: CodecArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Add random marks and/or cut a burst gap out of a CCW codeword file.
    Corrupt {
        #[arg(long, short)]
        input: PathBuf,
        /// Noise level in dB; 0 dB is the mark count of one message.
        #[arg(long, conflicts_with = "noise_marks")]
        noise_db: Option<f64>,
        /// Exact number of random marks.
        #[arg(long)]
        noise_marks: Option<usize>,
        /// Gap length as a fraction of the codeword.
        #[arg(long)]
        gap_frac: Option<f64>,
        /// Gap start position or `random`.
        #[arg(long, default_value = "random")]
        gap_start: String,
        #[arg(long, default_value_t = 1, value_parser = parse_u64)]
        master_seed: u64,
        #[command(flatten)]
        codec: CodecArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a Monte-Carlo experiment and write a CSV table.
    Experiment(ExperimentArgs),
    /// Print a closed-form model curve as CSV.
    Model(ModelArgs),
}

#[derive(Args, Clone)]
struct CodecArgs {
    #[arg(long, default_value_t = codec::DEFAULT_DATA_BITS)]
    data_bits: u32,
    #[arg(long, default_value_t = codec::DEFAULT_CHECKSUM_BITS)]
    checksum_bits: u32,
    /// Hash register width W; the codeword has 2^W bits.
    #[arg(long, default_value_t = prbs::DEFAULT_WIDTH)]
    width: u32,
    /// Comma-separated 0-based feedback taps (default: maximal-length taps for W).
    #[arg(long, value_delimiter = ',')]
    taps: Option<Vec<u32>>,
    #[arg(long, default_value_t = 1)]
    clocks_per_bit: u32,
    /// Single hash seed (hex with 0x, or decimal).
    #[arg(long, value_parser = parse_u64, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Comma-separated seed list for multi-seed encoding.
    #[arg(long, value_delimiter = ',', value_parser = parse_u64)]
    seeds: Option<Vec<u64>>,
}

impl CodecArgs {
    fn params(&self, default_seeds: &[u64]) -> Result<CodecParams> {
        let taps = match &self.taps {
            Some(t) => t.clone(),
            None => prbs::default_taps(self.width)
                .with_context(|| format!("no default taps for width {}; pass --taps", self.width))?
                .to_vec(),
        };
        let seeds = match (&self.seeds, self.seed) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => vec![s],
            (None, None) => default_seeds.to_vec(),
        };
        let hash = HashConfig::new(self.width, &taps, seeds[0], self.clocks_per_bit)?;
        Ok(CodecParams::new(self.data_bits, self.checksum_bits, hash, seeds)?)
    }
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output file (default: stdout).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn write(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// noise_sweep, gap_sweep, marks_vs_messages, branch_profile, model_curve,
    /// hamming_compare, multiseed or seed_screen.
    kind: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_parser = parse_u64)]
    master_seed: Option<u64>,
    /// Grid as `a,b,c` or `start:stop:step`.
    #[arg(long)]
    grid: Option<String>,
    /// Gap grid for hamming_compare, same syntax as --grid.
    #[arg(long)]
    gap_grid: Option<String>,
    /// Messages per trial.
    #[arg(long)]
    messages: Option<usize>,
    #[arg(long)]
    min_gap: Option<usize>,
    /// Gap start position or `random`.
    #[arg(long)]
    gap_start: Option<String>,
    /// floor or continuous.
    #[arg(long)]
    a_mode: Option<String>,
    /// Codeword length for model_curve.
    #[arg(long)]
    model_codeword_len: Option<usize>,
    /// seed_screen: require candidates to decode cleanly beside this seed.
    #[arg(long, value_parser = parse_u64)]
    partner_seed: Option<u64>,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ModelArgs {
    /// branches, marks, threshold, gap or load.
    curve: String,
    #[arg(long, default_value_t = 10)]
    message_bits: u32,
    #[arg(long, default_value_t = 2)]
    checksum_bits: u32,
    #[arg(long, default_value_t = 2048)]
    codeword_len: usize,
    /// Message counts as `a,b,c` or `start:stop:step`.
    #[arg(long, default_value = "1:100:1")]
    ms: String,
    /// Message count for the branches curve.
    #[arg(long, default_value_t = 32)]
    m: u64,
    #[arg(long, default_value_t = 0.45)]
    noise: f64,
    #[arg(long, default_value_t = 0.0)]
    gap: f64,
    /// Block length for the gap curve.
    #[arg(long, default_value_t = 205)]
    block: usize,
    #[arg(long, default_value = "floor")]
    a_mode: String,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("{s:?}: {e}"))
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = |xs: &[&str]| -> Result<Vec<f64>> {
        xs.iter()
            .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad grid value {x:?}")))
            .collect()
    };
    match parts.len() {
        1 => nums(&s.split(',').collect::<Vec<_>>()),
        3 => {
            let v = nums(&parts)?;
            if !(v[2] > 0.0) || v[1] < v[0] {
                bail!("grid range {s:?} needs step > 0 and stop >= start");
            }
            Ok(experiment::range(v[0], v[1], v[2]))
        }
        _ => bail!("grid {s:?} is neither a list nor start:stop:step"),
    }
}

fn parse_gap_start(s: &str) -> Result<GapPosition> {
    if s == "random" {
        return Ok(GapPosition::Random);
    }
    Ok(GapPosition::Fixed(
        s.parse().with_context(|| format!("--gap-start must be an integer or `random`, got {s:?}"))?,
    ))
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf)?;
        return Ok(buf);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_codeword(path: &Path, params: &CodecParams) -> Result<Codeword> {
    let cw = Codeword::from_ccw(&read_input(path)?)
        .with_context(|| format!("parsing codeword {}", path.display()))?;
    if cw.width() != params.width() {
        bail!(
            "codeword file has W={} but the codec uses --width {}",
            cw.width(),
            params.width()
        );
    }
    Ok(cw)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Encode { input, codec, out } => {
            let params = codec.params(&[prbs::DEFAULT_SEED])?;
            let msgs = parse_messages(&read_input(&input)?, params.data_bits())
                .with_context(|| format!("parsing message list {}", input.display()))?;
            out.write(&codec::encode_set(&params, &msgs)?.to_ccw())
        }
        Command::Decode {
            input,
            detect_gaps,
            min_gap,
            codec,
            out,
        } => {
            let params = codec.params(&[prbs::DEFAULT_SEED])?;
            let cw = read_codeword(&input, &params)?;
            let gaps = if detect_gaps {
                let threshold = match min_gap {
                    Some(g) => g,
                    None => experiment::default_min_gap(&params)?,
                };
                Some(codec::detect_gaps(&cw, threshold))
            } else {
                None
            };
            let report = codec::decode(&params, &cw, gaps.as_ref())?;
            let mut text = String::new();
            for iv in report.gaps.intervals() {
                text.push_str(&format!("# gap start={} len={}\n", iv.start, iv.len));
            }
            let marks = cw.mark_count() as f64;
            let expected = model::messages_from_marks_numeric(marks, params.message_bits())
                .map(|m| format!("{m:.2}"))
                .unwrap_or_else(|_| "n/a".into());
            text.push_str(&format!(
                "# marks={} expected_messages={} decoded={} hash_calls={}\n",
                cw.mark_count(),
                expected,
                report.messages.len(),
                report.hash_calls
            ));
            if report.per_seed.len() > 1 {
                text.push_str(&format!(
                    "# seeds={} intersection={}\n",
                    report.per_seed.len(),
                    report.intersection().len()
                ));
            }
            text.push_str(&format_messages(&report.messages));
            out.write(&text)
        }
        Command::Corrupt {
            input,
            noise_db,
            noise_marks,
            gap_frac,
            gap_start,
            master_seed,
            codec,
            out,
        } => {
            let params = codec.params(&[prbs::DEFAULT_SEED])?;
            let mut cw = read_codeword(&input, &params)?;
            let mut rng = RngStream::new(master_seed);
            let noise = match (noise_db, noise_marks) {
                (Some(db), _) => channel::NoiseSpec::Db(db),
                (None, Some(n)) => channel::NoiseSpec::Marks(n),
                (None, None) => channel::NoiseSpec::Marks(0),
            };
            cw = channel::add_random_marks(&cw, noise.resolve(params.message_bits() as usize), &mut rng)?;
            if let Some(frac) = gap_frac {
                cw = match parse_gap_start(&gap_start)? {
                    GapPosition::Random => channel::cut_random_gap(&cw, frac, &mut rng)?.0,
                    GapPosition::Fixed(start) => {
                        channel::cut_gap(&cw, start, channel::gap_len(frac, cw.len())?)?
                    }
                };
            }
            out.write(&cw.to_ccw())
        }
        Command::Experiment(args) => run_experiment(args),
        Command::Model(args) => run_model(args),
    }
}

fn run_experiment(args: ExperimentArgs) -> Result<()> {
    let kind: ExperimentKind = args.kind.parse()?;
    let mut spec = ExperimentSpec::new(kind);
    let default_seeds = spec.codec.seeds().to_vec();
    spec.codec = args.codec.params(&default_seeds)?;
    if let Some(t) = args.trials {
        spec.trials = t;
    }
    if let Some(s) = args.master_seed {
        spec.master_seed = s;
    }
    if let Some(g) = &args.grid {
        spec.grid = parse_grid(g)?;
    }
    if let Some(g) = &args.gap_grid {
        spec.gap_grid = parse_grid(g)?;
    }
    if let Some(m) = args.messages {
        spec.messages = m;
    }
    spec.min_gap = args.min_gap;
    if let Some(s) = &args.gap_start {
        spec.gap_position = parse_gap_start(s)?;
    }
    if let Some(a) = &args.a_mode {
        spec.a_mode = a.parse::<ExponentMode>()?;
    }
    if let Some(c) = args.model_codeword_len {
        spec.model_codeword_len = c;
    }
    spec.partner_seed = args.partner_seed;
    let table = experiment::run(&spec)?;
    args.out.write(&table.to_csv_string()?)
}

fn run_model(args: ModelArgs) -> Result<()> {
    let curve: ModelCurve = args.curve.parse()?;
    let ms = parse_grid(&args.ms)?
        .into_iter()
        .map(|x| {
            if x < 1.0 || x.fract() != 0.0 {
                bail!("message count {x} is not a positive integer");
            }
            Ok(x as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = ModelTableSpec {
        curve,
        message_bits: args.message_bits,
        checksum_bits: args.checksum_bits,
        codeword_len: args.codeword_len,
        ms,
        m: args.m,
        noise: args.noise,
        gap: args.gap,
        block: args.block,
        a_mode: args.a_mode.parse()?,
    };
    args.out.write(&experiment::model_table(&spec)?.to_csv_string()?)
}
