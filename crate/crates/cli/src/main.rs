//! Command-line front end: synthetic content, encoding, the fixed-QP
//! comparison experiment and the brute-force oracles.

mod settings;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mdd_core::alloc::{fixed_qp_encode, mb_mdd, mdd_exact, GopOptions};
use mdd_core::experiment::{
    print_summary, run_experiment, write_csv, ExperimentSpec, InputSpec, Mode,
};
use mdd_core::oracle::{
    default_schedule, exhaustive_minmax, mrd_audit_tables, theorem1_check, theorem2_sweep, RateRule,
};
use mdd_core::rdcore::{random_regular_chain, DependentSourceSet, QpRange, SyntheticChainSet};
use mdd_core::video::{gen_synthetic, Pattern, YuvFormat};
use mdd_core::{Error, Frame, Result};

use settings::{parse_metric, Settings};

#[derive(Parser)]
#[command(
    name = "mdd",
    version,
    about = "Macroblock bit allocation by maximum distortion descend"
)]
struct Cli {
    /// Plain-text `key = value` configuration applied before flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic luma-only sequence.
    Gen {
        #[arg(long, value_parser = parse_pattern)]
        pattern: Pattern,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 1)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a sequence at a fixed QP or under a per-GOP bit budget.
    Encode {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Bits per GOP; switches from fixed QP to the GOP-level descend.
        #[arg(long)]
        gop_bits: Option<u64>,
        #[arg(long)]
        out_dir: PathBuf,
        /// Also write per-macroblock distortion maps.
        #[arg(long)]
        maps: bool,
    },
    /// Fixed-QP baseline against the descend, frame by frame.
    Experiment {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::MddQuality)]
        mode: ModeArg,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        maps: bool,
        /// Random m.r.d. probes on the first frame.
        #[arg(long, default_value_t = 0)]
        audit: usize,
    },
    /// Brute-force checks on synthetic rate-distortion tables.
    Oracle {
        #[arg(value_enum)]
        check: OracleCheck,
        /// Table file (`source own_qp pred_qp rate distortion` per line).
        #[arg(long, conflicts_with = "random_seed")]
        table: Option<PathBuf>,
        /// Generate a random table instead.
        #[arg(long)]
        random_seed: Option<u64>,
        #[arg(long, default_value_t = 4)]
        sources: usize,
        #[arg(long, default_value_t = 5)]
        levels: u8,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Raw input file.
    #[arg(long, conflicts_with = "synthetic")]
    input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Yuv420)]
    format: FormatArg,
    /// Synthetic content instead of a file.
    #[arg(long, value_parser = parse_pattern)]
    synthetic: Option<Pattern>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    width: usize,
    #[arg(long)]
    height: usize,
    #[arg(long)]
    frames: usize,
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    gop: Option<usize>,
    #[arg(long)]
    qp: Option<u8>,
    /// ssim, ssim-gaussian or mse.
    #[arg(long)]
    metric: Option<String>,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Yuv420,
    Y8,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    FixedQp,
    MddRate,
    MddQuality,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleCheck {
    /// Target-distortion sweep with the rate monotonicity check.
    Sweep,
    /// Optimality check of the target-distortion structure at a budget.
    Optimality,
    /// Enumeration of every assignment within a budget.
    Exhaustive,
    /// Exact descend at a budget.
    Mdd,
    /// m.r.d. scan of the table.
    Audit,
    /// Print the table.
    Dump,
}

fn parse_pattern(s: &str) -> std::result::Result<Pattern, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl InputArgs {
    fn spec(&self) -> Result<InputSpec> {
        match (&self.input, self.synthetic) {
            (Some(path), None) => Ok(InputSpec::File {
                path: path.clone(),
                width: self.width,
                height: self.height,
                frames: self.frames,
                format: match self.format {
                    FormatArg::Yuv420 => YuvFormat::Yuv420,
                    FormatArg::Y8 => YuvFormat::Y8,
                },
            }),
            (None, Some(pattern)) => Ok(InputSpec::Synthetic {
                pattern,
                width: self.width,
                height: self.height,
                frames: self.frames,
                seed: self.seed,
            }),
            _ => Err(Error::InvalidConfig(
                "give exactly one of --input or --synthetic".into(),
            )),
        }
    }
}

fn settings(config: Option<&Path>, common: &CommonArgs) -> Result<Settings> {
    let mut s = match config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    if let Some(g) = common.gop {
        s.gop = g;
    }
    if let Some(q) = common.qp {
        s.qp = q;
    }
    if let Some(m) = &common.metric {
        s.metric = parse_metric(m)?;
    }
    for kv in &common.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("expected KEY=VALUE, got '{kv}'")))?;
        s.set(k.trim(), v.trim())?;
    }
    Ok(s)
}

fn create(path: &Path) -> Result<fs::File> {
    Ok(fs::File::create(path)?)
}

fn write_map(dir: &Path, frame: usize, map: &mdd_core::DistortionMap) -> Result<()> {
    fs::create_dir_all(dir)?;
    map.write_csv(create(&dir.join(format!("frame_{frame:04}.csv")))?)
}

fn gen(
    pattern: Pattern,
    width: usize,
    height: usize,
    frames: usize,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let frames = gen_synthetic(pattern, width, height, frames, seed)?;
    let mut f = create(out)?;
    for fr in &frames {
        f.write_all(fr.data())?;
    }
    info!("wrote {} frames to {}", frames.len(), out.display());
    Ok(())
}

fn encode(
    input: &InputArgs,
    s: &Settings,
    gop_bits: Option<u64>,
    out_dir: &Path,
    maps: bool,
) -> Result<()> {
    s.codec.validate()?;
    s.mdd.validate()?;
    if s.gop == 0 {
        return Err(Error::InvalidConfig("gop length must be at least 1".into()));
    }
    let frames: Vec<Frame> = input.spec()?.load()?;
    fs::create_dir_all(out_dir)?;
    let mut w = csv::Writer::from_writer(create(&out_dir.join("encode.csv"))?);
    w.write_record(["frame", "bits", "ms_ssim", "stddev", "n_iter"])?;
    let opts = GopOptions {
        codec: s.codec,
        metric: s.metric,
        intra_weight: s.intra_weight,
    };
    for (g, gop) in frames.chunks(s.gop).enumerate() {
        let results: Vec<(mdd_core::rdcore::EncodeOutcome, usize)> = match gop_bits {
            None => fixed_qp_encode(gop, s.qp, &s.codec, s.metric)?
                .into_iter()
                .map(|f| (f.outcome, 0))
                .collect(),
            Some(r_t) => mb_mdd(gop, r_t, &s.mdd, &opts)?
                .into_iter()
                .map(|f| (f.encode.outcome, f.trace.n_iter))
                .collect(),
        };
        for (j, (out, n_iter)) in results.iter().enumerate() {
            let index = g * s.gop + j;
            let stddev = mdd_core::metrics::fluctuation_stats(&out.distortions()).stddev;
            w.serialize((
                index,
                out.total_bits,
                out.frame_quality.unwrap_or(f64::NAN),
                stddev,
                n_iter,
            ))?;
            if maps {
                let map = mdd_core::DistortionMap {
                    metric: distortion_metric(s),
                    values: out.distortions(),
                };
                write_map(&out_dir.join("maps"), index, &map)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn distortion_metric(s: &Settings) -> mdd_core::DistortionMetric {
    match s.metric {
        mdd_core::codec::FrameMetric::Mse => mdd_core::DistortionMetric::Mse,
        mdd_core::codec::FrameMetric::Ssim(_) => mdd_core::DistortionMetric::Ssim,
    }
}

fn experiment(
    input: &InputArgs,
    s: &Settings,
    mode: ModeArg,
    out_dir: &Path,
    maps: bool,
    audit: usize,
) -> Result<()> {
    let mode = match mode {
        ModeArg::FixedQp => Mode::FixedQp,
        ModeArg::MddRate => Mode::MddRate,
        ModeArg::MddQuality => Mode::MddQuality,
    };
    let mut spec = ExperimentSpec::new(input.spec()?, mode);
    spec.gop_len = s.gop;
    spec.baseline_qp = s.qp;
    spec.mdd = s.mdd;
    spec.codec = s.codec;
    spec.metric = s.metric;
    spec.keep_maps = maps;
    spec.audit_probes = audit;
    spec.audit_seed = input.seed;
    let report = run_experiment(&spec)?;
    fs::create_dir_all(out_dir)?;
    write_csv(&report, create(&out_dir.join("frames.csv"))?)?;
    let summary = print_summary(&report);
    fs::write(out_dir.join("summary.txt"), &summary)?;
    for (i, map) in report.maps.iter().enumerate() {
        write_map(&out_dir.join("maps"), i, map)?;
    }
    print!("{summary}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn oracle(
    check: OracleCheck,
    table: Option<&Path>,
    random_seed: Option<u64>,
    sources: usize,
    levels: u8,
    budget: Option<u64>,
    steps: usize,
) -> Result<()> {
    let set = match (table, random_seed) {
        (Some(p), _) => SyntheticChainSet::load(p)?,
        (None, Some(seed)) => {
            if sources == 0 || levels == 0 {
                return Err(Error::InvalidConfig(
                    "need at least one source and one level".into(),
                ));
            }
            let range = QpRange::new(0, levels - 1)?;
            random_regular_chain(&mut ChaCha8Rng::seed_from_u64(seed), sources, range)
        }
        (None, None) => return Err(Error::InvalidConfig("give --table or --random-seed".into())),
    };
    let need_budget =
        || budget.ok_or_else(|| Error::InvalidConfig("this check needs --budget".into()));
    match check {
        OracleCheck::Sweep => {
            let r = theorem2_sweep(&set, &default_schedule(&set, steps))?;
            print!("{r}");
            println!("monotone: {}", r.is_monotone());
        }
        OracleCheck::Optimality => println!("{}", theorem1_check(&set, need_budget()?)?),
        OracleCheck::Exhaustive => {
            let qps: Vec<u8> = set.qp_range().iter().collect();
            let r = exhaustive_minmax(&set, need_budget()?, &qps, RateRule::AtMost)?;
            println!(
                "feasible={} best_vd={} best_max_distortion={}",
                r.feasible, r.best_vd, r.best_max_distortion
            );
            for x in &r.vd_optimal {
                println!("vd_optimal {:?}", x.as_slice());
            }
            for x in &r.max_optimal {
                println!("max_optimal {:?}", x.as_slice());
            }
        }
        OracleCheck::Mdd => {
            let (x, trace) = mdd_exact(&set, need_budget()?)?;
            println!(
                "x={:?} bits={} vd={} max_distortion={} iterations={} saturated={}",
                x.as_slice(),
                trace.outcome.total_bits,
                trace.outcome.fluctuation(),
                trace.outcome.max_distortion().1,
                trace.n_iter,
                trace.saturated
            );
        }
        OracleCheck::Audit => println!("{}", mrd_audit_tables(set.tables())),
        OracleCheck::Dump => print!("{}", set.tables().to_text()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.config.as_deref();
    match &cli.command {
        Command::Gen {
            pattern,
            width,
            height,
            frames,
            seed,
            out,
        } => gen(*pattern, *width, *height, *frames, *seed, out),
        Command::Encode {
            input,
            common,
            gop_bits,
            out_dir,
            maps,
        } => encode(input, &settings(config, common)?, *gop_bits, out_dir, *maps),
        Command::Experiment {
            input,
            common,
            mode,
            out_dir,
            maps,
            audit,
        } => experiment(
            input,
            &settings(config, common)?,
            *mode,
            out_dir,
            *maps,
            *audit,
        ),
        Command::Oracle {
            check,
            table,
            random_seed,
            sources,
            levels,
            budget,
            steps,
        } => oracle(
            *check,
            table.as_deref(),
            *random_seed,
            *sources,
            *levels,
            *budget,
            *steps,
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
