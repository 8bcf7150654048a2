use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ratiokit::experiment::OffBins;
use ratiokit::io::{
    emit_density_curves, generate_seed, load_sequences, run_analysis, simulate_command,
    write_curves, write_json, AnalysisConfig, LayoutSpec, NormalizerSpec, NullSpec, SequenceKind,
    TestKind, TransformSpec,
};
use ratiokit::null_models::RatioDistribution;
use ratiokit::ratio::sequence_ratios;
use ratiokit::{Error, Result};

/// Integer-ratio rhythm analysis of inter-onset intervals.
///
/// Durations in files are seconds. Ratios do not depend on the unit, but the
/// parameters of uniform and half-normal nulls are read in file units.
#[derive(Parser)]
#[command(name = "ratiokit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw interval sequences from a null model and write them as CSV.
    Simulate {
        /// exponential:RATE, uniform:A,B, halfnormal:SIGMA or table:PATH
        #[arg(long = "null")]
        null: NullSpec,
        #[arg(long, default_value_t = 100)]
        n_sequences: usize,
        #[arg(long, default_value_t = 1000)]
        seq_len: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the ratios of every adjacent interval pair as CSV.
    Ratios {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "r")]
        transform: TransformSpec,
        /// Null model, needed by the rescaled transforms.
        #[arg(long = "null")]
        null: Option<NullSpec>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bin and normalize ratios per sequence, without tests.
    Normalize(PipelineArgs),
    /// Bin, normalize and test on- against off-ratio bins.
    Analyze {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Comma-separated tests to run.
        #[arg(long, value_delimiter = ',', default_value = "wilcoxon")]
        tests: Vec<TestArg>,
    },
    /// Export the null density of a transform next to a simulated histogram.
    Curves {
        #[arg(long = "null")]
        null: NullSpec,
        #[arg(long, default_value = "r")]
        transform: TransformSpec,
        /// Analytic grid points (at least 64).
        #[arg(long, default_value_t = 512)]
        grid: usize,
        /// Ratios in the simulated histogram.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "intervals")]
    kind: SequenceKind,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "r")]
    transform: TransformSpec,
    #[arg(long = "null")]
    null: Option<NullSpec>,
    /// one-to-one, thirds:M:N,M:N,... or edges:E1,E2,...
    #[arg(long, default_value = "one-to-one")]
    layout: LayoutSpec,
    /// width, mass or mass-mc:N
    #[arg(long, default_value = "width")]
    normalizer: NormalizerSpec,
    /// Test each off bin separately instead of merging them.
    #[arg(long)]
    separate_off_bins: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum TestArg {
    Wilcoxon,
    Ks,
}

impl PipelineArgs {
    fn into_config(self, tests: Vec<TestKind>) -> AnalysisConfig {
        AnalysisConfig {
            input: self.input.input,
            kind: self.input.kind,
            transform: self.transform,
            null: self.null,
            layout: self.layout,
            normalizer: self.normalizer,
            tests,
            off_bins: if self.separate_off_bins {
                OffBins::Separate
            } else {
                OffBins::Combined
            },
            seed: self.seed,
            out: self.out,
        }
    }
}

fn seed_or_generate(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = generate_seed();
        eprintln!("using generated seed {s}");
        s
    })
}

fn write_ratios(
    args: InputArgs,
    transform: TransformSpec,
    null: Option<NullSpec>,
    out: Option<&Path>,
) -> Result<()> {
    let dist = null
        .map(|n| n.resolve().and_then(RatioDistribution::shared))
        .transpose()?;
    let transform = transform.resolve(dist.as_ref())?;
    let loaded = load_sequences(&args.input, args.kind)?;
    if loaded.skipped > 0 {
        eprintln!(
            "skipped {} sequence(s) with fewer than 3 events",
            loaded.skipped
        );
    }
    let sink: Box<dyn Write> = match out {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Error::from(e).context(format!("creating {}", p.display()))
            })?))
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut wtr = csv::Writer::from_writer(sink);
    wtr.write_record(["sequence_id", "index", transform.name()])?;
    for seq in &loaded.sequences {
        for (k, x) in sequence_ratios(seq, &transform)?.iter().enumerate() {
            wtr.write_record([seq.source_id(), &k.to_string(), &format!("{x:.16e}")])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            null,
            n_sequences,
            seq_len,
            seed,
            out,
        } => {
            let seed = seed_or_generate(seed);
            simulate_command(&null.resolve()?, n_sequences, seq_len, seed, &out)?;
        }
        Command::Ratios {
            input,
            transform,
            null,
            out,
        } => write_ratios(input, transform, null, out.as_deref())?,
        Command::Normalize(args) => {
            let config = args.into_config(Vec::new());
            let report = run_analysis(&config)?;
            write_json(&report, config.out.as_deref())?;
        }
        Command::Analyze { pipeline, tests } => {
            let tests = tests
                .into_iter()
                .map(|t| match t {
                    TestArg::Wilcoxon => TestKind::Wilcoxon,
                    TestArg::Ks => TestKind::Ks,
                })
                .collect();
            let config = pipeline.into_config(tests);
            let report = run_analysis(&config)?;
            for t in &report.tests {
                if let Some(e) = &t.error {
                    eprintln!("test {:?} not run: {e}", t.test);
                }
            }
            write_json(&report, config.out.as_deref())?;
        }
        Command::Curves {
            null,
            transform,
            grid,
            samples,
            bins,
            seed,
            out,
        } => {
            let seed = seed_or_generate(seed);
            let dist = RatioDistribution::shared(null.resolve()?)?;
            let transform = transform.resolve(Some(&dist))?;
            let set = emit_density_curves(&dist, &transform, grid, samples, bins, seed)?;
            write_curves(&set, &out)?;
        }
    }
    Ok(())
}

// `ratiokit ratios ... | head` closes stdout early; that is not a failure.
fn is_broken_pipe(e: &Error) -> bool {
    match e.root() {
        Error::Io(io) => io.kind() == io::ErrorKind::BrokenPipe,
        Error::Csv(c) => {
            matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
        }
        _ => false,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
