//! Command-line front end.

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::bench::{self, BenchOptions};
use crate::container;
use crate::error::Result;
use crate::lz77::Lz77Token;
use crate::pipeline::{self, EncodeOptions};
use crate::precoder::{self, NormalizationOptions, UnknownPolicy};

#[derive(Parser)]
#[command(
    name = "lutz",
    version,
    about = "Lossless DNA sequence compressor",
    long_about = "Compresses A/C/G/T/N sequence text by coding base triplets as single \
                  bytes, then running a dictionary and entropy stage over the result."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum UnknownArg {
    /// Reject bytes that are not bases, with their offset.
    #[default]
    Reject,
    /// Treat such bytes as N.
    AsN,
}

impl UnknownArg {
    fn policy(self) -> UnknownPolicy {
        match self {
            UnknownArg::Reject => UnknownPolicy::Reject,
            UnknownArg::AsN => UnknownPolicy::TreatAsN,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Compress sequence text into a container.
    Encode {
        /// Input file, or - for standard input.
        #[arg(default_value = "-")]
        input: String,
        /// Output file, or - for standard output.
        #[arg(short, long, default_value = "-")]
        output: String,
        /// Stop after the triplet stage and store the pre-coded stream.
        #[arg(long)]
        precode_only: bool,
        /// Skip > header lines.
        #[arg(long)]
        fasta: bool,
        #[arg(long, value_enum, default_value_t)]
        unknown: UnknownArg,
    },
    /// Expand a container back into sequence text.
    Decode {
        /// Input file, or - for standard input.
        #[arg(default_value = "-")]
        input: String,
        /// Output file, or - for standard output.
        #[arg(short, long, default_value = "-")]
        output: String,
        /// Break output lines after this many bases; 0 writes one line.
        #[arg(long, default_value_t = 0)]
        wrap: u64,
    },
    /// Print container header fields and payload statistics.
    Inspect {
        /// Input file, or - for standard input.
        #[arg(default_value = "-")]
        input: String,
    },
    /// Measure every file in a corpus manifest.
    ///
    /// Manifest lines are name<TAB>path with optional base-count and
    /// sha256 fields. The report is tab-separated with a trailing
    /// average row.
    Bench {
        manifest: PathBuf,
        /// Run the dictionary and entropy stage.
        #[arg(long, value_enum, default_value = "on")]
        stage2: Toggle,
        /// Timing repetitions per file (the median is reported).
        #[arg(long, default_value_t = 5)]
        repeat: usize,
        /// Skip > header lines in corpus files.
        #[arg(long)]
        fasta: bool,
        #[arg(long, value_enum, default_value_t)]
        unknown: UnknownArg,
        /// Write the report here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs a parsed invocation and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Encode {
            input,
            output,
            precode_only,
            fasta,
            unknown,
        } => {
            let raw = read_input(&input)?;
            let normalization = NormalizationOptions {
                fasta_mode: fasta,
                unknown_policy: unknown.policy(),
            };
            let opts = EncodeOptions {
                normalization,
                stage2: !precode_only,
                ..EncodeOptions::default()
            };
            let bases = precoder::normalize(&raw, normalization)?;
            let encoded = pipeline::encode_bases(&bases, &opts)?;
            write_output(&output, &encoded)?;
            let ratio = match bench::bits_per_base(encoded.len() as u64, bases.len() as u64) {
                Ok(r) => format!("{r:.4}"),
                Err(_) => "-".into(),
            };
            eprintln!(
                "{} bases in, {} bytes out, {} bits/base",
                bases.len(),
                encoded.len(),
                ratio
            );
            Ok(0)
        }
        Command::Decode { input, output, wrap } => {
            let encoded = read_input(&input)?;
            let mut writer = open_output(&output)?;
            let mut column = 0u64;
            let mut wrote_any = false;
            pipeline::decode_each(&encoded, |base| {
                writer.write_all(&[base.to_ascii()])?;
                wrote_any = true;
                if wrap > 0 {
                    column += 1;
                    if column == wrap {
                        writer.write_all(b"\n")?;
                        column = 0;
                    }
                }
                Ok(())
            })?;
            if wrote_any && (wrap == 0 || column > 0) {
                writer.write_all(b"\n")?;
            }
            writer.flush()?;
            Ok(0)
        }
        Command::Inspect { input } => {
            let encoded = read_input(&input)?;
            let (header, payload) = container::read_container(&encoded)?;
            println!("version: {}", header.version);
            println!("flags: 0x{:02x}", header.flags);
            println!("stage2: {}", if header.stage2() { "on" } else { "off" });
            println!("fasta_stripped: {}", header.fasta_stripped());
            println!("unknown_as_n: {}", header.unknown_as_n());
            println!("base_count: {}", header.base_count);
            println!("payload_bytes: {}", payload.len());
            println!("payload_crc: 0x{:08x}", header.payload_crc);
            if header.stage2() {
                let tokens = container::parse_stage2_payload(payload)?;
                let matches = tokens
                    .iter()
                    .filter(|t| matches!(t, Lz77Token::Match { .. }))
                    .count();
                println!("tokens: {}", tokens.len());
                println!("literals: {}", tokens.len() - matches);
                println!("matches: {matches}");
            }
            Ok(0)
        }
        Command::Bench {
            manifest,
            stage2,
            repeat,
            fasta,
            unknown,
            output,
        } => {
            let text = fs::read_to_string(&manifest)
                .map_err(|e| annotate_io(e, &manifest.display().to_string()))?;
            let entries = bench::parse_manifest(&text)?;
            if repeat <= 1 {
                eprintln!("warning: timings are single samples; raise --repeat for stable medians");
            }
            let opts = BenchOptions {
                stage2: matches!(stage2, Toggle::On),
                repeat,
                normalization: NormalizationOptions {
                    fasta_mode: fasta,
                    unknown_policy: unknown.policy(),
                },
            };
            let rows = bench::run_corpus(&entries, &opts);
            let report = bench::format_report_tsv(&rows);
            match &output {
                Some(path) => fs::write(path, &report)
                    .map_err(|e| annotate_io(e, &path.display().to_string()))?,
                None => print!("{report}"),
            }
            for row in rows.iter().filter(|r| !r.ok()) {
                eprintln!(
                    "{}: {}",
                    row.name,
                    row.error.as_deref().unwrap_or("failed")
                );
            }
            Ok(if rows.iter().all(|r| r.ok()) { 0 } else { 1 })
        }
    }
}

fn annotate_io(err: io::Error, path: &str) -> crate::Error {
    io::Error::new(err.kind(), format!("{path}: {err}")).into()
}

fn read_input(source: &str) -> Result<Vec<u8>> {
    if source == "-" {
        let mut bytes = Vec::new();
        io::stdin().read_to_end(&mut bytes)?;
        Ok(bytes)
    } else {
        fs::read(source).map_err(|e| annotate_io(e, source))
    }
}

fn write_output(dest: &str, bytes: &[u8]) -> Result<()> {
    if dest == "-" {
        io::stdout().write_all(bytes)?;
        io::stdout().flush()?;
        Ok(())
    } else {
        fs::write(dest, bytes).map_err(|e| annotate_io(e, dest))
    }
}

fn open_output(dest: &str) -> Result<BufWriter<Box<dyn Write>>> {
    let sink: Box<dyn Write> = if dest == "-" {
        Box::new(io::stdout())
    } else {
        Box::new(fs::File::create(Path::new(dest)).map_err(|e| annotate_io(e, dest))?)
    };
    Ok(BufWriter::new(sink))
}
