//! Corpus measurement: compressed sizes, bits per base, and wall-clock
//! medians over repeated runs, with a mandatory round-trip check.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pipeline::{self, EncodeOptions};
use crate::precoder::{self, NormalizationOptions};

/// One corpus file, as listed in a manifest line
/// `name<TAB>path[<TAB>bases[<TAB>sha256]]`.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub path: PathBuf,
    pub expected_bases: Option<u64>,
    pub expected_sha256: Option<String>,
}

/// Parses a manifest. Blank lines and `#` comment lines are skipped.
pub fn parse_manifest(text: &str) -> Result<Vec<CorpusEntry>> {
    let mut entries = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw_line.trim_end_matches('\r');
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() < 2 || fields.len() > 4 {
            return Err(Error::BadManifest {
                line,
                reason: format!("expected 2 to 4 tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::BadManifest {
                line,
                reason: "name and path must not be empty".into(),
            });
        }
        let expected_bases = match fields.get(2) {
            None | Some(&"") => None,
            Some(s) => Some(s.parse::<u64>().map_err(|_| Error::BadManifest {
                line,
                reason: format!("bad base count {s:?}"),
            })?),
        };
        let expected_sha256 = match fields.get(3) {
            None | Some(&"") => None,
            Some(s) => {
                if s.len() != 64 || !s.bytes().all(|b| b.is_ascii_hexdigit()) {
                    return Err(Error::BadManifest {
                        line,
                        reason: format!("bad sha256 {s:?}"),
                    });
                }
                Some(s.to_ascii_lowercase())
            }
        };
        entries.push(CorpusEntry {
            name: fields[0].to_string(),
            path: PathBuf::from(fields[1]),
            expected_bases,
            expected_sha256,
        });
    }
    Ok(entries)
}

/// Mean compressed bits per input base.
pub fn bits_per_base(compressed_bytes: u64, bases: u64) -> Result<f64> {
    if bases == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(compressed_bytes as f64 * 8.0 / bases as f64)
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub stage2: bool,
    /// Timing repetitions per file; the report shows the median.
    pub repeat: usize,
    pub normalization: NormalizationOptions,
}

impl Default for BenchOptions {
    fn default() -> BenchOptions {
        BenchOptions {
            stage2: true,
            repeat: 5,
            normalization: NormalizationOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub base_count: u64,
    pub precoded_bytes: u64,
    pub final_bytes: u64,
    pub r_bar: f64,
    pub encode_ms: f64,
    pub decode_ms: f64,
    /// A failed row reports why and zeroes the measurements.
    pub error: Option<String>,
}

impl BenchRow {
    fn failed(name: &str, reason: String) -> BenchRow {
        BenchRow {
            name: name.to_string(),
            base_count: 0,
            precoded_bytes: 0,
            final_bytes: 0,
            r_bar: 0.0,
            encode_ms: 0.0,
            decode_ms: 0.0,
            error: Some(reason),
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

pub fn run_corpus(entries: &[CorpusEntry], opts: &BenchOptions) -> Vec<BenchRow> {
    entries.iter().map(|entry| run_entry(entry, opts)).collect()
}

fn run_entry(entry: &CorpusEntry, opts: &BenchOptions) -> BenchRow {
    let raw = match fs::read(&entry.path) {
        Ok(raw) => raw,
        Err(e) => {
            return BenchRow::failed(&entry.name, format!("unreadable: {e}"));
        }
    };
    if let Some(expected) = &entry.expected_sha256 {
        let digest = Sha256::digest(&raw);
        let hex: String = digest.iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        if &hex != expected {
            return BenchRow::failed(
                &entry.name,
                format!("checksum mismatch: file is {hex}, manifest says {expected}"),
            );
        }
    }
    let bases = match precoder::normalize(&raw, opts.normalization) {
        Ok(bases) => bases,
        Err(e) => return BenchRow::failed(&entry.name, e.to_string()),
    };
    let base_count = bases.len() as u64;
    if let Some(expected) = entry.expected_bases {
        if base_count != expected {
            return BenchRow::failed(
                &entry.name,
                format!("file has {base_count} bases, manifest says {expected}"),
            );
        }
    }
    if base_count == 0 {
        return BenchRow::failed(&entry.name, "empty sequence".into());
    }
    let precoded_bytes = precoder::serialize_precoded(&precoder::precode(&bases)).len() as u64;

    let encode_opts = EncodeOptions {
        normalization: opts.normalization,
        stage2: opts.stage2,
        ..EncodeOptions::default()
    };
    let reps = opts.repeat.max(1);
    let mut encoded = Vec::new();
    let mut encode_times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        encoded = match pipeline::encode(&raw, &encode_opts) {
            Ok(encoded) => encoded,
            Err(e) => return BenchRow::failed(&entry.name, e.to_string()),
        };
        encode_times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let mut decoded = Vec::new();
    let mut decode_times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        decoded = match pipeline::decode(&encoded) {
            Ok(decoded) => decoded,
            Err(e) => return BenchRow::failed(&entry.name, e.to_string()),
        };
        decode_times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    if decoded != bases {
        return BenchRow::failed(&entry.name, "round trip mismatch".into());
    }
    let final_bytes = encoded.len() as u64;
    let r_bar = match bits_per_base(final_bytes, base_count) {
        Ok(r) => r,
        Err(e) => return BenchRow::failed(&entry.name, e.to_string()),
    };
    BenchRow {
        name: entry.name.clone(),
        base_count,
        precoded_bytes,
        final_bytes,
        r_bar,
        encode_ms: median(encode_times),
        decode_ms: median(decode_times),
        error: None,
    }
}

fn median(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        (samples[n / 2 - 1] + samples[n / 2]) / 2.0
    }
}

fn mean_ratio(rows: &[BenchRow]) -> Option<f64> {
    let ok: Vec<&BenchRow> = rows.iter().filter(|r| r.ok()).collect();
    if ok.is_empty() {
        return None;
    }
    Some(ok.iter().map(|r| r.r_bar).sum::<f64>() / ok.len() as f64)
}

const COLUMNS: [&str; 8] = [
    "name",
    "bases",
    "precoded_bytes",
    "final_bytes",
    "bits_per_base",
    "encode_ms",
    "decode_ms",
    "status",
];

fn row_cells(row: &BenchRow) -> [String; 8] {
    match &row.error {
        Some(reason) => [
            row.name.clone(),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
            "-".into(),
            format!("FAILED: {reason}"),
        ],
        None => [
            row.name.clone(),
            row.base_count.to_string(),
            row.precoded_bytes.to_string(),
            row.final_bytes.to_string(),
            format!("{:.4}", row.r_bar),
            format!("{:.2}", row.encode_ms),
            format!("{:.2}", row.decode_ms),
            "ok".into(),
        ],
    }
}

fn average_cells(rows: &[BenchRow]) -> [String; 8] {
    let r_bar = match mean_ratio(rows) {
        Some(r) => format!("{r:.4}"),
        None => "-".into(),
    };
    [
        "Average".into(),
        "-".into(),
        "-".into(),
        "-".into(),
        r_bar,
        "-".into(),
        "-".into(),
        "".into(),
    ]
}

/// Machine-readable report: one tab-separated line per row plus a
/// trailing average line.
pub fn format_report_tsv(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    out.push_str(&COLUMNS.join("\t"));
    out.push('\n');
    for row in rows {
        out.push_str(&row_cells(row).join("\t"));
        out.push('\n');
    }
    out.push_str(&average_cells(rows).join("\t"));
    out.push('\n');
    out
}

/// Column-aligned rendering of the same report for terminals.
pub fn format_report_table(rows: &[BenchRow]) -> String {
    let mut lines: Vec<[String; 8]> = Vec::with_capacity(rows.len() + 2);
    lines.push(COLUMNS.map(String::from));
    for row in rows {
        lines.push(row_cells(row));
    }
    lines.push(average_cells(rows));
    let mut widths = [0usize; 8];
    for line in &lines {
        for (w, cell) in widths.iter_mut().zip(line.iter()) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for line in &lines {
        let mut rendered = String::new();
        for (i, cell) in line.iter().enumerate() {
            if i > 0 {
                rendered.push_str("  ");
            }
            if i == 0 {
                let _ = write!(rendered, "{cell:<width$}", width = widths[0]);
            } else {
                let _ = write!(rendered, "{cell:>width$}", width = widths[i]);
            }
        }
        out.push_str(rendered.trim_end());
        out.push('\n');
    }
    out
}
