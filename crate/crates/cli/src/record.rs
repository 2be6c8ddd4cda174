//! Output rows and their CSV / JSON encodings.

use std::io::Write;

use num_rational::BigRational;
use polya_core::decimal::{format_f64, format_rational, SIG_DIGITS};
use polya_core::ExactProbability;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Binomial,
    Complement,
    Dp,
    Mc,
    Definetti,
    Normal,
    Chernoff,
}

/// One emitted result. Decimals are strings with 15 significant digits;
/// exact methods also carry the lossless `num/den` form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub b: u64,
    pub w: u64,
    pub method: Method,
    pub value: String,
    pub rational: Option<String>,
    pub kind: Option<String>,
    pub target: Option<i64>,
    pub horizon: Option<u64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub streams: Option<u32>,
    pub std_err: Option<String>,
    pub ci95_lo: Option<String>,
    pub ci95_hi: Option<String>,
    pub reference: Option<String>,
    pub z_score: Option<String>,
    pub rel_error: Option<String>,
}

pub fn dec(x: f64) -> String {
    format_f64(x, SIG_DIGITS)
}

pub fn dec_rational(r: &BigRational) -> String {
    format_rational(r, SIG_DIGITS)
}

pub fn ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl OutputRecord {
    pub fn new(b: u64, w: u64, method: Method, value: String) -> Self {
        Self {
            b,
            w,
            method,
            value,
            rational: None,
            kind: None,
            target: None,
            horizon: None,
            samples: None,
            seed: None,
            streams: None,
            std_err: None,
            ci95_lo: None,
            ci95_hi: None,
            reference: None,
            z_score: None,
            rel_error: None,
        }
    }

    pub fn exact(b: u64, w: u64, method: Method, p: &BigRational) -> Self {
        let mut r = Self::new(b, w, method, dec_rational(p));
        r.rational = Some(ratio(p));
        r
    }

    pub fn from_probability(b: u64, w: u64, method: Method, p: &ExactProbability) -> Self {
        Self::exact(b, w, method, p.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    records: &'a [OutputRecord],
    notes: &'a [String],
}

pub fn write_records(
    out: &mut dyn Write,
    format: Format,
    records: &[OutputRecord],
    notes: &[String],
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            let mut wtr = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            for r in records {
                wtr.serialize(r)?;
            }
            if records.is_empty() {
                wtr.write_record(CSV_HEADER)?;
            }
            wtr.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &JsonDocument { records, notes })?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub const CSV_HEADER: &[&str] = &[
    "b",
    "w",
    "method",
    "value",
    "rational",
    "kind",
    "target",
    "horizon",
    "samples",
    "seed",
    "streams",
    "std_err",
    "ci95_lo",
    "ci95_hi",
    "reference",
    "z_score",
    "rel_error",
];
