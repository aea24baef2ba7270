//! Plot-ready records and their CSV/JSON serialization.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use oet_core::units::mw_to_dbm;
use oet_core::Scheme;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Column order of every CSV file.
pub const HEADER: [&str; 9] = ["scheme", "N", "j", "P", "P_dBm", "e_t", "metric", "value", "std_error"];

/// Significant digits kept in emitted numbers.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// One plotted point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub scheme: String,
    #[serde(rename = "N")]
    pub frames: usize,
    /// Frame index, for per-frame metrics.
    pub j: Option<usize>,
    /// Budget in mW.
    #[serde(rename = "P")]
    pub budget: f64,
    #[serde(rename = "P_dBm")]
    pub budget_dbm: f64,
    pub e_t: f64,
    pub metric: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Record {
    pub fn new(scheme: Scheme, frames: usize, budget: f64, e_t: f64, metric: &str, value: f64) -> Self {
        Self {
            scheme: scheme.to_string(),
            frames,
            j: None,
            budget,
            budget_dbm: mw_to_dbm(budget),
            e_t,
            metric: metric.to_string(),
            value,
            std_error: None,
        }
    }

    pub fn frame(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }

    pub fn std_error(mut self, se: f64) -> Self {
        self.std_error = Some(se);
        self
    }

    /// Overrides the derived dBm value with the one the user typed.
    pub fn budget_dbm(mut self, dbm: f64) -> Self {
        self.budget_dbm = dbm;
        self
    }

    fn rounded(&self) -> Result<Record, CliError> {
        let mut r = self.clone();
        for x in [&mut r.budget, &mut r.budget_dbm, &mut r.e_t, &mut r.value] {
            *x = round_significant(*x)?;
        }
        if let Some(se) = r.std_error.as_mut() {
            *se = round_significant(*se)?;
        }
        Ok(r)
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`]; non-finite values are rejected.
pub fn round_significant(x: f64) -> Result<f64, CliError> {
    if !x.is_finite() {
        return Err(CliError::NonFinite(x));
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let r: f64 = s.parse().expect("formatted float parses");
    // avoid "-0" in the output
    Ok(if r == 0.0 { 0.0 } else { r })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn write_csv<W: Write>(records: &[Record], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(r.rounded()?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(records: &[Record], mut out: W) -> Result<(), CliError> {
    let rounded = records.iter().map(Record::rounded).collect::<Result<Vec<_>, _>>()?;
    serde_json::to_writer_pretty(&mut out, &rounded)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn write<W: Write>(records: &[Record], format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json(records, out),
    }
}

/// Writes to `path` through a temporary file in the same directory, so a
/// failure never leaves a partial file behind. `None` writes to stdout.
pub fn emit(records: &[Record], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        return write(records, format, io::stdout().lock());
    };
    let io_err = |source: io::Error| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io_err)?;
    write(records, format, io::BufWriter::new(tmp.as_file_mut()))?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<Record>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().ne(HEADER) {
        return Err(CliError::Config(format!("unexpected CSV header: {headers:?}")));
    }
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}
