//! Report records and output formats shared by the `rootcong` binary and its tests.

use std::io::{self, Write};

use rootcong::{ClassificationResult, Criterion, Valuation, Verdict};
use serde::{Deserialize, Serialize};

/// One classified modulus, flattened for CSV and line-oriented JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub t: u64,
    pub d: u64,
    pub verdict: Verdict,
    pub decisive_criterion: String,
    pub witness_c: Option<u64>,
    pub witness_prime: Option<u64>,
    pub found_valuation: Option<Valuation>,
    pub required_valuation: Option<i64>,
    pub elapsed_ms: u64,
}

pub const CSV_HEADER: &str =
    "t,d,verdict,decisive_criterion,witness_c,witness_prime,found_valuation,required_valuation,elapsed_ms";

impl From<&ClassificationResult> for ReportRecord {
    fn from(r: &ClassificationResult) -> Self {
        let decisive = r.decisive();
        let failure = r
            .witness
            .as_ref()
            .and_then(|w| Some((w.failing_c?, w.witness()?)));
        ReportRecord {
            t: r.t,
            d: r.d,
            verdict: r.verdict,
            decisive_criterion: decisive.criterion.id().to_string(),
            witness_c: failure.map(|(c, _)| c),
            witness_prime: failure.map(|(_, w)| w.prime),
            found_valuation: failure.map(|(_, w)| w.found),
            required_valuation: failure.map(|(_, w)| w.required),
            elapsed_ms: r.wall_time.as_millis() as u64,
        }
    }
}

impl ReportRecord {
    pub fn criterion(&self) -> Option<Criterion> {
        Criterion::from_id(&self.decisive_criterion)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanFormat {
    Json,
    Csv,
}

/// Streams records in either format; the CSV header is written once, up front.
pub struct RecordWriter<W: Write> {
    inner: Sink<W>,
}

enum Sink<W: Write> {
    Json(W),
    Csv(Box<csv::Writer<W>>),
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, format: ScanFormat) -> io::Result<Self> {
        let inner = match format {
            ScanFormat::Json => Sink::Json(out),
            ScanFormat::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
                w.write_record(CSV_HEADER.split(','))?;
                Sink::Csv(Box::new(w))
            }
        };
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, record: &ReportRecord) -> io::Result<()> {
        match &mut self.inner {
            Sink::Json(w) => {
                serde_json::to_writer(&mut *w, record)?;
                w.write_all(b"\n")
            }
            Sink::Csv(w) => w.serialize(record).map_err(io::Error::other),
        }
    }

    pub fn flush(&mut self) -> io::Result<()> {
        match &mut self.inner {
            Sink::Json(w) => w.flush(),
            Sink::Csv(w) => w.flush(),
        }
    }
}

/// Parses output produced by [`RecordWriter`].
pub fn read_records(text: &str, format: ScanFormat) -> Result<Vec<ReportRecord>, String> {
    match format {
        ScanFormat::Json => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(|e| e.to_string()))
            .collect(),
        ScanFormat::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .map(|r| r.map_err(|e| e.to_string()))
            .collect(),
    }
}
