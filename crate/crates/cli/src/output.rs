use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use dcos_core::dcos::{CensusTable, SampledCensus};

use crate::{Failure, Timed};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub struct Output {
    path: Option<PathBuf>,
    format: Format,
}

impl Output {
    pub fn new(path: Option<PathBuf>, flag: Format) -> Self {
        let format = match path.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => flag,
        };
        Output { path, format }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    fn write(&self, bytes: &[u8]) -> Result<(), Failure> {
        match &self.path {
            Some(path) => File::create(path)?.write_all(bytes)?,
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
            }
        }
        Ok(())
    }

    fn csv_only_for(&self, what: &str) -> Result<(), Failure> {
        if self.format == Format::Csv {
            return Err(Failure::Usage(format!("CSV output is not available for {}", what)));
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        self.csv_only_for("this command")?;
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| Failure::Failed(format!("serialization: {}", e)))?;
        text.push('\n');
        self.write(text.as_bytes())
    }

    fn csv<F>(&self, fill: F) -> Result<(), Failure>
    where
        F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        fill(&mut w).map_err(|e| Failure::Failed(format!("csv: {}", e)))?;
        let bytes = w
            .into_inner()
            .map_err(|e| Failure::Failed(format!("csv: {}", e)))?;
        self.write(&bytes)
    }

    pub fn census(&self, t: &CensusTable, elapsed: Option<f64>) -> Result<(), Failure> {
        match self.format {
            Format::Json => self.json(&Timed {
                report: t,
                elapsed,
            }),
            Format::Csv => {
                if t.counts.is_empty() {
                    return Err(Failure::Usage(
                        "the classes method yields only a total; use JSON output".into(),
                    ));
                }
                self.csv(|w| {
                    w.write_record(["k", "size_exponent", "count"])?;
                    for (k, c) in t.counts.iter().enumerate() {
                        w.write_record([k.to_string(), (t.m + k).to_string(), c.to_string()])?;
                    }
                    Ok(())
                })
            }
        }
    }

    pub fn sampled(&self, c: &SampledCensus, elapsed: Option<f64>) -> Result<(), Failure> {
        match self.format {
            Format::Json => self.json(&Timed {
                report: c,
                elapsed,
            }),
            Format::Csv => self.csv(|w| {
                w.write_record([
                    "k",
                    "size_exponent",
                    "count",
                    "estimate",
                    "std_error",
                    "ci95_lo",
                    "ci95_hi",
                ])?;
                for cell in &c.mass {
                    w.write_record([
                        cell.k.to_string(),
                        (c.m + cell.k).to_string(),
                        cell.hits.to_string(),
                        cell.estimate.to_string(),
                        cell.std_error.to_string(),
                        cell.ci95.lo.to_string(),
                        cell.ci95.hi.to_string(),
                    ])?;
                }
                Ok(())
            }),
        }
    }

    pub fn matching_csv(&self, counts: &[u64]) -> Result<(), Failure> {
        self.csv(|w| {
            w.write_record(["w", "count"])?;
            for (v, c) in counts.iter().enumerate() {
                w.write_record([v.to_string(), c.to_string()])?;
            }
            Ok(())
        })
    }
}
