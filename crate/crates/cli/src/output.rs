use std::io::Write;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

/// What a command produced, renderable in every supported format.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
    pub status: Status,
}

pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Maps onto the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Failed = 1,
    Usage = 2,
    Indeterminate = 3,
}

impl Report {
    pub fn new(value: &impl Serialize, text: impl Into<String>) -> Result<Self> {
        Ok(Self {
            json: serde_json::to_value(value)?,
            text: text.into(),
            csv: None,
            status: Status::Ok,
        })
    }

    pub fn with_csv(mut self, csv: Csv) -> Result<Self> {
        self.csv = Some(csv.render()?);
        Ok(self)
    }

    pub fn with_raw_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    /// Names the check a report answers, as a top-level JSON field.
    pub fn named(mut self, check: &str) -> Self {
        if let Value::Object(map) = &mut self.json {
            map.insert("check".into(), Value::String(check.into()));
        }
        self
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    /// Marks the report as a check: `pass` decides between Ok and Failed.
    pub fn check(self, pass: bool) -> Self {
        self.with_status(if pass { Status::Ok } else { Status::Failed })
    }

    pub fn emit(&self, format: Format, out: &mut impl Write) -> Result<()> {
        match format {
            Format::Text => {
                write!(out, "{}", self.text)?;
                if !self.text.ends_with('\n') {
                    writeln!(out)?;
                }
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json)?;
                writeln!(out)?;
            }
            Format::Csv => {
                let Some(csv) = &self.csv else {
                    bail!(UsageError(
                        "this command has no CSV form; use --format json or text".into()
                    ));
                };
                out.write_all(csv.as_bytes())?;
            }
        }
        Ok(())
    }
}

/// An error that should exit with the usage status.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}
