//! Report rows and their JSON / CSV serializations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{holds, PASS_SLACK};

pub const SCHEMA_VERSION: u32 = 1;

/// One checked (or observed) inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub check_id: String,
    pub descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    /// Observational rows are reported but never fail a run.
    pub asserted: bool,
    pub exactness: String,
    pub witness: String,
    pub error: Option<String>,
}

impl Row {
    pub fn new(check_id: &str, descriptor: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Row {
            check_id: check_id.to_string(),
            descriptor: descriptor.into(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            pass: holds(lhs, rhs),
            asserted: true,
            exactness: String::new(),
            witness: String::new(),
            error: None,
        }
    }

    /// A sub-check that was rejected before anything could be compared.
    pub fn rejected(check_id: &str, descriptor: impl Into<String>, err: &Error) -> Self {
        Row {
            check_id: check_id.to_string(),
            descriptor: descriptor.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            pass: false,
            asserted: false,
            exactness: String::new(),
            witness: String::new(),
            error: Some(format!("{}: {err}", err.code())),
        }
    }

    pub fn observational(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn asserted_if(mut self, asserted: bool) -> Self {
        self.asserted = asserted;
        self
    }

    pub fn exactness(mut self, tag: impl Into<String>) -> Self {
        self.exactness = tag.into();
        self
    }

    pub fn witness(mut self, w: impl Into<String>) -> Self {
        self.witness = w.into();
        self
    }

    pub fn failed(&self) -> bool {
        self.asserted && !self.pass
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: usize,
    pub asserted: usize,
    pub failed: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub seed: u64,
    pub pass_slack: f64,
    /// The configuration the rows were produced from.
    pub config: serde_json::Value,
    pub summary: Summary,
    pub rows: Vec<Row>,
}

impl Report {
    /// Sorts rows into canonical order and fills the summary.
    pub fn new(seed: u64, config: serde_json::Value, mut rows: Vec<Row>) -> Self {
        rows.sort_by(|a, b| (&a.check_id, &a.descriptor).cmp(&(&b.check_id, &b.descriptor)));
        let summary = Summary {
            rows: rows.len(),
            asserted: rows.iter().filter(|r| r.asserted).count(),
            failed: rows.iter().filter(|r| r.failed()).count(),
            rejected: rows.iter().filter(|r| r.error.is_some()).count(),
        };
        Report {
            schema_version: SCHEMA_VERSION,
            seed,
            pass_slack: PASS_SLACK,
            config,
            summary,
            rows,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.failed())
    }

    pub fn rows_for<'a>(&'a self, check_id: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.check_id == check_id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Report = serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "report schema version {} (expected {SCHEMA_VERSION})",
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// Flat rows, preceded by a `#schema_version=N` line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("#schema_version={SCHEMA_VERSION}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record([
                "check_id",
                "descriptor",
                "lhs",
                "rhs",
                "ratio",
                "pass",
                "asserted",
                "exactness",
                "witness",
                "error",
            ])
            .expect("in-memory write");
            for r in &self.rows {
                w.write_record([
                    r.check_id.clone(),
                    r.descriptor.clone(),
                    r.lhs.to_string(),
                    r.rhs.to_string(),
                    r.ratio.to_string(),
                    r.pass.to_string(),
                    r.asserted.to_string(),
                    r.exactness.clone(),
                    r.witness.clone(),
                    r.error.clone().unwrap_or_default(),
                ])
                .expect("in-memory write");
            }
            w.flush().expect("in-memory flush");
        }
        String::from_utf8(out).expect("csv is utf-8")
    }
}
