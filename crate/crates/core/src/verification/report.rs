use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CheckResult, Evidence, SuiteReport, Verdict};
use crate::error::{usage, Error, Result};

pub const CSV_COLUMNS: [&str; 14] = [
    "suite", "check", "m", "n", "dist", "trials", "seed", "expected", "p_hat", "ci_low", "ci_high", "level", "ties",
    "passed",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    JsonLines,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "jsonl" | "json-lines" | "jsonlines" => Ok(ReportFormat::JsonLines),
            other => Err(usage(format!("unsupported report format {other:?} (use csv or jsonl)"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::JsonLines => "jsonl",
        })
    }
}

/// One flattened check. Field order is the column order.
///
/// Exact checks leave `trials`, `level` and `ties` empty and report the
/// tolerance band as `[ci_low, ci_high]`. Excluded checks leave `expected`
/// empty and carry `passed = "excluded"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub suite: String,
    pub check: String,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub dist: String,
    pub trials: Option<u64>,
    pub seed: String,
    pub expected: Option<f64>,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: Option<f64>,
    pub ties: Option<u64>,
    pub passed: String,
}

impl ReportRow {
    pub fn from_check(suite: &str, check: &CheckResult) -> Self {
        let (trials, seed, p_hat, ci_low, ci_high, level, ties) = match &check.evidence {
            Evidence::Statistical(est) => (
                Some(est.trials),
                est.seed.to_string(),
                est.point,
                est.low,
                est.high,
                Some(est.level),
                Some(est.ties),
            ),
            Evidence::Exact { value, tol } => (None, String::new(), *value, value - tol, value + tol, None, None),
        };
        ReportRow {
            suite: suite.to_string(),
            check: check.name.clone(),
            m: check.m,
            n: check.n,
            dist: check.dist.clone(),
            trials,
            seed,
            expected: check.expected,
            p_hat,
            ci_low,
            ci_high,
            level,
            ties,
            passed: match check.verdict {
                Verdict::Pass => "true",
                Verdict::Fail => "false",
                Verdict::Excluded => "excluded",
            }
            .to_string(),
        }
    }
}

fn rows<'a>(reports: &'a [&'a SuiteReport]) -> impl Iterator<Item = ReportRow> + 'a {
    reports
        .iter()
        .flat_map(|r| r.checks.iter().map(move |c| ReportRow::from_check(&r.suite, c)))
}

fn report_error(e: impl fmt::Display) -> Error {
    Error::Report(e.to_string())
}

pub fn render_report(report: &SuiteReport, format: ReportFormat) -> Result<Vec<u8>> {
    render_reports(&[report], format)
}

/// Renders the checks of several reports, in order, as one table. CSV output
/// always starts with the header line, even when there are no checks.
pub fn render_reports(reports: &[&SuiteReport], format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => {
            let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            writer.write_record(CSV_COLUMNS).map_err(report_error)?;
            for row in rows(reports) {
                writer.serialize(row).map_err(report_error)?;
            }
            writer.into_inner().map_err(report_error)
        }
        ReportFormat::JsonLines => {
            let mut out = Vec::new();
            for row in rows(reports) {
                serde_json::to_writer(&mut out, &row).map_err(report_error)?;
                out.push(b'\n');
            }
            Ok(out)
        }
    }
}

pub fn parse_report(bytes: &[u8], format: ReportFormat) -> Result<Vec<ReportRow>> {
    match format {
        ReportFormat::Csv => {
            let mut reader = csv::Reader::from_reader(bytes);
            let header = reader.headers().map_err(report_error)?;
            if header.iter().ne(CSV_COLUMNS) {
                return Err(Error::Report(format!("unexpected CSV header {header:?}")));
            }
            reader
                .deserialize()
                .collect::<std::result::Result<Vec<ReportRow>, _>>()
                .map_err(report_error)
        }
        ReportFormat::JsonLines => bytes
            .split(|&b| b == b'\n')
            .filter(|line| !line.iter().all(u8::is_ascii_whitespace))
            .map(|line| serde_json::from_slice(line).map_err(report_error))
            .collect(),
    }
}
