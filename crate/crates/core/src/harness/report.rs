use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use super::{CheckId, CheckResult, Status};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

fn params_text(r: &CheckResult) -> String {
    let mut parts = Vec::new();
    if let Some(d) = r.params.d {
        parts.push(format!("d={d}"));
    }
    if let Some(b) = r.params.precision_bits {
        parts.push(format!("bits={b}"));
    }
    parts.join(" ")
}

fn witness_text(r: &CheckResult) -> String {
    r.witness
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_results(out: &mut dyn Write, results: &[CheckResult], format: Format) -> Result<()> {
    match format {
        Format::Json => {
            for r in results {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(&mut *out);
            wtr.write_record(["check_id", "p", "d", "precision_bits", "status", "witness"])
                .map_err(csv_err)?;
            for r in results {
                let d = r.params.d.map(|d| d.to_string()).unwrap_or_default();
                let bits = r
                    .params
                    .precision_bits
                    .map(|b| b.to_string())
                    .unwrap_or_default();
                wtr.write_record([
                    r.check_id.as_str(),
                    &r.p.to_string(),
                    &d,
                    &bits,
                    &r.status.to_string(),
                    &witness_text(r),
                ])
                .map_err(csv_err)?;
            }
            wtr.flush()?;
        }
        Format::Text => {
            for r in results {
                let params = params_text(r);
                writeln!(
                    out,
                    "{:<13} p={:<5} {:<10} {:<7} {}",
                    r.check_id.as_str(),
                    r.p,
                    params,
                    r.status.to_string(),
                    witness_text(r)
                )?;
            }
        }
    }
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub run: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Counts {
    fn add(&mut self, s: Status) {
        self.run += 1;
        match s {
            Status::Pass => self.passed += 1,
            Status::Fail => self.failed += 1,
            Status::Skipped => self.skipped += 1,
        }
    }
}

/// Per-check tallies of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub rows: BTreeMap<CheckId, Counts>,
}

impl Summary {
    pub fn of(results: &[CheckResult]) -> Self {
        let mut rows: BTreeMap<CheckId, Counts> = BTreeMap::new();
        for r in results {
            rows.entry(r.check_id).or_default().add(r.status);
        }
        Summary { rows }
    }

    pub fn total(&self) -> Counts {
        self.rows.values().fold(Counts::default(), |acc, c| Counts {
            run: acc.run + c.run,
            passed: acc.passed + c.passed,
            failed: acc.failed + c.failed,
            skipped: acc.skipped + c.skipped,
        })
    }

    pub fn failed(&self) -> usize {
        self.total().failed
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let line = |s: &mut String, name: &str, c: &Counts| {
            let _ = writeln!(
                s,
                "{name:<13} {:>7} {:>7} {:>7} {:>7}",
                c.run, c.passed, c.failed, c.skipped
            );
        };
        let _ = writeln!(
            s,
            "{:<13} {:>7} {:>7} {:>7} {:>7}",
            "check", "run", "passed", "failed", "skipped"
        );
        for (id, c) in &self.rows {
            line(&mut s, id.as_str(), c);
        }
        line(&mut s, "total", &self.total());
        s
    }
}
