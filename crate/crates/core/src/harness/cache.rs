use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CheckResult, Task};
use crate::error::{Error, Result};

/// Part of every cache key; entries written by another version are ignored.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "@", env!("CARGO_PKG_VERSION"));

#[derive(Serialize, Deserialize)]
struct Entry {
    code_version: String,
    result: CheckResult,
}

/// Append-only JSON Lines store of finished results.
#[derive(Debug)]
pub struct ResultCache {
    path: PathBuf,
    entries: HashMap<Task, CheckResult>,
}

impl ResultCache {
    /// Loads `path` if it exists. Lines from other code versions are skipped;
    /// a malformed line is an error.
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (no, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let e: Entry = serde_json::from_str(&line)
                    .map_err(|err| Error::Parse(format!("{}:{}: {err}", path.display(), no + 1)))?;
                if e.code_version != CODE_VERSION {
                    continue;
                }
                let key = Task {
                    check_id: e.result.check_id,
                    p: e.result.p,
                    params: e.result.params.clone(),
                };
                entries.insert(key, e.result);
            }
        }
        Ok(ResultCache {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, task: &Task) -> Option<&CheckResult> {
        self.entries.get(task)
    }

    pub fn append(&mut self, results: &[CheckResult]) -> Result<()> {
        if results.is_empty() {
            return Ok(());
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let mut out = BufWriter::new(file);
        for r in results {
            let e = Entry {
                code_version: CODE_VERSION.to_string(),
                result: r.clone(),
            };
            serde_json::to_writer(&mut out, &e)?;
            out.write_all(b"\n")?;
            let key = Task {
                check_id: r.check_id,
                p: r.p,
                params: r.params.clone(),
            };
            self.entries.insert(key, r.clone());
        }
        out.flush()?;
        Ok(())
    }
}
