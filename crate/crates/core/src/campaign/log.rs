//! The result log: one JSON object per line, header first.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::Certificate;
use crate::model::CaseSignature;

pub const LOG_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: u32,
    pub code_version: String,
    /// Digest of the settings that determine the certificates.
    pub config_digest: String,
    pub degrees: (u32, u32),
    pub primes: Vec<u32>,
    pub base_seed: u64,
    pub max_attempts: u32,
    pub fundamental: bool,
    /// `"i/n"`; informational, not part of the digest.
    pub shard: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum LogRecord {
    Header(LogHeader),
    Certificate {
        case: CaseSignature,
        case_index: u64,
        certificate: Certificate,
    },
    /// The check itself failed, for instance on the memory guard.
    Failure {
        case: CaseSignature,
        case_index: u64,
        error: String,
    },
}

impl LogRecord {
    pub fn case(&self) -> Option<CaseSignature> {
        match self {
            LogRecord::Header(_) => None,
            LogRecord::Certificate { case, .. } | LogRecord::Failure { case, .. } => Some(*case),
        }
    }
}

/// A parsed log. Line numbers start at 1.
#[derive(Debug, Clone, Default)]
pub struct LogContents {
    pub header: Option<LogHeader>,
    pub records: Vec<(usize, LogRecord)>,
    pub corrupt: Vec<(usize, String)>,
    /// The last line has no newline and did not parse: an interrupted write.
    pub torn_tail: Option<usize>,
}

impl LogContents {
    pub fn certificates(&self) -> impl Iterator<Item = &Certificate> {
        self.records.iter().filter_map(|(_, r)| match r {
            LogRecord::Certificate { certificate, .. } => Some(certificate),
            _ => None,
        })
    }
}

pub fn read_log(path: &Path) -> Result<LogContents> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut out = LogContents::default();
    let mut line = String::new();
    let mut number = 0;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
        if read == 0 {
            break;
        }
        number += 1;
        let complete = line.ends_with('\n');
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        match serde_json::from_str::<LogRecord>(text) {
            Ok(LogRecord::Header(h)) if number == 1 => out.header = Some(h),
            Ok(LogRecord::Header(_)) => out.corrupt.push((number, "header after line 1".into())),
            Ok(record) => out.records.push((number, record)),
            Err(_) if !complete => out.torn_tail = Some(number),
            Err(e) => out.corrupt.push((number, e.to_string())),
        }
    }
    Ok(out)
}

/// Appends records, flushing after each one.
pub struct LogWriter {
    file: File,
    path: std::path::PathBuf,
}

impl LogWriter {
    pub fn create(path: &Path, header: &LogHeader) -> Result<Self> {
        let file = File::options()
            .write(true)
            .create_new(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut w = LogWriter {
            file,
            path: path.to_path_buf(),
        };
        w.append(&LogRecord::Header(header.clone()))?;
        Ok(w)
    }

    /// Opens an existing log for appending. A torn last line is cut off
    /// first.
    pub fn reopen(path: &Path, torn_tail: bool) -> Result<Self> {
        if torn_tail {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
            let file = File::options().write(true).open(path).map_err(|e| Error::io(path, e))?;
            file.set_len(keep as u64).map_err(|e| Error::io(path, e))?;
        }
        let file = File::options()
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(LogWriter {
            file,
            path: path.to_path_buf(),
        })
    }

    pub fn append(&mut self, record: &LogRecord) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|()| self.file.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}
