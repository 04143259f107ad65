//! Append-only JSON-lines checkpoint of a classification run.
//!
//! The stream is a header followed by `chunk` records, each holding the
//! children and census flags produced by a contiguous range of parents of one
//! level, and `level_done` markers. A run resumes after the last complete
//! chunk; anything after it (a torn final line) is truncated.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ClassifyError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub version: u32,
    pub q: u32,
    pub h: usize,
    pub r: usize,
    pub max_size: usize,
    pub group: super::GroupKind,
    pub seed: Option<u64>,
}

/// Census flags of a range of parents.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub complete: u64,
    pub disjoint: u64,
    pub disjoint_complete: u64,
}

impl Census {
    pub fn add(&mut self, o: &Census) {
        self.complete += o.complete;
        self.disjoint += o.disjoint;
        self.disjoint_complete += o.disjoint_complete;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    Header(Header),
    /// Parents `from..to` of level `size` (in processing order).
    Chunk { size: usize, from: usize, to: usize, census: Census, children: Vec<Vec<u32>> },
    LevelDone { size: usize },
}

pub struct Writer {
    file: File,
}

impl Writer {
    pub fn create(path: &Path, header: &Header) -> Result<Writer, ClassifyError> {
        let mut w = Writer { file: File::create(path)? };
        w.append(&Record::Header(header.clone()))?;
        Ok(w)
    }

    /// Opens an existing checkpoint for appending after `valid_len` bytes.
    pub fn resume(path: &Path, valid_len: u64) -> Result<Writer, ClassifyError> {
        let mut file = OpenOptions::new().write(true).open(path)?;
        file.set_len(valid_len)?;
        file.seek(SeekFrom::End(0))?;
        Ok(Writer { file })
    }

    pub fn append(&mut self, rec: &Record) -> Result<(), ClassifyError> {
        let mut line = serde_json::to_string(rec).map_err(|e| ClassifyError::Checkpoint(e.to_string()))?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

/// Records of a checkpoint up to the last well-formed line, and that line's end offset.
pub fn read(path: &Path) -> Result<(Vec<Record>, u64), ClassifyError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    let mut valid = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line)?;
        if n == 0 || !line.ends_with('\n') {
            break;
        }
        match serde_json::from_str::<Record>(line.trim_end()) {
            Ok(rec) => {
                out.push(rec);
                valid += n as u64;
            }
            Err(_) => break,
        }
    }
    Ok((out, valid))
}
