//! Report writers. Every CSV starts with a `# input-sha256:` comment and
//! every JSON report carries an `input_sha256` field.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

/// SHA-256 of the canonical JSON form of a resolved input.
pub fn input_hash<T: Serialize>(input: &T) -> String {
    let canonical = serde_json::to_vec(input).expect("input specs serialize");
    hex::encode(Sha256::digest(&canonical))
}

/// Which files a command writes.
#[derive(Clone, Debug)]
pub struct Output {
    pub dir: PathBuf,
    pub json: bool,
    pub csv: bool,
    pub hash: String,
}

impl Output {
    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_csv<I>(&self, name: &str, header: &[&str], rows: I) -> CliResult<Option<PathBuf>>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        if !self.csv {
            return Ok(None);
        }
        let path = self.path(name);
        write_csv_file(&path, &self.hash, header, rows)?;
        Ok(Some(path))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, report: &T) -> CliResult<Option<PathBuf>> {
        if !self.json {
            return Ok(None);
        }
        let path = self.path(name);
        write_json_file(&path, &self.hash, report)?;
        Ok(Some(path))
    }
}

/// Shortest round-trip form; scientific notation outside `[1e-4, 1e15)`.
fn number(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

pub fn write_csv_file<I>(path: &Path, hash: &str, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut buf = format!("# input-sha256: {hash}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|&v| number(v)))?;
        }
        w.flush()?;
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn write_json_file<T: Serialize>(path: &Path, hash: &str, report: &T) -> CliResult<()> {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    match &mut v {
        Value::Object(m) => {
            m.insert("input_sha256".into(), Value::String(hash.into()));
        }
        other => {
            *other = serde_json::json!({ "input_sha256": hash, "report": other.clone() });
        }
    }
    let mut text = serde_json::to_string_pretty(&v).expect("json values serialize");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
