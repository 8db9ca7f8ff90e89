//! CSV and JSON emission with a provenance header.
//!
//! CSV: `#`-prefixed metadata lines, one header row, comma-separated records,
//! floats in scientific notation with 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = concat!("superdiff ", env!("CARGO_PKG_VERSION"));

/// Provenance shared by every artifact of one run.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: String,
    pub master_seed: u64,
    pub config: String,
}

impl Meta {
    fn header(&self) -> String {
        let mut s = format!(
            "# {}\n# command: {}\n# master_seed: {}\n# config:\n",
            self.version, self.command, self.master_seed
        );
        for line in self.config.lines() {
            s.push_str("#   ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvOut {
    path: PathBuf,
    w: BufWriter<File>,
    columns: usize,
}

impl CsvOut {
    pub fn create(dir: &Path, name: &str, meta: &Meta, header: &[&str]) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        let mut w = BufWriter::new(File::create(&path)?);
        w.write_all(meta.header().as_bytes())?;
        writeln!(w, "{}", header.join(","))?;
        Ok(Self {
            path,
            w,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        debug_assert_eq!(fields.len(), self.columns);
        writeln!(self.w, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.w.flush()?;
        Ok(self.path)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    report: &'a T,
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, meta: &Meta, report: &T) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(&Envelope { meta, report })
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))?;
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

/// Records of a CSV written by [`CsvOut`], keyed by header name.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let header = rdr
        .headers()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}
