//! Packing files.
//!
//! JSON: `{"dim": d, "centers": [[x1, ..., xd], ...]}`.
//!
//! CSV: a `# dim=d` comment line, a header `x1,...,xd`, then one center per
//! row. Other `#` lines are ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packing::Packing;

#[derive(Debug, Serialize, Deserialize)]
struct PackingFile {
    dim: usize,
    centers: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// Guesses the format from the file extension; anything but `.csv` is JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

pub fn packing_to_json(p: &Packing) -> Result<String> {
    let file = PackingFile { dim: p.dim(), centers: p.to_nested() };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn packing_from_json(s: &str) -> Result<Packing> {
    let file: PackingFile = serde_json::from_str(s)?;
    Packing::new(file.dim, &file.centers)
}

pub fn packing_to_csv(p: &Packing) -> String {
    let mut out = format!("# dim={}\n", p.dim());
    let header: Vec<String> = (1..=p.dim()).map(|k| format!("x{k}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for c in p.centers() {
        let row: Vec<String> = c.iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn packing_from_csv(s: &str) -> Result<Packing> {
    let mut dim = None;
    let mut body = String::new();
    for line in s.lines() {
        let t = line.trim();
        if let Some(comment) = t.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("dim=") {
                let d = v.trim().parse::<usize>().map_err(|e| Error::Parse(format!("dim: {e}")))?;
                dim = Some(d);
            }
        } else if !t.is_empty() {
            body.push_str(t);
            body.push('\n');
        }
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let header_dim = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.len();
    let dim = dim.unwrap_or(header_dim);
    if header_dim != dim {
        return Err(Error::Parse(format!("header has {header_dim} columns, dim={dim}")));
    }
    let mut centers = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|e| Error::Parse(format!("`{f}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        centers.push(row);
    }
    Packing::new(dim, &centers)
}

pub fn read_packing(path: &Path) -> Result<Packing> {
    let text = fs::read_to_string(path)?;
    match Format::from_path(path) {
        Format::Json => packing_from_json(&text),
        Format::Csv => packing_from_csv(&text),
    }
}

pub fn write_packing(path: &Path, p: &Packing) -> Result<()> {
    let text = match Format::from_path(path) {
        Format::Json => packing_to_json(p)?,
        Format::Csv => packing_to_csv(p),
    };
    let mut f = fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}
