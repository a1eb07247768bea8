//! Matrix serialization and the experiment manifest.
//!
//! CSV layout: one `# key=value ...` header comment, then `n` rows of `n`
//! comma-separated values printed with 17 significant digits, which
//! round-trips every f64 exactly. JSON carries the same header fields
//! plus a row-major value array.

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::FileFormat;

/// Header of an exported matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixHeader {
    pub p: u32,
    pub l: u32,
    /// generator | classical | quantum | limiting
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    /// spectral | oscillatory | heat-kernel | construction
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub header: MatrixHeader,
    pub values: DMatrix<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixJson {
    #[serde(flatten)]
    header: MatrixHeader,
    rows: usize,
    values: Vec<f64>,
}

fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

impl MatrixFile {
    pub fn to_csv(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        write!(out, "# p={} l={} kind={}", h.p, h.l, h.kind).unwrap();
        if let Some(t) = h.t {
            write!(out, " t={t}").unwrap();
        }
        if let Some(method) = &h.method {
            write!(out, " method={method}").unwrap();
        }
        writeln!(out, " provenance={}", h.provenance).unwrap();
        for i in 0..self.values.nrows() {
            let row: Vec<String> = (0..self.values.ncols())
                .map(|k| format_value(self.values[(i, k)]))
                .collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header_line = lines.next().context("empty matrix file")?;
        let header_line = header_line
            .strip_prefix("# ")
            .context("missing `# ` header comment")?;
        let mut p = None;
        let mut l = None;
        let mut kind = None;
        let mut t = None;
        let mut method = None;
        let mut provenance = None;
        for field in header_line.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .with_context(|| format!("malformed header field {field:?}"))?;
            match key {
                "p" => p = Some(value.parse()?),
                "l" => l = Some(value.parse()?),
                "kind" => kind = Some(value.to_string()),
                "t" => t = Some(value.parse()?),
                "method" => method = Some(value.to_string()),
                "provenance" => provenance = Some(value.to_string()),
                other => bail!("unknown header key {other:?}"),
            }
        }
        let rows: Vec<Vec<f64>> = lines
            .filter(|line| !line.is_empty())
            .map(|line| {
                line.split(',')
                    .map(|v| v.parse::<f64>().map_err(Into::into))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            bail!("matrix is not square");
        }
        let values = DMatrix::from_fn(n, n, |i, k| rows[i][k]);
        Ok(Self {
            header: MatrixHeader {
                p: p.context("header missing p")?,
                l: l.context("header missing l")?,
                kind: kind.context("header missing kind")?,
                t,
                method,
                provenance: provenance.context("header missing provenance")?,
            },
            values,
        })
    }

    pub fn to_json(&self) -> String {
        let n = self.values.nrows();
        let mut flat = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                flat.push(self.values[(i, k)]);
            }
        }
        let doc = MatrixJson {
            header: self.header.clone(),
            rows: n,
            values: flat,
        };
        serde_json::to_string_pretty(&doc).expect("matrix serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MatrixJson = serde_json::from_str(text)?;
        let n = doc.rows;
        if doc.values.len() != n * n {
            bail!("value count {} does not match rows {n}", doc.values.len());
        }
        let values = DMatrix::from_fn(n, n, |i, k| doc.values[i * n + k]);
        Ok(Self {
            header: doc.header,
            values,
        })
    }
}

/// A plot-ready rectangular table: named columns over a shared grid, used
/// for trajectories and parameter sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableFile {
    pub p: u32,
    pub l: u32,
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TableFile {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# p={} l={} kind={}", self.p, self.l, self.kind).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

/// Writes a table in the requested formats, returning the created paths.
pub fn write_table(
    dir: &Path,
    stem: &str,
    table: &TableFile,
    formats: &[FileFormat],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for format in formats {
        let (ext, body) = match format {
            FileFormat::Csv => ("csv", table.to_csv()),
            FileFormat::Json => ("json", table.to_json()),
        };
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

/// One output file recorded in the manifest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    /// Which display of the experiment this file backs, e.g. "figure-3".
    pub figure: String,
    pub description: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub parameters: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

/// Writes a matrix in the requested formats, returning the created paths.
pub fn write_matrix(
    dir: &Path,
    stem: &str,
    file: &MatrixFile,
    formats: &[FileFormat],
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for format in formats {
        let (ext, body) = match format {
            FileFormat::Csv => ("csv", file.to_csv()),
            FileFormat::Json => ("json", file.to_json()),
        };
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}
