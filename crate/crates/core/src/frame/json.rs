//! Coefficient JSON interchange:
//!
//! ```json
//! {"M": 8, "N": 8, "lattice_step": 1.7724538509055159,
//!  "coefficients": [{"m": -8, "n": -8, "re": 0.0, "im": 0.0}, ...],
//!  "metadata": {...}}
//! ```
//!
//! `coefficients` covers the whole rectangle in row-major order (m outer,
//! n inner). `metadata` is free-form and optional.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CoeffGrid;
use crate::error::{Error, Result};
use crate::LATTICE_STEP;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Entry {
    m: i64,
    n: i64,
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Document {
    #[serde(rename = "M")]
    m_max: usize,
    #[serde(rename = "N")]
    n_max: usize,
    lattice_step: f64,
    coefficients: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
}

/// A coefficient grid with the metadata stored alongside it.
#[derive(Debug, Clone)]
pub struct CoeffFile {
    pub grid: CoeffGrid,
    pub metadata: Option<serde_json::Value>,
}

impl CoeffFile {
    pub fn from_reader(input: impl Read) -> Result<Self> {
        let doc: Document = serde_json::from_reader(input)?;
        if (doc.lattice_step - LATTICE_STEP).abs() > 1e-12 {
            return Err(Error::Format(format!(
                "lattice_step {} differs from √π",
                doc.lattice_step
            )));
        }
        let expected = (2 * doc.m_max + 1) * (2 * doc.n_max + 1);
        if doc.coefficients.len() != expected {
            return Err(Error::Format(format!(
                "expected {expected} coefficient rows for M={} N={}, found {}",
                doc.m_max,
                doc.n_max,
                doc.coefficients.len()
            )));
        }
        let mut grid = CoeffGrid::zeros(doc.m_max, doc.n_max);
        let sites: Vec<(i64, i64)> = grid.iter().map(|(m, n, _)| (m, n)).collect();
        for (row, (entry, (m, n))) in doc.coefficients.iter().zip(sites).enumerate() {
            if (entry.m, entry.n) != (m, n) {
                return Err(Error::Format(format!(
                    "row {row}: expected site ({m}, {n}), found ({}, {})",
                    entry.m, entry.n
                )));
            }
            if !(entry.re.is_finite() && entry.im.is_finite()) {
                return Err(Error::Format(format!("row {row}: non-finite amplitude")));
            }
            grid.set(m, n, Complex64::new(entry.re, entry.im));
        }
        Ok(Self {
            grid,
            metadata: doc.metadata,
        })
    }

    pub fn to_writer(&self, out: impl Write) -> Result<()> {
        let doc = Document {
            m_max: self.grid.m_max(),
            n_max: self.grid.n_max(),
            lattice_step: LATTICE_STEP,
            coefficients: self
                .grid
                .iter()
                .map(|(m, n, z)| Entry { m, n, re: z.re, im: z.im })
                .collect(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_writer_pretty(out, &doc)?;
        Ok(())
    }
}

pub fn read_coeff_json(path: impl AsRef<Path>) -> Result<CoeffFile> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    CoeffFile::from_reader(BufReader::new(file))
}

pub fn write_coeff_json(path: impl AsRef<Path>, file: &CoeffFile) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    file.to_writer(&mut out)?;
    writeln!(out).map_err(io)?;
    out.flush().map_err(io)
}
