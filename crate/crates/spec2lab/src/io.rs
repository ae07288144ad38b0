//! JSON and CSV formats.
//!
//! Complex numbers are `{"re": x, "im": y}`; matrices are row-major
//! `{"dim": n, "re": [...], "im": [...]}` (or `rows`/`cols` when not square).

use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::spectra::{QuadraticPencil, SpectrumSet, Subspace};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Json { path: String, line: usize, column: usize, message: String },
    #[error("{path}: line {line}: {message}")]
    Csv { path: String, line: u64, message: String },
    #[error("{path}: field `{field}`: {message}")]
    Invalid { path: String, field: String, message: String },
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Json {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Writes through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), IoError> {
    let err = |source| IoError::File { path: path.display().to_string(), source };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(err)?;
        }
    }
    let tmp = path.with_extension("tmp~");
    std::fs::write(&tmp, contents).map_err(err)?;
    std::fs::rename(&tmp, path).map_err(err)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Real symmetric matrix from CSV rows (no header).
pub fn read_symmetric_csv(reader: impl Read, origin: &str) -> Result<HermitianMatrix, IoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IoError::Csv {
            path: origin.into(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(rows.len() as u64 + 1);
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| IoError::Csv { path: origin.into(), line, message: format!("`{s}`: {e}") })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(IoError::Csv { path: origin.into(), line: 0, message: "empty matrix".into() });
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(IoError::Csv {
                path: origin.into(),
                line: i as u64 + 1,
                message: format!("expected {n} entries, found {}", r.len()),
            });
        }
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0))
        .map_err(|e| IoError::Invalid { path: origin.into(), field: "entries".into(), message: e.to_string() })?;
    HermitianMatrix::new(m).map_err(|e| IoError::Invalid { path: origin.into(), field: "entries".into(), message: e.to_string() })
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

/// `#[serde(with = "complex")]` for a single number.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ComplexJson { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let c = ComplexJson::deserialize(d)?;
        Ok(Complex64::new(c.re, c.im))
    }
}

/// `#[serde(with = "complex_vec")]` for a list.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|z| ComplexJson { re: z.re, im: z.im }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let v = Vec::<ComplexJson>::deserialize(d)?;
        Ok(v.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cols: Option<usize>,
    re: Vec<f64>,
    #[serde(default)]
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = self.row_major();
        let (dim, rows, cols) = if self.is_square() {
            (Some(self.rows()), None, None)
        } else {
            (None, Some(self.rows()), Some(self.cols()))
        };
        MatrixJson {
            dim,
            rows,
            cols,
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = MatrixJson::deserialize(d)?;
        let (rows, cols) = match (m.dim, m.rows, m.cols) {
            (Some(n), None, None) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err(D::Error::custom("expected either `dim` or both `rows` and `cols`")),
        };
        let im = if m.im.is_empty() { vec![0.0; m.re.len()] } else { m.im };
        if m.re.len() != rows * cols || im.len() != rows * cols {
            return Err(D::Error::custom(format!(
                "expected {} entries in `re` and `im`, found {} and {}",
                rows * cols,
                m.re.len(),
                im.len()
            )));
        }
        let entries = m.re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        ComplexMatrix::new(rows, cols, entries).map_err(D::Error::custom)
    }
}

impl Serialize for HermitianMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        HermitianMatrix::new(ComplexMatrix::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl Serialize for SpectrumSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        complex_vec::serialize(self.points(), s)
    }
}

impl<'de> Deserialize<'de> for SpectrumSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        SpectrumSet::detect(complex_vec::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceJson {
    basis: ComplexMatrix,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SubspaceJson { basis: self.basis().clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Subspace::from_orthonormal(SubspaceJson::deserialize(d)?.basis).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PencilJson {
    b: HermitianMatrix,
    m: HermitianMatrix,
}

impl Serialize for QuadraticPencil {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PencilJson { b: self.b.clone(), m: self.m.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticPencil {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let p = PencilJson::deserialize(d)?;
        QuadraticPencil::general(p.b, p.m).map_err(D::Error::custom)
    }
}
