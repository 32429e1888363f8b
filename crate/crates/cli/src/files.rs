//! JSON file formats for channels, states and observables.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows. Every
//! file carries `"schema_version": 1`. Writers emit floats with 17 significant
//! digits, so a write/read cycle reproduces each `f64` bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use qudit_destruction::channels::KrausChannel;
use qudit_destruction::numerics::ComplexMatrix;
use qudit_destruction::state_space::{make_observable_with, make_space, validate_density, DensityOperator, ExtendedSpace, Observable};
use qudit_destruction::ToleranceConfig;
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub schema_version: u32,
    pub qudit_dim: usize,
    pub elements: Vec<MatrixRows>,
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: u32,
    pub qudit_dim: usize,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableFile {
    pub schema_version: u32,
    pub qudit_dim: usize,
    pub matrix: MatrixRows,
}

fn check_header(schema_version: u32, qudit_dim: usize) -> Result<ExtendedSpace, CliError> {
    if schema_version != SCHEMA_VERSION {
        return Err(CliError::Parse(format!(
            "unsupported schema_version {schema_version} (expected {SCHEMA_VERSION})"
        )));
    }
    make_space(qudit_dim).map_err(|e| CliError::Parse(e.to_string()))
}

fn rows_to_matrix(rows: &MatrixRows, dim: usize, what: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != dim {
        return Err(CliError::Parse(format!("{what}: has {} rows, expected {dim}", rows.len())));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::Parse(format!(
                "{what}: row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        entries.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
    }
    ComplexMatrix::from_row_major(dim, entries).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

fn matrix_to_rows(m: &ComplexMatrix) -> MatrixRows {
    let n = m.dim();
    (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j)).map(|z| [z.re, z.im]).collect())
        .collect()
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            qudit_dim: ch.space().qudit_dim(),
            elements: ch.elements().iter().map(matrix_to_rows).collect(),
            label: Some(ch.label().to_string()),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel, CliError> {
        let space = check_header(self.schema_version, self.qudit_dim)?;
        let n = space.total_dim();
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(k, rows)| rows_to_matrix(rows, n, &format!("element {k}")))
            .collect::<Result<Vec<_>, _>>()?;
        let label = self.label.clone().unwrap_or_default();
        KrausChannel::new(space, elements, label).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"schema_version\": {},", self.schema_version);
        let _ = writeln!(out, "  \"qudit_dim\": {},", self.qudit_dim);
        if let Some(label) = &self.label {
            let _ = writeln!(out, "  \"label\": {},", serde_json::to_string(label).expect("strings serialize"));
        }
        out.push_str("  \"elements\": [\n");
        for (k, rows) in self.elements.iter().enumerate() {
            write_rows(&mut out, rows, "    ");
            out.push_str(if k + 1 < self.elements.len() { ",\n" } else { "\n" });
        }
        out.push_str("  ]\n}\n");
        out
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }
}

impl StateFile {
    pub fn from_state(rho: &DensityOperator) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            qudit_dim: rho.space().qudit_dim(),
            matrix: matrix_to_rows(rho.matrix()),
        }
    }

    /// Parses the matrix and validates it as a density operator. Shape problems
    /// are parse errors; a well-formed but invalid state is a semantic error.
    pub fn to_state(&self, tol: &ToleranceConfig) -> Result<DensityOperator, CliError> {
        let space = check_header(self.schema_version, self.qudit_dim)?;
        let m = rows_to_matrix(&self.matrix, space.total_dim(), "matrix")?;
        validate_density(space, &m, tol).map_err(CliError::Semantic)
    }

    pub fn to_json(&self) -> String {
        matrix_file_json(self.schema_version, self.qudit_dim, &self.matrix)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }
}

impl ObservableFile {
    pub fn from_qudit_matrix(qudit_dim: usize, m: &ComplexMatrix) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            qudit_dim,
            matrix: matrix_to_rows(m),
        }
    }

    pub fn to_observable(&self, tol: &ToleranceConfig) -> Result<Observable, CliError> {
        let space = check_header(self.schema_version, self.qudit_dim)?;
        let m = rows_to_matrix(&self.matrix, space.qudit_dim(), "matrix")?;
        make_observable_with(space, &m, tol).map_err(CliError::Semantic)
    }

    pub fn to_json(&self) -> String {
        matrix_file_json(self.schema_version, self.qudit_dim, &self.matrix)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }
}

fn matrix_file_json(schema_version: u32, qudit_dim: usize, rows: &MatrixRows) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    let _ = writeln!(out, "  \"schema_version\": {schema_version},");
    let _ = writeln!(out, "  \"qudit_dim\": {qudit_dim},");
    out.push_str("  \"matrix\": ");
    write_rows(&mut out, rows, "  ");
    out.push_str("\n}\n");
    out
}

/// One matrix row per line.
fn write_rows(out: &mut String, rows: &MatrixRows, indent: &str) {
    if !out.ends_with(' ') {
        out.push_str(indent);
    }
    out.push_str("[\n");
    for (i, row) in rows.iter().enumerate() {
        out.push_str(indent);
        out.push_str("  [");
        for (j, [re, im]) in row.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{}, {}]", sig17(*re), sig17(*im));
        }
        out.push(']');
        if i + 1 < rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
}

/// Scientific notation with 17 significant digits; enough to pin any `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_channel(path: &Path) -> Result<KrausChannel, CliError> {
    ChannelFile::parse(&read_text(path)?)
        .and_then(|f| f.to_channel())
        .map_err(|e| e.in_file(path))
}

pub fn write_channel(path: &Path, ch: &KrausChannel) -> Result<(), CliError> {
    write_text(path, &ChannelFile::from_channel(ch).to_json())
}

pub fn read_state(path: &Path, tol: &ToleranceConfig) -> Result<DensityOperator, CliError> {
    StateFile::parse(&read_text(path)?)
        .and_then(|f| f.to_state(tol))
        .map_err(|e| e.in_file(path))
}

pub fn read_observable(path: &Path, tol: &ToleranceConfig) -> Result<Observable, CliError> {
    ObservableFile::parse(&read_text(path)?)
        .and_then(|f| f.to_observable(tol))
        .map_err(|e| e.in_file(path))
}
