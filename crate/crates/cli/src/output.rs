use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// Column layout of a data file. Bump `version` whenever `columns` change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub version: u32,
    pub columns: &'static [&'static str],
}

impl Schema {
    pub fn id(&self) -> String {
        format!("{}.v{}", self.name, self.version)
    }

    pub fn header(&self) -> String {
        self.columns.join(",")
    }
}

pub const FIELD: Schema = Schema { name: "field", version: 1, columns: &["x", "p", "value"] };
pub const STATE: Schema = Schema { name: "state", version: 1, columns: &["quantity", "value"] };
pub const EXTENT: Schema = Schema {
    name: "tile_extent",
    version: 1,
    columns: &["axis", "hwhm", "bracket_lo", "bracket_hi", "iterations", "residual"],
};
pub const SWEEP_N: Schema =
    Schema { name: "sweep_n", version: 1, columns: &["n", "hwhm_x", "hwhm_p", "mean_photon"] };
pub const SWEEP_X0: Schema =
    Schema { name: "sweep_x0", version: 1, columns: &["x0", "hwhm_x", "hwhm_p", "mean_photon"] };
pub const PHOTON_STATS: Schema =
    Schema { name: "photon_stats", version: 1, columns: &["n", "pasvs", "pssvs", "spasvs", "spssvs"] };
pub const COMPARE: Schema =
    Schema { name: "compare", version: 1, columns: &["metric", "max_abs", "max_rel_to_peak", "rms"] };

#[cfg(test)]
const ALL_SCHEMAS: [Schema; 7] = [FIELD, STATE, EXTENT, SWEEP_N, SWEEP_X0, PHOTON_STATS, COMPARE];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every double
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn num(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: Schema,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(schema: Schema) -> Self {
        Self { schema, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.schema.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.schema.header();
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let v = json!({ "schema": self.schema.id(), "columns": self.schema.columns, "rows": self.rows });
        serde_json::to_string(&v).expect("tables serialise") + "\n"
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Per-column differences between two tables of the same shape.
///
/// Only numeric columns are compared. Returns `None` when the tables differ in
/// schema or length.
pub fn column_residuals(a: &Table, b: &Table) -> Option<Value> {
    if a.schema != b.schema || a.rows.len() != b.rows.len() {
        return None;
    }
    let mut out = serde_json::Map::new();
    for (c, name) in a.schema.columns.iter().enumerate() {
        let pairs: Vec<(f64, f64)> =
            a.rows.iter().zip(&b.rows).filter_map(|(x, y)| Some((x[c].num()?, y[c].num()?))).collect();
        if pairs.is_empty() {
            continue;
        }
        let finite = pairs.iter().filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut max_abs, mut sq, mut peak) = (0.0f64, 0.0, 0.0f64);
        for (x, y) in finite {
            max_abs = max_abs.max((x - y).abs());
            sq += (x - y) * (x - y);
            peak = peak.max(x.abs()).max(y.abs());
        }
        out.insert(
            name.to_string(),
            json!({
                "max_abs": max_abs,
                "max_rel_to_peak": if peak > 0.0 { max_abs / peak } else { max_abs },
                "rms": (sq / pairs.len() as f64).sqrt(),
            }),
        );
    }
    Some(Value::Object(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }

    /// Explicit choice, else the output extension, else CSV.
    pub fn resolve(explicit: Option<&str>, output: Option<&Path>) -> Result<Self, CliError> {
        match explicit.map(|s| s.trim().to_ascii_lowercase()) {
            Some(s) if s == "csv" => Ok(Format::Csv),
            Some(s) if s == "json" => Ok(Format::Json),
            Some(s) => Err(CliError::usage("--format", format!("expected csv or json, got '{s}'"))),
            None => Ok(match output.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
                Some("json") => Format::Json,
                _ => Format::Csv,
            }),
        }
    }
}

/// Path of the file for one backend when several are written.
pub fn tagged_path(output: &Path, tag: &str, format: Format) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = output.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or(format.extension().into());
    output.with_file_name(format!("{stem}.{tag}.{ext}"))
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
