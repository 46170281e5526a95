//! Coefficient files.
//!
//! CSV: header `k,j,coeff`, one entry per line, values written with 17
//! significant digits. JSON: `{"max_k":…,"max_j":…,"entries":[[k,j,value],…]}`.
//! Pairs that do not appear are zero.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CoeffGrid;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "k,j,coeff";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Serialize to the CSV form. Nonzero entries are listed in `(k, j)` order;
/// the corner `(max_k, max_j)` is always written, even when zero, so the
/// degree bounds survive a round trip.
pub fn to_csv_string(grid: &CoeffGrid) -> String {
    let mut out = String::with_capacity(32 * (grid.nnz() + 2));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let corner = (grid.max_k(), grid.max_j());
    for (k, j, v) in grid.iter() {
        out.push_str(&format!("{k},{j},{v:.16e}\n"));
    }
    if grid.get(corner.0, corner.1) == 0.0 {
        out.push_str(&format!("{},{},0\n", corner.0, corner.1));
    }
    out
}

/// Parse the CSV form. `origin` only labels error messages.
pub fn from_csv_str(text: &str, origin: &Path) -> Result<CoeffGrid> {
    if text.trim().is_empty() {
        return Ok(CoeffGrid::zeros(0, 0));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| parse_err(origin, 1, e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    if names != ["k", "j", "coeff"] {
        return Err(parse_err(origin, 1, format!("expected header `{CSV_HEADER}`, found `{}`", names.join(","))));
    }

    let mut entries = Vec::new();
    let (mut max_k, mut max_j) = (0, 0);
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(origin, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 3 {
            return Err(parse_err(origin, line, format!("expected 3 fields, found {}", record.len())));
        }
        let k: usize = record[0]
            .parse()
            .map_err(|_| parse_err(origin, line, format!("invalid index k `{}`", &record[0])))?;
        let j: usize = record[1]
            .parse()
            .map_err(|_| parse_err(origin, line, format!("invalid index j `{}`", &record[1])))?;
        let v: f64 = record[2]
            .parse()
            .map_err(|_| parse_err(origin, line, format!("invalid coefficient `{}`", &record[2])))?;
        if !v.is_finite() {
            return Err(parse_err(origin, line, "non-finite coefficient"));
        }
        max_k = max_k.max(k);
        max_j = max_j.max(j);
        entries.push((line, k, j, v));
    }

    let mut seen = std::collections::BTreeSet::new();
    for &(line, k, j, _) in &entries {
        if !seen.insert((k, j)) {
            return Err(parse_err(origin, line, format!("duplicate index ({k}, {j})")));
        }
    }
    CoeffGrid::from_entries(max_k, max_j, entries.into_iter().map(|(_, k, j, v)| (k, j, v)))
}

#[derive(Serialize, Deserialize)]
struct JsonGrid {
    max_k: usize,
    max_j: usize,
    entries: Vec<(usize, usize, f64)>,
}

pub fn to_json_string(grid: &CoeffGrid) -> String {
    let doc = JsonGrid {
        max_k: grid.max_k(),
        max_j: grid.max_j(),
        entries: grid.iter().collect(),
    };
    serde_json::to_string(&doc).expect("coefficient grids always serialize")
}

pub fn from_json_str(text: &str) -> Result<CoeffGrid> {
    let doc: JsonGrid = serde_json::from_str(text)?;
    CoeffGrid::from_entries(doc.max_k, doc.max_j, doc.entries)
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Read a coefficient file; `.json` selects the JSON form, anything else CSV.
pub fn read_grid(path: &Path) -> Result<CoeffGrid> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    if is_json(path) {
        from_json_str(&text)
    } else {
        from_csv_str(&text, path)
    }
}

/// Write a coefficient file, choosing the form from the extension as in [`read_grid`].
pub fn write_grid(grid: &CoeffGrid, path: &Path) -> Result<()> {
    let text = if is_json(path) {
        to_json_string(grid)
    } else {
        to_csv_string(grid)
    };
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(text.as_bytes()).map_err(io_err(path))
}
