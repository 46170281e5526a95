//! One-shot differentiation of a coefficient file.

use std::fs;
use std::path::Path;

use crate::basis::lobatto_points;
use crate::diffop::truncated_derivative;
use crate::error::{Error, Result};
use crate::transform::io::{read_grid, write_grid};
use crate::transform::{grid_synthesize, CoeffGrid};

pub const VALUES_CSV_HEADER: &str = "t,tau,value";

/// Point values of `coeffs` on the `m × m` Lobatto grid, as `t,tau,value` CSV.
pub fn values_table(coeffs: &CoeffGrid, m: usize) -> Result<String> {
    let pts = lobatto_points(m)?;
    let values = grid_synthesize(coeffs, &pts, &pts)?;
    let mut out = String::from(VALUES_CSV_HEADER);
    out.push('\n');
    for (a, &t) in pts.iter().enumerate() {
        for (b, &tau) in pts.iter().enumerate() {
            out.push_str(&format!("{t:.17e},{tau:.17e},{:.17e}\n", values[[a, b]]));
        }
    }
    Ok(out)
}

/// Read coefficients from `input`, apply the truncation method and write the
/// result to `output`. With `eval_grid = Some(m)` a point-value table is also
/// written next to it (`<stem>.values.csv`).
pub fn run_single(
    input: &Path,
    n: usize,
    gamma: f64,
    r: usize,
    output: &Path,
    eval_grid: Option<usize>,
) -> Result<CoeffGrid> {
    let coeffs = read_grid(input)?;
    let derivative = truncated_derivative(&coeffs, n, gamma, r)?;
    write_grid(&derivative, output)?;
    if let Some(m) = eval_grid {
        let table = values_table(&derivative, m)?;
        let path = values_path(output);
        fs::write(&path, table).map_err(|source| Error::Io { path, source })?;
    }
    Ok(derivative)
}

/// Where [`run_single`] puts the point-value table for a given output file.
pub fn values_path(output: &Path) -> std::path::PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("derivative");
    output.with_file_name(format!("{stem}.values.csv"))
}
