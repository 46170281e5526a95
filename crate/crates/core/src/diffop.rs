//! Differentiation in the first variable, carried out on coefficients.
//!
//! For the orthonormal basis,
//!
//! ```text
//! T_k'(t) = 2k · Σ_{l < k, k+l odd} ζ_l T_l(t),   ζ_l = 1 (l ≥ 1),  ζ_0 = 1/√2.
//! ```
//!
//! The `l = 0` weight follows from the classical identity
//! `T̄_k' = 2k Σ' T̄_l / c_l` (`c_0 = 2`, `c_l = 1` otherwise) after rescaling
//! `T̄_0 = √π T_0` and `T̄_l = √(π/2) T_l`: the `T_0` term picks up
//! `√(2/π)·(1/2)·√π = 1/√2`. The constant [`ZETA0_SQRT2`] (`√2`) that
//! sometimes appears for this normalization doubles the `T_0` component
//! and fails the finite-difference check in [`crate::harness::validate`].
//!
//! Higher derivatives apply the one-step operator repeatedly.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use crate::error::{Error, Result};
use crate::hypercross::CrossIndexSet;
use crate::transform::CoeffGrid;

/// `ζ_0` for the orthonormal system.
pub const ZETA0: f64 = FRAC_1_SQRT_2;

/// `ζ_0 = √2`, as quoted alongside the orthonormal normalization in some
/// sources; kept for the validation report.
pub const ZETA0_SQRT2: f64 = SQRT_2;

/// Upper-triangular table `d[l][k]` mapping the coefficient of `T_k` to the
/// coefficient of `T_l` in the derivative. Entries vanish unless `l < k` and
/// `k + l` is odd.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeOperator1D {
    max_k: usize,
    zeta0: f64,
    // Row l holds d[l][k] for k = l+1, l+3, … ≤ max_k.
    rows: Vec<Vec<f64>>,
}

impl DerivativeOperator1D {
    pub fn new(max_k: usize) -> Self {
        Self::with_zeta0(max_k, ZETA0)
    }

    /// Operator with a caller-chosen `ζ_0`. Only useful for probing the
    /// validation suite; [`ZETA0`] is the correct value.
    pub fn with_zeta0(max_k: usize, zeta0: f64) -> Self {
        let rows = (0..max_k)
            .map(|l| {
                let weight = if l == 0 { zeta0 } else { 1.0 };
                (l + 1..=max_k)
                    .step_by(2)
                    .map(|k| 2.0 * k as f64 * weight)
                    .collect()
            })
            .collect();
        DerivativeOperator1D { max_k, zeta0, rows }
    }

    pub fn max_k(&self) -> usize {
        self.max_k
    }

    pub fn zeta0(&self) -> f64 {
        self.zeta0
    }

    /// Table entry `d[l][k]`.
    pub fn entry(&self, l: usize, k: usize) -> f64 {
        if l >= k || k > self.max_k || (k + l).is_multiple_of(2) {
            return 0.0;
        }
        self.rows[l][(k - l - 1) / 2]
    }

    /// Apply once to the coefficients `a_0..a_{max_k}` of one column.
    pub fn apply(&self, column: &[f64]) -> Vec<f64> {
        assert!(column.len() <= self.max_k + 1, "column longer than operator");
        let len = column.len().saturating_sub(1);
        (0..len)
            .map(|l| {
                self.rows[l]
                    .iter()
                    .zip((l + 1..column.len()).step_by(2))
                    .map(|(d, k)| d * column[k])
                    .sum()
            })
            .collect()
    }
}

/// `r`-th derivative in the first variable; output `max_k` is `max(0, max_k - r)`.
pub fn differentiate_coeffs(coeffs: &CoeffGrid, r: usize) -> Result<CoeffGrid> {
    differentiate_with(coeffs, r, &DerivativeOperator1D::new(coeffs.max_k()))
}

/// [`differentiate_coeffs`] using a prebuilt operator covering `coeffs.max_k()`.
pub fn differentiate_with(coeffs: &CoeffGrid, r: usize, op: &DerivativeOperator1D) -> Result<CoeffGrid> {
    if r < 1 {
        return Err(Error::invalid("derivative order r must be at least 1"));
    }
    if op.max_k() < coeffs.max_k() {
        return Err(Error::invalid("derivative operator is smaller than the grid"));
    }
    let out_max_k = coeffs.max_k().saturating_sub(r);
    if coeffs.max_k() < r || coeffs.is_zero() {
        return Ok(CoeffGrid::zeros(out_max_k, coeffs.max_j()));
    }

    let mut columns = vec![vec![0.0; coeffs.max_k() + 1]; coeffs.max_j() + 1];
    for (k, j, v) in coeffs.iter() {
        columns[j][k] = v;
    }
    let mut entries = Vec::new();
    for (j, mut column) in columns.into_iter().enumerate() {
        if column.iter().all(|v| *v == 0.0) {
            continue;
        }
        for _ in 0..r {
            column = op.apply(&column);
        }
        entries.extend(column.into_iter().enumerate().filter(|(_, v)| *v != 0.0).map(|(k, v)| (k, j, v)));
    }
    CoeffGrid::from_entries(out_max_k, coeffs.max_j(), entries)
}

/// The truncation method on the hyperbolic cross `Γ_{n,γ}`: restrict the
/// (perturbed) coefficients to the cross and differentiate `r` times.
pub fn truncated_derivative(coeffs_delta: &CoeffGrid, n: usize, gamma: f64, r: usize) -> Result<CoeffGrid> {
    let cross = CrossIndexSet::new(n, gamma, r)?;
    differentiate_coeffs(&coeffs_delta.restrict(&cross), r)
}
