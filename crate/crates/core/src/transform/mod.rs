//! Analysis (samples → Fourier–Chebyshev coefficients) and synthesis
//! (coefficients → point values) on the square `[-1, 1]²`.
//!
//! Coefficients are inner products `⟨f, T_{k,j}⟩` under the Chebyshev weight,
//! computed with a tensor Gauss–Chebyshev rule of `quad_n` nodes per axis.
//! The rule is exact whenever `f·T_{k,j}` has coordinate degrees `≤ 2·quad_n − 1`.

mod grid;
pub mod io;

use ndarray::Array2;

pub use grid::CoeffGrid;

use crate::basis::{self, clamp_unit, gauss_chebyshev_rule};
use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Default quadrature size for a given coefficient box.
pub fn default_quad_n(max_k: usize, max_j: usize) -> usize {
    2 * max_k.max(max_j) + 1
}

/// `(max_k+1) × len` table with entry `(k, i)` equal to `T_k(points[i])`.
fn basis_table(max_k: usize, points: &[f64]) -> Array2<f64> {
    let mut table = Array2::zeros((max_k + 1, points.len()));
    for (i, &t) in points.iter().enumerate() {
        for (k, v) in basis::eval_all(max_k, t).into_iter().enumerate() {
            table[[k, i]] = v;
        }
    }
    table
}

/// Coefficients of `f` for `k ≤ max_k`, `j ≤ max_j`.
pub fn analyze<F>(f: F, max_k: usize, max_j: usize, quad_n: usize) -> Result<CoeffGrid>
where
    F: Fn(f64, f64) -> f64,
{
    try_analyze(|t, tau| Ok::<_, std::convert::Infallible>(f(t, tau)), max_k, max_j, quad_n)
}

/// Fallible variant of [`analyze`]; the first evaluation error is returned.
pub fn try_analyze<F, E>(f: F, max_k: usize, max_j: usize, quad_n: usize) -> Result<CoeffGrid>
where
    F: Fn(f64, f64) -> std::result::Result<f64, E>,
    E: std::fmt::Display,
{
    if quad_n < max_k.max(max_j) + 1 {
        return Err(Error::invalid(format!(
            "quad_n = {quad_n} is below max(max_k, max_j) + 1 = {}",
            max_k.max(max_j) + 1
        )));
    }
    let rule = gauss_chebyshev_rule(quad_n)?;
    let nodes = rule.nodes();
    let weight = rule.weights()[0];

    let mut samples = Array2::zeros((quad_n, quad_n));
    for (i, &t) in nodes.iter().enumerate() {
        for (m, &tau) in nodes.iter().enumerate() {
            let v = f(t, tau).map_err(|e| Error::Evaluation {
                t,
                tau,
                reason: e.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Evaluation {
                    t,
                    tau,
                    reason: format!("non-finite value {v}"),
                });
            }
            samples[[i, m]] = v;
        }
    }

    let along_t = basis_table(max_k, nodes);
    let along_tau = basis_table(max_j, nodes);
    let mut coeffs = along_t.dot(&samples).dot(&along_tau.t());
    coeffs.mapv_inplace(|v| v * weight * weight);
    CoeffGrid::from_dense(coeffs)
}

/// `Σ a_{k,j} T_k(t) T_j(τ)` over the stored entries, in ascending `(k, j)`
/// order with compensated accumulation.
pub fn synthesize(coeffs: &CoeffGrid, t: f64, tau: f64) -> Result<f64> {
    let t = clamp_unit(t)?;
    let tau = clamp_unit(tau)?;
    let along_t = basis::eval_all(coeffs.max_k(), t);
    let along_tau = basis::eval_all(coeffs.max_j(), tau);
    let mut acc = CompensatedSum::default();
    for (k, j, a) in coeffs.iter() {
        acc.add(a * along_t[k] * along_tau[j]);
    }
    Ok(acc.value())
}

/// Values on the tensor grid `ts × taus`; element `(i, m)` is the surface at
/// `(ts[i], taus[m])`.
///
/// Evaluated as the separable contraction `T(ts) · A · T(taus)ᵀ`. The
/// reduction order is fixed, so results are reproducible; they agree with
/// [`synthesize`] to rounding.
pub fn grid_synthesize(coeffs: &CoeffGrid, ts: &[f64], taus: &[f64]) -> Result<Array2<f64>> {
    let ts = ts.iter().map(|&t| clamp_unit(t)).collect::<Result<Vec<_>>>()?;
    let taus = taus.iter().map(|&t| clamp_unit(t)).collect::<Result<Vec<_>>>()?;
    if coeffs.is_zero() {
        return Ok(Array2::zeros((ts.len(), taus.len())));
    }
    let along_t = basis_table(coeffs.max_k(), &ts);
    let along_tau = basis_table(coeffs.max_j(), &taus);
    let dense = coeffs.to_dense();
    Ok(along_t.t().dot(&dense).dot(&along_tau))
}
