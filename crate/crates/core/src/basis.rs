//! Orthonormal Chebyshev polynomials of the first kind and Gauss–Chebyshev
//! quadrature for the weight `(1 - t²)^{-1/2}`.
//!
//! With `T̄_k(t) = cos(k·arccos t)` the orthonormal system is
//!
//! ```text
//! T_0(t) = T̄_0(t) / √π,     T_k(t) = √(2/π) · T̄_k(t),  k ≥ 1
//! ```
//!
//! and the bivariate basis is the tensor product `T_{k,j}(t, τ) = T_k(t)·T_j(τ)`,
//! orthonormal on `[-1,1]²` under `ω(t,τ) = (1-t²)^{-1/2}(1-τ²)^{-1/2}`.
//!
//! Values are computed from the trigonometric definition rather than the
//! three-term recurrence. Near `|t| = 1` the angle `arccos t` is ill-conditioned
//! (its derivative blows up), but the composed value `cos(k·θ)` is not: an
//! absolute error `η` in `θ` moves the result by at most `k·η`, and `arccos`
//! is exact at the endpoints.

use std::f64::consts::{FRAC_1_PI, PI};

use crate::error::{Error, Result};

/// Slack accepted beyond `±1` before an argument is rejected.
pub const CLAMP_TOLERANCE: f64 = 1e-14;

/// `1/√π`, the value of `T_0` everywhere.
pub const T0_VALUE: f64 = 0.564_189_583_547_756_3;

/// `√(2/π)`, the maximum of `|T_k|` on `[-1, 1]` for `k ≥ 1`.
pub const TK_MAX: f64 = 0.797_884_560_802_865_4;

/// Normalization factor of degree `k`.
#[inline]
pub fn normalization(k: usize) -> f64 {
    if k == 0 {
        T0_VALUE
    } else {
        TK_MAX
    }
}

/// `max_{|t| ≤ 1} |T_k(t)| = T_k(1)`.
#[inline]
pub fn max_abs(k: usize) -> f64 {
    normalization(k)
}

/// Clamp `t` into `[-1, 1]` when it is within [`CLAMP_TOLERANCE`] of the interval.
pub fn clamp_unit(t: f64) -> Result<f64> {
    if t.abs() <= 1.0 {
        Ok(t)
    } else if t.abs() <= 1.0 + CLAMP_TOLERANCE {
        Ok(t.signum())
    } else {
        Err(Error::Domain { value: t })
    }
}

/// Orthonormal Chebyshev polynomial `T_k(t)`.
pub fn eval_orthonormal(k: usize, t: f64) -> Result<f64> {
    let t = clamp_unit(t)?;
    Ok(eval_unchecked(k, t))
}

/// `T_k(t)` without the domain check; `t` must already lie in `[-1, 1]`.
#[inline]
pub(crate) fn eval_unchecked(k: usize, t: f64) -> f64 {
    if k == 0 {
        T0_VALUE
    } else {
        TK_MAX * (k as f64 * t.acos()).cos()
    }
}

/// Values `T_0(t), …, T_{max_k}(t)`.
pub(crate) fn eval_all(max_k: usize, t: f64) -> Vec<f64> {
    let theta = t.acos();
    (0..=max_k)
        .map(|k| {
            if k == 0 {
                T0_VALUE
            } else {
                TK_MAX * (k as f64 * theta).cos()
            }
        })
        .collect()
}

/// Tensor basis function `T_k(t)·T_j(τ)`.
pub fn eval_tensor(k: usize, j: usize, t: f64, tau: f64) -> Result<f64> {
    Ok(eval_orthonormal(k, t)? * eval_orthonormal(j, tau)?)
}

/// An `N`-point Gauss–Chebyshev rule. Weights absorb the weight function, so
/// `∫ (1-t²)^{-1/2} p(t) dt = Σ w_i p(t_i)` for every polynomial of degree `≤ 2N-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Nodes, strictly decreasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule to `g`, i.e. approximate `∫ (1-t²)^{-1/2} g(t) dt`.
    pub fn integrate(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .sum()
    }
}

/// Gauss–Chebyshev rule with nodes `cos((2i-1)π/(2N))`, `i = 1..N`, and weights `π/N`.
pub fn gauss_chebyshev_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    let nodes = (1..=n)
        .map(|i| ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights: vec![PI / n as f64; n],
    })
}

/// Endpoint-including cosine grid `cos(iπ/(M-1))`, `i = 0..M-1`, decreasing from 1 to -1.
pub fn lobatto_points(m: usize) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::invalid("grid needs at least two points"));
    }
    let last = (m - 1) as f64;
    Ok((0..m)
        .map(|i| match i {
            0 => 1.0,
            i if i == m - 1 => -1.0,
            i => (i as f64 * PI / last).cos(),
        })
        .collect())
}

/// `1/π`, the constant value of `T_{0,0}`.
pub const T00_VALUE: f64 = FRAC_1_PI;
