//! Weighted Wiener classes and the coefficient noise model.
//!
//! A function belongs to `W^μ_{s,2}` when
//! `‖f‖_{s,μ}^s = Σ k̲^{sμ₁} j̲^{sμ₂} |a_{k,j}|^s` is finite, with
//! `k̲ = max(1, k)`. Noisy data are coefficients `a_{k,j} + ξ_{k,j}` with
//! `‖ξ‖_{ℓ_p} ≤ δ`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hypercross::{underline, CrossIndexSet};
use crate::transform::CoeffGrid;

/// Default decay margin of generated class members.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Smoothness parameters `(s, μ₁, μ₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WienerSpec {
    pub s: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl WienerSpec {
    pub fn new(s: f64, mu1: f64, mu2: f64) -> Result<Self> {
        let spec = WienerSpec { s, mu1, mu2 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 1.0 && self.s.is_finite()) {
            return Err(Error::invalid(format!("s = {} must be finite and ≥ 1", self.s)));
        }
        if !(self.mu1 > 0.0 && self.mu1.is_finite()) || !(self.mu2 > 0.0 && self.mu2.is_finite()) {
            return Err(Error::invalid(format!("μ = ({}, {}) must be positive", self.mu1, self.mu2)));
        }
        Ok(())
    }
}

/// A sequence-space exponent `p ∈ [1, ∞]`. Serialized as a number or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LpExponent(f64);

impl LpExponent {
    pub const INFINITY: LpExponent = LpExponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p >= 1.0 && !p.is_nan() {
            Ok(LpExponent(p))
        } else {
            Err(Error::invalid(format!("exponent p = {p} must lie in [1, ∞]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, zero for `p = ∞`.
    pub fn reciprocal(self) -> f64 {
        1.0 / self.0
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let p = match Raw::deserialize(deserializer)? {
            Raw::Number(p) => p,
            Raw::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            Raw::Text(s) => return Err(serde::de::Error::custom(format!("invalid exponent `{s}`"))),
        };
        LpExponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// `ℓ_p` norm with scaling by the largest magnitude to avoid overflow.
pub fn lp_norm(values: impl IntoIterator<Item = f64> + Clone, p: LpExponent) -> f64 {
    let max = values.clone().into_iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    let p = p.value();
    let sum: f64 = values.into_iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// How the perturbation is distributed over the support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Independent uniform draws on `[-1, 1]`, rescaled to `ℓ_p` norm `δ`.
    UniformRandom,
    /// The Hölder-extremal profile for the amplification `k^{2r-1}`, with one
    /// common sign so contributions add up coherently.
    AdversarialTopweight,
    /// All of `δ` on a single index of largest amplification.
    SingleCoefficient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p: LpExponent,
    #[serde(default)]
    pub delta: f64,
    pub mode: NoiseMode,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::invalid(format!("noise level δ = {} must lie in [0, 1)", self.delta)));
        }
        Ok(())
    }

    pub fn with_delta(self, delta: f64) -> Self {
        NoiseSpec { delta, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        NoiseSpec { seed, ..self }
    }
}

/// Uniform draw in `[-1, 1)` keyed by `(seed, k, j)`, independent of the
/// order in which indices are visited.
pub(crate) fn keyed_uniform(seed: u64, k: usize, j: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) ^ j as u64);
    rng.random_range(-1.0..1.0)
}

fn keyed_sign(seed: u64, k: usize, j: usize) -> f64 {
    if keyed_uniform(seed, k, j) < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `‖f‖_{s,μ} = (Σ k̲^{sμ₁} j̲^{sμ₂} |a_{k,j}|^s)^{1/s}`.
pub fn wiener_norm(coeffs: &CoeffGrid, spec: &WienerSpec) -> f64 {
    let weighted = coeffs
        .iter()
        .map(|(k, j, a)| (underline(k) as f64).powf(spec.mu1) * (underline(j) as f64).powf(spec.mu2) * a);
    lp_norm(weighted.collect::<Vec<_>>(), LpExponent(spec.s))
}

/// A member of the unit ball `BW^μ_{s,2}` near its boundary:
///
/// ```text
/// a_{k,j} = c · σ_{k,j} · k̲^{-μ₁-1/s-ε} · j̲^{-μ₂-1/s-ε}
/// ```
///
/// on the full `(max_k+1) × (max_j+1)` box, with random signs `σ` keyed by
/// `(seed, k, j)` and `c` chosen so that `‖·‖_{s,μ} = 1`. The weighted
/// `s`-th powers decay like `k̲^{-1-sε}`, so the profile stays in the class as
/// the box grows.
pub fn make_class_member(spec: &WienerSpec, max_k: usize, max_j: usize, epsilon: f64, seed: u64) -> Result<CoeffGrid> {
    spec.validate()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("decay margin ε = {epsilon} must be positive")));
    }
    let raw = class_profile(spec, max_k, max_j, epsilon, seed)?;
    let norm = wiener_norm(&raw, spec);
    let scaled: Vec<_> = raw.iter().map(|(k, j, v)| (k, j, v / norm)).collect();
    CoeffGrid::from_entries(max_k, max_j, scaled)
}

/// The unnormalized profile behind [`make_class_member`].
pub fn class_profile(spec: &WienerSpec, max_k: usize, max_j: usize, epsilon: f64, seed: u64) -> Result<CoeffGrid> {
    let ek = -(spec.mu1 + 1.0 / spec.s + epsilon);
    let ej = -(spec.mu2 + 1.0 / spec.s + epsilon);
    let entries = (0..=max_k).flat_map(|k| {
        (0..=max_j).map(move |j| {
            let magnitude = (underline(k) as f64).powf(ek) * (underline(j) as f64).powf(ej);
            (k, j, keyed_sign(seed, k, j) * magnitude)
        })
    });
    CoeffGrid::from_entries(max_k, max_j, entries)
}

/// `coeffs + ξ`, with `ξ` supported on `support` and `‖ξ‖_{ℓ_p} = δ`.
pub fn perturb(coeffs: &CoeffGrid, noise: &NoiseSpec, support: &CrossIndexSet) -> Result<CoeffGrid> {
    noise.validate()?;
    if noise.delta == 0.0 {
        return Ok(coeffs.clone());
    }
    let xi = noise_vector(noise, support)?;
    let bounds = coeffs.widened(support.n(), support.j_bound());
    let noise_grid = CoeffGrid::from_entries(bounds.max_k(), bounds.max_j(), xi)?;
    Ok(bounds.add(&noise_grid))
}

/// The perturbation `ξ` alone, as `(k, j, ξ_{k,j})` in cross order.
pub fn noise_vector(noise: &NoiseSpec, support: &CrossIndexSet) -> Result<Vec<(usize, usize, f64)>> {
    noise.validate()?;
    let indices: Vec<(usize, usize)> = support.iter().collect();
    if indices.is_empty() {
        return Err(Error::invalid("noise support is empty"));
    }
    let r = support.r() as i32;
    let amplification = |k: usize| (k as f64).powi(2 * r - 1);
    let p = noise.p;

    let raw: Vec<f64> = match noise.mode {
        NoiseMode::UniformRandom => indices
            .iter()
            .map(|&(k, j)| keyed_uniform(noise.seed, k, j))
            .collect(),
        NoiseMode::AdversarialTopweight if p.value() > 1.0 => {
            let sign = keyed_sign(noise.seed, 0, 0);
            let peak = amplification(support.n());
            // Hölder-extremal for Σ|ξ| w: |ξ| ∝ w^{1/(p-1)}; constant for p = ∞.
            let exponent = if p.is_infinite() { 0.0 } else { 1.0 / (p.value() - 1.0) };
            indices
                .iter()
                .map(|&(k, _)| sign * (amplification(k) / peak).powf(exponent))
                .collect()
        }
        NoiseMode::AdversarialTopweight | NoiseMode::SingleCoefficient => {
            let target = support.n();
            let mut raw = vec![0.0; indices.len()];
            let slot = indices.iter().position(|&(k, _)| k == target).expect("row n is never empty");
            raw[slot] = if noise.mode == NoiseMode::AdversarialTopweight {
                keyed_sign(noise.seed, 0, 0)
            } else {
                1.0
            };
            raw
        }
    };

    let norm = lp_norm(raw.iter().copied(), p);
    Ok(indices
        .into_iter()
        .zip(raw)
        .filter(|(_, v)| *v != 0.0)
        .map(|((k, j), v)| (k, j, noise.delta * (v / norm)))
        .collect())
}
