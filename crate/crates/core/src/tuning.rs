//! A priori parameter choice: truncation level `n(δ)`, admissible `γ`, and
//! the predicted exponent of `δ` in the error for each output metric.
//!
//! | metric    | smoothness                              | `γ_max`                                  | rate exponent numerator |
//! |-----------|-----------------------------------------|------------------------------------------|-------------------------|
//! | `L_2,ω`   | `μ₁ > 2r−1/s+1/2`, `μ₂ > μ₁−2r`         | `(μ₂+1/s−1/2)/(μ₁−2r+1/s−1/2)`           | `μ₁−2r+1/s−1/2`         |
//! | uniform   | `μ₁ > 2r−1/s+1`, `μ₂ > μ₁−2r`           | `(μ₂+1/s−1)/(μ₁−2r+1/s−1)`               | `μ₁−2r+1/s−1`           |
//! | `L_q,ω`   | `μ₁ > 2r−1/s−1/q+1`, `μ₂ > 1−1/s−1/q`   | `(μ₂+1/s+1/q−1)/(μ₁−2r+1/s+1/q−1)`       | `μ₁−2r+1/s+1/q−1`       |
//!
//! All rates share the denominator `μ₁ − 1/p + 1/s`, and the level is
//! `n ≍ δ^{-1/(μ₁−1/p+1/s)}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypercross::cardinality;
use crate::model::{LpExponent, WienerSpec};
use crate::norms::{MetricKind, MetricSpec};

/// Everything the parameter-choice rules depend on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub r: usize,
    #[serde(flatten)]
    pub wiener: WienerSpec,
    #[serde(rename = "p")]
    pub noise_p: LpExponent,
    pub metric: MetricSpec,
    #[serde(default = "default_level_constant")]
    pub level_constant: f64,
}

fn default_level_constant() -> f64 {
    1.0
}

impl ProblemSpec {
    pub fn with_metric(self, metric: MetricSpec) -> Self {
        ProblemSpec { metric, ..self }
    }

    fn structural_check(&self) -> Result<()> {
        if self.r < 1 {
            return Err(Error::invalid("derivative order r must be at least 1"));
        }
        if !(self.level_constant > 0.0 && self.level_constant.is_finite()) {
            return Err(Error::invalid("level_constant must be positive"));
        }
        self.wiener.validate()
    }

    fn inv_s(&self) -> f64 {
        1.0 / self.wiener.s
    }

    /// `μ₁ − 1/p + 1/s`.
    fn rate_denominator(&self) -> f64 {
        self.wiener.mu1 - self.noise_p.reciprocal() + self.inv_s()
    }

    /// Shift `c` in the metric-specific expressions `μ₁−2r+1/s−c`:
    /// `1/2` for `L_2`, `1` for uniform, `1 − 1/q` for `L_q`.
    fn metric_shift(&self) -> f64 {
        match self.metric.kind {
            MetricKind::L2Weighted => 0.5,
            MetricKind::Uniform => 1.0,
            MetricKind::LqWeighted(q) => 1.0 - 1.0 / q,
        }
    }
}

/// A violated smoothness hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// The inequality, written out as in the table above.
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails: {} ≤ {}", self.inequality, self.lhs, self.rhs)
    }
}

/// Check the metric-specific smoothness hypotheses.
///
/// Besides the rate inequalities this also requires
/// `μ₂ > 1/2 − 1/s` (`L_2`) and `μ₂ > 1 − 1/s` (uniform), which the
/// truncation-error bounds use for the tail in `j`.
pub fn validate_spec(spec: &ProblemSpec) -> std::result::Result<(), Vec<Violation>> {
    if let Err(e) = spec.structural_check() {
        return Err(vec![Violation { inequality: e.to_string(), lhs: f64::NAN, rhs: f64::NAN }]);
    }
    let r = spec.r as f64;
    let inv_s = spec.inv_s();
    let WienerSpec { mu1, mu2, .. } = spec.wiener;
    let checks: Vec<(&'static str, f64, f64)> = match spec.metric.kind {
        MetricKind::L2Weighted => vec![
            ("μ₁ > 2r−1/s+1/2", mu1, 2.0 * r - inv_s + 0.5),
            ("μ₂ > μ₁−2r", mu2, mu1 - 2.0 * r),
            ("μ₂ > 1/2−1/s", mu2, 0.5 - inv_s),
        ],
        MetricKind::Uniform => vec![
            ("μ₁ > 2r−1/s+1", mu1, 2.0 * r - inv_s + 1.0),
            ("μ₂ > μ₁−2r", mu2, mu1 - 2.0 * r),
            ("μ₂ > 1−1/s", mu2, 1.0 - inv_s),
        ],
        MetricKind::LqWeighted(q) => vec![
            ("q ≥ 2", q, 2.0 - f64::EPSILON),
            ("μ₁ > 2r−1/s−1/q+1", mu1, 2.0 * r - inv_s - 1.0 / q + 1.0),
            ("μ₂ > 1−1/s−1/q", mu2, 1.0 - inv_s - 1.0 / q),
        ],
    };
    let violations: Vec<Violation> = checks
        .into_iter()
        .filter(|&(_, lhs, rhs)| !(lhs > rhs))
        .map(|(inequality, lhs, rhs)| Violation { inequality: inequality.to_owned(), lhs, rhs })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// [`validate_spec`] as an error.
pub fn ensure_admissible(spec: &ProblemSpec) -> Result<()> {
    validate_spec(spec).map_err(|v| {
        Error::Inadmissible(v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))
    })
}

/// `n = max(r, round(C·δ^{-1/(μ₁−1/p+1/s)}))`.
pub fn choose_n(delta: f64, spec: &ProblemSpec) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("noise level δ = {delta} must lie in (0, 1)")));
    }
    ensure_admissible(spec)?;
    let level = spec.level_constant * delta.powf(-1.0 / spec.rate_denominator());
    Ok((level.round() as usize).max(spec.r))
}

/// Admissible `γ` form the half-open interval `[1, max)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaRange {
    pub max: f64,
}

impl GammaRange {
    pub fn is_empty(&self) -> bool {
        !(self.max > 1.0)
    }

    pub fn contains(&self, gamma: f64) -> bool {
        (1.0..self.max).contains(&gamma)
    }
}

/// Metric-specific `γ_max`.
pub fn gamma_range(spec: &ProblemSpec) -> Result<GammaRange> {
    ensure_admissible(spec)?;
    let shift = spec.metric_shift();
    let inv_s = spec.inv_s();
    let WienerSpec { mu1, mu2, .. } = spec.wiener;
    let numerator = mu2 + inv_s - shift;
    let denominator = mu1 - 2.0 * spec.r as f64 + inv_s - shift;
    Ok(GammaRange { max: numerator / denominator })
}

/// Exponent `κ` in the error bound `c·δ^κ`.
pub fn theoretical_rate(spec: &ProblemSpec) -> Result<f64> {
    ensure_admissible(spec)?;
    let numerator = spec.wiener.mu1 - 2.0 * spec.r as f64 + spec.inv_s() - spec.metric_shift();
    Ok(numerator / spec.rate_denominator())
}

/// Number of perturbed coefficients the method reads at noise level `δ`.
pub fn expected_cardinality(delta: f64, spec: &ProblemSpec, gamma: f64) -> Result<usize> {
    let range = gamma_range(spec)?;
    if !range.contains(gamma) {
        return Err(Error::Inadmissible(format!("γ = {gamma} is outside [1, {})", range.max)));
    }
    cardinality(choose_n(delta, spec)?, gamma, spec.r)
}
