//! Error metrics on `[-1, 1]²`.
//!
//! `L_{2,ω}` comes from Parseval, `L_{q,ω}` from tensor Gauss–Chebyshev
//! quadrature, and the uniform norm from the maximum over an
//! endpoint-including cosine grid (a lower bound for the true supremum).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::basis::{gauss_chebyshev_rule, lobatto_points};
use crate::error::{Error, Result};
use crate::hypercross::underline;
use crate::transform::{grid_synthesize, CoeffGrid};

/// Default number of points per axis for the uniform norm.
pub const DEFAULT_EVAL_GRID: usize = 257;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricKind {
    L2Weighted,
    LqWeighted(f64),
    Uniform,
}

/// A metric together with its evaluation grid size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub eval_grid: usize,
}

impl MetricSpec {
    pub fn new(kind: MetricKind, eval_grid: usize) -> Result<Self> {
        if let MetricKind::LqWeighted(q) = kind {
            if !(q >= 2.0 && q.is_finite()) {
                return Err(Error::invalid(format!("L_q metric needs 2 ≤ q < ∞, got q = {q}")));
            }
        }
        if eval_grid < 2 {
            return Err(Error::invalid("evaluation grid needs at least two points per axis"));
        }
        Ok(MetricSpec { kind, eval_grid })
    }

    pub fn l2() -> Self {
        MetricSpec { kind: MetricKind::L2Weighted, eval_grid: DEFAULT_EVAL_GRID }
    }

    pub fn uniform() -> Self {
        MetricSpec { kind: MetricKind::Uniform, eval_grid: DEFAULT_EVAL_GRID }
    }

    pub fn lq(q: f64) -> Result<Self> {
        Self::new(MetricKind::LqWeighted(q), DEFAULT_EVAL_GRID)
    }

    /// Evaluate the metric on the surface with coefficients `coeffs`.
    pub fn measure(&self, coeffs: &CoeffGrid) -> Result<f64> {
        match self.kind {
            MetricKind::L2Weighted => Ok(l2_omega_norm(coeffs)),
            MetricKind::LqWeighted(q) => {
                let degree = coeffs.max_k().max(coeffs.max_j());
                lq_omega_norm(coeffs, q, lq_quad_n(q, degree))
            }
            MetricKind::Uniform => sup_norm(coeffs, self.eval_grid),
        }
    }
}

/// Quadrature size for `‖·‖_{L_q,ω}` of a surface of the given coordinate
/// degree: exact (`2d+1` nodes) for even integer `q`, `4d+1` otherwise.
pub fn lq_quad_n(q: f64, degree: usize) -> usize {
    if q.fract() == 0.0 && (q as u64).is_multiple_of(2) {
        let power = q as usize;
        (power * degree) / 2 + 1
    } else {
        4 * degree + 1
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MetricKind::L2Weighted => f.write_str("l2w"),
            MetricKind::LqWeighted(q) => write!(f, "lqw:{q}"),
            MetricKind::Uniform => f.write_str("sup"),
        }
    }
}

impl FromStr for MetricSpec {
    type Err = Error;

    /// `l2w`, `lqw:<q>`, or `sup`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "l2w" => Ok(Self::l2()),
            "sup" => Ok(Self::uniform()),
            other => {
                let q = other
                    .strip_prefix("lqw:")
                    .ok_or_else(|| Error::invalid(format!("unknown metric `{other}` (expected l2w, lqw:<q> or sup)")))?;
                let q: f64 = q.parse().map_err(|_| Error::invalid(format!("invalid q in metric `{other}`")))?;
                Self::lq(q)
            }
        }
    }
}

impl Serialize for MetricSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `(Σ a_{k,j}²)^{1/2}`.
pub fn l2_omega_norm(coeffs: &CoeffGrid) -> f64 {
    let max = coeffs.iter().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    max * coeffs.iter().map(|(_, _, v)| (v / max).powi(2)).sum::<f64>().sqrt()
}

/// Tensor Gauss–Chebyshev approximation of `(∫ ω |f|^q)^{1/q}`.
pub fn lq_omega_norm(coeffs: &CoeffGrid, q: f64, quad_n: usize) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q = {q} must be finite and ≥ 1")));
    }
    if quad_n < coeffs.max_k().max(coeffs.max_j()) + 1 {
        return Err(Error::invalid(format!("quad_n = {quad_n} is too small for the grid")));
    }
    let rule = gauss_chebyshev_rule(quad_n)?;
    let values = grid_synthesize(coeffs, rule.nodes(), rule.nodes())?;
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return Ok(0.0);
    }
    let w = rule.weights()[0];
    let sum: f64 = values.iter().map(|v| (v.abs() / max).powf(q)).sum();
    Ok(max * (w * w * sum).powf(1.0 / q))
}

/// Largest `|f|` on the `M × M` grid `cos(iπ/(M-1))`, endpoints included.
pub fn sup_norm(coeffs: &CoeffGrid, m: usize) -> Result<f64> {
    let points = lobatto_points(m)?;
    let values = grid_synthesize(coeffs, &points, &points)?;
    Ok(values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// `(Σ (k̲ l̲)^{1-2/q} a_{k,l}²)^{1/2}`, the coefficient functional that bounds
/// `‖·‖_{L_q,ω}` up to a constant for `2 ≤ q < ∞`.
pub fn lq_coefficient_bound(coeffs: &CoeffGrid, q: f64) -> Result<f64> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(Error::invalid(format!("coefficient bound needs 2 ≤ q < ∞, got {q}")));
    }
    let exponent = 1.0 - 2.0 / q;
    let sum: f64 = coeffs
        .iter()
        .map(|(k, l, a)| ((underline(k) * underline(l)) as f64).powf(exponent) * a * a)
        .sum();
    Ok(sum.sqrt())
}

/// `(2/π)·√((n+1)(m+1))`: for every polynomial of coordinate degrees
/// `≤ (n, m)`, `‖P‖_∞ ≤` this factor times `‖P‖_{L_2,ω}`.
pub fn nikolskii_explicit_bound(max_k: usize, max_j: usize) -> f64 {
    2.0 / PI * (((max_k + 1) * (max_j + 1)) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::synthesize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_grid(rng: &mut ChaCha8Rng, max_k: usize, max_j: usize) -> CoeffGrid {
        let entries: Vec<_> = (0..=max_k)
            .flat_map(|k| (0..=max_j).map(move |j| (k, j)))
            .map(|(k, j)| (k, j, rng.random_range(-1.0..1.0)))
            .collect();
        CoeffGrid::from_entries(max_k, max_j, entries).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn l2_examples() {
        assert_eq!(l2_omega_norm(&CoeffGrid::from_entries(4, 7, [(4, 7, 3.0)]).unwrap()), 3.0);
        let g = CoeffGrid::from_entries(1, 1, [(0, 0, 3.0), (1, 1, 4.0)]).unwrap();
        assert!((l2_omega_norm(&g) - 5.0).abs() < 1e-15);
        assert_eq!(l2_omega_norm(&CoeffGrid::zeros(3, 3)), 0.0);
    }

    #[test]
    fn parseval_against_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..20 {
            let (mk, mj) = (rng.random_range(0..24), rng.random_range(0..24));
            let g = random_grid(&mut rng, mk, mj);
            let quad = lq_omega_norm(&g, 2.0, g.max_k().max(g.max_j()) + 1).unwrap();
            assert!(rel(quad, l2_omega_norm(&g)) < 1e-10);
        }
    }

    #[test]
    fn lq_of_constant() {
        let one = CoeffGrid::from_entries(0, 0, [(0, 0, PI)]).unwrap();
        for q in [1.0, 2.0, 3.5, 4.0, 8.0] {
            assert!(rel(lq_omega_norm(&one, q, 3).unwrap(), PI.powf(2.0 / q)) < 1e-13);
        }
        assert!(lq_omega_norm(&one, 0.5, 3).is_err());
    }

    #[test]
    fn normalized_lq_grows_with_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10 {
            let g = random_grid(&mut rng, 8, 8);
            let normalized: Vec<f64> = [2.0, 4.0, 8.0]
                .iter()
                .map(|&q| lq_omega_norm(&g, q, lq_quad_n(q, 8)).unwrap() / PI.powf(2.0 / q))
                .collect();
            assert!(normalized.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-12)), "{normalized:?}");
        }
    }

    #[test]
    fn sup_examples() {
        let entries: Vec<_> = (1..=5).flat_map(|k| (1..=4).map(move |j| (k, j, 1.0))).collect();
        let g = CoeffGrid::from_entries(5, 4, entries).unwrap();
        // At (1, 1) every term equals 2/π.
        assert!((sup_norm(&g, 9).unwrap() - 20.0 * 2.0 / PI).abs() < 1e-12);
        let single = CoeffGrid::from_entries(3, 2, [(3, 2, 1.0)]).unwrap();
        assert!((sup_norm(&single, 9).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert_eq!(sup_norm(&CoeffGrid::zeros(2, 2), 5).unwrap(), 0.0);
        assert!(sup_norm(&single, 1).is_err());
    }

    #[test]
    fn sup_dominates_samples_and_grows_on_nested_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let g = random_grid(&mut rng, 10, 10);
        let s = sup_norm(&g, 257).unwrap();
        for _ in 0..100 {
            let (t, tau) = (rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            assert!(s >= synthesize(&g, t, tau).unwrap().abs());
        }
        let nested: Vec<f64> = [3, 5, 9, 17, 33, 65].iter().map(|&m| sup_norm(&g, m).unwrap()).collect();
        assert!(nested.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn coefficient_bound_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let g = random_grid(&mut rng, 6, 6);
        assert!(rel(lq_coefficient_bound(&g, 2.0).unwrap(), l2_omega_norm(&g)) < 1e-15);
        let single = CoeffGrid::from_entries(3, 2, [(3, 2, 1.0)]).unwrap();
        assert!((lq_coefficient_bound(&single, 4.0).unwrap() - 6f64.powf(0.25)).abs() < 1e-15);
        let values: Vec<f64> = [2.0, 3.0, 4.0, 8.0, 100.0].iter().map(|&q| lq_coefficient_bound(&g, q).unwrap()).collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
        assert!(lq_coefficient_bound(&g, 1.5).is_err());
        assert!(lq_coefficient_bound(&g, f64::INFINITY).is_err());
    }

    #[test]
    fn nikolskii_examples() {
        assert!((nikolskii_explicit_bound(0, 0) - std::f64::consts::FRAC_2_PI).abs() < 1e-15);
        assert!((nikolskii_explicit_bound(3, 1) - 2.0 / PI * 8f64.sqrt()).abs() < 1e-15);
        let t00 = CoeffGrid::from_entries(0, 0, [(0, 0, 1.0)]).unwrap();
        let sup = sup_norm(&t00, 5).unwrap();
        assert!((sup - 1.0 / PI).abs() < 1e-15);
        assert!(sup <= nikolskii_explicit_bound(0, 0) * l2_omega_norm(&t00));
    }

    #[test]
    fn metric_strings() {
        assert_eq!("l2w".parse::<MetricSpec>().unwrap(), MetricSpec::l2());
        assert_eq!("sup".parse::<MetricSpec>().unwrap(), MetricSpec::uniform());
        assert_eq!("lqw:4".parse::<MetricSpec>().unwrap().kind, MetricKind::LqWeighted(4.0));
        assert_eq!("lqw:4".parse::<MetricSpec>().unwrap().to_string(), "lqw:4");
        assert!("lqw:1".parse::<MetricSpec>().is_err());
        assert!("linf".parse::<MetricSpec>().is_err());
        assert!(MetricSpec::new(MetricKind::Uniform, 1).is_err());
        assert_eq!(serde_json::to_string(&MetricSpec::lq(8.0).unwrap()).unwrap(), "\"lqw:8\"");
    }

    #[test]
    fn quad_sizes() {
        assert_eq!(lq_quad_n(4.0, 10), 21);
        assert_eq!(lq_quad_n(2.0, 10), 11);
        assert_eq!(lq_quad_n(3.0, 10), 41);
    }
}
