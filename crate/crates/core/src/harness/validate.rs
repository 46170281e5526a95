//! Executable invariant checks across all modules.
//!
//! Each check records what it measured and the threshold it was held to, so
//! the report doubles as a log of achieved accuracies. Failures are report
//! entries, never errors.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{eval_orthonormal, eval_unchecked, gauss_chebyshev_rule, max_abs, T0_VALUE};
use crate::diffop::{differentiate_with, DerivativeOperator1D, ZETA0, ZETA0_SQRT2};
use crate::hypercross::{build_cross, cardinality, underline};
use crate::model::{
    lp_norm, make_class_member, noise_vector, wiener_norm, LpExponent, NoiseMode, NoiseSpec, WienerSpec,
};
use crate::norms::{l2_omega_norm, lq_coefficient_bound, lq_omega_norm, nikolskii_explicit_bound, sup_norm};
use crate::transform::{analyze, synthesize, CoeffGrid};

/// How `measured` is compared with `threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub bound: Bound,
}

impl Check {
    fn at_most(name: &str, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.to_owned(),
            passed: measured <= threshold,
            measured,
            threshold,
            bound: Bound::AtMost,
        }
    }

    fn at_least(name: &str, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.to_owned(),
            passed: measured >= threshold,
            measured,
            threshold,
            bound: Bound::AtLeast,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `ζ_0` used by the derivative operator under test.
    pub zeta0: f64,
    /// `ζ_0` recovered from finite differences of `T_1`.
    pub zeta0_oracle: f64,
    /// Sup residual of the computed `T_1'` on a probe grid.
    pub t1_residual: f64,
    /// Sup residual of the computed `T_2'` on a probe grid.
    pub t2_residual: f64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Run every check against the shipped operator.
pub fn validate_suite() -> ValidationReport {
    validate_suite_with(ZETA0)
}

/// Run every check with the derivative operator built from `zeta0`.
pub fn validate_suite_with(zeta0: f64) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let oracle = zeta0_oracle();
    let t1 = low_mode_residual(1, zeta0);
    let t2 = low_mode_residual(2, zeta0);
    let checks = vec![
        Check::at_most("basis.gram-matrix", gram_deviation(24), 1e-12),
        Check::at_most("basis.sup-bound", bound_excess(), 1e-12),
        Check::at_most("basis.quadrature-moments", moment_error(), 1e-13),
        Check::at_most("transform.round-trip", round_trip_error(&mut rng), 1e-11),
        Check::at_most("transform.parseval", parseval_error(&mut rng), 1e-10),
        Check::at_most("diffop.zeta0-oracle", (zeta0 - oracle).abs(), 1e-14),
        Check::at_most("diffop.t1-residual", t1, 1e-12),
        Check::at_most("diffop.t2-residual", t2, 1e-12),
        Check::at_least("diffop.sqrt2-zeta0-rejected", low_mode_residual(1, ZETA0_SQRT2), 1e-3),
        Check::at_most("diffop.finite-differences", finite_difference_error(&mut rng, zeta0), 1e-5),
        Check::at_most("hypercross.enumeration-mismatches", cross_mismatches(), 0.0),
        Check::at_most("hypercross.spot-values", spot_value_error(), 0.0),
        Check::at_most("model.noise-saturation", noise_saturation_error(&mut rng), 1e-12),
        Check::at_most("model.class-member-norm", class_member_error(), 1e-12),
        Check::at_most("norms.nikolskii-max-ratio", nikolskii_ratio(&mut rng), 1.0),
        Check::at_most("norms.coefficient-bound-constant", coefficient_bound_ratio(&mut rng), 3.0),
        Check::at_most("norms.nested-sup-grids", nested_sup_violation(&mut rng), 0.0),
    ];

    ValidationReport { zeta0, zeta0_oracle: oracle, t1_residual: t1, t2_residual: t2, checks }
}

fn random_grid(rng: &mut ChaCha8Rng, max_k: usize, max_j: usize) -> CoeffGrid {
    let entries: Vec<_> = (0..=max_k)
        .flat_map(|k| (0..=max_j).map(move |j| (k, j)))
        .map(|(k, j)| (k, j, rng.random_range(-1.0..1.0)))
        .collect();
    CoeffGrid::from_entries(max_k, max_j, entries).expect("finite in-bounds entries")
}

fn gram_deviation(max_k: usize) -> f64 {
    let rule = gauss_chebyshev_rule(max_k + 1).expect("positive size");
    let mut worst: f64 = 0.0;
    for a in 0..=max_k {
        for b in 0..=max_k {
            let g = rule.integrate(|t| eval_unchecked(a, t) * eval_unchecked(b, t));
            let target = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    worst
}

fn bound_excess() -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for k in 0..=40 {
        for i in 0..=1000 {
            let t = -1.0 + 2.0 * i as f64 / 1000.0;
            let v = eval_orthonormal(k, t).expect("inside [-1, 1]");
            worst = worst.max(v.abs() - max_abs(k));
        }
    }
    worst.max(0.0)
}

// ∫ t^{2m} (1-t²)^{-1/2} dt = π (2m-1)!!/(2m)!!, exact for 2m ≤ 2N-1.
fn moment_error() -> f64 {
    let n = 10;
    let rule = gauss_chebyshev_rule(n).expect("positive size");
    let mut exact = PI;
    let mut worst: f64 = 0.0;
    for m in 0..n {
        if m > 0 {
            exact *= (2 * m - 1) as f64 / (2 * m) as f64;
        }
        let q = rule.integrate(|t| t.powi(2 * m as i32));
        worst = worst.max((q - exact).abs());
    }
    worst
}

fn round_trip_error(rng: &mut ChaCha8Rng) -> f64 {
    let grid = random_grid(rng, 16, 16);
    let back = analyze(|t, tau| synthesize(&grid, t, tau).expect("inside domain"), 16, 16, 33)
        .expect("valid sizes");
    grid.sub(&back).iter().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()))
}

fn parseval_error(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (mk, mj) = (rng.random_range(0..=16), rng.random_range(0..=16));
        let grid = random_grid(rng, mk, mj);
        let coeff = l2_omega_norm(&grid);
        let quad = lq_omega_norm(&grid, 2.0, mk.max(mj) + 1).expect("valid q");
        worst = worst.max((coeff - quad).abs() / coeff);
    }
    worst
}

/// `T_1'(0) / (2 T_0)` from a central difference, which is exact for `T_1`.
pub fn zeta0_oracle() -> f64 {
    let fd = (eval_unchecked(1, 0.5) - eval_unchecked(1, -0.5)) / 1.0;
    fd / (2.0 * eval_unchecked(0, 0.0))
}

// Sup residual of the computed T_k' (k = 1, 2) against the closed form.
fn low_mode_residual(k: usize, zeta0: f64) -> f64 {
    let grid = CoeffGrid::from_entries(k, 0, [(k, 0, 1.0)]).expect("in bounds");
    let op = DerivativeOperator1D::with_zeta0(k, zeta0);
    let d = differentiate_with(&grid, 1, &op).expect("order 1");
    let c = (2.0 / PI).sqrt();
    (0..=20)
        .map(|i| {
            let t = -1.0 + i as f64 / 10.0;
            let exact = if k == 1 { c } else { 4.0 * c * t };
            (synthesize(&d, t, 0.0).expect("inside domain") - exact * T0_VALUE).abs()
        })
        .fold(0.0, f64::max)
}

// Relative sup error of the r-th derivative against a central difference of
// the (r-1)-th, for r = 1, 2, 3.
fn finite_difference_error(rng: &mut ChaCha8Rng, zeta0: f64) -> f64 {
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (mk, mj) = (rng.random_range(1..=12), rng.random_range(0..=12));
        let grid = random_grid(rng, mk, mj);
        let op = DerivativeOperator1D::with_zeta0(mk, zeta0);
        let mut previous = grid.clone();
        for r in 1..=3 {
            let d = differentiate_with(&grid, r, &op).expect("order ≥ 1");
            let mut err: f64 = 0.0;
            let mut scale: f64 = 0.0;
            for _ in 0..10 {
                let (t, tau) = (rng.random_range(-0.99..0.99), rng.random_range(-1.0..=1.0));
                let fd = (synthesize(&previous, t + h, tau).expect("inside")
                    - synthesize(&previous, t - h, tau).expect("inside"))
                    / (2.0 * h);
                let exact = synthesize(&d, t, tau).expect("inside");
                err = err.max((fd - exact).abs());
                scale = scale.max(exact.abs());
            }
            if scale > 0.0 {
                worst = worst.max(err / scale);
            }
            previous = d;
        }
    }
    worst
}

fn cross_mismatches() -> f64 {
    let mut mismatches = 0usize;
    for n in 1..=40 {
        for &gamma in &[1.0, 1.25, 1.5, 2.0, 3.0] {
            for r in 1..=n.min(3) {
                let set = build_cross(n, gamma, r).expect("valid parameters");
                let brute: Vec<(usize, usize)> = (r..=n)
                    .flat_map(|k| (0..=n).map(move |j| (k, j)))
                    .filter(|&(k, j)| (k as f64) * (underline(j) as f64).powf(gamma) <= n as f64 * (1.0 + 1e-12))
                    .collect();
                let listed: Vec<_> = set.iter().collect();
                if listed != brute {
                    mismatches += 1;
                }
            }
        }
    }
    mismatches as f64
}

fn spot_value_error() -> f64 {
    let a = cardinality(4, 1.0, 1).expect("valid");
    let b = cardinality(4, 2.0, 1).expect("valid");
    (a.abs_diff(12) + b.abs_diff(9)) as f64
}

fn noise_saturation_error(rng: &mut ChaCha8Rng) -> f64 {
    let modes = [NoiseMode::UniformRandom, NoiseMode::AdversarialTopweight, NoiseMode::SingleCoefficient];
    let ps: Vec<LpExponent> = [1.0, 2.0, 5.0, f64::INFINITY]
        .iter()
        .map(|&p| LpExponent::new(p).expect("valid p"))
        .collect();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(2..=64);
        let support = build_cross(n, rng.random_range(1.0..2.5), 1).expect("valid");
        let delta = 10f64.powf(rng.random_range(-6.0..-1.0));
        for &p in &ps {
            for mode in modes {
                let spec = NoiseSpec { p, delta, mode, seed: rng.random() };
                let xi = noise_vector(&spec, &support).expect("valid noise");
                let norm = lp_norm(xi.iter().map(|e| e.2).collect::<Vec<_>>(), p);
                worst = worst.max((norm - delta).abs() / delta);
            }
        }
    }
    worst
}

fn class_member_error() -> f64 {
    let spec = WienerSpec { s: 1.0, mu1: 3.0, mu2: 2.0 };
    let grid = make_class_member(&spec, 64, 64, 0.01, 7).expect("valid");
    (wiener_norm(&grid, &spec) - 1.0).abs()
}

fn nikolskii_ratio(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (mk, mj) = (rng.random_range(0..=16), rng.random_range(0..=16));
        let grid = random_grid(rng, mk, mj);
        let sup = sup_norm(&grid, 257).expect("m ≥ 2");
        worst = worst.max(sup / (nikolskii_explicit_bound(mk, mj) * l2_omega_norm(&grid)));
    }
    worst
}

fn coefficient_bound_ratio(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (mk, mj) = (rng.random_range(0..=12), rng.random_range(0..=12));
        let grid = random_grid(rng, mk, mj);
        let lq = lq_omega_norm(&grid, 4.0, 2 * mk.max(mj) + 1).expect("valid q");
        worst = worst.max(lq / lq_coefficient_bound(&grid, 4.0).expect("valid q"));
    }
    worst
}

// The 129-point grid is a subset of the 257-point one.
fn nested_sup_violation(rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let grid = random_grid(rng, 10, 10);
        let coarse = sup_norm(&grid, 129).expect("m ≥ 2");
        let fine = sup_norm(&grid, 257).expect("m ≥ 2");
        worst = worst.max(coarse - fine);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes() {
        let report = validate_suite();
        let failed: Vec<_> = report.failures().collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!((report.zeta0_oracle - ZETA0).abs() < 1e-15);
        assert!(report.t1_residual <= 1e-12 && report.t2_residual <= 1e-12);
        assert!(report.check("norms.nikolskii-max-ratio").unwrap().measured <= 1.0);
    }

    #[test]
    fn doubled_zeta0_is_caught() {
        let report = validate_suite_with(2.0 * ZETA0);
        for name in ["diffop.zeta0-oracle", "diffop.t1-residual", "diffop.finite-differences"] {
            assert!(!report.check(name).unwrap().passed, "{name}");
        }
        // T_2' has no T_0 component.
        assert!(report.check("diffop.t2-residual").unwrap().passed);
    }

    #[test]
    fn report_serializes() {
        let report = validate_suite();
        let json = serde_json::to_string(&report).unwrap();
        let back: ValidationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.checks.len(), report.checks.len());
    }
}
