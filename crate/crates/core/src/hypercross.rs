//! Hyperbolic cross index sets
//!
//! ```text
//! Γ_{n,γ} = { (k, j) : k·j^γ ≤ n,  r ≤ k ≤ n,  0 ≤ j ≤ (n/r)^{1/γ} }
//! ```
//!
//! For fixed `k` the admissible `j` run from `0` to `⌊(n/k)^{1/γ}⌋`; `j = 0`
//! is always present. The set is never materialized: iteration walks `k`
//! upward and computes each row length on the fly.

use crate::error::{Error, Result};

/// Relative slack on the boundary test `k·j^γ ≤ n` for non-integer `γ`.
const BOUNDARY_RTOL: f64 = 1e-12;

/// `k̲ = max(1, k)`.
#[inline]
pub fn underline(k: usize) -> usize {
    k.max(1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossIndexSet {
    n: usize,
    gamma: f64,
    r: usize,
}

impl CrossIndexSet {
    pub fn new(n: usize, gamma: f64, r: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::invalid("derivative order r must be at least 1"));
        }
        if n < r {
            return Err(Error::invalid(format!("truncation level n = {n} is below the derivative order r = {r}")));
        }
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma = {gamma} must be a finite value ≥ 1")));
        }
        Ok(CrossIndexSet { n, gamma, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `⌊(n/r)^{1/γ}⌋`, the largest `j` anywhere in the set.
    pub fn j_bound(&self) -> usize {
        self.row_len_minus_one(self.r)
    }

    /// Largest `j` with `k·j^γ ≤ n`; `None` when `k` is outside `r..=n`.
    pub fn j_max(&self, k: usize) -> Option<usize> {
        (self.r..=self.n).contains(&k).then(|| self.row_len_minus_one(k))
    }

    fn row_len_minus_one(&self, k: usize) -> usize {
        let quotient = self.n / k;
        if self.gamma == 1.0 {
            return quotient;
        }
        if self.gamma == 2.0 {
            return quotient.isqrt();
        }
        let mut j = ((self.n as f64 / k as f64).powf(1.0 / self.gamma)).floor() as usize;
        while j > 0 && !self.within(k, j) {
            j -= 1;
        }
        while self.within(k, j + 1) {
            j += 1;
        }
        j
    }

    fn within(&self, k: usize, j: usize) -> bool {
        if j == 0 {
            return true;
        }
        match self.gamma {
            1.0 => k.checked_mul(j).is_some_and(|p| p <= self.n),
            2.0 => k
                .checked_mul(j)
                .and_then(|p| p.checked_mul(j))
                .is_some_and(|p| p <= self.n),
            g => k as f64 * (j as f64).powf(g) <= self.n as f64 * (1.0 + BOUNDARY_RTOL),
        }
    }

    /// Membership predicate.
    pub fn contains(&self, k: usize, j: usize) -> bool {
        (self.r..=self.n).contains(&k) && self.within(k, j)
    }

    /// Indices in ascending `k`, then ascending `j`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.r..=self.n).flat_map(move |k| (0..=self.row_len_minus_one(k)).map(move |j| (k, j)))
    }

    /// Number of indices, counted row by row.
    pub fn cardinality(&self) -> usize {
        (self.r..=self.n).map(|k| self.row_len_minus_one(k) + 1).sum()
    }
}

pub fn build_cross(n: usize, gamma: f64, r: usize) -> Result<CrossIndexSet> {
    CrossIndexSet::new(n, gamma, r)
}

pub fn cardinality(n: usize, gamma: f64, r: usize) -> Result<usize> {
    Ok(CrossIndexSet::new(n, gamma, r)?.cardinality())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct scan of the defining inequalities over the enclosing box.
    fn brute_force(n: usize, gamma: f64, r: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for k in r..=n {
            for j in 0..=n {
                if j == 0 || (k as f64) * (j as f64).powf(gamma) <= n as f64 * (1.0 + 1e-12) {
                    out.push((k, j));
                }
            }
        }
        out
    }

    #[test]
    fn small_examples() {
        let c = build_cross(4, 1.0, 1).unwrap();
        let got: Vec<_> = c.iter().collect();
        let mut by_j = got.clone();
        by_j.sort_by_key(|&(k, j)| (j, k));
        assert_eq!(
            by_j,
            vec![(1, 0), (2, 0), (3, 0), (4, 0), (1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (2, 2), (1, 3), (1, 4)]
        );
        assert_eq!(got, brute_force(4, 1.0, 1));

        let c = build_cross(2, 1.0, 2).unwrap();
        assert_eq!(c.iter().collect::<Vec<_>>(), vec![(2, 0), (2, 1)]);

        let c = build_cross(4, 2.0, 1).unwrap();
        assert_eq!(c.iter().count(), 9);
        assert_eq!(c.iter().collect::<Vec<_>>(), brute_force(4, 2.0, 1));
    }

    #[test]
    fn counts() {
        assert_eq!(cardinality(4, 1.0, 1).unwrap(), 12);
        assert_eq!(cardinality(4, 2.0, 1).unwrap(), 9);
        for r in 1..6 {
            for gamma in [1.0, 1.5, 2.0, 3.7] {
                assert_eq!(cardinality(r, gamma, r).unwrap(), 2);
            }
        }
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_cross(2, 1.0, 3).is_err());
        assert!(build_cross(5, 0.9, 1).is_err());
        assert!(build_cross(5, f64::NAN, 1).is_err());
        assert!(build_cross(5, 1.0, 0).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..40 {
            for r in 1..=n.min(4) {
                for gamma in [1.0, 1.25, 1.5, 2.0, 2.5, 3.0] {
                    let c = build_cross(n, gamma, r).unwrap();
                    let expected = brute_force(n, gamma, r);
                    assert_eq!(c.iter().collect::<Vec<_>>(), expected, "n={n} r={r} gamma={gamma}");
                    assert_eq!(c.cardinality(), expected.len());
                }
            }
        }
    }

    #[test]
    fn cardinality_growth() {
        let ns: Vec<usize> = (10..=17).map(|e| 1usize << e).collect();
        let ratios = |gamma: f64, scale: &dyn Fn(f64) -> f64| -> (f64, f64) {
            ns.iter().fold((f64::INFINITY, 0.0), |(lo, hi), &n| {
                let q = cardinality(n, gamma, 1).unwrap() as f64 / scale(n as f64);
                (lo.min(q), hi.max(q))
            })
        };
        let (lo, hi) = ratios(2.0, &|n| n);
        assert!(hi / lo < 4.0, "gamma=2 bracket [{lo}, {hi}]");
        let (lo, hi) = ratios(1.0, &|n| n * n.ln());
        assert!(hi / lo < 4.0, "gamma=1 bracket [{lo}, {hi}]");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn predicate_matches_definition(n in 1usize..300, r in 1usize..6, gamma in 1.0f64..4.0, k in 0usize..320, j in 0usize..320) {
            prop_assume!(n >= r);
            let c = build_cross(n, gamma, r).unwrap();
            let defining = (r..=n).contains(&k)
                && (j == 0 || (k as f64) * (j as f64).powf(gamma) <= n as f64 * (1.0 + 1e-12));
            prop_assert_eq!(c.contains(k, j), defining);
            let row = c.j_max(k);
            prop_assert_eq!(row.is_some_and(|m| j <= m), defining);
        }
    }

    proptest! {
        #[test]
        fn nested_in_n_and_gamma(n in 1usize..200, r in 1usize..4, gamma in 1.0f64..3.0, extra in 0.0f64..2.0) {
            prop_assume!(n >= r);
            let base = build_cross(n, gamma, r).unwrap();
            let bigger = build_cross(n + 1, gamma, r).unwrap();
            let thinner = build_cross(n, gamma + extra, r).unwrap();
            prop_assert!(base.iter().all(|(k, j)| bigger.contains(k, j)));
            prop_assert!(thinner.iter().all(|(k, j)| base.contains(k, j)));
        }
    }
}
