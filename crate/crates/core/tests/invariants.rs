use chebcross::harness::fit_rate;
use chebcross::model::{lp_norm, noise_vector};
use chebcross::norms::{l2_omega_norm, lq_omega_norm, sup_norm};
use chebcross::transform::io::{from_csv_str, to_csv_string};
use chebcross::{
    analyze, build_cross, choose_n, differentiate_coeffs, gamma_range, synthesize, truncated_derivative, CoeffGrid,
    LpExponent, MetricSpec, NoiseMode, NoiseSpec, ProblemSpec, WienerSpec,
};
use proptest::prelude::*;
use std::path::Path;

fn grid() -> impl Strategy<Value = CoeffGrid> {
    (0usize..10, 0usize..10)
        .prop_flat_map(|(mk, mj)| {
            proptest::collection::vec(-1.0f64..1.0, (mk + 1) * (mj + 1)).prop_map(move |v| (mk, mj, v))
        })
        .prop_map(|(mk, mj, v)| {
            let entries = v.into_iter().enumerate().map(|(i, x)| (i / (mj + 1), i % (mj + 1), x));
            CoeffGrid::from_entries(mk, mj, entries).unwrap()
        })
}

fn exponent() -> impl Strategy<Value = LpExponent> {
    prop_oneof![
        (1.0f64..8.0).prop_map(|p| LpExponent::new(p).unwrap()),
        Just(LpExponent::INFINITY)
    ]
}

fn mode() -> impl Strategy<Value = NoiseMode> {
    prop_oneof![
        Just(NoiseMode::UniformRandom),
        Just(NoiseMode::AdversarialTopweight),
        Just(NoiseMode::SingleCoefficient)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analysis_inverts_synthesis(g in grid()) {
        let (mk, mj) = (g.max_k(), g.max_j());
        let back = analyze(|t, tau| synthesize(&g, t, tau).unwrap(), mk, mj, 2 * mk.max(mj) + 1).unwrap();
        let worst = g.sub(&back).iter().fold(0.0f64, |m, e| m.max(e.2.abs()));
        prop_assert!(worst < 1e-12);
    }

    #[test]
    fn csv_round_trip(g in grid()) {
        prop_assert_eq!(from_csv_str(&to_csv_string(&g), Path::new("p.csv")).unwrap(), g);
    }

    #[test]
    fn parseval(g in grid()) {
        prop_assume!(!g.is_zero());
        let quad = lq_omega_norm(&g, 2.0, g.max_k().max(g.max_j()) + 1).unwrap();
        prop_assert!((quad - l2_omega_norm(&g)).abs() <= 1e-12 * l2_omega_norm(&g));
    }

    #[test]
    fn differentiation_is_linear_and_lowers_degree(a in grid(), b in grid(), alpha in -2.0f64..2.0, r in 1usize..4) {
        let lhs = differentiate_coeffs(&a.combine(alpha, &b, 1.0), r).unwrap();
        let rhs = differentiate_coeffs(&a, r).unwrap().combine(alpha, &differentiate_coeffs(&b, r).unwrap(), 1.0);
        let scale = 1.0 + l2_omega_norm(&lhs);
        prop_assert!(l2_omega_norm(&lhs.sub(&rhs)) <= 1e-12 * scale);
        prop_assert!(lhs.iter().all(|(k, _, _)| k + r <= a.max_k().max(b.max_k())));
    }

    #[test]
    fn truncation_only_reads_the_cross(g in grid(), n in 1usize..12, gamma in 1.0f64..3.0, r in 1usize..3) {
        prop_assume!(n >= r);
        let cross = build_cross(n, gamma, r).unwrap();
        let inside = g.restrict(&cross);
        prop_assert_eq!(truncated_derivative(&g, n, gamma, r).unwrap(), truncated_derivative(&inside, n, gamma, r).unwrap());
    }

    #[test]
    fn crosses_shrink_with_gamma(n in 1usize..200, g1 in 1.0f64..3.0, dg in 0.0f64..2.0, r in 1usize..4) {
        prop_assume!(n >= r);
        let wide = build_cross(n, g1, r).unwrap();
        let narrow = build_cross(n, g1 + dg, r).unwrap();
        prop_assert!(narrow.iter().all(|(k, j)| wide.contains(k, j)));
        let larger = build_cross(n + 1, g1, r).unwrap();
        prop_assert!(wide.iter().all(|(k, j)| larger.contains(k, j)));
    }

    #[test]
    fn noise_saturates(n in 1usize..40, gamma in 1.0f64..3.0, p in exponent(), m in mode(), seed in any::<u64>(), e in -9.0f64..-0.1) {
        let delta = 10f64.powf(e);
        let support = build_cross(n, gamma, 1).unwrap();
        let xi = noise_vector(&NoiseSpec { p, delta, mode: m, seed }, &support).unwrap();
        prop_assert!(xi.iter().all(|&(k, j, _)| support.contains(k, j)));
        let norm = lp_norm(xi.iter().map(|x| x.2).collect::<Vec<_>>(), p);
        prop_assert!((norm - delta).abs() <= 1e-12 * delta);
    }

    #[test]
    fn level_grows_as_noise_shrinks(d1 in 1e-9f64..0.9, f in 0.01f64..1.0, mu1 in 2.6f64..6.0, p in exponent()) {
        let spec = ProblemSpec {
            r: 1,
            wiener: WienerSpec::new(1.0, mu1, mu1).unwrap(),
            noise_p: p,
            metric: MetricSpec::l2(),
            level_constant: 1.0,
        };
        prop_assert!(choose_n(d1 * f, &spec).unwrap() >= choose_n(d1, &spec).unwrap());
        prop_assert!(gamma_range(&spec).unwrap().max > 1.0);
    }

    #[test]
    fn sup_grid_refinement_never_lowers_the_estimate(g in grid(), m in 2usize..40) {
        prop_assert!(sup_norm(&g, 2 * m - 1).unwrap() >= sup_norm(&g, m).unwrap());
    }

    #[test]
    fn planted_slopes_are_recovered(slope in -2.0f64..2.0, c in 0.1f64..10.0) {
        let points: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3, 1e-4].iter().map(|&d| (d, c * f64::powf(d, slope))).collect();
        let fit = fit_rate(&points).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!(fit.slope_ci.0 <= fit.slope && fit.slope <= fit.slope_ci.1);
    }
}
