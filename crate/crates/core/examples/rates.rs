//! Prints fitted and predicted convergence rates for the three metrics.
//!
//! ```text
//! cargo run --release -p chebcross --example rates
//! ```

use chebcross::harness::{run_convergence, ExperimentConfig, NoiseConfig, TestFunction};
use chebcross::{LpExponent, MetricSpec, NoiseMode, ProblemSpec, WienerSpec};

fn main() -> chebcross::Result<()> {
    let setups = [
        ("l2w", 3.0, 2.0, MetricSpec::l2()),
        ("sup", 3.5, 3.0, MetricSpec::uniform()),
        ("lqw:4", 3.0, 2.0, MetricSpec::lq(4.0)?),
    ];
    for (label, mu1, mu2, metric) in setups {
        let config = ExperimentConfig {
            problem: ProblemSpec {
                r: 1,
                wiener: WienerSpec::new(1.0, mu1, mu2)?,
                noise_p: LpExponent::new(2.0)?,
                metric,
                level_constant: 1.0,
            },
            noise: NoiseConfig { mode: NoiseMode::AdversarialTopweight, seed: 0 },
            gamma: 1.5,
            deltas: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5],
            trials_per_delta: 10,
            test_function: TestFunction::ClassMember { seed: 0, max_k: 255, max_j: 255, epsilon: 0.01 },
            metrics: vec![],
            output_path: None,
        };
        let start = std::time::Instant::now();
        let outcome = run_convergence(&config)?;
        let report = &outcome.reports[0];
        println!(
            "{label}: fitted {:.4} (95% CI {:.4}..{:.4}), predicted {:.4}, {:.1?}",
            report.fitted_slope, report.slope_ci.0, report.slope_ci.1, report.theoretical_slope, start.elapsed()
        );
        for row in &report.rows {
            println!("  δ={:e} n={} |Γ|={} error={:.4e} ± {:.1e}", row.delta, row.n_used, row.cardinality, row.mean_error, row.std_error);
        }
    }
    Ok(())
}
