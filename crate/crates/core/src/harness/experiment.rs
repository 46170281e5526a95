//! δ-sweep convergence experiments.
//!
//! For each noise level the truncation level comes from [`choose_n`], the
//! test function's coefficients are perturbed on `Γ_{n,γ}`, the truncated
//! derivative is formed, and its distance to the exact derivative is
//! measured in every requested metric. Trials are independent and run in
//! parallel; each owns its seeds, so results do not depend on scheduling.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_rate, RateFit};
use crate::diffop::{differentiate_coeffs, truncated_derivative};
use crate::error::{Error, Result};
use crate::hypercross::{cardinality, CrossIndexSet};
use crate::model::{make_class_member, perturb, NoiseMode, NoiseSpec, DEFAULT_EPSILON};
use crate::norms::MetricSpec;
use crate::transform::{analyze, default_quad_n, CoeffGrid};
use crate::tuning::{choose_n, ensure_admissible, gamma_range, theoretical_rate, ProblemSpec};

/// Degree bound used when sampling a named analytic function.
const ANALYTIC_BOX: usize = 31;

/// Noise settings shared by all trials; `p` comes from the problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub mode: NoiseMode,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticId {
    /// `e^t cos(πτ/2)`.
    ExpCos,
    /// `sin(2t) e^τ`.
    SinExp,
}

impl AnalyticId {
    pub fn eval(self, t: f64, tau: f64) -> f64 {
        match self {
            AnalyticId::ExpCos => t.exp() * (PI * tau / 2.0).cos(),
            AnalyticId::SinExp => (2.0 * t).sin() * tau.exp(),
        }
    }

    /// `∂^r/∂t^r` in closed form.
    pub fn derivative(self, r: usize, t: f64, tau: f64) -> f64 {
        match self {
            AnalyticId::ExpCos => self.eval(t, tau),
            AnalyticId::SinExp => 2f64.powi(r as i32) * (2.0 * t + r as f64 * PI / 2.0).sin() * tau.exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    ClassMember {
        seed: u64,
        max_k: usize,
        max_j: usize,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    NamedAnalytic { id: AnalyticId },
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_trials() -> usize {
    10
}

/// Declarative description of a δ sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub noise: NoiseConfig,
    pub gamma: f64,
    /// Strictly decreasing noise levels in `(0, 1)`.
    pub deltas: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials_per_delta: usize,
    pub test_function: TestFunction,
    /// Defaults to the problem's metric.
    #[serde(default)]
    pub metrics: Vec<MetricSpec>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn metrics(&self) -> Vec<MetricSpec> {
        if self.metrics.is_empty() {
            vec![self.problem.metric]
        } else {
            self.metrics.clone()
        }
    }

    /// Structural checks plus admissibility of the problem and `γ` for every metric.
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_delta < 1 {
            return Err(Error::invalid("trials_per_delta must be at least 1"));
        }
        if self.deltas.is_empty() {
            return Err(Error::invalid("deltas must not be empty"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return Err(Error::invalid(format!("δ = {d} is outside (0, 1)")));
        }
        if self.deltas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::invalid("deltas must be strictly decreasing"));
        }
        if let TestFunction::ClassMember { epsilon, .. } = self.test_function {
            if !(epsilon > 0.0) {
                return Err(Error::invalid("class-member epsilon must be positive"));
            }
        }
        for metric in self.metrics() {
            let spec = self.problem.with_metric(metric);
            ensure_admissible(&spec)?;
            let range = gamma_range(&spec)?;
            if range.is_empty() {
                return Err(Error::Inadmissible(format!("no admissible γ for metric {metric} (γ_max = {})", range.max)));
            }
            if !range.contains(self.gamma) {
                return Err(Error::Inadmissible(format!(
                    "γ = {} is outside [1, {}) for metric {metric}",
                    self.gamma, range.max
                )));
            }
        }
        Ok(())
    }
}

/// One measured error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub delta: f64,
    pub trial: usize,
    pub metric: String,
    pub n: usize,
    pub gamma: f64,
    pub cardinality: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub delta: f64,
    pub mean_error: f64,
    /// Standard error of the mean over trials.
    pub std_error: f64,
    pub n_used: usize,
    pub cardinality: usize,
}

/// Fitted and predicted rate for one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub metric: String,
    /// Sorted by descending δ.
    pub rows: Vec<RateRow>,
    pub fitted_slope: f64,
    pub intercept: f64,
    pub theoretical_slope: f64,
    pub slope_ci: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub reports: Vec<RateReport>,
    pub records: Vec<TrialRecord>,
}

impl ExperimentOutcome {
    pub fn report(&self, metric: &MetricSpec) -> Option<&RateReport> {
        let label = metric.to_string();
        self.reports.iter().find(|r| r.metric == label)
    }
}

/// Source of per-trial errors. The default pipeline is [`PipelineEvaluator`];
/// tests substitute synthetic ones.
pub trait TrialEvaluator: Sync {
    /// Errors of one trial at noise level `delta` and truncation level `n`,
    /// one per metric, in order.
    fn errors(&self, delta: f64, trial: usize, n: usize, metrics: &[MetricSpec]) -> Result<Vec<f64>>;
}

/// A test function and its exact derivative, both as coefficient grids.
#[derive(Clone, Debug)]
pub struct Reference {
    pub coeffs: CoeffGrid,
    pub derivative: CoeffGrid,
}

impl Reference {
    pub fn build(test_function: &TestFunction, config: &ExperimentConfig, trial: usize) -> Result<Self> {
        let coeffs = match *test_function {
            TestFunction::ClassMember { seed, max_k, max_j, epsilon } => {
                make_class_member(&config.problem.wiener, max_k, max_j, epsilon, seed.wrapping_add(trial as u64))?
            }
            TestFunction::NamedAnalytic { id } => analyze(
                |t, tau| id.eval(t, tau),
                ANALYTIC_BOX,
                ANALYTIC_BOX,
                default_quad_n(ANALYTIC_BOX, ANALYTIC_BOX),
            )?,
        };
        let derivative = differentiate_coeffs(&coeffs, config.problem.r)?;
        Ok(Reference { coeffs, derivative })
    }

    /// Error of the truncation method applied to `data` (perturbed coefficients).
    pub fn error_of(&self, data: &CoeffGrid, n: usize, gamma: f64, r: usize, metric: &MetricSpec) -> Result<f64> {
        let approx = truncated_derivative(data, n, gamma, r)?;
        metric.measure(&self.derivative.sub(&approx))
    }
}

/// The full method: perturb, truncate, differentiate, measure.
pub struct PipelineEvaluator<'a> {
    config: &'a ExperimentConfig,
    references: Vec<Reference>,
}

impl<'a> PipelineEvaluator<'a> {
    pub fn new(config: &'a ExperimentConfig) -> Result<Self> {
        let references = (0..config.trials_per_delta)
            .into_par_iter()
            .map(|trial| Reference::build(&config.test_function, config, trial))
            .collect::<Result<Vec<_>>>()?;
        Ok(PipelineEvaluator { config, references })
    }
}

impl TrialEvaluator for PipelineEvaluator<'_> {
    fn errors(&self, delta: f64, trial: usize, n: usize, metrics: &[MetricSpec]) -> Result<Vec<f64>> {
        let cfg = self.config;
        let reference = &self.references[trial];
        let noise = NoiseSpec {
            p: cfg.problem.noise_p,
            delta,
            mode: cfg.noise.mode,
            seed: cfg.noise.seed.wrapping_add(trial as u64),
        };
        let support = CrossIndexSet::new(n, cfg.gamma, cfg.problem.r)?;
        let data = perturb(&reference.coeffs, &noise, &support)?;
        let approx = truncated_derivative(&data, n, cfg.gamma, cfg.problem.r)?;
        let residual = reference.derivative.sub(&approx);
        metrics.iter().map(|m| m.measure(&residual)).collect()
    }
}

/// Run the configured sweep with the full pipeline.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let evaluator = PipelineEvaluator::new(config)?;
    run_convergence_with(config, &evaluator)
}

/// Run the sweep with a caller-supplied error source.
pub fn run_convergence_with(config: &ExperimentConfig, evaluator: &dyn TrialEvaluator) -> Result<ExperimentOutcome> {
    config.validate()?;
    let metrics = config.metrics();
    let r = config.problem.r;
    let levels = config
        .deltas
        .iter()
        .map(|&d| choose_n(d, &config.problem))
        .collect::<Result<Vec<_>>>()?;
    let sizes = levels
        .iter()
        .map(|&n| cardinality(n, config.gamma, r))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..config.deltas.len())
        .flat_map(|i| (0..config.trials_per_delta).map(move |t| (i, t)))
        .collect();
    let errors = jobs
        .par_iter()
        .map(|&(i, trial)| evaluator.errors(config.deltas[i], trial, levels[i], &metrics))
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(jobs.len() * metrics.len());
    for (&(i, trial), errs) in jobs.iter().zip(&errors) {
        for (metric, &error) in metrics.iter().zip(errs) {
            records.push(TrialRecord {
                delta: config.deltas[i],
                trial,
                metric: metric.to_string(),
                n: levels[i],
                gamma: config.gamma,
                cardinality: sizes[i],
                error,
            });
        }
    }

    let trials = config.trials_per_delta;
    let mut reports = Vec::with_capacity(metrics.len());
    for (m, metric) in metrics.iter().enumerate() {
        let rows: Vec<RateRow> = config
            .deltas
            .iter()
            .enumerate()
            .map(|(i, &delta)| {
                let sample: Vec<f64> = (0..trials).map(|t| errors[i * trials + t][m]).collect();
                let (mean, sem) = mean_and_sem(&sample);
                RateRow {
                    delta,
                    mean_error: mean,
                    std_error: sem,
                    n_used: levels[i],
                    cardinality: sizes[i],
                }
            })
            .collect();
        let points: Vec<(f64, f64)> = rows.iter().map(|row| (row.delta, row.mean_error)).collect();
        let RateFit { slope, intercept, slope_ci } = fit_rate(&points)?;
        reports.push(RateReport {
            metric: metric.to_string(),
            rows,
            fitted_slope: slope,
            intercept,
            theoretical_slope: theoretical_rate(&config.problem.with_metric(*metric))?,
            slope_ci,
        });
    }
    Ok(ExperimentOutcome { reports, records })
}

fn mean_and_sem(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    if sample.len() < 2 {
        return (mean, 0.0);
    }
    let var = sample.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Noise-free errors of the truncation method for a sequence of levels.
pub fn truncation_error_sweep(
    reference: &Reference,
    levels: &[usize],
    gamma: f64,
    r: usize,
    metric: &MetricSpec,
) -> Result<Vec<f64>> {
    levels
        .iter()
        .map(|&n| reference.error_of(&reference.coeffs, n, gamma, r, metric))
        .collect()
}

pub const TRIALS_CSV_HEADER: &str = "delta,trial,metric,n,gamma,cardinality,error";

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIALS_CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&format!(
            "{:e},{},{},{},{},{},{:.16e}\n",
            rec.delta, rec.trial, rec.metric, rec.n, rec.gamma, rec.cardinality, rec.error
        ));
    }
    out
}

/// Write `trials.csv` and `summary.json` into `dir`, creating it if needed.
pub fn write_outcome(outcome: &ExperimentOutcome, dir: &Path) -> Result<()> {
    let io = |source| Error::Io { path: dir.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(io)?;
    let write = |name: &str, body: &str| -> Result<()> {
        let path = dir.join(name);
        let mut file = fs::File::create(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
        file.write_all(body.as_bytes()).map_err(|source| Error::Io { path, source })
    };
    write("trials.csv", &trials_csv(&outcome.records))?;
    write("summary.json", &serde_json::to_string_pretty(&outcome.reports)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LpExponent, WienerSpec};
    use crate::norms::l2_omega_norm;

    fn config() -> ExperimentConfig {
        ExperimentConfig {
            problem: ProblemSpec {
                r: 1,
                wiener: WienerSpec { s: 1.0, mu1: 3.0, mu2: 2.0 },
                noise_p: LpExponent::new(2.0).unwrap(),
                metric: MetricSpec::l2(),
                level_constant: 1.0,
            },
            noise: NoiseConfig { mode: NoiseMode::AdversarialTopweight, seed: 0 },
            gamma: 1.5,
            deltas: vec![1e-2, 1e-3, 1e-4, 1e-5],
            trials_per_delta: 2,
            test_function: TestFunction::ClassMember { seed: 1, max_k: 40, max_j: 40, epsilon: 0.01 },
            metrics: vec![],
            output_path: None,
        }
    }

    struct PowerLaw(f64);

    impl TrialEvaluator for PowerLaw {
        fn errors(&self, delta: f64, _: usize, _: usize, metrics: &[MetricSpec]) -> Result<Vec<f64>> {
            Ok(vec![3.0 * delta.powf(self.0); metrics.len()])
        }
    }

    #[test]
    fn planted_slope_is_recovered() {
        let cfg = config();
        let out = run_convergence_with(&cfg, &PowerLaw(0.5)).unwrap();
        let report = &out.reports[0];
        assert!((report.fitted_slope - 0.5).abs() < 1e-9);
        assert!((report.theoretical_slope - 1.5 / 3.5).abs() < 1e-15);
        assert_eq!(out.records.len(), 8);
        for row in &report.rows {
            assert_eq!(row.n_used, choose_n(row.delta, &cfg.problem).unwrap());
            assert_eq!(row.cardinality, cardinality(row.n_used, cfg.gamma, 1).unwrap());
        }
        assert!(report.rows.windows(2).all(|w| w[0].delta > w[1].delta));
    }

    #[test]
    fn config_validation() {
        let mut cfg = config();
        cfg.deltas = vec![1e-3, 1e-2, 1e-4];
        assert!(cfg.validate().is_err());
        let mut cfg = config();
        cfg.gamma = 1.7;
        assert!(matches!(cfg.validate(), Err(Error::Inadmissible(_))));
        let mut cfg = config();
        cfg.problem.wiener.mu1 = 1.4;
        assert!(matches!(cfg.validate(), Err(Error::Inadmissible(_))));
        let mut cfg = config();
        cfg.trials_per_delta = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = config();
        cfg.deltas = vec![1e-2, 1e-3];
        assert!(run_convergence_with(&cfg, &PowerLaw(0.5)).is_err());
    }

    #[test]
    fn config_json_schema() {
        let text = r#"{
            "problem": {"r": 1, "s": 1, "mu1": 3, "mu2": 2, "p": "inf", "metric": "l2w", "level_constant": 2.0},
            "noise": {"mode": "uniform-random", "seed": 5},
            "gamma": 1.5,
            "deltas": [0.01, 0.001, 0.0001],
            "test_function": {"class-member": {"seed": 3, "max_k": 31, "max_j": 31}},
            "metrics": ["l2w", "sup", "lqw:4"]
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert!(cfg.problem.noise_p.is_infinite());
        assert_eq!(cfg.trials_per_delta, 10);
        assert_eq!(cfg.metrics().len(), 3);
        assert_eq!(cfg.test_function, TestFunction::ClassMember { seed: 3, max_k: 31, max_j: 31, epsilon: 0.01 });
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert!(ExperimentConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg = config();
        let a = run_convergence(&cfg).unwrap();
        let b = run_convergence(&cfg).unwrap();
        assert_eq!(trials_csv(&a.records), trials_csv(&b.records));
        assert_eq!(serde_json::to_string(&a.reports).unwrap(), serde_json::to_string(&b.reports).unwrap());
    }

    #[test]
    fn noise_free_error_shrinks_with_level() {
        let cfg = config();
        let reference = Reference::build(&cfg.test_function, &cfg, 0).unwrap();
        let errors = truncation_error_sweep(&reference, &[2, 4, 8, 16, 32], 1.5, 1, &MetricSpec::l2()).unwrap();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
        assert!(l2_omega_norm(&reference.derivative) > errors[0]);
    }

    #[test]
    fn analytic_reference_matches_closed_form() {
        let mut cfg = config();
        cfg.test_function = TestFunction::NamedAnalytic { id: AnalyticId::SinExp };
        for r in 1..=2 {
            cfg.problem.r = r;
            let reference = Reference::build(&cfg.test_function, &cfg, 0).unwrap();
            for &(t, tau) in &[(0.3, -0.2), (-0.9, 0.8), (1.0, 1.0)] {
                let v = crate::transform::synthesize(&reference.derivative, t, tau).unwrap();
                let exact = AnalyticId::SinExp.derivative(r, t, tau);
                assert!((v - exact).abs() < 1e-15 * (ANALYTIC_BOX as f64).powi(2 * r as i32 + 1) * exact.abs().max(1.0), "r={r} ({t},{tau}): {v} vs {exact}");
            }
        }
    }

    #[test]
    fn outcome_files() {
        let out = run_convergence_with(&config(), &PowerLaw(0.3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outcome(&out, dir.path()).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
        assert!(csv.starts_with("delta,trial,metric,n,gamma,cardinality,error\n"));
        assert_eq!(csv.lines().count(), 9);
        let reports: Vec<RateReport> =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
        assert_eq!(reports, out.reports);
    }
}
