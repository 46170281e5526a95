//! Experiment engine: single-shot differentiation, δ sweeps with rate
//! fitting, and the invariant validation suite.

pub mod experiment;
pub mod fit;
pub mod single;
pub mod validate;

pub use experiment::{
    run_convergence, run_convergence_with, trials_csv, truncation_error_sweep, write_outcome, AnalyticId, ExperimentConfig,
    ExperimentOutcome, NoiseConfig, RateReport, RateRow, Reference, TestFunction, TrialEvaluator, TrialRecord,
};
pub use fit::{fit_rate, RateFit};
pub use single::{run_single, values_table};
pub use validate::{validate_suite, validate_suite_with, Check, ValidationReport};
