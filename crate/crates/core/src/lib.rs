//! Stable differentiation of noisy bivariate data with truncated
//! Fourier–Chebyshev expansions on hyperbolic crosses.
//!
//! A function on `[-1, 1]²` is represented by its coefficients in the
//! orthonormal Chebyshev system ([`basis`], [`transform`]). Noisy
//! coefficients are truncated to a hyperbolic cross ([`hypercross`]) and
//! differentiated in the first variable exactly on coefficients ([`diffop`]).
//! [`tuning`] picks the truncation level from the noise level; [`norms`] and
//! [`model`] supply the error metrics, function classes and noise models, and
//! [`harness`] runs convergence experiments.
//!
//! ```
//! use chebcross::{analyze, truncated_derivative, synthesize};
//!
//! let f = analyze(|t, tau| t * t * tau, 8, 8, 17).unwrap();
//! let d = truncated_derivative(&f, 8, 1.0, 1).unwrap();
//! let v = synthesize(&d, 0.5, 0.4).unwrap();
//! assert!((v - 2.0 * 0.5 * 0.4).abs() < 1e-12);
//! ```

// `!(x > y)` is how NaN is rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod diffop;
pub mod error;
pub mod harness;
pub mod hypercross;
pub mod model;
pub mod norms;
pub mod transform;
pub mod tuning;

pub use diffop::{differentiate_coeffs, truncated_derivative, DerivativeOperator1D, ZETA0};
pub use error::{Error, Result};
pub use hypercross::{build_cross, cardinality, CrossIndexSet};
pub use model::{make_class_member, perturb, LpExponent, NoiseMode, NoiseSpec, WienerSpec};
pub use norms::{MetricKind, MetricSpec};
pub use transform::{analyze, synthesize, CoeffGrid};
pub use tuning::{choose_n, gamma_range, theoretical_rate, validate_spec, ProblemSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/basis.md")]
    mod basis {}
    #[doc = include_str!("../../../book/src/transform.md")]
    mod transform {}
    #[doc = include_str!("../../../book/src/cross.md")]
    mod cross {}
    #[doc = include_str!("../../../book/src/differentiation.md")]
    mod differentiation {}
    #[doc = include_str!("../../../book/src/noise.md")]
    mod noise {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
