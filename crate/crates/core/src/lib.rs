//! Total-variation distance estimation and identity testing over `{0,1}^n`.
//!
//! The unknown distribution is reached only through a [`ConditionalSampler`]
//! that can draw conditioned on any subcube; the reference distribution only
//! needs pointwise mass evaluation ([`KnownDistribution`]). The estimator
//! recovers the mass of each sampled point by the chain rule, estimating each
//! conditional marginal with a Gamma-Bernoulli approximation scheme.
//!
//! [`poset`] adapts linear extensions of a partial order to this setting.

pub mod cube;
pub mod error;
pub mod estimator;
pub mod gbas;
pub mod oracle;
pub mod poset;
pub mod rng;
pub mod tester;

pub use cube::{BitString, ConditionalSampler, KnownDistribution, ProductDistribution, SubcubeCondition};
pub use error::{Error, Result};
pub use estimator::{
    cube_probe_est, cube_probe_est_with, derive_params, EstimateReport, EstimatorOptions,
    EstimatorParams,
};
pub use rng::RngStream;
pub use tester::{cube_probe_tester, cube_probe_tester_with, Decision, TesterParams, Verdict};
