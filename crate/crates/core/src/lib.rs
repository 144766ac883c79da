//! Semantic channel analysis over ground Datalog knowledge bases.
//!
//! The crate covers the logical layer ([`kb`]), finite Markov kernels
//! ([`kernel`]), per-pair distortions ([`distortion`]), information-theoretic
//! and structural invariants ([`info`]), sender/receiver overlap analysis
//! ([`multiagent`]) and a Monte Carlo simulator for two-layer block codes
//! ([`coding`]). [`example`] bundles the four-entity path-reachability
//! instance used throughout the tests.

pub mod coding;
pub mod distortion;
pub mod error;
pub mod example;
pub mod info;
pub mod kb;
pub mod kernel;
pub mod multiagent;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Prob, Rational};

/// Float kernel used by the numerical layer.
pub type Kernel64 = kernel::Kernel<f64>;
/// Exact kernel for 0/1 and other rational-valued matrices.
pub type ExactKernel = kernel::Kernel<Rational>;
