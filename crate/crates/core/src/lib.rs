//! Functional linear regression with scalar responses, regularized in a
//! reproducing kernel Hilbert space.
//!
//! The model is `Y = <X, beta*>_{L2} + noise` for curves `X` on `[0, 1]`.
//! Two estimators are provided:
//!
//! - the full kernel solver, which solves an `n x n` ridge system in the
//!   functional Gram matrix `K_ij = ∫∫ k(s,t) X_i(s) X_j(t) ds dt`;
//! - the Nyström solver, which restricts the representer expansion to `m`
//!   uniformly subsampled training curves and solves an `m x m` system
//!   assembled from the `n x m` cross Gram matrix, for `O(m^2 n)` work.
//!
//! Everything here is pure computation over `alloc`; the crate builds with
//! `--no-default-features` for `no_std` targets. File formats, the CLI and the
//! timing harness live in the `flrn` companion crate.
//!
//! ```
//! use flrn_core::{estimator, kernels::KernelSpec, synth::{self, SynthConfig}};
//!
//! let cfg = SynthConfig { n_total: 60, n_train: 50, grid_size: 33, seed: 7, ..SynthConfig::default() };
//! let (train, test) = synth::make_experiment(&cfg).unwrap();
//! let ridge = estimator::RidgeConfig::new(1e-5).unwrap();
//! let model = estimator::fit_nystrom(&train, KernelSpec::SobolevBernoulli, &ridge, 20, 1).unwrap();
//! let y_hat = estimator::predict(&model, &test.curves[0]).unwrap();
//! assert!(y_hat.is_finite());
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod estimator;
pub mod funcspace;
pub mod gram;
pub mod kernels;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod sweep;
pub mod synth;
pub mod theory;

pub use error::{Error, Result};
pub use estimator::{FitKind, FittedModel, JitterPolicy, RidgeConfig};
pub use funcspace::{Curve, Dataset, Grid};
pub use gram::{GramMatrix, KernelOperator};
pub use kernels::{CovarianceSpec, KernelSpec};
