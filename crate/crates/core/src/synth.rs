//! Synthetic functional regression data.
//!
//! Predictors are truncated Karhunen–Loève expansions of Brownian motion,
//!
//! ```text
//! X(t) = Σ_{k=1}^{N} sqrt(2) / ((k - 1/2) π) Z_k sin((k - 1/2) π t),   Z_k ~ N(0, 1),
//! ```
//!
//! the slope is `beta*(t) = Σ_k 4 sqrt(2) (-1)^(k-1) k^-2 cos(kπt)
//! = -sqrt(2) π^2 (E1(t) + B2(t))`, and responses are `<X, beta*> + eps` with
//! `eps ~ N(0, sigma2)`.
//!
//! Seeding: the predictor scores come from stream `derive_seed(seed, 1)` and
//! the noise from `derive_seed(seed, 2)` (see [`crate::rng`]), drawn curve by
//! curve in generation order. Normal variates use the ziggurat sampler of
//! `rand_distr::StandardNormal` over ChaCha8.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::invalid;
use crate::funcspace::{check_same_grid, l2_inner, Curve, Dataset, Grid};
use crate::kernels::{bernoulli_b2, euler_e1};
use crate::{rng, Result};

pub const PREDICTOR_STREAM: u64 = 1;
pub const NOISE_STREAM: u64 = 2;

/// Number of cosine modes in [`beta_star_h_variant`].
pub const H_VARIANT_MODES: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_total: usize,
    pub n_train: usize,
    /// Number of sine modes in each predictor.
    pub truncation: usize,
    /// Noise variance.
    pub sigma2: f64,
    pub grid_size: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_total: 650,
            n_train: 550,
            truncation: 500,
            sigma2: 0.5,
            grid_size: 256,
            seed: 20_240_901,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_train >= self.n_total {
            return Err(invalid!(
                "need 1 <= n_train < n_total, got n_train={} n_total={}",
                self.n_train,
                self.n_total
            ));
        }
        if self.truncation == 0 {
            return Err(invalid!("truncation must be at least 1"));
        }
        if !(self.sigma2 >= 0.0 && self.sigma2.is_finite()) {
            return Err(invalid!("sigma2 must be a finite non-negative number, got {}", self.sigma2));
        }
        if self.grid_size < 3 {
            return Err(invalid!("grid_size must be at least 3, got {}", self.grid_size));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::uniform(self.grid_size)?))
    }
}

/// `N x G` matrix of scaled sine modes `sqrt(2)/((k-1/2)π) sin((k-1/2)π t_p)`.
pub fn sine_basis(grid: &Grid, truncation: usize) -> DMatrix<f64> {
    let pts = grid.points();
    DMatrix::from_fn(truncation, pts.len(), |k, p| {
        let freq = (k as f64 + 0.5) * PI;
        SQRT_2 / freq * libm::sin(freq * pts[p])
    })
}

/// Curves from a score matrix (`n x N`, one row of `Z_k` per curve).
pub fn predictors_from_scores(scores: &DMatrix<f64>, grid: &Arc<Grid>) -> Result<Vec<Curve>> {
    let basis = sine_basis(grid, scores.ncols());
    let samples = scores * basis;
    (0..samples.nrows())
        .map(|i| Curve::new(grid.clone(), samples.row(i).iter().copied().collect()))
        .collect()
}

/// Standard normal score matrix `n x N` from one stream, row by row.
pub fn draw_scores(n: usize, truncation: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng::stream(seed);
    let mut data = Vec::with_capacity(n * truncation);
    for _ in 0..n * truncation {
        data.push(rng.sample::<f64, _>(StandardNormal));
    }
    DMatrix::from_row_slice(n, truncation, &data)
}

/// The `n_total` predictor curves of a configuration.
pub fn gen_predictors(cfg: &SynthConfig) -> Result<Vec<Curve>> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let scores = draw_scores(
        cfg.n_total,
        cfg.truncation,
        rng::derive_seed(cfg.seed, PREDICTOR_STREAM),
    );
    predictors_from_scores(&scores, &grid)
}

/// `beta*(t) = -sqrt(2) π^2 (E1(t) + B2(t))`.
pub fn beta_star_value(t: f64) -> f64 {
    -SQRT_2 * PI * PI * (euler_e1(t) + bernoulli_b2(t))
}

pub fn beta_star(grid: &Arc<Grid>) -> Curve {
    Curve::from_fn(grid, beta_star_value).expect("polynomial is finite on [0, 1]")
}

/// `Σ_{k<=200} 4 sqrt(2) (-1)^(k-1) k^-decay cos(kπt)`, a slope with finite
/// RKHS norm once `decay > 4.5`.
pub fn beta_star_h_variant(grid: &Arc<Grid>, decay: f64) -> Result<Curve> {
    if decay.is_nan() || decay < 4.0 {
        return Err(invalid!("decay must be at least 4, got {decay}"));
    }
    let coeffs = h_variant_coefficients(decay);
    Curve::from_fn(grid, |t| {
        coeffs
            .iter()
            .enumerate()
            .rev()
            .map(|(k, f)| SQRT_2 * f * libm::cos((k + 1) as f64 * PI * t))
            .sum()
    })
}

/// Cosine coefficients `f_k = 4 (-1)^(k-1) k^-decay` (basis `sqrt(2) cos(kπt)`).
pub fn h_variant_coefficients(decay: f64) -> Vec<f64> {
    (1..=H_VARIANT_MODES)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            4.0 * sign * libm::pow(k as f64, -decay)
        })
        .collect()
}

/// Squared RKHS norm `Σ_k (kπ)^4 f_k^2` of [`beta_star_h_variant`].
pub fn h_variant_norm_sq(decay: f64) -> f64 {
    h_variant_coefficients(decay)
        .iter()
        .enumerate()
        .rev()
        .map(|(k, f)| {
            let kp = (k + 1) as f64 * PI;
            kp * kp * kp * kp * f * f
        })
        .sum()
}

/// `Y_i = <X_i, beta> + sqrt(sigma2) eps_i`, noise drawn from stream `seed`.
pub fn gen_responses(curves: &[Curve], beta: &Curve, sigma2: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(invalid!("sigma2 must be a finite non-negative number, got {sigma2}"));
    }
    let sd = libm::sqrt(sigma2);
    let mut rng = rng::stream(seed);
    curves
        .iter()
        .map(|x| {
            check_same_grid(x, beta)?;
            let noise: f64 = rng.sample(StandardNormal);
            Ok(l2_inner(x, beta)? + sd * noise)
        })
        .collect()
}

/// All `n_total` pairs in generation order.
pub fn gen_dataset(cfg: &SynthConfig) -> Result<Dataset> {
    let curves = gen_predictors(cfg)?;
    let grid = curves[0].grid().clone();
    let beta = beta_star(&grid);
    let responses = gen_responses(
        &curves,
        &beta,
        cfg.sigma2,
        rng::derive_seed(cfg.seed, NOISE_STREAM),
    )?;
    Dataset::new(grid, curves, responses)
}

/// First `n_train` pairs for training, the rest for testing.
pub fn make_experiment(cfg: &SynthConfig) -> Result<(Dataset, Dataset)> {
    let all = gen_dataset(cfg)?;
    Ok((all.slice(0..cfg.n_train), all.slice(cfg.n_train..cfg.n_total)))
}
