//! Building blocks of the `(m, lambda)` RMSE sweep.
//!
//! The training Gram matrix and the test-versus-train cross Gram matrix are
//! assembled once per dataset; every Nyström fit in the sweep then works on
//! column slices of them, which are bit-identical to what a standalone
//! [`crate::estimator::fit_nystrom`] would assemble. One subsample is drawn per
//! `(m, repetition)` and shared by all lambdas of that column, so the normal
//! matrix `K_nm^T K_nm` is formed once per column.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::invalid;
use crate::estimator::{solve_full_system, subsample_uniform, JitterPolicy};
use crate::funcspace::Dataset;
use crate::gram::{gram_block, KernelOperator};
use crate::linalg::{dot, solve_spd};
use crate::metrics::rmse_from;
use crate::{rng, Result};

/// Grid of the sweep and its repetition/seed bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    pub m_min: usize,
    pub m_max: usize,
    pub m_points: usize,
    pub reps: usize,
    pub base_seed: u64,
}

impl Default for SweepSpec {
    /// 25 log-spaced lambdas in `[1e-7, 1e-4]`, 25 subsample sizes in
    /// `[10, 240]`, 100 repetitions.
    fn default() -> Self {
        Self {
            lambda_min: 1e-7,
            lambda_max: 1e-4,
            lambda_points: 25,
            m_min: 10,
            m_max: 240,
            m_points: 25,
            reps: 100,
            base_seed: 7,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, n_train: usize) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_min <= self.lambda_max && self.lambda_max.is_finite()) {
            return Err(invalid!(
                "need 0 < lambda_min <= lambda_max, got [{}, {}]",
                self.lambda_min,
                self.lambda_max
            ));
        }
        if self.m_min < 1 || self.m_min > self.m_max || self.m_max > n_train {
            return Err(invalid!(
                "need 1 <= m_min <= m_max <= n_train={n_train}, got [{}, {}]",
                self.m_min,
                self.m_max
            ));
        }
        if self.lambda_points < 1 || self.m_points < 1 || self.reps < 1 {
            return Err(invalid!("grid point counts and reps must be at least 1"));
        }
        Ok(())
    }

    /// Log-spaced lambdas, ascending.
    pub fn lambda_grid(&self) -> Vec<f64> {
        log_grid(self.lambda_min, self.lambda_max, self.lambda_points)
    }

    /// Linearly spaced subsample sizes rounded to integers, duplicates removed.
    pub fn m_grid(&self) -> Vec<usize> {
        if self.m_points == 1 {
            return alloc::vec![self.m_min];
        }
        let step = (self.m_max - self.m_min) as f64 / (self.m_points - 1) as f64;
        let mut ms: Vec<usize> = (0..self.m_points)
            .map(|i| libm::round(self.m_min as f64 + step * i as f64) as usize)
            .collect();
        ms.dedup();
        ms
    }

    /// Subsample seed of column `m_index`, repetition `rep`.
    pub fn subsample_seed(&self, m_index: usize, rep: usize) -> u64 {
        rng::derive_seed2(self.base_seed, m_index as u64, rep as u64)
    }
}

/// `points` values from `lo` to `hi`, equally spaced in `log10`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return alloc::vec![lo];
    }
    let (a, b) = (libm::log10(lo), libm::log10(hi));
    (0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                libm::pow(10.0, a + (b - a) * i as f64 / (points - 1) as f64)
            }
        })
        .collect()
}

/// One cell of a sweep result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub m: usize,
    pub lambda: f64,
    pub mean_rmse: f64,
    /// Sample standard deviation over repetitions (0 for a single one).
    pub std_rmse: f64,
    /// Repetitions that produced a value.
    pub reps: usize,
}

/// Gram matrices and targets a sweep needs for one train/test pair.
#[derive(Debug, Clone)]
pub struct SweepData {
    /// `n x n`.
    pub k_train: DMatrix<f64>,
    /// `n_test x n`.
    pub k_test: DMatrix<f64>,
    pub responses: Vec<f64>,
    pub targets: Vec<f64>,
}

impl SweepData {
    /// Assembles `K` and the test cross Gram; `targets` are what test
    /// predictions are scored against.
    pub fn new(op: &KernelOperator, train: &Dataset, test: &Dataset, targets: Vec<f64>) -> Result<Self> {
        if targets.len() != test.len() || test.is_empty() {
            return Err(invalid!("{} targets for {} test curves", targets.len(), test.len()));
        }
        let basis = op.embed_curves(&train.curves)?;
        let k_train = gram_block(basis.weighted(), &basis);
        let k_test = gram_block(&op.weigh_curves(&test.curves)?, &basis);
        Ok(Self {
            k_train,
            k_test,
            responses: train.responses.clone(),
            targets,
        })
    }

    pub fn n_train(&self) -> usize {
        self.k_train.nrows()
    }

    fn score(&self, coeff: &[f64], columns: Option<&[usize]>) -> Result<f64> {
        let preds: Vec<f64> = (0..self.k_test.nrows())
            .map(|t| {
                let row: Vec<f64> = match columns {
                    Some(cols) => cols.iter().map(|&j| self.k_test[(t, j)]).collect(),
                    None => self.k_test.row(t).iter().copied().collect(),
                };
                dot(coeff, &row)
            })
            .collect();
        rmse_from(&preds, &self.targets)
    }

    /// Test RMSE of the Nyström fit on `indices` at each lambda.
    pub fn evaluate_subsample(
        &self,
        indices: &[usize],
        lambdas: &[f64],
        jitter: JitterPolicy,
    ) -> Vec<Result<f64>> {
        let knm = self.k_train.select_columns(indices.iter());
        let kmm = knm.select_rows(indices.iter());
        if self.responses.len() != knm.nrows() {
            let e = invalid!("{} responses for {} training curves", self.responses.len(), knm.nrows());
            return lambdas.iter().map(|_| Err(e.clone())).collect();
        }
        // same operations as nystrom_system, with K_nm^T K_nm shared across lambdas
        let gram = knm.tr_mul(&knm);
        let rhs = knm.tr_mul(&DVector::from_column_slice(&self.responses));
        let n = self.n_train() as f64;
        lambdas
            .iter()
            .map(|&lambda| {
                let mut lhs = gram.clone();
                lhs += &kmm * (n * lambda);
                let sol = solve_spd(&lhs, &rhs, jitter)?;
                self.score(sol.x.as_slice(), Some(indices))
            })
            .collect()
    }

    /// Test RMSE of the full solver at each lambda.
    pub fn evaluate_full(&self, lambdas: &[f64], jitter: JitterPolicy) -> Vec<Result<f64>> {
        lambdas
            .iter()
            .map(|&lambda| {
                let sol = solve_full_system(&self.k_train, &self.responses, lambda, jitter)?;
                self.score(sol.x.as_slice(), None)
            })
            .collect()
    }
}

/// Draws the subsample of one sweep column.
pub fn column_indices(spec: &SweepSpec, n: usize, m_index: usize, m: usize, rep: usize) -> Result<Vec<usize>> {
    subsample_uniform(n, m, spec.subsample_seed(m_index, rep))
}

/// Mean/std per cell from samples grouped by column.
///
/// `samples[m_index][lambda_index][rep]` holds `None` for failed fits; those
/// are left out of the statistics and counted in the returned warning total.
/// A cell with no successful repetition has NaN mean and std.
pub fn aggregate(
    ms: &[usize],
    lambdas: &[f64],
    samples: &[Vec<Vec<Option<f64>>>],
) -> (Vec<SweepRow>, usize) {
    let mut rows = Vec::with_capacity(ms.len() * lambdas.len());
    let mut failures = 0;
    for (mi, &m) in ms.iter().enumerate() {
        for (li, &lambda) in lambdas.iter().enumerate() {
            let vals: Vec<f64> = samples[mi][li].iter().filter_map(|v| *v).collect();
            failures += samples[mi][li].len() - vals.len();
            let (mean_rmse, std_rmse) = mean_std(&vals);
            rows.push(SweepRow {
                m,
                lambda,
                mean_rmse,
                std_rmse,
                reps: vals.len(),
            });
        }
    }
    (rows, failures)
}

/// Mean and sample standard deviation; NaN for an empty slice.
pub fn mean_std(vals: &[f64]) -> (f64, f64) {
    if vals.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let std = if vals.len() > 1 {
        libm::sqrt(vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0))
    } else {
        0.0
    };
    (mean, std)
}
