//! Full and Nyström-subsampled ridge estimators, and prediction.
//!
//! Both solvers use the `n`-scaled penalty that falls out of minimizing
//! `(1/n) Σ (Y_i - <beta, X_i>)^2 + lambda ||beta||_H^2` over the representer
//! span:
//!
//! - full: `(K + n lambda I) a = Y`;
//! - Nyström: `(K_nm^T K_nm + n lambda K_mm) a = K_nm^T Y`.
//!
//! With this scaling Nyström at `m = n` reproduces the full solver exactly
//! whenever `K` is invertible.

use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::seq::index;

use crate::error::invalid;
use crate::funcspace::{same_grid, Curve, Dataset, Grid};
use crate::gram::{gram_block, EmbeddedCurves, KernelOperator};
use crate::kernels::KernelSpec;
use crate::linalg::{dot, solve_spd, SpdSolution};
use crate::{rng, Result};

pub use crate::linalg::JitterPolicy;

/// Tikhonov parameter and factorization fallback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RidgeConfig {
    pub lambda: f64,
    pub jitter: JitterPolicy,
}

impl RidgeConfig {
    /// `lambda` must be positive and finite; jitter defaults to `Auto { rel: 1e-10 }`.
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid!("lambda must be positive and finite, got {lambda}"));
        }
        Ok(Self {
            lambda,
            jitter: JitterPolicy::default(),
        })
    }

    pub fn with_jitter(mut self, jitter: JitterPolicy) -> Self {
        self.jitter = jitter;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitKind {
    Full,
    Nystrom,
}

impl FitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitKind::Full => "full",
            FitKind::Nystrom => "nystrom",
        }
    }
}

impl core::str::FromStr for FitKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(FitKind::Full),
            "nystrom" => Ok(FitKind::Nystrom),
            other => Err(invalid!("unknown method {other:?}, expected full or nystrom")),
        }
    }
}

/// A fitted slope `beta = Σ_i coeff_i ∫ k(., t) X_i(t) dt` over its basis curves.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub kind: FitKind,
    pub coeff: Vec<f64>,
    /// All training curves for `Full`; the subsample for `Nystrom`.
    pub basis_curves: Vec<Curve>,
    /// Sorted training indices of the basis curves; empty for `Full`.
    pub subsample_indices: Vec<usize>,
    pub lambda: f64,
    pub kernel: KernelSpec,
    pub grid: Arc<Grid>,
    /// Diagonal shift the solver had to add (0 if none).
    pub jitter: f64,
    /// Relative residual of the solved linear system.
    pub relative_residual: f64,
    basis: EmbeddedCurves,
}

impl FittedModel {
    /// Reassembles a model from stored coefficients and its basis curves.
    pub fn from_parts(
        kind: FitKind,
        coeff: Vec<f64>,
        basis_curves: Vec<Curve>,
        subsample_indices: Vec<usize>,
        lambda: f64,
        kernel: KernelSpec,
    ) -> Result<Self> {
        if coeff.len() != basis_curves.len() {
            return Err(invalid!(
                "{} coefficients for {} basis curves",
                coeff.len(),
                basis_curves.len()
            ));
        }
        let grid = basis_curves
            .first()
            .map(|c| c.grid().clone())
            .ok_or_else(|| invalid!("a model needs at least one basis curve"))?;
        match kind {
            FitKind::Full if !subsample_indices.is_empty() => {
                return Err(invalid!("full models carry no subsample indices"));
            }
            FitKind::Nystrom => {
                if subsample_indices.len() != coeff.len() {
                    return Err(invalid!("one subsample index per coefficient required"));
                }
                if subsample_indices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid!("subsample indices must be distinct and sorted"));
                }
            }
            FitKind::Full => {}
        }
        let op = KernelOperator::new(kernel, grid.clone());
        let basis = op.embed_curves(&basis_curves)?;
        Ok(Self {
            kind,
            coeff,
            basis_curves,
            subsample_indices,
            lambda,
            kernel,
            grid,
            jitter: 0.0,
            relative_residual: f64::NAN,
            basis,
        })
    }

    /// Number of basis curves (`n` or `m`).
    pub fn len(&self) -> usize {
        self.coeff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeff.is_empty()
    }
}

/// Solves `(K + n lambda I) a = Y` for a square Gram matrix.
pub fn solve_full_system(
    k: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    jitter: JitterPolicy,
) -> Result<SpdSolution> {
    let n = k.nrows();
    if k.ncols() != n || y.len() != n {
        return Err(invalid!("Gram matrix is {}x{} for {} responses", n, k.ncols(), y.len()));
    }
    let mut m = k.clone();
    let shift = n as f64 * lambda;
    for i in 0..n {
        m[(i, i)] += shift;
    }
    solve_spd(&m, &DVector::from_column_slice(y), jitter)
}

/// `(K_nm^T K_nm + n lambda K_mm, K_nm^T Y)`.
pub fn nystrom_system(
    knm: &DMatrix<f64>,
    kmm: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (n, m) = knm.shape();
    if kmm.shape() != (m, m) || y.len() != n {
        return Err(invalid!(
            "K_nm is {n}x{m}, K_mm is {}x{}, {} responses",
            kmm.nrows(),
            kmm.ncols(),
            y.len()
        ));
    }
    let mut lhs = knm.tr_mul(knm);
    lhs += kmm * (n as f64 * lambda);
    let rhs = knm.tr_mul(&DVector::from_column_slice(y));
    Ok((lhs, rhs))
}

/// Solves the Nyström normal equations given the Gram blocks.
pub fn solve_nystrom_system(
    knm: &DMatrix<f64>,
    kmm: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    jitter: JitterPolicy,
) -> Result<SpdSolution> {
    let (lhs, rhs) = nystrom_system(knm, kmm, y, lambda)?;
    solve_spd(&lhs, &rhs, jitter)
}

/// `m` distinct indices from `0..n`, uniform without replacement, sorted.
///
/// Deterministic in `seed` (ChaCha8 stream, Floyd/rejection sampling from
/// `rand::seq::index::sample`).
pub fn subsample_uniform(n: usize, m: usize, seed: u64) -> Result<Vec<usize>> {
    if m < 1 || m > n {
        return Err(invalid!("subsample size must satisfy 1 <= m <= n, got m={m}, n={n}"));
    }
    let mut rng = rng::stream(seed);
    let mut idx = index::sample(&mut rng, n, m).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

fn check_data(data: &Dataset, op: &KernelOperator) -> Result<()> {
    if data.is_empty() {
        return Err(invalid!("cannot fit on an empty dataset"));
    }
    if !same_grid(&data.grid, op.grid()) {
        return Err(invalid!("dataset grid differs from the kernel operator's grid"));
    }
    Ok(())
}

/// Full kernel ridge fit using a prepared kernel operator.
pub fn fit_full_with(op: &KernelOperator, data: &Dataset, cfg: &RidgeConfig) -> Result<FittedModel> {
    check_data(data, op)?;
    let basis = op.embed_curves(&data.curves)?;
    let k = gram_block(basis.weighted(), &basis);
    let sol = solve_full_system(&k, &data.responses, cfg.lambda, cfg.jitter)?;
    Ok(FittedModel {
        kind: FitKind::Full,
        coeff: sol.x.iter().copied().collect(),
        basis_curves: data.curves.clone(),
        subsample_indices: Vec::new(),
        lambda: cfg.lambda,
        kernel: op.kernel(),
        grid: op.grid().clone(),
        jitter: sol.jitter,
        relative_residual: sol.relative_residual,
        basis,
    })
}

/// Nyström fit on `m` curves subsampled with `seed`, using a prepared operator.
pub fn fit_nystrom_with(
    op: &KernelOperator,
    data: &Dataset,
    cfg: &RidgeConfig,
    m: usize,
    seed: u64,
) -> Result<FittedModel> {
    check_data(data, op)?;
    let indices = subsample_uniform(data.len(), m, seed)?;
    fit_nystrom_indices_with(op, data, cfg, indices)
}

/// Nyström fit on an explicit sorted index set.
pub fn fit_nystrom_indices_with(
    op: &KernelOperator,
    data: &Dataset,
    cfg: &RidgeConfig,
    indices: Vec<usize>,
) -> Result<FittedModel> {
    check_data(data, op)?;
    if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid!("subsample indices must be non-empty, distinct and sorted"));
    }
    if let Some(&last) = indices.last() {
        if last >= data.len() {
            return Err(invalid!("subsample index {last} out of range for n={}", data.len()));
        }
    }
    let rows = op.weigh_curves(&data.curves)?;
    let basis = op.embed_weighted(rows.select(&indices));
    let knm = gram_block(&rows, &basis);
    let kmm = knm.select_rows(indices.iter());
    let sol = solve_nystrom_system(&knm, &kmm, &data.responses, cfg.lambda, cfg.jitter)?;
    Ok(FittedModel {
        kind: FitKind::Nystrom,
        coeff: sol.x.iter().copied().collect(),
        basis_curves: indices.iter().map(|&i| data.curves[i].clone()).collect(),
        subsample_indices: indices,
        lambda: cfg.lambda,
        kernel: op.kernel(),
        grid: op.grid().clone(),
        jitter: sol.jitter,
        relative_residual: sol.relative_residual,
        basis,
    })
}

/// Full kernel ridge fit, `(K + n lambda I) a = Y`.
pub fn fit_full(data: &Dataset, kernel: KernelSpec, cfg: &RidgeConfig) -> Result<FittedModel> {
    fit_full_with(&KernelOperator::new(kernel, data.grid.clone()), data, cfg)
}

/// Nyström fit, `(K_nm^T K_nm + n lambda K_mm) a = K_nm^T Y`.
pub fn fit_nystrom(
    data: &Dataset,
    kernel: KernelSpec,
    cfg: &RidgeConfig,
    m: usize,
    seed: u64,
) -> Result<FittedModel> {
    fit_nystrom_with(&KernelOperator::new(kernel, data.grid.clone()), data, cfg, m, seed)
}

/// `coeff^T embed_vector(basis, x_new)`, i.e. `<beta_hat, x_new>_{L2}`.
pub fn predict(model: &FittedModel, x_new: &Curve) -> Result<f64> {
    if !same_grid(x_new.grid(), &model.grid) {
        return Err(invalid!("curve is not on the model's grid"));
    }
    Ok(dot(&model.coeff, &model.basis.inner_with(&x_new.weighted())))
}

/// Predictions for every curve of `data`.
pub fn predict_all(model: &FittedModel, curves: &[Curve]) -> Result<Vec<f64>> {
    curves.iter().map(|c| predict(model, c)).collect()
}

/// The estimated slope function sampled on `out_grid`.
pub fn reconstruct_slope(model: &FittedModel, out_grid: &Arc<Grid>) -> Result<Curve> {
    if same_grid(out_grid, &model.grid) {
        let g = model.grid.len();
        let mut values = alloc::vec![0.0; g];
        for (i, c) in model.coeff.iter().enumerate() {
            for (v, z) in values.iter_mut().zip(model.basis.embedded(i)) {
                *v += c * z;
            }
        }
        return Curve::new(out_grid.clone(), values);
    }
    crate::gram::slope_from_coefficients(&model.coeff, &model.basis_curves, model.kernel, out_grid)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::funcspace::l2_inner;
    use crate::gram::gram_full;
    use crate::synth::{make_experiment, SynthConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_experiment(n_train: usize, g: usize, seed: u64) -> (Dataset, Dataset) {
        let cfg = SynthConfig {
            n_total: n_train + 10,
            n_train,
            grid_size: g,
            seed,
            ..SynthConfig::default()
        };
        make_experiment(&cfg).unwrap()
    }

    #[test]
    fn lambda_must_be_positive() {
        assert!(RidgeConfig::new(0.0).is_err());
        assert!(RidgeConfig::new(-1.0).is_err());
        assert!(RidgeConfig::new(f64::NAN).is_err());
        assert!(RidgeConfig::new(1e-7).is_ok());
    }

    #[test]
    fn single_sample_full_fit() {
        let grid = Arc::new(Grid::uniform(33).unwrap());
        let x = Curve::from_fn(&grid, |t| libm::sin(2.0 * t) + t).unwrap();
        let data = Dataset::new(grid, alloc::vec![x.clone()], alloc::vec![0.7]).unwrap();
        let kappa = gram_full(&[x], KernelSpec::SobolevBernoulli).unwrap().entries[(0, 0)];
        let lambda = 1e-3;
        let model = fit_full(&data, KernelSpec::SobolevBernoulli, &RidgeConfig::new(lambda).unwrap()).unwrap();
        assert!((model.coeff[0] - 0.7 / (kappa + lambda)).abs() < 1e-12 * model.coeff[0].abs());
        assert_eq!(model.kind, FitKind::Full);
        assert!(model.subsample_indices.is_empty());
    }

    #[test]
    fn huge_lambda_shrinks_coefficients() {
        let (train, _) = small_experiment(20, 65, 1);
        let k = gram_full(&train.curves, KernelSpec::SobolevBernoulli).unwrap();
        let lambda = 1e9 * k.entries.norm();
        let model = fit_full(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(lambda).unwrap()).unwrap();
        let a = DVector::from_vec(model.coeff.clone()).norm();
        let y = DVector::from_vec(train.responses.clone()).norm();
        assert!(a <= y / (20.0 * lambda) * (1.0 + 1e-12));
    }

    #[test]
    fn full_solver_residual() {
        let (train, _) = small_experiment(20, 65, 2);
        let model = fit_full(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(1e-6).unwrap()).unwrap();
        let k = gram_full(&train.curves, KernelSpec::SobolevBernoulli).unwrap().entries;
        let mut m = crate::linalg::symmetrize(&k);
        for i in 0..20 {
            m[(i, i)] += 20.0 * 1e-6;
        }
        let y = DVector::from_vec(train.responses.clone());
        let r = &m * DVector::from_vec(model.coeff.clone()) - &y;
        assert!(r.norm() / y.norm() <= 1e-10);
        assert!(model.relative_residual <= 1e-10);
    }

    #[test]
    fn subsample_contracts() {
        assert_eq!(subsample_uniform(7, 7, 99).unwrap(), (0..7).collect::<Vec<_>>());
        assert_eq!(subsample_uniform(100, 10, 5).unwrap(), subsample_uniform(100, 10, 5).unwrap());
        assert_ne!(subsample_uniform(100, 10, 5).unwrap(), subsample_uniform(100, 10, 6).unwrap());
        assert!(subsample_uniform(5, 6, 0).is_err());
        assert!(subsample_uniform(5, 0, 0).is_err());
        let idx = subsample_uniform(1000, 50, 3).unwrap();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(*idx.last().unwrap() < 1000);
    }

    #[test]
    fn subsample_is_uniform() {
        // each index is included with probability p = m/n; counts over R
        // draws are Binomial(R, p)
        let (n, m, reps) = (10_000usize, 100usize, 10_000u64);
        let mut counts = alloc::vec![0u32; n];
        for r in 0..reps {
            for i in subsample_uniform(n, m, rng::derive_seed(77, r)).unwrap() {
                counts[i] += 1;
            }
        }
        let p = m as f64 / n as f64;
        let mean = reps as f64 * p;
        let sd = libm::sqrt(reps as f64 * p * (1.0 - p));
        let worst = counts.iter().map(|&c| libm::fabs(c as f64 - mean)).fold(0.0, f64::max);
        assert!(worst <= 5.0 * sd, "worst deviation {worst} vs 5 sd {}", 5.0 * sd);
    }

    #[test]
    fn nystrom_single_column() {
        let (train, _) = small_experiment(15, 33, 3);
        let lambda = 1e-4;
        let model = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(lambda).unwrap(), 1, 8).unwrap();
        let j = model.subsample_indices[0];
        let k = gram_full(&train.curves, KernelSpec::SobolevBernoulli).unwrap().entries;
        let num: f64 = (0..15).map(|i| k[(i, j)] * train.responses[i]).sum();
        let den: f64 = (0..15).map(|i| k[(i, j)] * k[(i, j)]).sum::<f64>() + lambda * 15.0 * k[(j, j)];
        assert!((model.coeff[0] - num / den).abs() <= 1e-10 * (num / den).abs());
    }

    #[test]
    fn nystrom_residual() {
        let (train, _) = small_experiment(200, 65, 4);
        let model = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(1e-5).unwrap(), 50, 1).unwrap();
        let op = KernelOperator::new(KernelSpec::SobolevBernoulli, train.grid.clone());
        let knm = op.gram_cross(&train.curves, &model.basis_curves).unwrap().entries;
        let kmm = op.gram_full(&model.basis_curves).unwrap().entries;
        let (lhs, rhs) = nystrom_system(&knm, &kmm, &train.responses, 1e-5).unwrap();
        let r = crate::linalg::symmetrize(&lhs) * DVector::from_vec(model.coeff.clone()) - &rhs;
        assert!(r.norm() / rhs.norm() <= 1e-8);
    }

    /// Curves `Σ_k c_k k^2 cos(kπt)`, whose Gram matrix is `C C^T / (2π^4)`
    /// up to quadrature error: well conditioned for Gaussian `C`.
    pub(crate) fn whitened_cosine_data(rng: &mut ChaCha8Rng, n: usize, g: usize) -> Dataset {
        let grid = Arc::new(Grid::uniform(g).unwrap());
        let curves: Vec<Curve> = (0..n)
            .map(|_| {
                let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                Curve::from_fn(&grid, |t| {
                    c.iter()
                        .enumerate()
                        .map(|(k, ck)| {
                            let k = (k + 1) as f64;
                            ck * k * k * libm::cos(k * core::f64::consts::PI * t)
                        })
                        .sum()
                })
                .unwrap()
            })
            .collect();
        let responses = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        Dataset::new(grid, curves, responses).unwrap()
    }

    #[test]
    fn nystrom_with_all_columns_matches_full() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let data = whitened_cosine_data(&mut rng, 30, 257);
        let test = whitened_cosine_data(&mut rng, 5, 257);
        let kernel = KernelSpec::SobolevBernoulli;
        let cfg = RidgeConfig::new(1e-5).unwrap().with_jitter(JitterPolicy::Off);
        let full = fit_full(&data, kernel, &cfg).unwrap();
        let nys = fit_nystrom(&data, kernel, &cfg, 30, 0).unwrap();
        assert_eq!(nys.subsample_indices, (0..30).collect::<Vec<_>>());
        for x in &test.curves {
            let x = Curve::new(data.grid.clone(), x.values().to_vec()).unwrap();
            let (a, b) = (predict(&full, &x).unwrap(), predict(&nys, &x).unwrap());
            assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()), "{a} vs {b}");
        }
        let out = Arc::new(Grid::uniform(101).unwrap());
        let sf = reconstruct_slope(&full, &out).unwrap();
        let sn = reconstruct_slope(&nys, &out).unwrap();
        for (a, b) in sf.values().iter().zip(sn.values()) {
            assert!((a - b).abs() <= 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn prediction_edge_cases() {
        let (train, test) = small_experiment(12, 33, 5);
        let mut model = fit_full(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(1e-4).unwrap()).unwrap();
        assert_eq!(predict(&model, &Curve::zeros(&train.grid)).unwrap(), 0.0);
        let other = Curve::zeros(&Arc::new(Grid::uniform(9).unwrap()));
        assert!(predict(&model, &other).is_err());
        model.coeff.iter_mut().for_each(|c| *c = 0.0);
        assert_eq!(predict(&model, &test.curves[0]).unwrap(), 0.0);
        let slope = reconstruct_slope(&model, &train.grid).unwrap();
        assert!(slope.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn prediction_equals_inner_product_with_slope() {
        let (train, test) = small_experiment(25, 1025, 6);
        let model = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(1e-5).unwrap(), 10, 2).unwrap();
        let slope = reconstruct_slope(&model, &train.grid).unwrap();
        let direct = crate::gram::slope_from_coefficients(&model.coeff, &model.basis_curves, model.kernel, &train.grid).unwrap();
        for x in &test.curves {
            let p = predict(&model, x).unwrap();
            assert!((p - l2_inner(&slope, x).unwrap()).abs() <= 1e-6);
            assert!((p - l2_inner(&direct, x).unwrap()).abs() <= 1e-6);
        }
    }

    #[test]
    fn single_sample_slope_is_kernel_section() {
        let (train, _) = small_experiment(1, 65, 7);
        let model = fit_full(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(1e-3).unwrap()).unwrap();
        let slope = reconstruct_slope(&model, &train.grid).unwrap();
        let section = crate::gram::slope_from_coefficients(&[1.0], &train.curves, model.kernel, &train.grid).unwrap();
        for (s, k) in slope.values().iter().zip(section.values()) {
            assert!((s - model.coeff[0] * k).abs() <= 1e-14 * (1.0 + k.abs()));
        }
    }

    #[test]
    fn ridge_path_is_monotone() {
        let (train, _) = small_experiment(30, 65, 8);
        let mut prev = f64::INFINITY;
        for e in 0..12 {
            let lambda = 1e-8 * libm::pow(10.0, e as f64 * 0.5);
            let m = fit_full(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(lambda).unwrap()).unwrap();
            let norm = DVector::from_vec(m.coeff).norm();
            assert!(norm <= prev + 1e-12, "lambda {lambda}: {norm} > {prev}");
            prev = norm;
        }
    }

    #[test]
    fn permutation_equivariance() {
        let (train, test) = small_experiment(18, 65, 9);
        let perm: Vec<usize> = (0..18).rev().collect();
        let shuffled = train.select(&perm);
        let cfg = RidgeConfig::new(1e-5).unwrap();
        let a = fit_full(&train, KernelSpec::SobolevBernoulli, &cfg).unwrap();
        let b = fit_full(&shuffled, KernelSpec::SobolevBernoulli, &cfg).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert!((b.coeff[i] - a.coeff[p]).abs() <= 1e-8 * a.coeff[p].abs().max(1.0));
        }
        for x in &test.curves {
            let (pa, pb) = (predict(&a, x).unwrap(), predict(&b, x).unwrap());
            assert!((pa - pb).abs() <= 1e-10);
        }
    }

    #[test]
    fn fits_are_deterministic() {
        let (train, test) = small_experiment(40, 65, 10);
        let cfg = RidgeConfig::new(1e-6).unwrap();
        let a = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &cfg, 12, 4).unwrap();
        let b = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &cfg, 12, 4).unwrap();
        assert_eq!(a.subsample_indices, b.subsample_indices);
        for x in &test.curves {
            assert_eq!(predict(&a, x).unwrap().to_bits(), predict(&b, x).unwrap().to_bits());
        }
    }

    #[test]
    fn from_parts_validation() {
        let (train, test) = small_experiment(10, 33, 11);
        let cfg = RidgeConfig::new(1e-5).unwrap();
        let m = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &cfg, 4, 1).unwrap();
        let rebuilt = FittedModel::from_parts(
            FitKind::Nystrom,
            m.coeff.clone(),
            m.basis_curves.clone(),
            m.subsample_indices.clone(),
            m.lambda,
            m.kernel,
        )
        .unwrap();
        assert_eq!(predict(&m, &test.curves[0]).unwrap(), predict(&rebuilt, &test.curves[0]).unwrap());
        assert!(FittedModel::from_parts(FitKind::Nystrom, alloc::vec![1.0], m.basis_curves.clone(), alloc::vec![0], 1.0, m.kernel).is_err());
        assert!(FittedModel::from_parts(FitKind::Nystrom, alloc::vec![1.0, 2.0], m.basis_curves[..2].to_vec(), alloc::vec![3, 3], 1.0, m.kernel).is_err());
    }
}
