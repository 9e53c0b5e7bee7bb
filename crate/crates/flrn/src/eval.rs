//! Sweep and benchmark drivers.
//!
//! Work items are independent and carry their own seeds, and results are
//! placed by index, so output does not depend on how rayon schedules them.

use std::time::Instant;

use flrn_core::estimator::{fit_full_with, fit_nystrom_with, JitterPolicy, RidgeConfig};
use flrn_core::metrics::noiseless_targets;
use flrn_core::rng::{derive_seed, derive_seed2};
use flrn_core::sweep::{aggregate, column_indices, mean_std, SweepData, SweepRow, SweepSpec};
use flrn_core::synth::{beta_star, make_experiment, SynthConfig};
use flrn_core::{Curve, Dataset, KernelOperator, KernelSpec};
use rayon::prelude::*;

use crate::error::{AppError, AppResult};

/// Tag of the per-repetition dataset seeds in replicated sweeps.
pub const DATA_STREAM: u64 = 3;

/// What test predictions are scored against.
#[derive(Debug, Clone, Copy)]
pub enum Targets<'a> {
    /// `<beta, X>` for the given slope.
    Noiseless(&'a Curve),
    /// The stored responses of the test set.
    Noisy,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Fits that failed and were left out of their cell.
    pub failures: usize,
}

fn targets_for(test: &Dataset, targets: Targets<'_>) -> AppResult<Vec<f64>> {
    Ok(match targets {
        Targets::Noiseless(beta) => noiseless_targets(&test.curves, beta)?,
        Targets::Noisy => test.responses.clone(),
    })
}

/// Nyström RMSE over the `(m, lambda)` grid of `spec` on one fixed train/test
/// pair; repetitions redraw the subsample only.
pub fn run_sweep(
    train: &Dataset,
    test: &Dataset,
    kernel: KernelSpec,
    spec: &SweepSpec,
    targets: Targets<'_>,
    jitter: JitterPolicy,
) -> AppResult<SweepOutput> {
    spec.validate(train.len())?;
    let op = KernelOperator::new(kernel, train.grid.clone());
    let data = SweepData::new(&op, train, test, targets_for(test, targets)?)?;
    let (ms, lambdas) = (spec.m_grid(), spec.lambda_grid());
    let jobs: Vec<(usize, usize)> = (0..ms.len()).flat_map(|mi| (0..spec.reps).map(move |r| (mi, r))).collect();
    let columns: Vec<AppResult<Vec<Option<f64>>>> = jobs
        .par_iter()
        .map(|&(mi, rep)| {
            let idx = column_indices(spec, train.len(), mi, ms[mi], rep)?;
            Ok(data
                .evaluate_subsample(&idx, &lambdas, jitter)
                .into_iter()
                .map(|r| r.ok())
                .collect())
        })
        .collect();
    let mut samples = vec![vec![vec![None; spec.reps]; lambdas.len()]; ms.len()];
    for (&(mi, rep), col) in jobs.iter().zip(columns) {
        for (li, v) in col?.into_iter().enumerate() {
            samples[mi][li][rep] = v;
        }
    }
    let (rows, failures) = aggregate(&ms, &lambdas, &samples);
    Ok(SweepOutput { rows, failures })
}

/// One row of a full-solver lambda profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRow {
    pub lambda: f64,
    pub mean_rmse: f64,
    pub std_rmse: f64,
    pub reps: usize,
}

/// Results of a sweep with a fresh dataset per repetition.
#[derive(Debug, Clone)]
pub struct ReplicatedSweep {
    /// Nyström cells; empty when no subsample sizes were requested.
    pub nystrom: Vec<SweepRow>,
    /// Full-solver RMSE per lambda on the same datasets; empty if not requested.
    pub full: Vec<LambdaRow>,
    pub failures: usize,
}

/// Full-solver scores per lambda, then Nystrom scores per (m, lambda).
type RepScores = (Vec<Option<f64>>, Vec<Vec<Option<f64>>>);

/// Seed of the dataset used in repetition `rep`.
pub fn replicate_seed(base_seed: u64, rep: usize) -> u64 {
    derive_seed2(base_seed, DATA_STREAM, rep as u64)
}

/// Like [`run_sweep`], but repetition `r` draws its own dataset from `cfg`
/// (seed [`replicate_seed`]) and scores against noiseless targets of the
/// generating slope. With `with_full`, the full solver is evaluated on the
/// same datasets over the same lambdas.
#[allow(clippy::too_many_arguments)]
pub fn run_replicated(
    cfg: &SynthConfig,
    kernel: KernelSpec,
    lambdas: &[f64],
    ms: &[usize],
    reps: usize,
    base_seed: u64,
    with_full: bool,
    jitter: JitterPolicy,
) -> AppResult<ReplicatedSweep> {
    cfg.validate()?;
    if reps == 0 || lambdas.is_empty() {
        return Err(AppError::usage("need at least one repetition and one lambda"));
    }
    if let Some(&m) = ms.iter().find(|&&m| m == 0 || m > cfg.n_train) {
        return Err(AppError::usage(format!("subsample size {m} outside 1..={}", cfg.n_train)));
    }
    let spec = SweepSpec {
        base_seed,
        ..SweepSpec::default()
    };
    let per_rep: Vec<AppResult<RepScores>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let cfg = SynthConfig {
                seed: replicate_seed(base_seed, rep),
                ..cfg.clone()
            };
            let (train, test) = make_experiment(&cfg)?;
            let op = KernelOperator::new(kernel, train.grid.clone());
            let beta = beta_star(&train.grid);
            let data = SweepData::new(&op, &train, &test, noiseless_targets(&test.curves, &beta)?)?;
            let full = if with_full {
                data.evaluate_full(lambdas, jitter).into_iter().map(|r| r.ok()).collect()
            } else {
                Vec::new()
            };
            let nys = ms
                .iter()
                .enumerate()
                .map(|(mi, &m)| {
                    let idx = column_indices(&spec, train.len(), mi, m, rep)?;
                    Ok(data
                        .evaluate_subsample(&idx, lambdas, jitter)
                        .into_iter()
                        .map(|r| r.ok())
                        .collect())
                })
                .collect::<AppResult<Vec<Vec<Option<f64>>>>>()?;
            Ok((full, nys))
        })
        .collect();

    let mut full_samples = vec![vec![None; reps]; if with_full { lambdas.len() } else { 0 }];
    let mut samples = vec![vec![vec![None; reps]; lambdas.len()]; ms.len()];
    for (rep, res) in per_rep.into_iter().enumerate() {
        let (full, nys) = res?;
        for (li, v) in full.into_iter().enumerate() {
            full_samples[li][rep] = v;
        }
        for (mi, col) in nys.into_iter().enumerate() {
            for (li, v) in col.into_iter().enumerate() {
                samples[mi][li][rep] = v;
            }
        }
    }
    let (nystrom, mut failures) = aggregate(ms, lambdas, &samples);
    let full = full_samples
        .iter()
        .zip(lambdas)
        .map(|(vals, &lambda)| {
            let ok: Vec<f64> = vals.iter().filter_map(|v| *v).collect();
            failures += vals.len() - ok.len();
            let (mean_rmse, std_rmse) = mean_std(&ok);
            LambdaRow {
                lambda,
                mean_rmse,
                std_rmse,
                reps: ok.len(),
            }
        })
        .collect();
    Ok(ReplicatedSweep { nystrom, full, failures })
}

/// [`run_replicated`] over the grid of `spec`.
pub fn run_replicated_sweep(
    cfg: &SynthConfig,
    kernel: KernelSpec,
    spec: &SweepSpec,
    with_full: bool,
    jitter: JitterPolicy,
) -> AppResult<ReplicatedSweep> {
    spec.validate(cfg.n_train)?;
    run_replicated(
        cfg,
        kernel,
        &spec.lambda_grid(),
        &spec.m_grid(),
        spec.reps,
        spec.base_seed,
        with_full,
        jitter,
    )
}

/// Row with the smallest finite mean RMSE.
pub fn best_lambda(rows: &[LambdaRow]) -> Option<&LambdaRow> {
    rows.iter()
        .filter(|r| r.mean_rmse.is_finite())
        .min_by(|a, b| a.mean_rmse.total_cmp(&b.mean_rmse))
}

/// Cell with the smallest finite mean RMSE among those whose `m` passes `keep`.
pub fn best_cell(rows: &[SweepRow], keep: impl Fn(usize) -> bool) -> Option<&SweepRow> {
    rows.iter()
        .filter(|r| keep(r.m) && r.mean_rmse.is_finite())
        .min_by(|a, b| a.mean_rmse.total_cmp(&b.mean_rmse))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMethod {
    Full,
    Nystrom,
}

impl BenchMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BenchMethod::Full => "full",
            BenchMethod::Nystrom => "nystrom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: BenchMethod,
    pub n: usize,
    pub m: usize,
    /// Median over repetitions.
    pub wall_time_seconds: f64,
    /// Relative residual of the median-time fit.
    pub fit_residual: f64,
    pub threads: usize,
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub sizes: Vec<usize>,
    pub m: usize,
    pub reps: usize,
    pub kernel: KernelSpec,
    pub lambda: f64,
    pub grid_size: usize,
    pub truncation: usize,
    pub seed: u64,
    pub threads: usize,
    /// Skip the full solver above this size.
    pub full_max_n: Option<usize>,
}

impl Default for BenchSpec {
    fn default() -> Self {
        Self {
            sizes: vec![500, 1000, 2000, 4000],
            m: 100,
            reps: 5,
            kernel: KernelSpec::SobolevBernoulli,
            lambda: 1e-6,
            grid_size: 256,
            truncation: 500,
            seed: crate::DEFAULT_SEED,
            threads: 1,
            full_max_n: None,
        }
    }
}

fn median(mut v: Vec<(f64, f64)>) -> (f64, f64) {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v[v.len() / 2]
}

/// Median fit times of both solvers per training size.
///
/// Timed regions cover Gram assembly and the solve; data generation and the
/// kernel table on the quadrature grid are built beforehand. Runs on a
/// dedicated pool of `threads` workers.
pub fn run_bench(spec: &BenchSpec) -> AppResult<Vec<BenchRow>> {
    if spec.sizes.is_empty() || spec.sizes.windows(2).any(|w| w[0] >= w[1]) || spec.sizes[0] == 0 {
        return Err(AppError::usage("sizes must be positive and strictly ascending"));
    }
    if spec.m == 0 || spec.m > spec.sizes[0] {
        return Err(AppError::usage(format!("need 1 <= m <= min(sizes), got m={}", spec.m)));
    }
    if spec.reps == 0 || spec.threads == 0 {
        return Err(AppError::usage("reps and threads must be at least 1"));
    }
    let cfg = RidgeConfig::new(spec.lambda)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| AppError::usage(e.to_string()))?;
    pool.install(|| {
        let mut op: Option<KernelOperator> = None;
        let mut rows = Vec::new();
        for &n in &spec.sizes {
            let synth = SynthConfig {
                n_total: n + 1,
                n_train: n,
                truncation: spec.truncation,
                grid_size: spec.grid_size,
                seed: derive_seed(spec.seed, n as u64),
                ..SynthConfig::default()
            };
            let (train, _) = make_experiment(&synth)?;
            // every size shares the same grid points, so the table is built once
            let op = &*op.get_or_insert_with(|| KernelOperator::new(spec.kernel, train.grid.clone()));
            for method in [BenchMethod::Full, BenchMethod::Nystrom] {
                if method == BenchMethod::Full && spec.full_max_n.is_some_and(|cap| n > cap) {
                    continue;
                }
                let mut samples = Vec::with_capacity(spec.reps);
                for rep in 0..spec.reps {
                    let start = Instant::now();
                    let model = match method {
                        BenchMethod::Full => fit_full_with(op, &train, &cfg)?,
                        BenchMethod::Nystrom => {
                            fit_nystrom_with(op, &train, &cfg, spec.m, derive_seed2(spec.seed, n as u64, rep as u64))?
                        }
                    };
                    samples.push((start.elapsed().as_secs_f64(), model.relative_residual));
                }
                let (wall_time_seconds, fit_residual) = median(samples);
                rows.push(BenchRow {
                    method,
                    n,
                    m: if method == BenchMethod::Full { n } else { spec.m },
                    wall_time_seconds,
                    fit_residual,
                    threads: spec.threads,
                });
            }
        }
        Ok(rows)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use flrn_core::estimator::fit_nystrom;
    use flrn_core::metrics::rmse;

    fn small() -> (Dataset, Dataset) {
        let cfg = SynthConfig { n_total: 50, n_train: 40, grid_size: 33, seed: 5, ..SynthConfig::default() };
        make_experiment(&cfg).unwrap()
    }

    fn tiny_spec() -> SweepSpec {
        SweepSpec {
            lambda_min: 1e-6,
            lambda_max: 1e-4,
            lambda_points: 3,
            m_min: 5,
            m_max: 20,
            m_points: 3,
            reps: 4,
            base_seed: 99,
        }
    }

    #[test]
    fn single_cell_sweep_equals_direct_fit() {
        let (train, test) = small();
        let beta = beta_star(&train.grid);
        let spec = SweepSpec {
            lambda_points: 1,
            m_points: 1,
            reps: 1,
            ..tiny_spec()
        };
        let out = run_sweep(&train, &test, KernelSpec::SobolevBernoulli, &spec, Targets::Noiseless(&beta), JitterPolicy::default()).unwrap();
        assert_eq!(out.rows.len(), 1);
        let model = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &RidgeConfig::new(1e-6).unwrap(), 5, spec.subsample_seed(0, 0)).unwrap();
        assert_eq!(out.rows[0].mean_rmse, rmse(&model, &test, Some(&beta)).unwrap());
        assert_eq!(out.rows[0].std_rmse, 0.0);
        assert_eq!(out.failures, 0);
    }

    #[test]
    fn sweep_is_deterministic_and_complete() {
        let (train, test) = small();
        let spec = tiny_spec();
        let a = run_sweep(&train, &test, KernelSpec::SobolevBernoulli, &spec, Targets::Noisy, JitterPolicy::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool
            .install(|| run_sweep(&train, &test, KernelSpec::SobolevBernoulli, &spec, Targets::Noisy, JitterPolicy::default()))
            .unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rows.len(), 9);
        assert!(a.rows.iter().all(|r| r.mean_rmse.is_finite() && r.reps == 4));
    }

    #[test]
    fn sweep_rejects_m_above_n() {
        let (train, test) = small();
        let spec = SweepSpec { m_max: 41, ..tiny_spec() };
        let err = run_sweep(&train, &test, KernelSpec::SobolevBernoulli, &spec, Targets::Noisy, JitterPolicy::default());
        assert!(matches!(err, Err(AppError::Usage(_))));
    }

    #[test]
    fn replicated_sweep_shapes_and_determinism() {
        let cfg = SynthConfig { n_total: 40, n_train: 30, grid_size: 33, ..SynthConfig::default() };
        let spec = SweepSpec { m_max: 20, reps: 3, ..tiny_spec() };
        let a = run_replicated_sweep(&cfg, KernelSpec::SobolevBernoulli, &spec, true, JitterPolicy::default()).unwrap();
        let b = run_replicated_sweep(&cfg, KernelSpec::SobolevBernoulli, &spec, true, JitterPolicy::default()).unwrap();
        assert_eq!(a.nystrom, b.nystrom);
        assert_eq!(a.full, b.full);
        assert_eq!((a.nystrom.len(), a.full.len()), (9, 3));
        assert!(best_lambda(&a.full).is_some());
        assert!(best_cell(&a.nystrom, |m| m >= 20).is_some_and(|r| r.m == 20));
        let none = run_replicated_sweep(&cfg, KernelSpec::SobolevBernoulli, &spec, false, JitterPolicy::default()).unwrap();
        assert!(none.full.is_empty());
        assert_eq!(none.nystrom, a.nystrom);
    }

    #[test]
    fn bench_rows() {
        let spec = BenchSpec {
            sizes: vec![30],
            m: 10,
            reps: 1,
            grid_size: 33,
            truncation: 50,
            ..BenchSpec::default()
        };
        let rows = run_bench(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.wall_time_seconds > 0.0 && r.threads == 1));
        assert_eq!((rows[0].method, rows[0].m), (BenchMethod::Full, 30));
        assert_eq!((rows[1].method, rows[1].m), (BenchMethod::Nystrom, 10));

        let capped = BenchSpec { sizes: vec![20, 30], full_max_n: Some(20), ..spec.clone() };
        assert_eq!(run_bench(&capped).unwrap().len(), 3);
        assert!(run_bench(&BenchSpec { m: 31, ..spec.clone() }).is_err());
        assert!(run_bench(&BenchSpec { sizes: vec![40, 30], ..spec }).is_err());
    }
}
