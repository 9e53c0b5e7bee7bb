use std::sync::Arc;

use flrn_core::estimator::{fit_full, fit_nystrom, predict, reconstruct_slope, RidgeConfig};
use flrn_core::funcspace::l2_inner;
use flrn_core::gram::gram_full;
use flrn_core::linalg::symmetric_eigenvalues;
use flrn_core::metrics::rmse;
use flrn_core::synth::{beta_star, make_experiment, SynthConfig};
use flrn_core::theory::{lambda_rule, min_subsample, TheoryParams};
use flrn_core::{Curve, Grid, KernelSpec};
use proptest::prelude::*;

#[test]
fn fitted_models_beat_the_zero_predictor() {
    let cfg = SynthConfig { n_total: 160, n_train: 120, grid_size: 129, seed: 77, ..SynthConfig::default() };
    let (train, test) = make_experiment(&cfg).unwrap();
    let beta = beta_star(&train.grid);
    let ridge = RidgeConfig::new(1e-6).unwrap();
    let zero: f64 = {
        let sq: f64 = test.curves.iter().map(|x| l2_inner(&beta, x).unwrap().powi(2)).sum();
        (sq / test.len() as f64).sqrt()
    };
    let full = fit_full(&train, KernelSpec::SobolevBernoulli, &ridge).unwrap();
    let nys = fit_nystrom(&train, KernelSpec::SobolevBernoulli, &ridge, 40, 1).unwrap();
    for model in [&full, &nys] {
        let r = rmse(model, &test, Some(&beta)).unwrap();
        assert!(r < 0.5 * zero, "{r} vs zero-model {zero}");
        // a prediction is the inner product with the reconstructed slope
        let slope = reconstruct_slope(model, &train.grid).unwrap();
        for x in &test.curves[..5] {
            let (p, q) = (predict(model, x).unwrap(), l2_inner(&slope, x).unwrap());
            assert!((p - q).abs() <= 1e-9 * (1.0 + p.abs()), "{p} vs {q}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_matrices_are_psd(points in proptest::collection::vec(0.0f64..=1.0, 1..8)) {
        let k = KernelSpec::SobolevBernoulli;
        let n = points.len();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| k.eval(points[i], points[j]).unwrap());
        prop_assert_eq!(&m, &m.transpose());
        let eig = symmetric_eigenvalues(&m);
        let norm = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assert!(eig.iter().all(|&v| v >= -1e-12 * norm.max(1e-300)));
    }

    #[test]
    fn gram_is_symmetric_psd(values in proptest::collection::vec(-5.0f64..5.0, 4 * 17)) {
        let grid = Arc::new(Grid::uniform(17).unwrap());
        let curves: Vec<Curve> = values.chunks(17).map(|c| Curve::new(grid.clone(), c.to_vec()).unwrap()).collect();
        let k = gram_full(&curves, KernelSpec::SobolevBernoulli).unwrap().entries;
        prop_assert_eq!(&k, &k.transpose());
        let eig = symmetric_eigenvalues(&k);
        let norm = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assert!(eig.iter().all(|&v| v >= -1e-10 * norm.max(1e-300)));
    }

    #[test]
    fn theory_rules_are_monotone(b in 1.01f64..8.0, s in 0.0f64..=0.5, n in 1usize..100_000) {
        let p = TheoryParams::new(b, s).unwrap();
        prop_assert!(lambda_rule(n + 1, &p).unwrap() < lambda_rule(n, &p).unwrap());
        let l = lambda_rule(n, &p).unwrap();
        prop_assert!(min_subsample(l, &p, n).unwrap() >= min_subsample((l * 2.0).min(1.0), &p, n).unwrap());
        prop_assert!(min_subsample(l, &p, n).unwrap() <= n);
    }
}
