//! Parameter rules from the convergence analysis and an effective-dimension
//! diagnostic.
//!
//! `b > 1` is the polynomial decay exponent of the eigenvalues of
//! `T^{1/2} C T^{1/2}` and `s ∈ [0, 1/2]` the source-condition smoothness.
//! The rules hold up to unspecified constants; every `≲` is resolved with
//! constant 1 here. The analysis also needs `lambda >= (4 c1^2 / n)^{b/(b+1)}`
//! for a constant `c1` it leaves open, so that condition is not checked.

use nalgebra::DMatrix;

use crate::error::invalid;
use crate::linalg::symmetric_eigenvalues;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    b: f64,
    s: f64,
}

impl TheoryParams {
    pub fn new(b: f64, s: f64) -> Result<Self> {
        if !(b > 1.0 && b.is_finite()) {
            return Err(invalid!("decay exponent b must exceed 1, got {b}"));
        }
        if !(0.0..=0.5).contains(&s) {
            return Err(invalid!("smoothness s must lie in [0, 1/2], got {s}"));
        }
        Ok(Self { b, s })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    fn denom(&self) -> f64 {
        1.0 + self.b + 2.0 * self.s * self.b
    }
}

/// `lambda = n^{-b / (1 + b + 2sb)}`.
pub fn lambda_rule(n: usize, p: &TheoryParams) -> Result<f64> {
    if n == 0 {
        return Err(invalid!("n must be at least 1"));
    }
    Ok(libm::pow(n as f64, -p.b / p.denom()))
}

/// Smallest `m` with `m^{-1/b} <= lambda`, i.e. `ceil(lambda^{-b})`, capped at `n`.
///
/// `lambda^{-b}` within `1e-9` relative of an integer is taken as that
/// integer, so `lambda = 0.1, b = 2` gives 100 rather than 101.
pub fn min_subsample(lambda: f64, p: &TheoryParams, n: usize) -> Result<usize> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid!("lambda must be positive, got {lambda}"));
    }
    let v = libm::pow(lambda, -p.b);
    let nearest = libm::round(v);
    let m = if libm::fabs(v - nearest) <= 1e-9 * nearest.max(1.0) {
        nearest
    } else {
        libm::ceil(v)
    };
    let m = if m >= n as f64 { n } else { m as usize };
    Ok(m.max(1).min(n.max(1)))
}

/// `Σ_i mu_i / (mu_i + lambda)` over the eigenvalues `mu_i` of `K / n`,
/// negative eigenvalues clipped to 0.
///
/// A finite-sample stand-in for `trace(Λ (Λ + lambda)^{-1})`, not an
/// estimator with guarantees.
pub fn empirical_effective_dimension(gram: &DMatrix<f64>, lambda: f64) -> Result<f64> {
    let n = gram.nrows();
    if n == 0 || gram.ncols() != n {
        return Err(invalid!("expected a non-empty square matrix, got {}x{}", n, gram.ncols()));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(invalid!("lambda must be positive, got {lambda}"));
    }
    let scale = gram.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if libm::fabs(gram[(i, j)] - gram[(j, i)]) > 1e-10 * scale {
                return Err(invalid!("matrix is not symmetric at ({i}, {j})"));
            }
        }
    }
    let scaled = gram / n as f64;
    Ok(symmetric_eigenvalues(&scaled)
        .into_iter()
        .map(|mu| mu.max(0.0))
        .map(|mu| mu / (mu + lambda))
        .sum())
}

/// Predicted rates `(n^{-b(1+2s)/(2(1+b+2sb))}, n^{-bs/(1+b+2sb)})` for the
/// prediction and RKHS estimation errors.
pub fn predicted_rates(n: usize, p: &TheoryParams) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(invalid!("n must be at least 1"));
    }
    let nf = n as f64;
    let d = p.denom();
    let prediction = libm::pow(nf, -p.b * (1.0 + 2.0 * p.s) / (2.0 * d));
    let estimation = libm::pow(nf, -p.b * p.s / d);
    Ok((prediction, estimation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn p(b: f64, s: f64) -> TheoryParams {
        TheoryParams::new(b, s).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(TheoryParams::new(1.0, 0.0).is_err());
        assert!(TheoryParams::new(2.0, 0.6).is_err());
        assert!(TheoryParams::new(2.0, -0.1).is_err());
        assert!(TheoryParams::new(1.5, 0.5).is_ok());
    }

    #[test]
    fn lambda_rule_values() {
        assert_eq!(lambda_rule(1, &p(2.0, 0.3)).unwrap(), 1.0);
        let l = lambda_rule(550, &p(2.0, 0.0)).unwrap();
        assert!((l - 0.014_897).abs() < 5e-7, "{l}");
        assert!((l - libm::pow(550.0, -2.0 / 3.0)).abs() < 1e-15);
        let l = lambda_rule(100_000, &p(2.0, 0.5)).unwrap();
        assert!((l - 1e-2).abs() < 1e-15);
        assert!(lambda_rule(0, &p(2.0, 0.0)).is_err());
    }

    #[test]
    fn lambda_rule_decreasing_in_n() {
        for params in [p(1.5, 0.0), p(2.0, 0.25), p(6.0, 0.5)] {
            let mut prev = f64::INFINITY;
            for n in [1usize, 2, 10, 100, 1000, 100_000] {
                let l = lambda_rule(n, &params).unwrap();
                assert!(l < prev);
                prev = l;
            }
        }
    }

    #[test]
    fn min_subsample_values() {
        assert_eq!(min_subsample(0.1, &p(2.0, 0.0), 1000).unwrap(), 100);
        assert_eq!(min_subsample(1.0, &p(2.0, 0.0), 1000).unwrap(), 1);
        assert_eq!(min_subsample(1e-3, &p(2.0, 0.0), 500).unwrap(), 500);
        assert!(min_subsample(0.0, &p(2.0, 0.0), 10).is_err());
        assert!(min_subsample(-1.0, &p(2.0, 0.0), 10).is_err());
    }

    #[test]
    fn min_subsample_monotone() {
        let lambdas: alloc::vec::Vec<f64> = (0..30).map(|i| libm::pow(10.0, -3.0 + 0.1 * i as f64)).collect();
        for b in [1.5, 2.0, 4.0] {
            let ms: alloc::vec::Vec<usize> = lambdas.iter().map(|&l| min_subsample(l, &p(b, 0.0), 1 << 40).unwrap()).collect();
            assert!(ms.windows(2).all(|w| w[1] <= w[0]));
        }
        for &l in &lambdas[..29] {
            let a = min_subsample(l, &p(1.5, 0.0), 1 << 40).unwrap();
            let b = min_subsample(l, &p(3.0, 0.0), 1 << 40).unwrap();
            assert!(b >= a);
        }
    }

    #[test]
    fn rates() {
        assert_eq!(predicted_rates(1, &p(3.0, 0.2)).unwrap(), (1.0, 1.0));
        let (_, est) = predicted_rates(12345, &p(2.0, 0.0)).unwrap();
        assert_eq!(est, 1.0);
        let (pred, est) = predicted_rates(100_000, &p(2.0, 0.5)).unwrap();
        assert!((pred - 1e-2).abs() < 1e-15);
        assert!((est - 1e-1).abs() < 1e-15);
    }

    #[test]
    fn effective_dimension_of_scaled_identity() {
        let (n, mu, lambda) = (7usize, 0.3, 0.05);
        let k = DMatrix::<f64>::identity(n, n) * (n as f64 * mu);
        let d = empirical_effective_dimension(&k, lambda).unwrap();
        assert!((d - n as f64 * mu / (mu + lambda)).abs() < 1e-12);
    }

    fn random_psd(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose()
    }

    #[test]
    fn effective_dimension_matches_direct_inverse() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let k = random_psd(&mut rng, 5);
            for lambda in [1e-3, 0.1, 2.0] {
                let s = &k / 5.0;
                let inv = (&s + DMatrix::<f64>::identity(5, 5) * lambda).try_inverse().unwrap();
                let oracle = (&s * inv).trace();
                let d = empirical_effective_dimension(&k, lambda).unwrap();
                assert!((d - oracle).abs() <= 1e-10, "{d} vs {oracle}");
            }
        }
    }

    #[test]
    fn effective_dimension_bounds_and_monotonicity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let a = DMatrix::from_fn(8, 3, |_, _| rng.random_range(-1.0..1.0));
        let k = &a * a.transpose(); // rank 3
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let lambda = libm::pow(10.0, -6.0 + 0.5 * i as f64);
            let d = empirical_effective_dimension(&k, lambda).unwrap();
            assert!(d <= prev + 1e-12);
            assert!(d <= 3.0 + 1e-9);
            assert!(d <= k.trace() / 8.0 / lambda + 1e-12);
            prev = d;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn effective_dimension_rejects_asymmetric() {
        let k = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(empirical_effective_dimension(&k, 0.1).is_err());
        assert!(empirical_effective_dimension(&DMatrix::zeros(2, 3), 0.1).is_err());
    }
}
