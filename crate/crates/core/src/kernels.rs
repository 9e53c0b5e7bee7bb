//! Reproducing kernels and covariance kernels on `[0, 1]`.
//!
//! The Sobolev-type kernel `k(s,t) = Σ_k 2/(kπ)^4 cos(kπs) cos(kπt)` has the
//! closed form `-(1/3) (B4((s+t)/2) + B4(|s-t|/2))`; [`kernel_series`] keeps
//! the truncated cosine series around as a test oracle.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;

use crate::error::invalid;
use crate::{Error, Result};

/// `B2(x) = x^2 - x + 1/6`.
pub fn bernoulli_b2(x: f64) -> f64 {
    x * x - x + 1.0 / 6.0
}

/// `B4(x) = x^4 - 2x^3 + x^2 - 1/30`.
pub fn bernoulli_b4(x: f64) -> f64 {
    let x2 = x * x;
    x2 * x2 - 2.0 * x2 * x + x2 - 1.0 / 30.0
}

/// `E1(x) = x - 1/2`.
pub fn euler_e1(x: f64) -> f64 {
    x - 0.5
}

fn check_unit(s: f64, t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(invalid!("kernel arguments ({s}, {t}) outside [0, 1]"))
    }
}

/// Reproducing kernel on `[0, 1] x [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// Cosine-basis Sobolev kernel, closed form in `B4`.
    SobolevBernoulli,
    /// `exp(-gamma (s - t)^2)`.
    Gaussian { gamma: f64 },
}

impl KernelSpec {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        if gamma > 0.0 && gamma.is_finite() {
            Ok(KernelSpec::Gaussian { gamma })
        } else {
            Err(invalid!("gaussian kernel needs gamma > 0, got {gamma}"))
        }
    }

    /// Kernel value with domain checking.
    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        check_unit(s, t)?;
        Ok(self.eval_unchecked(s, t))
    }

    /// Kernel value for arguments already known to lie in `[0, 1]`.
    ///
    /// Symmetric in its arguments bit for bit: `(s+t)` and `|s-t|` commute.
    #[inline]
    pub fn eval_unchecked(&self, s: f64, t: f64) -> f64 {
        match *self {
            KernelSpec::SobolevBernoulli => {
                -(bernoulli_b4(0.5 * (s + t)) + bernoulli_b4(0.5 * libm::fabs(s - t))) / 3.0
            }
            KernelSpec::Gaussian { gamma } => {
                let d = libm::fabs(s - t);
                libm::exp(-gamma * d * d)
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::SobolevBernoulli => f.write_str("sobolev-bernoulli"),
            KernelSpec::Gaussian { gamma } => write!(f, "gaussian:γ={gamma:e}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// Accepts `sobolev-bernoulli` and `gaussian:γ=<float>` (`gamma=` also works).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "sobolev-bernoulli" {
            return Ok(KernelSpec::SobolevBernoulli);
        }
        if let Some(rest) = s.strip_prefix("gaussian:") {
            let value = rest
                .strip_prefix("γ=")
                .or_else(|| rest.strip_prefix("gamma="))
                .ok_or_else(|| invalid!("expected gaussian:γ=<float>, got {s:?}"))?;
            let gamma = value
                .parse::<f64>()
                .map_err(|_| invalid!("bad gaussian gamma {value:?}"))?;
            return KernelSpec::gaussian(gamma);
        }
        Err(invalid!("unknown kernel {s:?}"))
    }
}

/// Truncated cosine series `Σ_{k=1}^{kmax} 2/(kπ)^4 cos(kπs) cos(kπt)`.
///
/// Oracle for the closed form; sums smallest terms first.
pub fn kernel_series(s: f64, t: f64, kmax: usize) -> f64 {
    (1..=kmax)
        .rev()
        .map(|k| {
            let kp = k as f64 * PI;
            2.0 / (kp * kp * kp * kp) * libm::cos(kp * s) * libm::cos(kp * t)
        })
        .sum()
}

/// Covariance function of the predictor process.
#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceSpec {
    /// Brownian motion, `C(s, t) = min(s, t)`.
    Brownian,
    /// Tabulated covariance at fixed nodes.
    CustomGrid { points: Vec<f64>, values: DMatrix<f64> },
}

impl CovarianceSpec {
    /// Tabulated covariance; rejects matrices that are not symmetric PSD to
    /// `1e-10` relative.
    pub fn custom(points: Vec<f64>, values: DMatrix<f64>) -> Result<Self> {
        let g = points.len();
        if values.nrows() != g || values.ncols() != g {
            return Err(invalid!(
                "covariance table is {}x{} for {g} points",
                values.nrows(),
                values.ncols()
            ));
        }
        let scale = values.amax().max(f64::MIN_POSITIVE);
        for i in 0..g {
            for j in 0..i {
                if libm::fabs(values[(i, j)] - values[(j, i)]) > 1e-10 * scale {
                    return Err(invalid!("covariance table not symmetric at ({i}, {j})"));
                }
            }
        }
        let min_eig = crate::linalg::symmetric_eigenvalues(&values)
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 * scale {
            return Err(invalid!("covariance table not PSD (eigenvalue {min_eig:e})"));
        }
        Ok(CovarianceSpec::CustomGrid { points, values })
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<f64> {
        check_unit(s, t)?;
        match self {
            CovarianceSpec::Brownian => Ok(s.min(t)),
            CovarianceSpec::CustomGrid { points, values } => {
                let find = |x: f64| {
                    points
                        .iter()
                        .position(|&p| p == x)
                        .ok_or_else(|| invalid!("{x} is not a node of the covariance table"))
                };
                Ok(values[(find(s)?, find(t)?)])
            }
        }
    }

    /// `[C(t_p, t_q)]` over the given nodes.
    pub fn matrix(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        let g = points.len();
        let mut out = DMatrix::zeros(g, g);
        for (q, &t) in points.iter().enumerate() {
            for (p, &s) in points.iter().enumerate() {
                out[(p, q)] = self.eval(s, t)?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for CovarianceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CovarianceSpec::Brownian => f.write_str("brownian"),
            CovarianceSpec::CustomGrid { points, .. } => write!(f, "custom-grid:{}", points.len()),
        }
    }
}

impl FromStr for CovarianceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "brownian" => Ok(CovarianceSpec::Brownian),
            other => Err(invalid!("unknown covariance {other:?}; tabulated covariances are built in code")),
        }
    }
}

/// Brownian covariance through Euler polynomials,
/// `E1((s+t)/2) - E1(|s-t|/2)`.
pub fn brownian_euler_form(s: f64, t: f64) -> f64 {
    euler_e1(0.5 * (s + t)) - euler_e1(0.5 * libm::fabs(s - t))
}
