//! Dense kernels shared by the Gram assembly and the solvers.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::numeric;
use crate::Result;

/// Dot product with a fixed summation order (four interleaved partial sums).
///
/// The result depends only on the two slices, never on where they came from,
/// which is what makes Gram slices bit-identical to direct assembly.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() - a.len() % 4;
    let mut acc = [0.0f64; 4];
    for (ca, cb) in a[..n].chunks_exact(4).zip(b[..n].chunks_exact(4)) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in a[n..].iter().zip(&b[n..]) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Diagonal regularization applied when a factorization fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JitterPolicy {
    /// Fail on the first factorization error.
    Off,
    /// Add `rel * trace/dim` to the diagonal and retry, then once more with
    /// `rel * 100`.
    Auto { rel: f64 },
}

impl Default for JitterPolicy {
    fn default() -> Self {
        JitterPolicy::Auto { rel: 1e-10 }
    }
}

/// Solution of a symmetric positive-definite system plus what it took.
#[derive(Debug, Clone)]
pub struct SpdSolution {
    pub x: DVector<f64>,
    /// Diagonal shift that was finally used (0 when none was needed).
    pub jitter: f64,
    /// `||M x - b|| / ||b||` against the symmetrized, unjittered `M`.
    pub relative_residual: f64,
}

/// Solves `M x = b` after symmetrizing `M <- (M + M^T)/2`, by Cholesky.
pub fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>, jitter: JitterPolicy) -> Result<SpdSolution> {
    let dim = m.nrows();
    if dim != m.ncols() || dim != b.len() {
        return Err(crate::error::invalid!(
            "system is {}x{} with rhs of length {}",
            m.nrows(),
            m.ncols(),
            b.len()
        ));
    }
    if m.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(numeric!("linear system contains non-finite entries"));
    }
    let sym = symmetrize(m);
    let mean_diag = sym.trace() / dim as f64;

    let shifts: Vec<f64> = match jitter {
        JitterPolicy::Off => alloc::vec![0.0],
        JitterPolicy::Auto { rel } => alloc::vec![0.0, rel * mean_diag, 100.0 * rel * mean_diag],
    };
    for &shift in &shifts {
        let mut a = sym.clone();
        if shift != 0.0 {
            for i in 0..dim {
                a[(i, i)] += shift;
            }
        }
        if let Some(chol) = a.cholesky() {
            let x = chol.solve(b);
            if x.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let r = &sym * &x - b;
            let bn = b.norm();
            let relative_residual = if bn > 0.0 { r.norm() / bn } else { r.norm() };
            return Ok(SpdSolution {
                x,
                jitter: shift,
                relative_residual,
            });
        }
    }
    let min_diag = sym.diagonal().iter().copied().fold(f64::INFINITY, f64::min);
    let max_diag = sym.diagonal().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Err(numeric!(
        "Cholesky factorization failed (dim {dim}, trace/dim {mean_diag:e}, diagonal range [{min_diag:e}, {max_diag:e}], final shift {:e})",
        shifts.last().copied().unwrap_or(0.0)
    ))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
}

/// Eigenvalues of the symmetric part of `m`, unsorted.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    symmetrize(m).symmetric_eigenvalues().iter().copied().collect()
}
