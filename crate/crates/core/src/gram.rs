//! Functional Gram matrices `∫∫ k(s,t) X_i(s) X_j(t) ds dt`.
//!
//! With `A = W X` (curves times trapezoid weights) and the tabulated kernel
//! `K_grid[p][q] = k(t_p, t_q)`, every Gram matrix is `A_rows^T K_grid A_cols`.
//! A [`KernelOperator`] tabulates `K_grid` once per (kernel, grid) pair; each
//! curve is then embedded once as `z = K_grid a`, which is also the curve
//! `u -> ∫ k(u,t) X(t) dt` sampled on the grid. An entry is `dot(a_i, z_j)`
//! with a fixed summation order, so any sub-block of a Gram matrix is
//! bit-identical to assembling that block directly.
//!
//! Cost: `O(G^2)` per embedded curve plus `O(G)` per entry.

use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::invalid;
use crate::funcspace::{same_grid, Curve, Grid};
use crate::kernels::KernelSpec;
use crate::linalg::dot;
use crate::Result;

/// A dense functional Gram matrix together with what produced it.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub entries: DMatrix<f64>,
    pub kernel: KernelSpec,
    pub grid: Arc<Grid>,
    /// Row and column curve sets coincide.
    pub same_sets: bool,
}

impl GramMatrix {
    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }
}

/// Curves multiplied by the trapezoid weights, `w_p x(t_p)`, row-major `len x G`.
#[derive(Debug, Clone)]
pub struct WeightedCurves {
    g: usize,
    data: Vec<f64>,
}

impl WeightedCurves {
    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.g).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.g..(i + 1) * self.g]
    }

    /// The rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> WeightedCurves {
        let mut data = Vec::with_capacity(indices.len() * self.g);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        WeightedCurves { g: self.g, data }
    }
}

/// Weighted curves together with their kernel embeddings `K_grid (w * x)`.
#[derive(Debug, Clone)]
pub struct EmbeddedCurves {
    weighted: WeightedCurves,
    embedded: Vec<f64>,
}

impl EmbeddedCurves {
    pub fn len(&self) -> usize {
        self.weighted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weighted.is_empty()
    }

    pub fn weighted(&self) -> &WeightedCurves {
        &self.weighted
    }

    /// `∫ k(t_u, t) X_i(t) dt` at every grid node `t_u`.
    pub fn embedded(&self, i: usize) -> &[f64] {
        let g = self.weighted.g;
        &self.embedded[i * g..(i + 1) * g]
    }

    pub fn select(&self, indices: &[usize]) -> EmbeddedCurves {
        let mut embedded = Vec::with_capacity(indices.len() * self.weighted.g);
        for &i in indices {
            embedded.extend_from_slice(self.embedded(i));
        }
        EmbeddedCurves {
            weighted: self.weighted.select(indices),
            embedded,
        }
    }

    /// `[dot(a_new, z_i)]_i`: one weighted curve against every member.
    pub fn inner_with(&self, weighted_new: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| dot(weighted_new, self.embedded(i)))
            .collect()
    }
}

/// `[dot(a_i, z_j)]` for weighted rows `a_i` and embedded columns `z_j`.
pub fn gram_block(rows: &WeightedCurves, cols: &EmbeddedCurves) -> DMatrix<f64> {
    let (n, m) = (rows.len(), cols.len());
    let mut out = alloc::vec![0.0; n * m];
    let fill = |(i, row): (usize, &mut [f64])| {
        let a = rows.row(i);
        for (j, v) in row.iter_mut().enumerate() {
            *v = dot(a, cols.embedded(j));
        }
    };
    if m > 0 {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            out.par_chunks_mut(m).enumerate().for_each(fill);
        }
        #[cfg(not(feature = "parallel"))]
        out.chunks_mut(m).enumerate().for_each(fill);
    }
    DMatrix::from_row_slice(n, m, &out)
}

/// Tabulated kernel on a grid, shared by every Gram product on that grid.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    kernel: KernelSpec,
    grid: Arc<Grid>,
    /// Row-major `G x G`.
    table: Vec<f64>,
}

impl KernelOperator {
    pub fn new(kernel: KernelSpec, grid: Arc<Grid>) -> Self {
        let pts = grid.points();
        let g = pts.len();
        let mut table = alloc::vec![0.0; g * g];
        for u in 0..g {
            for p in 0..g {
                table[u * g + p] = kernel.eval_unchecked(pts[u], pts[p]);
            }
        }
        Self { kernel, grid, table }
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    fn check(&self, curve: &Curve) -> Result<()> {
        if same_grid(curve.grid(), &self.grid) {
            Ok(())
        } else {
            Err(invalid!("curve is not sampled on the operator's grid"))
        }
    }

    /// Applies the tabulated kernel to a weighted sample vector.
    fn apply(&self, weighted: &[f64], out: &mut [f64]) {
        let g = self.grid.len();
        for (u, o) in out.iter_mut().enumerate() {
            *o = dot(&self.table[u * g..(u + 1) * g], weighted);
        }
    }

    /// Weighted samples of each curve, `O(G)` per curve.
    pub fn weigh_curves(&self, curves: &[Curve]) -> Result<WeightedCurves> {
        let g = self.grid.len();
        let mut data = Vec::with_capacity(curves.len() * g);
        for c in curves {
            self.check(c)?;
            data.extend(c.weighted());
        }
        Ok(WeightedCurves { g, data })
    }

    /// Kernel embeddings of already weighted curves, `O(G^2)` per curve.
    pub fn embed_weighted(&self, weighted: WeightedCurves) -> EmbeddedCurves {
        let g = self.grid.len();
        let mut embedded = alloc::vec![0.0; weighted.data.len()];
        let fill = |(a, z): (&[f64], &mut [f64])| self.apply(a, z);
        if g > 0 {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                weighted
                    .data
                    .par_chunks(g)
                    .zip(embedded.par_chunks_mut(g))
                    .for_each(fill);
            }
            #[cfg(not(feature = "parallel"))]
            weighted.data.chunks(g).zip(embedded.chunks_mut(g)).for_each(fill);
        }
        EmbeddedCurves { weighted, embedded }
    }

    pub fn embed_curves(&self, curves: &[Curve]) -> Result<EmbeddedCurves> {
        Ok(self.embed_weighted(self.weigh_curves(curves)?))
    }

    /// `n x n` Gram matrix of `curves`.
    pub fn gram_full(&self, curves: &[Curve]) -> Result<GramMatrix> {
        let e = self.embed_curves(curves)?;
        let mut k = gram_block(e.weighted(), &e);
        // the two triangles differ by rounding; keep one so symmetry is exact
        k.fill_upper_triangle_with_lower_triangle();
        Ok(self.wrap(k, true))
    }

    /// `n x m` cross Gram matrix between `rows` and `cols`.
    pub fn gram_cross(&self, rows: &[Curve], cols: &[Curve]) -> Result<GramMatrix> {
        let r = self.weigh_curves(rows)?;
        let c = self.embed_curves(cols)?;
        Ok(self.wrap(gram_block(&r, &c), false))
    }

    fn wrap(&self, entries: DMatrix<f64>, same_sets: bool) -> GramMatrix {
        GramMatrix {
            entries,
            kernel: self.kernel,
            grid: self.grid.clone(),
            same_sets,
        }
    }

    /// `∫∫ k(s,t) X_i(t) x_new(s) dt ds` for each training curve `X_i`.
    pub fn embed_vector(&self, train: &[Curve], x_new: &Curve) -> Result<Vec<f64>> {
        self.check(x_new)?;
        let e = self.embed_curves(train)?;
        Ok(e.inner_with(&x_new.weighted()))
    }

    /// `u -> Σ_i coeff_i ∫ k(u,t) X_i(t) dt` evaluated on `out_grid`.
    pub fn slope_from_coefficients(
        &self,
        coeff: &[f64],
        curves: &[Curve],
        out_grid: &Arc<Grid>,
    ) -> Result<Curve> {
        if coeff.len() != curves.len() {
            return Err(invalid!(
                "{} coefficients for {} curves",
                coeff.len(),
                curves.len()
            ));
        }
        let g = self.grid.len();
        let mut combined = alloc::vec![0.0; g];
        for (c, x) in coeff.iter().zip(curves) {
            self.check(x)?;
            for (acc, a) in combined.iter_mut().zip(x.weighted()) {
                *acc += c * a;
            }
        }
        let values = if same_grid(out_grid, &self.grid) {
            let mut out = alloc::vec![0.0; g];
            self.apply(&combined, &mut out);
            out
        } else {
            let pts = self.grid.points();
            out_grid
                .points()
                .iter()
                .map(|&u| {
                    pts.iter()
                        .zip(&combined)
                        .map(|(&t, v)| self.kernel.eval_unchecked(u, t) * v)
                        .sum()
                })
                .collect()
        };
        Curve::new(out_grid.clone(), values)
    }
}

/// Grid of the first curve, or an error for an empty set.
fn grid_of(curves: &[Curve]) -> Result<Arc<Grid>> {
    curves
        .first()
        .map(|c| c.grid().clone())
        .ok_or_else(|| invalid!("need at least one curve"))
}

/// Gram matrix of `curves` under `kernel`, tabulating the kernel on their grid.
pub fn gram_full(curves: &[Curve], kernel: KernelSpec) -> Result<GramMatrix> {
    KernelOperator::new(kernel, grid_of(curves)?).gram_full(curves)
}

pub fn gram_cross(rows: &[Curve], cols: &[Curve], kernel: KernelSpec) -> Result<GramMatrix> {
    KernelOperator::new(kernel, grid_of(rows)?).gram_cross(rows, cols)
}

pub fn embed_vector(train: &[Curve], x_new: &Curve, kernel: KernelSpec) -> Result<Vec<f64>> {
    KernelOperator::new(kernel, x_new.grid().clone()).embed_vector(train, x_new)
}

pub fn slope_from_coefficients(
    coeff: &[f64],
    curves: &[Curve],
    kernel: KernelSpec,
    out_grid: &Arc<Grid>,
) -> Result<Curve> {
    let grid = match curves.first() {
        Some(c) => c.grid().clone(),
        None => out_grid.clone(),
    };
    KernelOperator::new(kernel, grid).slope_from_coefficients(coeff, curves, out_grid)
}
