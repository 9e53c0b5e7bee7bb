//! Quadrature grids on `[0, 1]`, sampled curves and `L2` inner products.
//!
//! Every integral in the crate is a composite trapezoid sum over a [`Grid`].
//! Curves are stored as samples on a shared grid; a [`Dataset`] pairs curves
//! with scalar responses.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{invalid, numeric};
use crate::Result;

/// Quadrature nodes and trapezoid weights on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    /// `g` equally spaced points with composite-trapezoid weights
    /// `(h/2, h, ..., h, h/2)`, `h = 1/(g-1)`.
    pub fn uniform(g: usize) -> Result<Self> {
        if g < 3 {
            return Err(invalid!("grid needs at least 3 points, got {g}"));
        }
        let h = 1.0 / (g - 1) as f64;
        let mut points: Vec<f64> = (0..g).map(|p| p as f64 * h).collect();
        // pin the right endpoint; p * h can land one ulp off 1
        points[g - 1] = 1.0;
        let mut weights = alloc::vec![h; g];
        weights[0] = 0.5 * h;
        weights[g - 1] = 0.5 * h;
        Ok(Self { points, weights })
    }

    /// Builds a grid from explicit nodes, reconstructing trapezoid weights.
    ///
    /// Nodes must be strictly increasing, start at 0 and end at 1.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        let g = points.len();
        if g < 3 {
            return Err(invalid!("grid needs at least 3 points, got {g}"));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(invalid!("grid points must be finite"));
        }
        if points[0] != 0.0 || points[g - 1] != 1.0 {
            return Err(invalid!(
                "grid must span [0, 1], got [{}, {}]",
                points[0],
                points[g - 1]
            ));
        }
        if let Some(w) = points.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid!("grid points not strictly increasing at index {}", w + 1));
        }
        let mut weights = Vec::with_capacity(g);
        weights.push(0.5 * (points[1] - points[0]));
        for p in 1..g - 1 {
            weights.push(0.5 * (points[p + 1] - points[p - 1]));
        }
        weights.push(0.5 * (points[g - 1] - points[g - 2]));
        Ok(Self { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Two grid handles describe the same discretization.
pub fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || a.points == b.points
}

/// A function on `[0, 1]` sampled at the points of a grid.
#[derive(Debug, Clone)]
pub struct Curve {
    values: Vec<f64>,
    grid: Arc<Grid>,
}

impl Curve {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid!(
                "curve has {} samples but grid has {} points",
                values.len(),
                grid.len()
            ));
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(numeric!("curve value at grid index {p} is not finite"));
        }
        Ok(Self { values, grid })
    }

    /// Samples `eval` at every grid point.
    pub fn from_fn<F: FnMut(f64) -> f64>(grid: &Arc<Grid>, eval: F) -> Result<Self> {
        let values = grid.points().iter().copied().map(eval).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            values: alloc::vec![0.0; grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Pointwise `self - other`.
    pub fn sub(&self, other: &Curve) -> Result<Curve> {
        check_same_grid(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Curve {
            values,
            grid: self.grid.clone(),
        })
    }

    /// Samples multiplied by the quadrature weights, `w_p x(t_p)`.
    pub fn weighted(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(x, w)| w * x)
            .collect()
    }
}

pub(crate) fn check_same_grid(f: &Curve, g: &Curve) -> Result<()> {
    if same_grid(&f.grid, &g.grid) {
        Ok(())
    } else {
        Err(invalid!("curves are sampled on different grids"))
    }
}

/// Trapezoid approximation of `∫ f(t) g(t) dt`.
///
/// Each term is `w_p * (f_p * g_p)` so the result does not depend on argument
/// order.
pub fn l2_inner(f: &Curve, g: &Curve) -> Result<f64> {
    check_same_grid(f, g)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(f.grid.weights())
        .map(|((a, b), w)| w * (a * b))
        .sum())
}

/// `sqrt(l2_inner(f, f))`.
pub fn l2_norm(f: &Curve) -> f64 {
    libm::sqrt(l2_inner(f, f).expect("a curve shares its own grid"))
}

/// Paired curves and scalar responses on one grid.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub grid: Arc<Grid>,
    pub curves: Vec<Curve>,
    pub responses: Vec<f64>,
}

impl Dataset {
    pub fn new(grid: Arc<Grid>, curves: Vec<Curve>, responses: Vec<f64>) -> Result<Self> {
        if curves.len() != responses.len() {
            return Err(invalid!(
                "{} curves but {} responses",
                curves.len(),
                responses.len()
            ));
        }
        if curves.iter().any(|c| !same_grid(&c.grid, &grid)) {
            return Err(invalid!("every curve must share the dataset grid"));
        }
        if let Some(i) = responses.iter().position(|y| !y.is_finite()) {
            return Err(numeric!("response {i} is not finite"));
        }
        Ok(Self {
            grid,
            curves,
            responses,
        })
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    /// Rows `range` as a new dataset sharing the grid.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Dataset {
        Dataset {
            grid: self.grid.clone(),
            curves: self.curves[range.clone()].to_vec(),
            responses: self.responses[range].to_vec(),
        }
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            grid: self.grid.clone(),
            curves: indices.iter().map(|&i| self.curves[i].clone()).collect(),
            responses: indices.iter().map(|&i| self.responses[i]).collect(),
        }
    }
}
