use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::VectorField;

/// `g(x) = M x + b`.
#[derive(Debug, Clone)]
pub struct AffineField {
    pub matrix: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl AffineField {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Self {
        assert!(matrix.is_square(), "affine field needs a square matrix");
        assert_eq!(matrix.nrows(), offset.len(), "offset length");
        AffineField { matrix, offset }
    }
}

impl VectorField for AffineField {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.offset[i];
            for j in 0..n {
                s += self.matrix[(i, j)] * x[j];
            }
            out[i] = s;
        }
    }
}

/// Saddle field of `min_x max_y x^T A y`: `g(x, y) = (A y, -A^T x)`, with
/// `x` in the first `m` coordinates and `y` in the last `n`.
#[derive(Debug, Clone)]
pub struct BilinearField {
    pub a: DMatrix<f64>,
}

impl BilinearField {
    pub fn new(a: DMatrix<f64>) -> Self {
        BilinearField { a }
    }
}

impl VectorField for BilinearField {
    fn dim(&self) -> usize {
        self.a.nrows() + self.a.ncols()
    }

    fn apply(&self, z: &[f64], out: &mut [f64]) {
        let (m, n) = self.a.shape();
        let (x, y) = z.split_at(m);
        let (gx, gy) = out.split_at_mut(m);
        gx.fill(0.0);
        gy.fill(0.0);
        // column-major storage: walk columns
        for j in 0..n {
            let col = self.a.column(j);
            let yj = y[j];
            let mut acc = 0.0;
            for i in 0..m {
                let aij = col[i];
                gx[i] += aij * yj;
                acc += aij * x[i];
            }
            gy[j] = -acc;
        }
    }
}

/// Separable signed power field `g_i(x) = sign(x_i - c_i) |x_i - c_i|^nu`,
/// the gradient of the convex function `sum |x_i - c_i|^(1+nu) / (1+nu)`.
#[derive(Debug, Clone)]
pub struct HolderField {
    pub center: Vec<f64>,
    pub nu: f64,
}

impl VectorField for HolderField {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for ((o, &xi), &ci) in out.iter_mut().zip(x).zip(&self.center) {
            let d = xi - ci;
            *o = if d == 0.0 { 0.0 } else { d.signum() * d.abs().powf(self.nu) };
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ZeroField {
    dim: usize,
}

impl ZeroField {
    pub fn new(dim: usize) -> Self {
        ZeroField { dim }
    }
}

impl VectorField for ZeroField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// Field given by a closure.
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F> fmt::Debug for FnField<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}
