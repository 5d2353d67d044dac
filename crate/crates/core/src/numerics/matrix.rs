//! Dense real matrices and LU determinants.
//!
//! Row-major storage, partial pivoting. Determinants are returned as
//! (log |det|, sign) so Fredholm values ~1e-40 at deep thresholds stay
//! representable.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// LU factorization with partial pivoting, reduced to what the Fredholm code
/// needs: `(log |det|, sign)` with sign in {-1, 0, +1}. Sign 0 means a pivot
/// collapsed to zero relative to the matrix scale, i.e. the matrix is singular
/// to working precision.
pub fn lu_log_det(m: &DenseMatrix) -> Result<(f64, i8)> {
    if m.rows != m.cols {
        return Err(Error::invalid(format!(
            "lu_log_det: matrix is {}x{}, need square",
            m.rows, m.cols
        )));
    }
    if m.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("lu_log_det: non-finite entry"));
    }
    let n = m.rows;
    if n == 0 {
        return Ok((0.0, 1)); // empty product
    }
    let mut a = m.data.clone();
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok((f64::NEG_INFINITY, 0));
    }
    let tiny = scale * (n as f64) * f64::EPSILON * 1e-2;

    let mut sign = 1i8;
    let mut log_det = 0.0f64;
    for k in 0..n {
        // Pivot search in column k.
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in (k + 1)..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= tiny {
            return Ok((f64::NEG_INFINITY, 0));
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            sign = -sign;
        }
        let pivot = a[k * n + k];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_det += pivot.abs().ln();
        let inv = 1.0 / pivot;
        for i in (k + 1)..n {
            let f = a[i * n + k] * inv;
            if f == 0.0 {
                continue;
            }
            a[i * n + k] = f;
            let (upper, lower) = a.split_at_mut(i * n);
            let src = &upper[k * n + k + 1..k * n + n];
            let dst = &mut lower[k + 1..n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d -= f * s;
            }
        }
    }
    Ok((log_det, sign))
}
