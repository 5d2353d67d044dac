//! Eigenvalues of complex Hermitian matrices.
//!
//! Two classical stages, both in-repo because the matrices stay small
//! (n <= ~600) and the Monte Carlo loop wants a lean, allocation-light path:
//!
//! 1. Householder reduction to tridiagonal form. Complex reflectors are
//!    applied two-sided (B <- B - v w^* - w v^*); the resulting complex
//!    subdiagonal is rotated real by a diagonal phase similarity, which
//!    leaves the spectrum untouched.
//! 2. Implicit-shift QL iteration on the real symmetric tridiagonal matrix
//!    (the tql1 scheme), eigenvalues only.
//!
//! The combination is backward stable; the trace and unitary-invariance
//! tests below pin the error at the 1e-11 * ||M|| level for the sizes used.

use crate::error::{Error, Result};

/// Dense Hermitian matrix with separate real/imaginary planes, row-major.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            n,
            re: vec![0.0; n * n],
            im: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn re_at(&self, i: usize, j: usize) -> f64 {
        self.re[i * self.n + j]
    }

    #[inline]
    pub fn im_at(&self, i: usize, j: usize) -> f64 {
        self.im[i * self.n + j]
    }

    /// Writes entry (i, j) and its conjugate at (j, i). Diagonal writes must
    /// be real.
    pub fn set_pair(&mut self, i: usize, j: usize, re: f64, im: f64) {
        let n = self.n;
        if i == j {
            self.re[i * n + i] = re;
            self.im[i * n + i] = 0.0;
        } else {
            self.re[i * n + j] = re;
            self.im[i * n + j] = im;
            self.re[j * n + i] = re;
            self.im[j * n + i] = -im;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.re[i * self.n + i]).sum()
    }

    /// a <- a + s * b (entrywise), used by the Monte Carlo coupling step.
    pub fn axpy(&mut self, s: f64, b: &HermitianMatrix) {
        for (x, y) in self.re.iter_mut().zip(&b.re) {
            *x += s * y;
        }
        for (x, y) in self.im.iter_mut().zip(&b.im) {
            *x += s * y;
        }
    }

    pub fn scale(&mut self, s: f64) {
        for x in self.re.iter_mut() {
            *x *= s;
        }
        for x in self.im.iter_mut() {
            *x *= s;
        }
    }

    /// Largest deviation from A = A^*.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            worst = worst.max(self.im[i * n + i].abs());
            for j in (i + 1)..n {
                let dre = (self.re[i * n + j] - self.re[j * n + i]).abs();
                let dim = (self.im[i * n + j] + self.im[j * n + i]).abs();
                worst = worst.max(dre).max(dim);
            }
        }
        worst
    }

    fn abs_scale(&self) -> f64 {
        self.re
            .iter()
            .chain(self.im.iter())
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }
}

/// All eigenvalues, ascending.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let n = m.n;
    if n == 0 {
        return Err(Error::invalid("hermitian_eigenvalues: empty matrix"));
    }
    let scale = m.abs_scale();
    if !scale.is_finite() {
        return Err(Error::invalid("hermitian_eigenvalues: non-finite entry"));
    }
    if m.hermiticity_defect() > 1e-12 * scale.max(1.0) {
        return Err(Error::invalid(
            "hermitian_eigenvalues: matrix is not Hermitian to 1e-12",
        ));
    }
    let (mut d, mut e) = tridiagonalize(m);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Householder reduction. Returns (diagonal, subdiagonal magnitudes), where
/// subdiagonal index i couples rows i and i+1.
fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut are = m.re.clone();
    let mut aim = m.im.clone();
    let mut vre = vec![0.0; n];
    let mut vim = vec![0.0; n];
    let mut pre = vec![0.0; n];
    let mut pim = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        // Column segment below the diagonal.
        let mut colscale = 0.0f64;
        for i in (k + 1)..n {
            colscale += are[i * n + k].abs() + aim[i * n + k].abs();
        }
        if colscale == 0.0 {
            continue; // already reduced in this column
        }
        let inv_scale = 1.0 / colscale;
        let mut sigma = 0.0f64;
        for i in (k + 1)..n {
            vre[i] = are[i * n + k] * inv_scale;
            vim[i] = aim[i * n + k] * inv_scale;
            sigma += vre[i] * vre[i] + vim[i] * vim[i];
        }
        let s = sigma.sqrt();
        let x0re = vre[k + 1];
        let x0im = vim[k + 1];
        let r0 = (x0re * x0re + x0im * x0im).sqrt();
        // alpha = -phase(x0) * s; for r0 = 0 pick alpha = -s (real).
        let (alre, alim) = if r0 > 0.0 {
            (-x0re / r0 * s, -x0im / r0 * s)
        } else {
            (-s, 0.0)
        };
        // v = x - alpha e1; ||v||^2 = 2 s (s + r0).
        vre[k + 1] -= alre;
        vim[k + 1] -= alim;
        let beta = 1.0 / (s * (s + r0));

        // p = beta * B v over the trailing block.
        for i in (k + 1)..n {
            let row_re = &are[i * n + (k + 1)..i * n + n];
            let row_im = &aim[i * n + (k + 1)..i * n + n];
            let mut sre = 0.0;
            let mut sim = 0.0;
            for ((br, bi), (xr, xi)) in row_re
                .iter()
                .zip(row_im)
                .zip(vre[(k + 1)..n].iter().zip(&vim[(k + 1)..n]))
            {
                sre += br * xr - bi * xi;
                sim += br * xi + bi * xr;
            }
            pre[i] = beta * sre;
            pim[i] = beta * sim;
        }
        // kappa = (beta/2) Re(v^* p); the imaginary part vanishes for
        // Hermitian B and is dropped.
        let mut vp = 0.0f64;
        for i in (k + 1)..n {
            vp += vre[i] * pre[i] + vim[i] * pim[i];
        }
        let kappa = 0.5 * beta * vp;
        // w = p - kappa v.
        for i in (k + 1)..n {
            pre[i] -= kappa * vre[i];
            pim[i] -= kappa * vim[i];
        }
        // B <- B - v w^* - w v^*.
        for i in (k + 1)..n {
            let (vri, vii, wri, wii) = (vre[i], vim[i], pre[i], pim[i]);
            let row_re = &mut are[i * n + (k + 1)..i * n + n];
            let row_im = &mut aim[i * n + (k + 1)..i * n + n];
            for ((br, bi), ((vrj, vij), (wrj, wij))) in row_re.iter_mut().zip(row_im.iter_mut()).zip(
                vre[(k + 1)..n]
                    .iter()
                    .zip(&vim[(k + 1)..n])
                    .zip(pre[(k + 1)..n].iter().zip(&pim[(k + 1)..n])),
            ) {
                *br -= vri * wrj + vii * wij + wri * vrj + wii * vij;
                *bi -= vii * wrj - vri * wij + wii * vrj - wri * vij;
            }
        }
        // Store the new subdiagonal entry (alpha rescaled).
        are[(k + 1) * n + k] = alre * colscale;
        aim[(k + 1) * n + k] = alim * colscale;
    }

    let d: Vec<f64> = (0..n).map(|i| are[i * n + i]).collect();
    let mut e = vec![0.0; n.saturating_sub(1)];
    for (i, ei) in e.iter_mut().enumerate() {
        let re = are[(i + 1) * n + i];
        let im = aim[(i + 1) * n + i];
        // Phase similarity makes the subdiagonal real without moving
        // eigenvalues, so only the magnitude survives.
        *ei = (re * re + im * im).sqrt();
    }
    (d, e)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix, in place.
fn ql_implicit(d: &mut [f64], e_sub: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    // Shift subdiagonal into the e[0..n-1] slots with a zero sentinel at the end.
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(e_sub);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NoConvergence(
                    "hermitian_eigenvalues: QL exceeded 50 iterations".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Rotation annihilated early; drop the shift and restart.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
