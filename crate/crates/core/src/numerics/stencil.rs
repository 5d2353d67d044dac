//! Central finite-difference stencils on small tensor-product grids.
//!
//! The grids hold joint-distribution values h(t; u, v) sampled on a uniform
//! (u, v) mesh, optionally at a few t levels. Mixed partials are built by
//! composing one-dimensional central stencils along each axis, all of
//! second-order accuracy, so a residual formed from them inherits an O(h^2)
//! truncation floor. Third derivatives use the wide five-point form
//! (f_{+2} - 2 f_{+1} + 2 f_{-1} - f_{-2}) / (2 h^3) rather than one-sided
//! variants; callers must keep evaluation points two mesh cells inside the
//! grid for every axis they differentiate twice or more.

use crate::error::{Error, Result};

/// Uniform grid of h values: `levels` t-slices, each an nu x nv plane stored
/// row-major in u.
#[derive(Debug, Clone)]
pub struct StencilGrid {
    pub t0: f64,
    pub t_mesh: f64,
    pub u0: f64,
    pub v0: f64,
    pub mesh: f64,
    pub nu: usize,
    pub nv: usize,
    pub levels: usize,
    pub h: Vec<f64>,
}

impl StencilGrid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t0: f64,
        t_mesh: f64,
        u0: f64,
        v0: f64,
        mesh: f64,
        nu: usize,
        nv: usize,
        levels: usize,
    ) -> Self {
        StencilGrid {
            t0,
            t_mesh,
            u0,
            v0,
            mesh,
            nu,
            nv,
            levels,
            h: vec![0.0; nu * nv * levels],
        }
    }

    #[inline]
    pub fn at(&self, level: usize, iu: usize, iv: usize) -> f64 {
        self.h[(level * self.nu + iu) * self.nv + iv]
    }

    #[inline]
    pub fn set(&mut self, level: usize, iu: usize, iv: usize, value: f64) {
        self.h[(level * self.nu + iu) * self.nv + iv] = value;
    }

    pub fn u_at(&self, iu: usize) -> f64 {
        self.u0 + self.mesh * iu as f64
    }

    pub fn v_at(&self, iv: usize) -> f64 {
        self.v0 + self.mesh * iv as f64
    }

    pub fn t_at(&self, level: usize) -> f64 {
        self.t0 + self.t_mesh * level as f64
    }
}

/// One-dimensional central stencil: (coefficients, index offsets, h power).
fn stencil_1d(order: usize) -> Result<(&'static [f64], &'static [isize], u32)> {
    match order {
        0 => Ok((&[1.0], &[0], 0)),
        1 => Ok((&[-0.5, 0.5], &[-1, 1], 1)),
        2 => Ok((&[1.0, -2.0, 1.0], &[-1, 0, 1], 2)),
        3 => Ok((&[-0.5, 1.0, -1.0, 0.5], &[-2, -1, 1, 2], 3)),
        4 => Ok((&[1.0, -4.0, 6.0, -4.0, 1.0], &[-2, -1, 0, 1, 2], 4)),
        _ => Err(Error::invalid("fd_partial: derivative order above 4")),
    }
}

/// Mixed partial d^{orders.0}/dt d^{orders.1}/du d^{orders.2}/dv at grid
/// index (level, iu, iv), by composing central stencils along each axis.
pub fn fd_partial(
    grid: &StencilGrid,
    orders: (usize, usize, usize),
    level: usize,
    iu: usize,
    iv: usize,
) -> Result<f64> {
    let (dt, du, dv) = orders;
    if dt > 1 {
        return Err(Error::invalid("fd_partial: t-derivative order above 1"));
    }
    let (ct, ot, pt) = stencil_1d(dt)?;
    let (cu, ou, pu) = stencil_1d(du)?;
    let (cv, ov, pv) = stencil_1d(dv)?;

    let reach = |offs: &[isize], idx: usize, len: usize| -> bool {
        offs.iter().all(|&o| {
            let j = idx as isize + o;
            j >= 0 && (j as usize) < len
        })
    };
    if !reach(ot, level, grid.levels) || !reach(ou, iu, grid.nu) || !reach(ov, iv, grid.nv) {
        return Err(Error::invalid("fd_partial: stencil reaches outside grid"));
    }

    let mut acc = 0.0;
    for (wt, dt_off) in ct.iter().zip(ot) {
        let l = (level as isize + dt_off) as usize;
        for (wu, du_off) in cu.iter().zip(ou) {
            let i = (iu as isize + du_off) as usize;
            for (wv, dv_off) in cv.iter().zip(ov) {
                let j = (iv as isize + dv_off) as usize;
                acc += wt * wu * wv * grid.at(l, i, j);
            }
        }
    }
    let scale = grid.t_mesh.powi(pt as i32) * grid.mesh.powi((pu + pv) as i32);
    Ok(acc / scale)
}
