//! Large-separation expansion of the two-time distribution, and the
//! covariance of the process.
//!
//! For t -> inf the joint law factorizes, with corrections organized as
//!
//! ```text
//!     P(A(0) <= u, A(t) <= v)
//!         = F(u)F(v) + F'(u)F'(v)/t^2 + (Phi(u,v) + Phi(v,u))/t^4 + O(t^-6),
//! ```
//!
//! where, writing g = log F and gp = g', the fourth-order kernel is
//!
//! ```text
//!     Phi(u,v) = F(u)F(v) [ gp(u)^2 gp(v)^2 / 4
//!                           + q^2(u) (q^2(v)/4 - gp(v)^2/2)
//!                           + gp(u) * int_v^inf (2(v-a)q^2 + q'^2 - q^4) da ].
//! ```
//!
//! The log-scale coefficients come in two printed forms: h2 = gp(u)gp(v),
//! and h4 either through derivatives of g alone or through q and its tail
//! integrals; the two are equal by the Painleve II equation and are both
//! evaluated here, as a guard against quadrature bugs. f4 = h4 + h2^2/2
//! converts between the log expansion and the probability expansion.
//!
//! The covariance follows from Hoeffding's identity
//!
//! ```text
//!     cov(A(0), A(t)) = int int [P(u,v) - F(u)F(v)] du dv
//!                     = 1/t^2 + c/t^4 + ...,   c = 2 int int Phi du dv,
//! ```
//!
//! which avoids differentiating determinants; the leading 1/t^2 uses
//! int F' du = 1. All two-dimensional integrals are trapezoidal over
//! [-window, window]^2; the integrands decay fast enough on both ends
//! that the rule converges well beyond its generic order, which the
//! refinement tests exercise.

use crate::error::{Error, Result};
use crate::kernel::{joint_cdf_grid, KernelSpec};
use crate::painleve::PainleveSolution;

/// Node count per half-line for the Fredholm grids behind the covariance
/// quadrature. Coarser than the default: the double integral forgives
/// pointwise error that is smooth across the grid.
const COVARIANCE_QUAD_ORDER: usize = 48;

/// Which truncation of the series to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOrder {
    /// Through 1/t^2.
    Two,
    /// Through 1/t^4.
    Four,
}

/// Every scalar entering the expansion at one (u, v) pair.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionTerms {
    pub u: f64,
    pub v: f64,
    pub g_u: f64,
    pub g_v: f64,
    pub gp_u: f64,
    pub gp_v: f64,
    pub g1p_u: f64,
    pub g1p_v: f64,
    pub g2p_u: f64,
    pub g2p_v: f64,
    pub q_u: f64,
    pub q_v: f64,
    pub qp_u: f64,
    pub qp_v: f64,
    pub h2: f64,
    pub h4: f64,
    pub f4: f64,
    pub phi_uv: f64,
    pub phi_vu: f64,
}

impl ExpansionTerms {
    pub fn at(sol: &PainleveSolution, u: f64, v: f64) -> Result<Self> {
        let tu = sol.tails_at(u);
        let tv = sol.tails_at(v);
        let q_u = sol.q_at(u);
        let q_v = sol.q_at(v);
        let h2 = tu.gp * tv.gp;
        let h4 = h4_term(sol, u, v)?;
        let f4 = h4 + 0.5 * h2 * h2;
        Ok(ExpansionTerms {
            u,
            v,
            g_u: tu.g,
            g_v: tv.g,
            gp_u: tu.gp,
            gp_v: tv.gp,
            g1p_u: tu.g1p,
            g1p_v: tv.g1p,
            g2p_u: tu.g2p,
            g2p_v: tv.g2p,
            q_u,
            q_v,
            qp_u: sol.qp_at(u),
            qp_v: sol.qp_at(v),
            h2,
            h4,
            f4,
            phi_uv: phi(sol, u, v),
            phi_vu: phi(sol, v, u),
        })
    }
}

/// Second-order coefficient gp(u) gp(v) of the log expansion.
pub fn h2_term(sol: &PainleveSolution, u: f64, v: f64) -> f64 {
    sol.tails_at(u).gp * sol.tails_at(v).gp
}

/// One half of the symmetrized fourth-order coefficient, in the q
/// representation.
fn h4_part(sol: &PainleveSolution, u: f64, v: f64) -> f64 {
    let q2u = sol.q_at(u).powi(2);
    let q2v = sol.q_at(v).powi(2);
    let tu = sol.tails_at(u);
    let tv = sol.tails_at(v);
    let b_v = 2.0 * tv.g + tv.g1p - tv.g2p;
    q2u * (0.25 * q2v - 0.5 * tv.gp * tv.gp) + tu.gp * b_v
}

/// Fourth-order coefficient of the log expansion, symmetrized in (u, v).
/// Both printed representations are evaluated: the q form (returned) and
/// the g-derivative form with g'' = -q^2; a gap between them beyond 1e-8
/// signals a broken tail quadrature and is reported as an error.
pub fn h4_term(sol: &PainleveSolution, u: f64, v: f64) -> Result<f64> {
    let q_form = h4_part(sol, u, v) + h4_part(sol, v, u);

    let tu = sol.tails_at(u);
    let tv = sol.tails_at(v);
    let gpp_u = -sol.q_at(u).powi(2);
    let gpp_v = -sol.q_at(v).powi(2);
    let b_u = 2.0 * tu.g + tu.g1p - tu.g2p;
    let b_v = 2.0 * tv.g + tv.g1p - tv.g2p;
    let g_form = 0.5 * (gpp_u * tv.gp * tv.gp + gpp_v * tu.gp * tu.gp + gpp_u * gpp_v)
        + tu.gp * b_v
        + tv.gp * b_u;

    let scale = 1.0_f64.max(q_form.abs());
    if (q_form - g_form).abs() > 1e-8 * scale {
        return Err(Error::Inconsistent(format!(
            "fourth-order coefficient forms disagree at ({u}, {v}): {q_form:e} vs {g_form:e}"
        )));
    }
    Ok(q_form)
}

/// The fourth-order probability kernel Phi(u, v). The bracket mixes signs
/// and magnitudes, so the three groups are accumulated smallest first.
pub fn phi(sol: &PainleveSolution, u: f64, v: f64) -> f64 {
    let tu = sol.tails_at(u);
    let tv = sol.tails_at(v);
    phi_from_parts(
        tu.g,
        tu.gp,
        sol.q_at(u).powi(2),
        tv.g,
        tv.gp,
        2.0 * tv.g + tv.g1p - tv.g2p,
        sol.q_at(v).powi(2),
    )
}

#[allow(clippy::too_many_arguments)]
fn phi_from_parts(g_u: f64, gp_u: f64, q2u: f64, g_v: f64, gp_v: f64, b_v: f64, q2v: f64) -> f64 {
    let mut terms = [
        0.25 * gp_u * gp_u * gp_v * gp_v,
        q2u * (0.25 * q2v - 0.5 * gp_v * gp_v),
        gp_u * b_v,
    ];
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let bracket = terms[0] + terms[1] + terms[2];
    (g_u + g_v).exp() * bracket
}

/// The series value at separation t, through the requested order.
pub fn joint_series(
    sol: &PainleveSolution,
    t: f64,
    u: f64,
    v: f64,
    order: SeriesOrder,
) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("series: separation t must be positive"));
    }
    let tu = sol.tails_at(u);
    let tv = sol.tails_at(v);
    let f_u = tu.g.exp();
    let f_v = tv.g.exp();
    let mut p = f_u * f_v + (f_u * tu.gp) * (f_v * tv.gp) / (t * t);
    if order == SeriesOrder::Four {
        p += (phi(sol, u, v) + phi(sol, v, u)) / (t * t * t * t);
    }
    Ok(p)
}

/// Trapezoidal weights for n uniform nodes of spacing `step`.
fn trapezoid_weights(n: usize, step: f64) -> Vec<f64> {
    let mut w = vec![step; n];
    w[0] = 0.5 * step;
    w[n - 1] = 0.5 * step;
    w
}

fn uniform_grid(window: f64, mesh: f64) -> (Vec<f64>, f64) {
    let n = (2.0 * window / mesh).round() as usize + 1;
    let step = 2.0 * window / (n - 1) as f64;
    let grid = (0..n).map(|i| -window + step * i as f64).collect();
    (grid, step)
}

/// Covariance of (A(0), A(t)) by Hoeffding's identity: the double integral
/// of P(u, v) - F(u)F(v) over [-window, window]^2, with joint values from
/// the Fredholm route.
pub fn covariance_exact(
    sol: &PainleveSolution,
    t: f64,
    window: f64,
    mesh: f64,
) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid("covariance: separation t must be positive"));
    }
    if !(8.0..=10.0).contains(&window) {
        return Err(Error::invalid("covariance: window must lie in [8, 10]"));
    }
    if !(mesh > 0.0 && mesh <= 0.25) {
        return Err(Error::invalid("covariance: mesh must lie in (0, 0.25]"));
    }
    let (grid, step) = uniform_grid(window, mesh);
    let w = trapezoid_weights(grid.len(), step);
    let mut spec = KernelSpec::new([0.0, t], [0.0, 0.0]);
    spec.quad_order = COVARIANCE_QUAD_ORDER;
    let joint = joint_cdf_grid(&spec, &grid, &grid)?;
    let f2: Vec<f64> = grid.iter().map(|&x| sol.f2_cdf(x)).collect();
    let mut cov = 0.0;
    for (i, row) in joint.iter().enumerate() {
        let mut inner = 0.0;
        for (j, &p) in row.iter().enumerate() {
            inner += w[j] * (p - f2[i] * f2[j]);
        }
        cov += w[i] * inner;
    }
    Ok(cov)
}

/// The fourth-order covariance constant c = 2 * double integral of Phi.
pub fn c_constant(sol: &PainleveSolution, window: f64, mesh: f64) -> Result<f64> {
    if !(window >= 8.0) || !window.is_finite() {
        return Err(Error::invalid("c: window must be at least 8"));
    }
    if !(mesh > 0.0 && mesh <= 0.1) {
        return Err(Error::invalid("c: mesh must lie in (0, 0.1]"));
    }
    let (grid, step) = uniform_grid(window, mesh);
    let w = trapezoid_weights(grid.len(), step);
    // One pass of tail quadratures per grid value; the double loop is then
    // pure arithmetic.
    struct Point {
        g: f64,
        gp: f64,
        b: f64,
        q2: f64,
    }
    let pts: Vec<Point> = grid
        .iter()
        .map(|&x| {
            let tl = sol.tails_at(x);
            Point {
                g: tl.g,
                gp: tl.gp,
                b: 2.0 * tl.g + tl.g1p - tl.g2p,
                q2: sol.q_at(x).powi(2),
            }
        })
        .collect();
    let mut total = 0.0;
    for (i, pu) in pts.iter().enumerate() {
        let mut inner = 0.0;
        for (j, pv) in pts.iter().enumerate() {
            inner += w[j] * phi_from_parts(pu.g, pu.gp, pu.q2, pv.g, pv.gp, pv.b, pv.q2);
        }
        total += w[i] * inner;
    }
    Ok(2.0 * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::joint_cdf;
    use crate::numerics::composite_gauss_legendre;
    use crate::painleve::{solve_hastings_mcleod, SolverOptions};
    use std::sync::OnceLock;

    fn sol() -> &'static PainleveSolution {
        static SOL: OnceLock<PainleveSolution> = OnceLock::new();
        SOL.get_or_init(|| solve_hastings_mcleod(&SolverOptions::default()).unwrap())
    }

    #[test]
    fn terms_satisfy_structural_identities() {
        let t = ExpansionTerms::at(sol(), -1.0, 0.5).unwrap();
        assert_eq!(t.h2, t.gp_u * t.gp_v);
        assert_eq!(t.f4, t.h4 + 0.5 * t.h2 * t.h2);
        let f2f2 = (t.g_u + t.g_v).exp();
        assert!(
            (t.phi_uv + t.phi_vu - f2f2 * t.f4).abs() < 1e-8,
            "phi sum {:.3e} vs F*F*f4 {:.3e}",
            t.phi_uv + t.phi_vu,
            f2f2 * t.f4
        );
    }

    #[test]
    fn h2_decays_and_is_symmetric() {
        assert!(h2_term(sol(), 8.0, 0.0).abs() < 1e-14);
        let a = h2_term(sol(), -1.3, 0.4);
        let b = h2_term(sol(), 0.4, -1.3);
        assert_eq!(a, b);
    }

    #[test]
    fn h2_survives_grid_refinement() {
        let coarse = solve_hastings_mcleod(&SolverOptions {
            n_nodes: 9001,
            ..SolverOptions::default()
        })
        .unwrap();
        let a = h2_term(sol(), 0.0, 0.0);
        let b = h2_term(&coarse, 0.0, 0.0);
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn h4_vanishes_far_right_and_is_symmetric() {
        let far = h4_term(sol(), 8.0, 8.0).unwrap();
        assert!(far.abs() < 1e-12, "h4(8,8) = {far:e}");
        let a = h4_term(sol(), -1.0, 0.5).unwrap();
        let b = h4_term(sol(), 0.5, -1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phi_identity_on_grid() {
        // Phi(u,v) + Phi(v,u) = F(u)F(v) f4(u,v) on a 5x5 grid.
        for i in 0..5 {
            for j in 0..5 {
                let u = -3.0 + 1.25 * i as f64;
                let v = -3.0 + 1.25 * j as f64;
                let t = ExpansionTerms::at(sol(), u, v).unwrap();
                let f2f2 = (t.g_u + t.g_v).exp();
                assert!(
                    (t.phi_uv + t.phi_vu - f2f2 * t.f4).abs() < 1e-8,
                    "identity off at ({u}, {v})"
                );
            }
        }
    }

    #[test]
    fn phi_decays_in_each_regime() {
        assert!(phi(sol(), 8.0, 0.0).abs() < 1e-10);
        assert!(phi(sol(), 0.0, 8.0).abs() < 1e-10);
        // Antidiagonal decay: both factors fade, one through F, one
        // through the tails.
        assert!(phi(sol(), -6.0, 6.0).abs() < 1e-6);
    }

    #[test]
    fn series_collapses_at_huge_separation() {
        let f0 = sol().f2_cdf(0.0);
        let s = joint_series(sol(), 1e3, 0.0, 0.0, SeriesOrder::Two).unwrap();
        assert!((s - f0 * f0).abs() < 1e-6);
    }

    #[test]
    fn series_is_symmetric_in_thresholds() {
        for order in [SeriesOrder::Two, SeriesOrder::Four] {
            let a = joint_series(sol(), 3.0, -0.7, 1.2, order).unwrap();
            let b = joint_series(sol(), 3.0, 1.2, -0.7, order).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fourth_order_improves_on_second_against_fredholm() {
        let exact = joint_cdf(&KernelSpec::new([0.0, 5.0], [0.0, 0.0]))
            .unwrap()
            .value;
        let s2 = joint_series(sol(), 5.0, 0.0, 0.0, SeriesOrder::Two).unwrap();
        let s4 = joint_series(sol(), 5.0, 0.0, 0.0, SeriesOrder::Four).unwrap();
        assert!(
            (s4 - exact).abs() <= (s2 - exact).abs(),
            "order 4 off by {:.3e}, order 2 by {:.3e}",
            s4 - exact,
            s2 - exact
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(joint_series(sol(), 0.0, 0.0, 0.0, SeriesOrder::Two).is_err());
        assert!(joint_series(sol(), -1.0, 0.0, 0.0, SeriesOrder::Four).is_err());
        assert!(covariance_exact(sol(), 2.0, 4.0, 0.25).is_err());
        assert!(covariance_exact(sol(), 2.0, 8.0, 0.4).is_err());
        assert!(c_constant(sol(), 8.0, 0.2).is_err());
        assert!(c_constant(sol(), 4.0, 0.1).is_err());
    }

    #[test]
    fn c_constant_is_stable_under_refinement() {
        let base = c_constant(sol(), 8.0, 0.1).unwrap();
        let fine = c_constant(sol(), 8.0, 0.05).unwrap();
        let wide = c_constant(sol(), 10.0, 0.1).unwrap();
        assert!(
            ((base - fine) / base).abs() < 1e-4,
            "mesh halving moved c from {base} to {fine}"
        );
        assert!(
            ((base - wide) / base).abs() < 1e-5,
            "window widening moved c from {base} to {wide}"
        );
    }

    #[test]
    fn c_constant_matches_separable_reduction() {
        // The double integral collapses: with A = int F gp^2 du and
        // Q = int F q^2 du, integrating (F gp)' = F gp^2 - F q^2 over the
        // line gives Q = A, and int F gp = int F' = 1, so
        //   c/2 = A^2/4 + Q(Q/4 - A/2) + int F B = int F B,
        // with B = 2g + g1' - g2'. A one-dimensional quadrature of F B is
        // therefore an independent oracle for the two-dimensional code.
        let quad = composite_gauss_legendre(16, -9.0, 9.0, 36).unwrap();
        let mut c_half = 0.0;
        for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
            let tl = sol().tails_at(x);
            c_half += w * tl.g.exp() * (2.0 * tl.g + tl.g1p - tl.g2p);
        }
        let oracle = 2.0 * c_half;
        let c = c_constant(sol(), 8.0, 0.1).unwrap();
        assert!(
            (c - oracle).abs() < 1e-6 * oracle.abs().max(1.0),
            "grid c = {c}, separable oracle = {oracle}"
        );
    }

    #[test]
    fn covariance_tracks_leading_order() {
        let c6 = covariance_exact(sol(), 6.0, 8.0, 0.25).unwrap();
        let scaled = c6 * 36.0;
        // The t^-4 correction pulls the product below 1; it must sit
        // within the band the fourth-order constant predicts.
        let c = c_constant(sol(), 8.0, 0.1).unwrap();
        let predicted = 1.0 + c / 36.0;
        assert!(
            (scaled - predicted).abs() < 0.03,
            "cov(6)*36 = {scaled}, fourth-order prediction {predicted}"
        );
        let c2 = covariance_exact(sol(), 2.0, 8.0, 0.25).unwrap();
        assert!(c2 > c6 && c6 > 0.0, "cov(2) = {c2}, cov(6) = {c6}");
    }
}
