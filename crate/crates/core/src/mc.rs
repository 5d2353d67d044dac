//! Monte Carlo route: coupled Gaussian Hermitian matrix pairs.
//!
//! The two-matrix ensemble with weight
//!
//! ```text
//!     p(M1, M2) ∝ exp(-Tr(M1^2 + M2^2 - 2 c M1 M2) / 2),    0 <= c < 1,
//! ```
//!
//! sends its pair of top eigenvalues, under the edge rescaling below with
//! c = exp(-n^{-1/3} t), to the two-time law that the kernel module computes
//! by Fredholm determinants. Sampling rests on the conditional factorization:
//! completing the square,
//!
//! ```text
//!     Tr(M1^2 + M2^2 - 2 c M1 M2) = (1 - c^2) Tr M1^2 + Tr (M2 - c M1)^2,
//! ```
//!
//! so M1 is a standard Gaussian Hermitian matrix stretched by 1/sqrt(1-c^2),
//! and M2 = c M1 + G with G standard and independent of M1. ("Standard"
//! means weight exp(-Tr M^2 / 2): diagonal entries N(0,1), off-diagonal real
//! and imaginary parts N(0,1/2).) The weight is symmetric in M1 and M2, so
//! both marginals carry the same 1/sqrt(1-c^2) stretch and the edge map
//!
//! ```text
//!     u = n^{1/6} (lambda_max sqrt(1-c^2) - 2 sqrt(n))
//! ```
//!
//! puts the top eigenvalue of either matrix on the order-one scale where its
//! marginal law is the one-matrix edge law, at every c.
//!
//! The factorization also yields an exact finite-n tail bound. For c >= 0
//! and any unit vector x, x*M2x = c x*M1x + x*Gx, so on the event
//! lambda_max(M1) <= beta maximizing over x gives
//! lambda_max(M2) <= c beta + lambda_max(G); since G is independent of M1,
//!
//! ```text
//!     P(lambda_max(M2) >= alpha | lambda_max(M1) <= beta)
//!         <= P(lambda_max(G) >= alpha - c beta).
//! ```
//!
//! Writing alpha at rescaled level a and beta at rescaled level -z, the right
//! side is the standard edge statistic u_G = n^{1/6}(lambda_max(G) - 2 sqrt n)
//! against the threshold
//!
//! ```text
//!     u~ = 2 n^{2/3} (sqrt((1-c)/(1+c)) - 1) + (a + c z) / sqrt(1-c^2).
//! ```
//!
//! The first term is nonpositive and of order n^{2/3}, so at fixed c > 0 and
//! large n the bound is exact but loose: the threshold escapes into the left
//! tail and the right side saturates near 1. As c -> 0 it sharpens into the
//! equality of independent copies, u~ = a. [`conditional_bound_check`]
//! estimates both sides by simple rejection conditioning, which is unbiased
//! and adequate for conditioning events of a few percent or more.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, HermitianMatrix, RandomStream};

/// Mixed into the seed for the unconditional pass of
/// [`conditional_bound_check`], so that the two probability estimates never
/// share a substream.
const UNCOUPLED_STREAM_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Parameters of one coupled-pair sampling run. The coupling strength is
/// derived, not stored: c = exp(-n^{-1/3} t), so t > 0 keeps c in (0, 1)
/// and t = +inf decouples the pair exactly (c = 0).
#[derive(Debug, Clone, Copy)]
pub struct CoupledEnsembleConfig {
    /// Matrix size, at least 2.
    pub n: usize,
    /// Rescaled time separation, positive; +inf means independent matrices.
    pub t: f64,
    /// Number of pairs to draw, at least 1.
    pub samples: usize,
    /// RNG seed; draw k uses the substream (seed, k), so batches are
    /// reproducible and independent of evaluation order.
    pub seed: u64,
}

impl CoupledEnsembleConfig {
    pub fn new(n: usize, t: f64, samples: usize, seed: u64) -> Result<Self> {
        let config = CoupledEnsembleConfig { n, t, samples, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("coupled ensemble: matrix size must be at least 2"));
        }
        if self.t.is_nan() || self.t <= 0.0 {
            return Err(Error::invalid(
                "coupled ensemble: time separation must be positive (+inf for independent matrices)",
            ));
        }
        if self.samples == 0 {
            return Err(Error::invalid("coupled ensemble: sample count must be at least 1"));
        }
        Ok(())
    }

    /// Coupling strength c = exp(-n^{-1/3} t), in [0, 1) for valid configs.
    pub fn coupling(&self) -> f64 {
        (-self.t * (self.n as f64).powf(-1.0 / 3.0)).exp()
    }
}

/// Rescaled top-eigenvalue pairs (A0, At), one per draw, in draw order.
#[derive(Debug, Clone)]
pub struct CoupledSampleBatch {
    pub pairs: Vec<(f64, f64)>,
    pub config: CoupledEnsembleConfig,
}

/// Fill an n x n matrix from the standard Gaussian Hermitian weight
/// exp(-Tr M^2 / 2): diagonal N(0,1), off-diagonal re and im N(0,1/2).
pub fn standard_hermitian(n: usize, stream: &mut RandomStream) -> HermitianMatrix {
    let mut m = HermitianMatrix::zeros(n);
    for i in 0..n {
        m.set_pair(i, i, stream.gaussian(), 0.0);
        for j in (i + 1)..n {
            let (re, im) = stream.gaussian_pair();
            m.set_pair(i, j, re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
        }
    }
    m
}

/// Draw one coupled pair at coupling c and return both spectra, ascending.
///
/// M1 is standard Gaussian Hermitian stretched by 1/sqrt(1-c^2); M2 = c M1 + G
/// with G standard, which reproduces the joint weight
/// exp(-Tr(M1^2 + M2^2 - 2 c M1 M2)/2).
pub fn sample_coupled_pair(
    n: usize,
    c: f64,
    stream: &mut RandomStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::invalid("coupled pair: matrix size must be at least 2"));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::invalid("coupled pair: coupling must lie in [0, 1)"));
    }
    let mut m1 = standard_hermitian(n, stream);
    m1.scale(1.0 / (1.0 - c * c).sqrt());
    let mut m2 = standard_hermitian(n, stream);
    m2.axpy(c, &m1);
    let eigs1 = hermitian_eigenvalues(&m1)?;
    let eigs2 = hermitian_eigenvalues(&m2)?;
    Ok((eigs1, eigs2))
}

/// Map the top eigenvalue of a coupled matrix to the edge scale:
/// u = n^{1/6} (lambda sqrt(1-c^2) - 2 sqrt n).
///
/// The sqrt(1-c^2) factor undoes the marginal stretch of the coupled
/// ensemble, so the same function with c = 0 rescales the standard ensemble.
pub fn rescale_edge(eig_max: f64, n: usize, c: f64) -> f64 {
    let n_f = n as f64;
    n_f.powf(1.0 / 6.0) * (eig_max * (1.0 - c * c).sqrt() - 2.0 * n_f.sqrt())
}

impl CoupledSampleBatch {
    /// Draw `config.samples` coupled pairs and rescale both top eigenvalues.
    pub fn generate(config: &CoupledEnsembleConfig) -> Result<Self> {
        config.validate()?;
        let c = config.coupling();
        let mut pairs = Vec::with_capacity(config.samples);
        for draw in 0..config.samples {
            let mut stream = RandomStream::new(config.seed, draw as u64);
            let (eigs1, eigs2) = sample_coupled_pair(config.n, c, &mut stream)?;
            let a0 = rescale_edge(eigs1[config.n - 1], config.n, c);
            let at = rescale_edge(eigs2[config.n - 1], config.n, c);
            pairs.push((a0, at));
        }
        Ok(CoupledSampleBatch {
            pairs,
            config: *config,
        })
    }

    /// Write the batch as CSV with columns draw_index, A0, At.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer
            .write_record(["draw_index", "A0", "At"])
            .map_err(csv_error)?;
        for (draw, (a0, at)) in self.pairs.iter().enumerate() {
            writer
                .write_record([draw.to_string(), a0.to_string(), at.to_string()])
                .map_err(csv_error)?;
        }
        writer.flush().map_err(Error::Io)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Fraction of pairs with A0 <= u and At <= v, with its binomial standard
/// error. Panics on an empty batch (generate never produces one).
pub fn empirical_joint_cdf(batch: &CoupledSampleBatch, u: f64, v: f64) -> (f64, f64) {
    let total = batch.pairs.len();
    assert!(total > 0, "empirical_joint_cdf: empty batch");
    let hits = batch
        .pairs
        .iter()
        .filter(|(a0, at)| *a0 <= u && *at <= v)
        .count();
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Both sides of the conditional tail bound, with their Monte Carlo errors.
#[derive(Debug, Clone, Copy)]
pub struct BoundCheck {
    /// P(At >= a | A0 <= -z), estimated by rejection over the coupled pair.
    pub lhs: f64,
    /// P(u_G >= u~) over the standard ensemble, the exact upper bound.
    pub rhs: f64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
    /// lhs <= rhs + 3 sqrt(lhs_stderr^2 + rhs_stderr^2).
    pub holds: bool,
}

/// Estimate both sides of the tail bound
///
/// ```text
///     P(At >= a | A0 <= -z) <= P(u_G >= u~),
///     u~ = 2 n^{2/3} (sqrt((1-c)/(1+c)) - 1) + (a + c z) / sqrt(1-c^2),
/// ```
///
/// with `samples` draws on each side; the right side runs on a salted seed so
/// the two estimates are independent. Errors when the conditioning event
/// A0 <= -z accepts fewer than 1e-3 of the draws.
pub fn conditional_bound_check(
    n: usize,
    c: f64,
    a: f64,
    z: f64,
    samples: usize,
    seed: u64,
) -> Result<BoundCheck> {
    if n < 2 {
        return Err(Error::invalid("bound check: matrix size must be at least 2"));
    }
    if !(0.0..1.0).contains(&c) {
        return Err(Error::invalid("bound check: coupling must lie in [0, 1)"));
    }
    if !a.is_finite() {
        return Err(Error::invalid("bound check: threshold a must be finite"));
    }
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::invalid("bound check: conditioning depth z must be positive"));
    }
    if samples == 0 {
        return Err(Error::invalid("bound check: sample count must be at least 1"));
    }

    let mut accepted = 0usize;
    let mut hits = 0usize;
    for draw in 0..samples {
        let mut stream = RandomStream::new(seed, draw as u64);
        let (eigs1, eigs2) = sample_coupled_pair(n, c, &mut stream)?;
        let a0 = rescale_edge(eigs1[n - 1], n, c);
        if a0 <= -z {
            accepted += 1;
            if rescale_edge(eigs2[n - 1], n, c) >= a {
                hits += 1;
            }
        }
    }
    if accepted == 0 || (accepted as f64) < 1e-3 * samples as f64 {
        return Err(Error::NoConvergence(format!(
            "bound check: conditioning accepted {accepted} of {samples} draws; lower z or raise samples"
        )));
    }
    let lhs = hits as f64 / accepted as f64;
    let lhs_stderr = (lhs * (1.0 - lhs) / accepted as f64).sqrt();

    let s = (1.0 - c * c).sqrt();
    let u_threshold =
        2.0 * (n as f64).powf(2.0 / 3.0) * ((1.0 - c) / s - 1.0) + (a + c * z) / s;
    let mut tail = 0usize;
    for draw in 0..samples {
        let mut stream = RandomStream::new(seed ^ UNCOUPLED_STREAM_SALT, draw as u64);
        let g = standard_hermitian(n, &mut stream);
        let eigs = hermitian_eigenvalues(&g)?;
        if rescale_edge(eigs[n - 1], n, 0.0) >= u_threshold {
            tail += 1;
        }
    }
    let rhs = tail as f64 / samples as f64;
    let rhs_stderr = (rhs * (1.0 - rhs) / samples as f64).sqrt();

    let combined = (lhs_stderr * lhs_stderr + rhs_stderr * rhs_stderr).sqrt();
    Ok(BoundCheck {
        lhs,
        rhs,
        lhs_stderr,
        rhs_stderr,
        holds: lhs <= rhs + 3.0 * combined,
    })
}
