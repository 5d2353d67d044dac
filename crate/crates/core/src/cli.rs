//! Command-line front end: every capability of the crate behind one binary
//! with CSV or JSON-lines output.
//!
//! Subcommands map one-to-one onto the library modules: `painleve-table`
//! (transcendent and one-time distribution), `joint` (two-time distribution
//! by determinant, series, or sampling), `pde-residual` (finite-difference
//! residual tables), `covariance` / `c-constant` (the two-time covariance
//! and its fourth-order constant), `mc-validate` (empirical vs determinant
//! vs series comparison), `mc-sample` (raw draws), and `bound-check` (the
//! conditional tail inequality). All flags are validated before any solve
//! starts; every command is deterministic for fixed flags, including the
//! sampling ones, whose seed is a flag with a fixed default.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cache;
use crate::error::{Error, Result};
use crate::expansion::{c_constant, covariance_exact, joint_series, SeriesOrder};
use crate::kernel::{joint_cdf, joint_cdf_grid, KernelSpec};
use crate::mc::{
    conditional_bound_check, empirical_joint_cdf, CoupledEnsembleConfig, CoupledSampleBatch,
};
use crate::painleve::{PainleveSolution, SolverOptions};
use crate::pde::{build_grid, pde_residual_uv, pde_residual_xy, GridSource};

/// Output schema version, stamped into every JSON record as "spec_version".
const SPEC_VERSION: &str = "1";

/// Hard cap on emitted rows, so a typo in a range flag fails fast instead of
/// filling the disk.
const MAX_ROWS: usize = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "airy-process",
    version,
    about = "One- and two-time distributions of the Airy process: Painleve, Fredholm determinant, and matrix Monte Carlo routes"
)]
pub struct Cli {
    /// Output format for records.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,

    /// Write records to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// RFC 4180 CSV with a header row.
    Csv,
    /// One JSON object per record.
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum JointMethod {
    /// Fredholm determinant of the extended kernel.
    Exact,
    /// Factorized law plus the 1/t^2 correction.
    Series2,
    /// Series through 1/t^4.
    Series4,
    /// Coupled-matrix sampling.
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResidualForm {
    /// Threshold coordinates (u, v).
    Uv,
    /// Rotated coordinates x = u - v, y = u + v.
    Xy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ResidualSource {
    /// Grid values from Fredholm determinants.
    Exact,
    /// Grid values from the fourth-order series.
    Series,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate q, q', the tail integrals, and the one-time distribution.
    PainleveTable {
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },

    /// Two-time distribution P(A(0) <= u, A(t) <= v) by the chosen method.
    Joint {
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, allow_negative_numbers = true)]
        u: f64,
        #[arg(long, allow_negative_numbers = true)]
        v: f64,
        #[arg(long, value_enum, default_value_t = JointMethod::Exact)]
        method: JointMethod,
        /// Matrix size (mc method).
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Draw count (mc method).
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        /// RNG seed (mc method).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Half-line truncation length (exact method).
        #[arg(long)]
        truncation: Option<f64>,
        /// Quadrature nodes per half-line (exact method).
        #[arg(long)]
        quad_order: Option<usize>,
        /// Node-density control for the complex contour (exact method).
        #[arg(long)]
        z_quad_order: Option<usize>,
    },

    /// Finite-difference residual of the two-time PDE on a grid.
    PdeResidual {
        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        u_from: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        u_to: f64,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        v_from: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        v_to: f64,
        #[arg(long, default_value_t = 0.1)]
        mesh: f64,
        /// Step of the t-differences; defaults to the (u, v) mesh.
        #[arg(long)]
        t_mesh: Option<f64>,
        #[arg(long, value_enum, default_value_t = ResidualForm::Uv)]
        form: ResidualForm,
        #[arg(long, value_enum, default_value_t = ResidualSource::Series)]
        source: ResidualSource,
    },

    /// Covariance of A(0) and A(t) from the exact two-time law.
    Covariance {
        /// Separation(s), comma separated.
        #[arg(
            long = "t",
            value_delimiter = ',',
            default_value = "6",
            allow_hyphen_values = true
        )]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 8.0)]
        window: f64,
        #[arg(long, default_value_t = 0.25)]
        mesh: f64,
    },

    /// The constant multiplying 1/t^4 in the covariance expansion.
    CConstant {
        #[arg(long, default_value_t = 8.0)]
        window: f64,
        #[arg(long, default_value_t = 0.05)]
        mesh: f64,
    },

    /// Compare empirical, determinant, and series joint values on a grid.
    McValidate {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Thresholds, comma separated; the grid is their cartesian square.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "-1,0,1",
            allow_hyphen_values = true
        )]
        grid: Vec<f64>,
    },

    /// Emit raw rescaled eigenvalue pairs, one row per draw.
    McSample {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },

    /// Check the conditional tail bound at one (a, z) pair.
    BoundCheck {
        #[arg(long, default_value_t = 30)]
        n: usize,
        /// Coupling strength, in [0, 1).
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct PainleveRow {
    alpha: f64,
    q: f64,
    qp: f64,
    gp: f64,
    g: f64,
    g1p: f64,
    g2p: f64,
    f2: f64,
    f2p: f64,
}

#[derive(Serialize)]
struct JointRow {
    t: f64,
    u: f64,
    v: f64,
    method: &'static str,
    value: f64,
    error_estimate: f64,
}

#[derive(Serialize)]
struct ResidualRow {
    t: f64,
    u: f64,
    v: f64,
    form: &'static str,
    source: &'static str,
    lhs: f64,
    rhs: f64,
    residual: f64,
    scale: f64,
    relative_residual: f64,
}

#[derive(Serialize)]
struct CovarianceRow {
    t: f64,
    covariance: f64,
    covariance_times_t2: f64,
    window: f64,
    mesh: f64,
}

#[derive(Serialize)]
struct CConstantRow {
    c: f64,
    c_coarse: f64,
    refinement_gap: f64,
    window: f64,
    mesh: f64,
}

#[derive(Serialize)]
struct McValidateRow {
    u: f64,
    v: f64,
    empirical: f64,
    stderr: f64,
    exact: f64,
    series4: f64,
}

#[derive(Serialize)]
struct DrawRow {
    draw_index: usize,
    #[serde(rename = "A0")]
    a0: f64,
    #[serde(rename = "At")]
    at: f64,
}

#[derive(Serialize)]
struct BoundRow {
    n: usize,
    c: f64,
    a: f64,
    z: f64,
    lhs: f64,
    lhs_stderr: f64,
    rhs: f64,
    rhs_stderr: f64,
    holds: bool,
}

/// Parse the process arguments, run, and map the outcome to an exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

/// Run one parsed invocation, writing records to `--output` or stdout.
pub fn execute(cli: &Cli) -> Result<()> {
    let mut out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout())),
    };
    dispatch(cli, &mut *out)?;
    out.flush().map_err(Error::Io)
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let format = cli.format;
    match &cli.command {
        Command::PainleveTable { from, to, step } => cmd_painleve_table(*from, *to, *step, format, out),
        Command::Joint {
            t,
            u,
            v,
            method,
            n,
            samples,
            seed,
            truncation,
            quad_order,
            z_quad_order,
        } => cmd_joint(
            *t,
            *u,
            *v,
            *method,
            *n,
            *samples,
            *seed,
            (*truncation, *quad_order, *z_quad_order),
            format,
            out,
        ),
        Command::PdeResidual {
            t,
            u_from,
            u_to,
            v_from,
            v_to,
            mesh,
            t_mesh,
            form,
            source,
        } => cmd_pde_residual(
            *t,
            (*u_from, *u_to),
            (*v_from, *v_to),
            *mesh,
            t_mesh.unwrap_or(*mesh),
            *form,
            *source,
            format,
            out,
        ),
        Command::Covariance {
            t_list,
            window,
            mesh,
        } => cmd_covariance(t_list, *window, *mesh, format, out),
        Command::CConstant { window, mesh } => cmd_c_constant(*window, *mesh, format, out),
        Command::McValidate {
            n,
            t,
            samples,
            seed,
            grid,
        } => cmd_mc_validate(*n, *t, *samples, *seed, grid, format, out),
        Command::McSample {
            n,
            t,
            samples,
            seed,
        } => cmd_mc_sample(*n, *t, *samples, *seed, format, out),
        Command::BoundCheck {
            n,
            c,
            a,
            z,
            samples,
            seed,
        } => cmd_bound_check(*n, *c, *a, *z, *samples, *seed, format, out),
    }
}

/// The default-resolution transcendent, from the cache when one is
/// configured.
fn solution() -> Result<PainleveSolution> {
    cache::load_or_solve(&SolverOptions::default())
}

fn emit<T: Serialize>(format: OutputFormat, out: &mut dyn Write, rows: &[T]) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_writer(&mut *out);
            for row in rows {
                writer.serialize(row).map_err(output_error)?;
            }
            writer.flush().map_err(Error::Io)?;
        }
        OutputFormat::Json => {
            for row in rows {
                let mut record = serde_json::to_value(row).map_err(output_error)?;
                record
                    .as_object_mut()
                    .expect("records serialize to objects")
                    .insert("spec_version".to_string(), SPEC_VERSION.into());
                let line = serde_json::to_string(&record).map_err(output_error)?;
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn output_error(e: impl std::error::Error + Send + Sync + 'static) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn cmd_painleve_table(
    from: f64,
    to: f64,
    step: f64,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    if !from.is_finite() || !to.is_finite() || from > to {
        return Err(Error::invalid("painleve-table: need finite from <= to"));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid("painleve-table: step must be positive"));
    }
    let count = ((to - from) / step).floor() as usize + 1;
    if count > MAX_ROWS {
        return Err(Error::invalid("painleve-table: more than 100000 rows requested"));
    }
    let sol = solution()?;
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let alpha = from + k as f64 * step;
        let tails = sol.tails_at(alpha);
        let f2 = tails.g.exp();
        rows.push(PainleveRow {
            alpha,
            q: sol.q_at(alpha),
            qp: sol.qp_at(alpha),
            gp: tails.gp,
            g: tails.g,
            g1p: tails.g1p,
            g2p: tails.g2p,
            f2,
            f2p: f2 * tails.gp,
        });
    }
    emit(format, out, &rows)
}

#[allow(clippy::too_many_arguments)]
fn cmd_joint(
    t: f64,
    u: f64,
    v: f64,
    method: JointMethod,
    n: usize,
    samples: usize,
    seed: u64,
    kernel_overrides: (Option<f64>, Option<usize>, Option<usize>),
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    let row = match method {
        JointMethod::Exact => {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(Error::invalid("joint: separation t must be finite and >= 0"));
            }
            let mut spec = KernelSpec::new([0.0, t], [u, v]);
            if let Some(l) = kernel_overrides.0 {
                spec.truncation = l;
            }
            if let Some(m) = kernel_overrides.1 {
                spec.quad_order = m;
            }
            if let Some(m) = kernel_overrides.2 {
                spec.z_quad_order = m;
            }
            let result = joint_cdf(&spec)?;
            JointRow {
                t,
                u,
                v,
                method: "exact",
                value: result.value,
                error_estimate: result.refinement_error,
            }
        }
        JointMethod::Series2 | JointMethod::Series4 => {
            let sol = solution()?;
            let p2 = joint_series(&sol, t, u, v, SeriesOrder::Two)?;
            let p4 = joint_series(&sol, t, u, v, SeriesOrder::Four)?;
            // The first omitted term of the short series is the fourth-order
            // term itself; for the long series, scale it down by the t^-2
            // ladder step as a proxy for the sixth order.
            match method {
                JointMethod::Series2 => JointRow {
                    t,
                    u,
                    v,
                    method: "series2",
                    value: p2,
                    error_estimate: (p4 - p2).abs(),
                },
                _ => JointRow {
                    t,
                    u,
                    v,
                    method: "series4",
                    value: p4,
                    error_estimate: (p4 - p2).abs() / (t * t),
                },
            }
        }
        JointMethod::Mc => {
            let config = CoupledEnsembleConfig::new(n, t, samples, seed)?;
            let batch = CoupledSampleBatch::generate(&config)?;
            let (value, stderr) = empirical_joint_cdf(&batch, u, v);
            JointRow {
                t,
                u,
                v,
                method: "mc",
                value,
                error_estimate: stderr,
            }
        }
    };
    emit(format, out, &[row])
}

#[allow(clippy::too_many_arguments)]
fn cmd_pde_residual(
    t: f64,
    u_range: (f64, f64),
    v_range: (f64, f64),
    mesh: f64,
    t_mesh: f64,
    form: ResidualForm,
    source: ResidualSource,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    let sol = solution()?;
    let grid_source = match source {
        ResidualSource::Exact => GridSource::Exact,
        ResidualSource::Series => GridSource::Series4,
    };
    let grid = build_grid(&sol, t, u_range, v_range, mesh, t_mesh, grid_source)?;
    let (form_name, source_name) = (
        match form {
            ResidualForm::Uv => "uv",
            ResidualForm::Xy => "xy",
        },
        match source {
            ResidualSource::Exact => "exact",
            ResidualSource::Series => "series",
        },
    );
    if (grid.nu - 4) * (grid.nv - 4) > MAX_ROWS {
        return Err(Error::invalid("pde-residual: more than 100000 rows requested"));
    }
    let mut rows = Vec::new();
    for iu in 2..grid.nu - 2 {
        for iv in 2..grid.nv - 2 {
            let report = match form {
                ResidualForm::Uv => pde_residual_uv(&grid, iu, iv)?,
                ResidualForm::Xy => pde_residual_xy(&grid, iu, iv)?,
            };
            rows.push(ResidualRow {
                t: report.point.0,
                u: report.point.1,
                v: report.point.2,
                form: form_name,
                source: source_name,
                lhs: report.lhs,
                rhs: report.rhs,
                residual: report.residual,
                scale: report.scale,
                relative_residual: report.relative_residual,
            });
        }
    }
    emit(format, out, &rows)
}

fn cmd_covariance(
    t_list: &[f64],
    window: f64,
    mesh: f64,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    if t_list.is_empty() {
        return Err(Error::invalid("covariance: need at least one separation"));
    }
    let sol = solution()?;
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let covariance = covariance_exact(&sol, t, window, mesh)?;
        rows.push(CovarianceRow {
            t,
            covariance,
            covariance_times_t2: covariance * t * t,
            window,
            mesh,
        });
    }
    emit(format, out, &rows)
}

fn cmd_c_constant(
    window: f64,
    mesh: f64,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    let sol = solution()?;
    let coarse = c_constant(&sol, window, mesh)?;
    let fine = c_constant(&sol, window, mesh / 2.0)?;
    emit(
        format,
        out,
        &[CConstantRow {
            c: fine,
            c_coarse: coarse,
            refinement_gap: (fine - coarse).abs(),
            window,
            mesh,
        }],
    )
}

fn cmd_mc_validate(
    n: usize,
    t: f64,
    samples: usize,
    seed: u64,
    grid: &[f64],
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("mc-validate: empty threshold grid"));
    }
    let config = CoupledEnsembleConfig::new(n, t, samples, seed)?;
    let sol = solution()?;
    let spec = KernelSpec::new([0.0, t], [grid[0], grid[0]]);
    let exact = joint_cdf_grid(&spec, grid, grid)?;
    let batch = CoupledSampleBatch::generate(&config)?;
    let mut rows = Vec::with_capacity(grid.len() * grid.len());
    for (i, &u) in grid.iter().enumerate() {
        for (j, &v) in grid.iter().enumerate() {
            let (empirical, stderr) = empirical_joint_cdf(&batch, u, v);
            rows.push(McValidateRow {
                u,
                v,
                empirical,
                stderr,
                exact: exact[i][j],
                series4: joint_series(&sol, t, u, v, SeriesOrder::Four)?,
            });
        }
    }
    emit(format, out, &rows)
}

fn cmd_mc_sample(
    n: usize,
    t: f64,
    samples: usize,
    seed: u64,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    if samples > MAX_ROWS {
        return Err(Error::invalid("mc-sample: more than 100000 rows requested"));
    }
    let config = CoupledEnsembleConfig::new(n, t, samples, seed)?;
    let batch = CoupledSampleBatch::generate(&config)?;
    match format {
        OutputFormat::Csv => batch.write_csv(out),
        OutputFormat::Json => {
            let rows: Vec<DrawRow> = batch
                .pairs
                .iter()
                .enumerate()
                .map(|(draw_index, &(a0, at))| DrawRow { draw_index, a0, at })
                .collect();
            emit(format, out, &rows)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound_check(
    n: usize,
    c: f64,
    a: f64,
    z: f64,
    samples: usize,
    seed: u64,
    format: OutputFormat,
    out: &mut dyn Write,
) -> Result<()> {
    let check = conditional_bound_check(n, c, a, z, samples, seed)?;
    emit(
        format,
        out,
        &[BoundRow {
            n,
            c,
            a,
            z,
            lhs: check.lhs,
            lhs_stderr: check.lhs_stderr,
            rhs: check.rhs,
            rhs_stderr: check.rhs_stderr,
            holds: check.holds,
        }],
    )
}
