//! Initial conditions and their projection onto the degrees of freedom,
//! exact periodic solutions, discrete error norms, convergence studies,
//! amplitude retention, and the experiment driver.

use std::io::{self, Write};
use std::sync::Arc;

use num_complex::Complex64;

use crate::families::FamilySpec;
use crate::fmt_g17;
use crate::scheme;
use crate::types::{CourantNumber, Grid1D, SolutionState};
use crate::{Error, Result};

// Gauss-Legendre 5-point rule on [-1, 1], exact through degree 9.
const GL5_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

fn gl5_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for k in 0..5 {
        acc += GL5_WEIGHTS[k] * f(mid + half * GL5_NODES[k]);
    }
    acc * half
}

fn gl5_paneled<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, max_panel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    (0..n)
        .map(|k| gl5_segment(f, a + k as f64 * h, a + (k + 1) as f64 * h))
        .sum()
}

fn interval_overlap(a: f64, b: f64, left: f64, right: f64) -> f64 {
    (b.min(right) - a.max(left)).max(0.0)
}

// Integral of max(0, 1 - |x - center|/half_width) over [a, b].
fn triangle_integral(center: f64, half_width: f64, a: f64, b: f64) -> f64 {
    let cumulative = |x: f64| -> f64 {
        let x = x.clamp(center - half_width, center + half_width);
        if x <= center {
            let u = x - (center - half_width);
            u * u / (2.0 * half_width)
        } else {
            let t = x - center;
            half_width / 2.0 + t - t * t / (2.0 * half_width)
        }
    };
    cumulative(b) - cumulative(a)
}

/// Placement and scale of the three-shape test profile: a Gaussian hump, a
/// unit square pulse, and a triangular spike, disjointly placed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSuite {
    pub gauss_center: f64,
    pub gauss_width: f64,
    pub square_left: f64,
    pub square_right: f64,
    pub tri_center: f64,
    pub tri_half_width: f64,
}

impl Default for ShapeSuite {
    /// Placement sized for the [-5, 5] domain.
    fn default() -> Self {
        Self {
            gauss_center: -3.0,
            gauss_width: 0.4,
            square_left: -1.0,
            square_right: 0.0,
            tri_center: 2.5,
            tri_half_width: 0.4,
        }
    }
}

impl ShapeSuite {
    fn value(&self, x: f64) -> f64 {
        let g = ((x - self.gauss_center) / self.gauss_width).powi(2);
        let gauss = (-g).exp();
        let square = if x >= self.square_left && x < self.square_right {
            1.0
        } else {
            0.0
        };
        let tri = (1.0 - (x - self.tri_center).abs() / self.tri_half_width).max(0.0);
        gauss + square + tri
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        let gc = self.gauss_center;
        let gw = self.gauss_width;
        let gauss = |x: f64| (-((x - gc) / gw).powi(2)).exp();
        gl5_paneled(&gauss, a, b, gw / 8.0)
            + interval_overlap(a, b, self.square_left, self.square_right)
            + triangle_integral(self.tri_center, self.tri_half_width, a, b)
    }
}

/// A domain-periodic scalar profile used as initial data.
#[derive(Clone)]
pub enum InitialCondition {
    /// sin(2π·mode·(x − x_min)/L): `mode` full wavelengths across the domain.
    SineWave { mode: usize },
    /// Indicator of [left, right), height 1.
    SquareWave { left: f64, right: f64 },
    ShapeSuite(ShapeSuite),
    /// Arbitrary profile evaluated on the base domain; projected by
    /// quadrature, so it should be smooth within each cell.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for InitialCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InitialCondition::SineWave { mode } => write!(f, "SineWave {{ mode: {mode} }}"),
            InitialCondition::SquareWave { left, right } => {
                write!(f, "SquareWave {{ left: {left}, right: {right} }}")
            }
            InitialCondition::ShapeSuite(s) => write!(f, "ShapeSuite({s:?})"),
            InitialCondition::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl InitialCondition {
    pub fn sine(mode: usize) -> Self {
        InitialCondition::SineWave { mode }
    }

    /// Square pulse on [-1, 1], edges on interfaces of the 100-cell grid.
    pub fn square_default() -> Self {
        InitialCondition::SquareWave {
            left: -1.0,
            right: 1.0,
        }
    }

    pub fn shapes() -> Self {
        InitialCondition::ShapeSuite(ShapeSuite::default())
    }

    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        InitialCondition::Custom(Arc::new(f))
    }

    /// Smoothness governs whether a measured convergence order is meaningful.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            InitialCondition::SineWave { .. } | InitialCondition::Custom(_)
        )
    }

    /// Profile value at any x, wrapping periodically into the domain.
    pub fn value(&self, grid: &Grid1D, x: f64) -> f64 {
        let x = grid.wrap_point(x);
        match self {
            InitialCondition::SineWave { mode } => {
                let w = 2.0 * std::f64::consts::PI * *mode as f64 / grid.length();
                (w * (x - grid.x_min())).sin()
            }
            InitialCondition::SquareWave { left, right } => {
                if x >= *left && x < *right {
                    1.0
                } else {
                    0.0
                }
            }
            InitialCondition::ShapeSuite(s) => s.value(x),
            InitialCondition::Custom(f) => f(x),
        }
    }

    // Exact (or quadrature) integral over [a, b] within the base domain.
    fn segment_integral(&self, grid: &Grid1D, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            InitialCondition::SineWave { mode } => {
                let w = 2.0 * std::f64::consts::PI * *mode as f64 / grid.length();
                ((w * (a - grid.x_min())).cos() - (w * (b - grid.x_min())).cos()) / w
            }
            InitialCondition::SquareWave { left, right } => interval_overlap(a, b, *left, *right),
            InitialCondition::ShapeSuite(s) => s.integral(a, b),
            InitialCondition::Custom(f) => gl5_paneled(&|x| f(x), a, b, (b - a) / 8.0),
        }
    }

    fn validate_on(&self, grid: &Grid1D) -> Result<()> {
        match self {
            InitialCondition::SineWave { mode } => {
                if *mode == 0 || 2 * *mode > grid.n_cells() {
                    return Err(Error::UnresolvableMode {
                        mode: *mode,
                        n_cells: grid.n_cells(),
                    });
                }
            }
            InitialCondition::SquareWave { left, right }
                if !(left < right && *left >= grid.x_min() && *right <= grid.x_max()) =>
            {
                return Err(Error::InvalidExperiment(format!(
                    "square wave edges [{left}, {right}] must satisfy left < right within the domain"
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

// Integral of the periodic extension over an arbitrary window of width <= L.
fn periodic_integral(ic: &InitialCondition, grid: &Grid1D, a: f64, b: f64) -> f64 {
    let width = b - a;
    let a0 = grid.wrap_point(a);
    let b0 = a0 + width;
    if b0 <= grid.x_max() {
        ic.segment_integral(grid, a0, b0)
    } else {
        ic.segment_integral(grid, a0, grid.x_max())
            + ic.segment_integral(grid, grid.x_min(), grid.x_min() + (b0 - grid.x_max()))
    }
}

fn project_shifted(ic: &InitialCondition, grid: &Grid1D, shift: f64) -> Result<SolutionState> {
    ic.validate_on(grid)?;
    let n = grid.n_cells();
    let point_values: Vec<f64> = (0..n)
        .map(|i| ic.value(grid, grid.right_interface(i) - shift))
        .collect();
    let averages: Vec<f64> = (0..n)
        .map(|i| {
            periodic_integral(ic, grid, grid.interface(i) - shift, grid.interface(i + 1) - shift)
                / grid.dx()
        })
        .collect();
    SolutionState::new(averages, point_values)
}

/// Projects the profile onto the degrees of freedom: point values by exact
/// evaluation at the interfaces, averages by exact antiderivative where one
/// exists (sine, square) and Gauss-Legendre quadrature otherwise.
pub fn project(ic: &InitialCondition, grid: &Grid1D) -> Result<SolutionState> {
    project_shifted(ic, grid, 0.0)
}

/// Projection of the exact advection solution q0(x − a·t) at time `t`.
pub fn exact_state(ic: &InitialCondition, grid: &Grid1D, t: f64, speed: f64) -> Result<SolutionState> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidExperiment(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    let shift = (speed * t).rem_euclid(grid.length());
    project_shifted(ic, grid, shift)
}

/// Discrete L1, L2, and Linf norms (L1 and L2 carry the dx weight).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormTriple {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Error norms of the averages and the point values, kept separate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub averages: NormTriple,
    pub point_values: NormTriple,
}

fn norms_of(errors: impl Iterator<Item = f64>, dx: f64) -> NormTriple {
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for e in errors {
        let a = e.abs();
        l1 += a;
        l2 += e * e;
        linf = linf.max(a);
    }
    NormTriple {
        l1: dx * l1,
        l2: (dx * l2).sqrt(),
        linf,
    }
}

/// Discrete error norms of `state` against `reference`.
pub fn error_norms(
    state: &SolutionState,
    reference: &SolutionState,
    grid: &Grid1D,
) -> Result<ErrorReport> {
    if state.n_cells() != reference.n_cells() || state.n_cells() != grid.n_cells() {
        return Err(Error::LengthMismatch {
            averages: state.n_cells(),
            point_values: reference.n_cells(),
        });
    }
    let dx = grid.dx();
    Ok(ErrorReport {
        averages: norms_of(
            state
                .averages()
                .iter()
                .zip(reference.averages())
                .map(|(a, b)| a - b),
            dx,
        ),
        point_values: norms_of(
            state
                .point_values()
                .iter()
                .zip(reference.point_values())
                .map(|(a, b)| a - b),
            dx,
        ),
    })
}

/// One grid level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub t_real: f64,
    pub errors: ErrorReport,
    /// Experimental order relative to the previous (coarser) row, per norm.
    pub eoc: Option<ErrorReport>,
    pub mass_drift: f64,
}

fn eoc_value(coarse: f64, fine: f64, n_coarse: usize, n_fine: usize) -> f64 {
    if !(coarse > 0.0 && fine > 0.0) {
        return f64::NAN;
    }
    (coarse / fine).ln() / (n_fine as f64 / n_coarse as f64).ln()
}

fn eoc_report(coarse: &ErrorReport, fine: &ErrorReport, n_coarse: usize, n_fine: usize) -> ErrorReport {
    let triple = |c: &NormTriple, f: &NormTriple| NormTriple {
        l1: eoc_value(c.l1, f.l1, n_coarse, n_fine),
        l2: eoc_value(c.l2, f.l2, n_coarse, n_fine),
        linf: eoc_value(c.linf, f.linf, n_coarse, n_fine),
    };
    ErrorReport {
        averages: triple(&coarse.averages, &fine.averages),
        point_values: triple(&coarse.point_values, &fine.point_values),
    }
}

/// Runs the scheme on a sequence of grids and reports errors and
/// experimental orders of convergence. Each grid is advanced to the step
/// count nearest `t_final` and compared against the exact solution at its own
/// realized time.
#[allow(clippy::too_many_arguments)]
pub fn convergence_study(
    ic: &InitialCondition,
    spec: &FamilySpec,
    nu: CourantNumber,
    speed: f64,
    t_final: f64,
    cell_counts: &[usize],
    x_min: f64,
    x_max: f64,
) -> Result<Vec<ConvergenceRow>> {
    if cell_counts.is_empty() {
        return Err(Error::EmptyInput("cell counts"));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(cell_counts.len());
    for &n in cell_counts {
        let grid = Grid1D::new(x_min, x_max, n)?;
        let run = run_experiment(&ExperimentConfig {
            family: *spec,
            nu,
            speed,
            grid,
            ic: ic.clone(),
            t_final,
            retention_mode: None,
        })?;
        let eoc = rows
            .last()
            .map(|prev| eoc_report(&prev.errors, &run.norms, prev.n_cells, n));
        rows.push(ConvergenceRow {
            n_cells: n,
            t_real: run.t_real,
            errors: run.norms,
            eoc,
            mass_drift: run.mass_drift,
        });
    }
    Ok(rows)
}

/// Complex Fourier coefficient of a sample sequence at the given mode.
pub fn fourier_coefficient(values: &[f64], mode: usize) -> Complex64 {
    let n = values.len();
    let w = -2.0 * std::f64::consts::PI * mode as f64 / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &v) in values.iter().enumerate() {
        acc += Complex64::from_polar(1.0, w * j as f64) * v;
    }
    acc
}

/// Magnitude of the averages' Fourier coefficient at `mode`, relative to the
/// same coefficient of `baseline`. Rejects a vanishing baseline.
pub fn amplitude_retention(
    state: &SolutionState,
    baseline: &SolutionState,
    mode: usize,
) -> Result<f64> {
    let n = state.n_cells();
    if mode == 0 || 2 * mode > n {
        return Err(Error::ModeOutOfRange { mode, n_cells: n });
    }
    let denom = fourier_coefficient(baseline.averages(), mode).norm();
    if denom <= 1e-300 {
        return Err(Error::ZeroBaseline);
    }
    Ok(fourier_coefficient(state.averages(), mode).norm() / denom)
}

/// Everything needed to run one advection experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: FamilySpec,
    pub nu: CourantNumber,
    /// Advection speed a > 0.
    pub speed: f64,
    pub grid: Grid1D,
    pub ic: InitialCondition,
    pub t_final: f64,
    /// Measure amplitude retention of this Fourier mode, if set.
    pub retention_mode: Option<usize>,
}

/// Results of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub initial: SolutionState,
    pub final_state: SolutionState,
    pub exact: SolutionState,
    pub norms: ErrorReport,
    pub retention: Option<f64>,
    pub t_requested: f64,
    /// n_steps · Δt: the step count is rounded, never the step size.
    pub t_real: f64,
    pub n_steps: usize,
    pub mass_drift: f64,
}

/// Projects, advances to the step count nearest the requested final time,
/// and compares against the exact solution at the realized time. The Courant
/// number is never adjusted; the realized time is reported instead.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    if !config.speed.is_finite() || config.speed <= 0.0 {
        return Err(Error::InvalidExperiment(format!(
            "advection speed must be positive, got {}",
            config.speed
        )));
    }
    if !config.t_final.is_finite() || config.t_final < 0.0 {
        return Err(Error::InvalidExperiment(format!(
            "final time must be finite and nonnegative, got {}",
            config.t_final
        )));
    }
    let params = config.family.resolve(config.nu)?;
    let grid = &config.grid;
    let dt = config.nu.get() * grid.dx() / config.speed;
    let n_steps = (config.t_final / dt).round() as usize;
    let t_real = n_steps as f64 * dt;

    let initial = project(&config.ic, grid)?;
    let final_state = scheme::advance(&initial, &params, config.nu, n_steps)?;
    let exact = exact_state(&config.ic, grid, t_real, config.speed)?;
    let norms = error_norms(&final_state, &exact, grid)?;
    let retention = match config.retention_mode {
        Some(mode) => Some(amplitude_retention(&final_state, &initial, mode)?),
        None => None,
    };
    let mass_drift = (final_state.total_average() - initial.total_average()).abs();
    Ok(ExperimentRun {
        initial,
        final_state,
        exact,
        norms,
        retention,
        t_requested: config.t_final,
        t_real,
        n_steps,
        mass_drift,
    })
}

/// Writes the per-cell solution table: numerical and exact averages at cell
/// centers, numerical and exact point values at right interfaces.
pub fn write_solution_csv<W: Write>(
    mut w: W,
    grid: &Grid1D,
    state: &SolutionState,
    exact: &SolutionState,
) -> io::Result<()> {
    writeln!(
        w,
        "x_center,average,exact_average,x_right_interface,point_value,exact_point_value"
    )?;
    for i in 0..grid.n_cells() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g17(grid.cell_center(i)),
            fmt_g17(state.averages()[i]),
            fmt_g17(exact.averages()[i]),
            fmt_g17(grid.right_interface(i)),
            fmt_g17(state.point_values()[i]),
            fmt_g17(exact.point_values()[i]),
        )?;
    }
    Ok(())
}

/// Writes convergence rows; the EOC column reports the L2 order of the
/// averages and is empty on the first row.
pub fn write_convergence_csv<W: Write>(mut w: W, rows: &[ConvergenceRow]) -> io::Result<()> {
    writeln!(
        w,
        "n_cells,l1_avg,l2_avg,linf_avg,l1_pt,l2_pt,linf_pt,eoc_l2_avg"
    )?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.n_cells,
            fmt_g17(row.errors.averages.l1),
            fmt_g17(row.errors.averages.l2),
            fmt_g17(row.errors.averages.linf),
            fmt_g17(row.errors.point_values.l1),
            fmt_g17(row.errors.point_values.l2),
            fmt_g17(row.errors.point_values.linf),
            row.eoc
                .map_or_else(String::new, |e| fmt_g17(e.averages.l2)),
        )?;
    }
    Ok(())
}
