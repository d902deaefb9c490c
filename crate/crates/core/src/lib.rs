//! Active Flux schemes for 1D linear advection with parameterized correction terms.
//!
//! The solver evolves two sets of degrees of freedom on a periodic grid: cell
//! averages and point values shared between adjacent cells at the interfaces.
//! The update is the first-order upwind method plus correction terms weighted
//! by four parameters (R, S, T, U); the classical third-order Active Flux
//! method is the member R = S = 3, T = 1 − ν, U = ν of this family.
//!
//! Modules:
//! - [`types`]: grids, solution states, scheme parameters, Fourier modes
//! - [`scheme`]: reconstruction and the explicit time-stepping kernel
//! - [`families`]: closed-form parameter families (eigenvalue order conditions)
//! - [`spectral`]: amplification matrix, eigenvalues, dissipation/dispersion,
//!   stability scans, order-of-correctness estimation
//! - [`experiments`]: initial conditions, projection, exact solutions, error
//!   norms, convergence studies, amplitude retention

pub mod experiments;
pub mod families;
pub mod scheme;
pub mod spectral;
pub mod types;

pub use families::FamilySpec;
pub use types::{CourantNumber, FourierMode, Grid1D, SchemeParameters, SolutionState};

/// Errors produced by solver, family, and analysis operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: need x_max > x_min and n_cells >= 2, got x_min={x_min}, x_max={x_max}, n_cells={n_cells}")]
    InvalidGrid {
        x_min: f64,
        x_max: f64,
        n_cells: usize,
    },

    #[error("courant number must satisfy 0 < nu <= 1, got {0}")]
    InvalidCourant(f64),

    #[error("averages and point values differ in length: {averages} vs {point_values}")]
    LengthMismatch {
        averages: usize,
        point_values: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("solution blew up: non-finite value produced at step {step}")]
    BlowUp { step: usize },

    #[error("degenerate parameter family: {0}")]
    DegenerateFamily(String),

    #[error("cannot parse family spec `{input}`: {reason}")]
    ParseFamily { input: String, reason: String },

    #[error("sine mode {mode} is not resolvable on {n_cells} cells (need 1 <= mode <= n_cells/2)")]
    UnresolvableMode { mode: usize, n_cells: usize },

    #[error("fourier mode {mode} out of range for {n_cells} cells (need 1 <= mode < n_cells/2)")]
    ModeOutOfRange { mode: usize, n_cells: usize },

    #[error("phase angle must lie in [-pi, pi], got {0}")]
    InvalidTheta(f64),

    #[error("dispersion error is undefined at theta = 0")]
    ZeroTheta,

    #[error("amplitude retention baseline is zero at the requested mode")]
    ZeroBaseline,

    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    #[error("leading-coefficient check requires a third- or fourth-order family, got `{0}`")]
    UnsupportedFamily(String),

    #[error("invalid experiment setup: {0}")]
    InvalidExperiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub(crate) fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{:.16e}", x)
    }
}
