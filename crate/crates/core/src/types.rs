//! Domain types: scheme parameters, Courant number, periodic grids, solution
//! states, and single Fourier harmonics.

use num_complex::Complex64;

use crate::{Error, Result};

/// The four correction weights defining one member of the scheme family.
///
/// Values are plain reals; only finiteness is checked at construction.
/// Operations that divide by R + S guard against a vanishing sum themselves,
/// and resolved families may legitimately carry zero or negative T, U.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParameters {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub u: f64,
}

impl SchemeParameters {
    pub fn new(r: f64, s: f64, t: f64, u: f64) -> Result<Self> {
        if !(r.is_finite() && s.is_finite() && t.is_finite() && u.is_finite()) {
            return Err(Error::NonFinite("scheme parameters"));
        }
        Ok(Self { r, s, t, u })
    }
}

/// Courant number ν = a·Δt/Δx, restricted to (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CourantNumber(f64);

impl CourantNumber {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 0.0 || nu > 1.0 {
            return Err(Error::InvalidCourant(nu));
        }
        Ok(Self(nu))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// Uniform periodic grid of `n_cells` cells on [x_min, x_max].
///
/// Cell `i` spans [x_min + i·dx, x_min + (i+1)·dx); interface `j` sits at
/// x_min + j·dx, so the right interface of cell `i` is interface `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_cells: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min || n_cells < 2 {
            return Err(Error::InvalidGrid {
                x_min,
                x_max,
                n_cells,
            });
        }
        let dx = (x_max - x_min) / n_cells as f64;
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx,
        })
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Coordinate of interface `j` (j = 0 is the left domain boundary).
    #[inline]
    pub fn interface(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    /// Right interface of cell `i`, where its point value lives.
    #[inline]
    pub fn right_interface(&self, i: usize) -> f64 {
        self.interface(i + 1)
    }

    #[inline]
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    /// Maps any coordinate into [x_min, x_max) by periodic wrapping.
    pub fn wrap_point(&self, x: f64) -> f64 {
        let l = self.length();
        let mut r = (x - self.x_min).rem_euclid(l);
        if r >= l {
            r -= l;
        }
        self.x_min + r
    }
}

/// Maps an integer index into [0, n_cells) by periodic wrapping.
#[inline]
pub fn wrap_index(i: isize, n_cells: usize) -> usize {
    debug_assert!(n_cells >= 1);
    i.rem_euclid(n_cells as isize) as usize
}

/// Degrees of freedom at one time level: cell averages plus the point value
/// at the right interface of each cell.
///
/// Storing point values by the cell whose right interface they sit on makes
/// the upwind stencil a single wrapped lookup: cell `i` reads its left
/// interface value from `point_values[i - 1]` (wrapped). States are immutable
/// once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState {
    averages: Vec<f64>,
    point_values: Vec<f64>,
    periodic: bool,
}

impl SolutionState {
    pub fn new(averages: Vec<f64>, point_values: Vec<f64>) -> Result<Self> {
        if averages.len() != point_values.len() {
            return Err(Error::LengthMismatch {
                averages: averages.len(),
                point_values: point_values.len(),
            });
        }
        if averages.is_empty() {
            return Err(Error::EmptyInput("solution state"));
        }
        if !averages.iter().chain(point_values.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("solution state"));
        }
        Ok(Self {
            averages,
            point_values,
            periodic: true,
        })
    }

    /// Constructor for solver-internal states whose entries were just checked.
    pub(crate) fn from_parts_unchecked(averages: Vec<f64>, point_values: Vec<f64>) -> Self {
        debug_assert_eq!(averages.len(), point_values.len());
        Self {
            averages,
            point_values,
            periodic: true,
        }
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.averages.len()
    }

    #[inline]
    pub fn averages(&self) -> &[f64] {
        &self.averages
    }

    #[inline]
    pub fn point_values(&self) -> &[f64] {
        &self.point_values
    }

    #[inline]
    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// Point value at the left interface of cell `i` (periodic wrap).
    #[inline]
    pub fn left_point_value(&self, i: usize) -> f64 {
        let n = self.point_values.len();
        self.point_values[if i == 0 { n - 1 } else { i - 1 }]
    }

    /// Sum of the cell averages; conserved by the scheme up to rounding.
    pub fn total_average(&self) -> f64 {
        self.averages.iter().sum()
    }

    /// Returns a copy shifted right by `cells` cells (periodic).
    pub fn shift_right(&self, cells: usize) -> Self {
        let n = self.n_cells();
        let k = cells % n;
        let shift = |src: &[f64]| -> Vec<f64> {
            (0..n).map(|i| src[(i + n - k) % n]).collect()
        };
        Self {
            averages: shift(&self.averages),
            point_values: shift(&self.point_values),
            periodic: true,
        }
    }
}

/// A single spatial harmonic of the degrees of freedom.
///
/// `theta` is the phase angle k·Δx; the amplitudes follow the convention that
/// both the average of cell `i` and the point value at interface i+1/2 carry
/// the phase factor exp(I·(i+1/2)·theta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierMode {
    pub theta: f64,
    /// Amplitude of the cell averages (Q-hat).
    pub avg_amplitude: Complex64,
    /// Amplitude of the interface point values (q-hat).
    pub point_amplitude: Complex64,
}

impl FourierMode {
    pub fn new(theta: f64, avg_amplitude: Complex64, point_amplitude: Complex64) -> Result<Self> {
        if !theta.is_finite() || !(-std::f64::consts::PI..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidTheta(theta));
        }
        Ok(Self {
            theta,
            avg_amplitude,
            point_amplitude,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        let g = Grid1D::new(-5.0, 5.0, 100).unwrap();
        assert!((g.dx() - 0.1).abs() < 1e-15);
        assert!((g.cell_center(0) - -4.95).abs() < 1e-14);
        assert!((g.cell_center(1) - -4.85).abs() < 1e-14);

        let g = Grid1D::new(0.0, 1.0, 2).unwrap();
        assert_eq!(g.dx(), 0.5);
        assert_eq!(g.interface(0), 0.0);
        assert_eq!(g.interface(1), 0.5);
        assert_eq!(g.interface(2), 1.0);

        let g = Grid1D::new(0.0, 10.0, 4).unwrap();
        assert_eq!(g.cell_center(0), 1.25);
    }

    #[test]
    fn grid_rejects_degenerate_input() {
        assert!(Grid1D::new(0.0, 0.0, 10).is_err());
        assert!(Grid1D::new(1.0, 0.0, 10).is_err());
        assert!(Grid1D::new(0.0, 1.0, 0).is_err());
        assert!(Grid1D::new(0.0, 1.0, 1).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn wrap_index_examples() {
        assert_eq!(wrap_index(-1, 100), 99);
        assert_eq!(wrap_index(100, 100), 0);
        assert_eq!(wrap_index(5, 100), 5);
    }

    #[test]
    fn wrap_index_is_idempotent_and_periodic() {
        for n in [1usize, 2, 7, 100] {
            for i in -300..300isize {
                let w = wrap_index(i, n);
                assert!(w < n);
                assert_eq!(wrap_index(w as isize, n), w);
                assert_eq!(wrap_index(i + n as isize, n), w);
            }
        }
    }

    #[test]
    fn wrap_point_stays_in_domain() {
        let g = Grid1D::new(-5.0, 5.0, 100).unwrap();
        for k in -40..40 {
            let x = 0.37 * k as f64;
            let w = g.wrap_point(x);
            assert!(w >= g.x_min() && w < g.x_max(), "x={x} wrapped to {w}");
        }
        assert_eq!(g.wrap_point(-5.0), -5.0);
        assert_eq!(g.wrap_point(5.0), -5.0);
    }

    #[test]
    fn state_rejects_mismatched_lengths() {
        let err = SolutionState::new(vec![1.0, 2.0], vec![1.0]).unwrap_err();
        assert!(matches!(err, Error::LengthMismatch { .. }));
    }

    #[test]
    fn state_rejects_non_finite_entries() {
        assert!(SolutionState::new(vec![1.0, f64::NAN], vec![0.0, 0.0]).is_err());
        assert!(SolutionState::new(vec![1.0, 2.0], vec![0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn left_point_value_wraps() {
        let s = SolutionState::new(vec![0.0; 4], vec![10.0, 11.0, 12.0, 13.0]).unwrap();
        assert_eq!(s.left_point_value(0), 13.0);
        assert_eq!(s.left_point_value(1), 10.0);
        assert_eq!(s.left_point_value(3), 12.0);
    }

    #[test]
    fn shift_right_moves_entries() {
        let s = SolutionState::new(vec![1.0, 2.0, 3.0, 4.0], vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let t = s.shift_right(1);
        assert_eq!(t.averages(), &[4.0, 1.0, 2.0, 3.0]);
        assert_eq!(t.point_values(), &[8.0, 5.0, 6.0, 7.0]);
        assert_eq!(s.shift_right(4), s);
    }

    #[test]
    fn courant_bounds() {
        assert!(CourantNumber::new(0.0).is_err());
        assert!(CourantNumber::new(-0.1).is_err());
        assert!(CourantNumber::new(1.0000001).is_err());
        assert!(CourantNumber::new(f64::NAN).is_err());
        assert_eq!(CourantNumber::new(1.0).unwrap().get(), 1.0);
        assert_eq!(CourantNumber::new(0.5).unwrap().get(), 0.5);
    }

    #[test]
    fn parameters_accept_zero_and_negative_weights() {
        assert!(SchemeParameters::new(0.0, 6.0, 0.0, 2.0).is_ok());
        assert!(SchemeParameters::new(2.0, 4.0, 1.0, -0.5).is_ok());
        assert!(SchemeParameters::new(f64::INFINITY, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn fourier_mode_theta_range() {
        use num_complex::Complex64;
        let one = Complex64::new(1.0, 0.0);
        assert!(FourierMode::new(3.5, one, one).is_err());
        assert!(FourierMode::new(-3.2, one, one).is_err());
        assert!(FourierMode::new(std::f64::consts::PI, one, one).is_ok());
    }
}
