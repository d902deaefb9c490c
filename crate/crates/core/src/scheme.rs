//! The explicit time-stepping kernel: per-cell quadratic reconstruction,
//! point-value update, time-averaged interface value, conservative cell
//! average update, and full steps over a periodic state.
//!
//! One step advances both sets of degrees of freedom using only time-level-n
//! data. With advection speed a > 0 and ν = a·Δt/Δx ≤ 1, the point value at
//! interface i+1/2 and the time-averaged interface value both depend on the
//! triple (Q_i, q_{i-1/2}, q_{i+1/2}) of the cell upwind of the interface:
//!
//!   q_{i+1/2}^{n+1} = (1-ν)·q_{i+1/2} + ν·q_{i-1/2}
//!                     − ν(1-ν)·(R·(q_{i+1/2} − Q_i) − S·(Q_i − q_{i-1/2}))
//!   qbar_{i+1/2}    = Q_i + (1-ν)·(T·(q_{i+1/2} − Q_i) + U·(Q_i − q_{i-1/2}))
//!   Q_i^{n+1}       = Q_i − ν·(qbar_{i+1/2} − qbar_{i-1/2})
//!
//! The kernels are generic over the value type so the same formulas drive
//! both the real solver and the complex single-harmonic analysis in
//! [`crate::spectral`].

use std::ops::{Add, Mul, Sub};

use crate::types::{CourantNumber, SchemeParameters, SolutionState};
use crate::{Error, Result};

/// Value types the update formulas act on: closed under addition,
/// subtraction, and scaling by a real weight.
pub trait LinearValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
}

impl<T> LinearValue for T where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>
{
}

/// Coefficients of the per-cell quadratic reconstruction in the local
/// coordinate ξ ∈ [−Δx/2, Δx/2]: q(ξ) = c0 + c1·ξ + c2·ξ².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ReconstructionCoeffs {
    /// Evaluates the reconstruction at local coordinate ξ. The quadratic is
    /// meaningful on [−Δx/2, Δx/2]; evaluation outside extrapolates it.
    #[inline]
    pub fn eval(&self, xi: f64) -> f64 {
        self.c0 + (self.c1 + self.c2 * xi) * xi
    }

    /// Exact mean of the quadratic over a cell of width `dx`.
    #[inline]
    pub fn cell_mean(&self, dx: f64) -> f64 {
        self.c0 + self.c2 * dx * dx / 12.0
    }
}

#[inline]
fn reconstruction_coeffs(avg: f64, q_left: f64, q_right: f64, dx: f64) -> ReconstructionCoeffs {
    ReconstructionCoeffs {
        c0: (6.0 * avg - q_right - q_left) / 4.0,
        c1: (q_right - q_left) / dx,
        c2: 3.0 * (q_left + q_right - 2.0 * avg) / (dx * dx),
    }
}

/// Fits the quadratic interpolating the two interface values with the given
/// cell mean. Rejects non-finite inputs and non-positive widths.
pub fn reconstruct(avg: f64, q_left: f64, q_right: f64, dx: f64) -> Result<ReconstructionCoeffs> {
    if !(avg.is_finite() && q_left.is_finite() && q_right.is_finite()) {
        return Err(Error::NonFinite("reconstruction input"));
    }
    if !dx.is_finite() || dx <= 0.0 {
        return Err(Error::InvalidExperiment(format!(
            "cell width must be positive and finite, got {dx}"
        )));
    }
    Ok(reconstruction_coeffs(avg, q_left, q_right, dx))
}

/// New point value at the interface downwind of the cell (q_right's side).
#[inline]
pub fn point_value_update<V: LinearValue>(
    q_right: V,
    q_left: V,
    avg: V,
    params: &SchemeParameters,
    nu: CourantNumber,
) -> V {
    let nu = nu.get();
    let upwind = q_right * (1.0 - nu) + q_left * nu;
    let correction = (q_right - avg) * params.r - (avg - q_left) * params.s;
    upwind - correction * (nu * (1.0 - nu))
}

/// Time-averaged interface value entering the conservative flux difference.
#[inline]
pub fn interface_time_average<V: LinearValue>(
    q_right: V,
    q_left: V,
    avg: V,
    params: &SchemeParameters,
    nu: CourantNumber,
) -> V {
    let nu = nu.get();
    let correction = (q_right - avg) * params.t + (avg - q_left) * params.u;
    avg + correction * (1.0 - nu)
}

/// Time average of the interface value by Simpson's rule on the traced-back
/// reconstruction: (1/6)·(f(0) + 4·f(1/2) + f(1)) with
/// f(l) = q_recon(Δx/2 − l·ν·Δx). Equals [`interface_time_average`] with
/// T = 1 − ν, U = ν.
pub fn simpson_time_average(
    avg: f64,
    q_left: f64,
    q_right: f64,
    dx: f64,
    nu: CourantNumber,
) -> f64 {
    let coeffs = reconstruction_coeffs(avg, q_left, q_right, dx);
    let nu = nu.get();
    let f = |l: f64| coeffs.eval(dx / 2.0 - l * nu * dx);
    (f(0.0) + 4.0 * f(0.5) + f(1.0)) / 6.0
}

/// Conservative update of a cell average from the two interface fluxes.
#[inline]
pub fn average_update<V: LinearValue>(avg: V, flux_right: V, flux_left: V, nu: CourantNumber) -> V {
    avg - (flux_right - flux_left) * nu.get()
}

/// Advances the state one time step.
///
/// All interface time averages are computed into a scratch buffer before any
/// degree of freedom changes, so the stencil reads pure time-level-n data.
/// Returns an error if the updated state contains a non-finite value.
pub fn step(
    state: &SolutionState,
    params: &SchemeParameters,
    nu: CourantNumber,
) -> Result<SolutionState> {
    let n = state.n_cells();
    let avg = state.averages();
    let pv = state.point_values();

    // Time-averaged value at the right interface of each cell.
    let mut qbar = vec![0.0; n];
    for i in 0..n {
        let left = if i == 0 { pv[n - 1] } else { pv[i - 1] };
        qbar[i] = interface_time_average(pv[i], left, avg[i], params, nu);
    }

    let mut new_avg = vec![0.0; n];
    let mut new_pv = vec![0.0; n];
    for i in 0..n {
        let (pv_left, qbar_left) = if i == 0 {
            (pv[n - 1], qbar[n - 1])
        } else {
            (pv[i - 1], qbar[i - 1])
        };
        new_avg[i] = average_update(avg[i], qbar[i], qbar_left, nu);
        new_pv[i] = point_value_update(pv[i], pv_left, avg[i], params, nu);
    }

    if !new_avg.iter().chain(new_pv.iter()).all(|v| v.is_finite()) {
        return Err(Error::NonFinite("updated state"));
    }
    Ok(SolutionState::from_parts_unchecked(new_avg, new_pv))
}

/// Applies [`step`] `n_steps` times; blow-ups are reported with the index of
/// the offending step (0-based).
pub fn advance(
    state: &SolutionState,
    params: &SchemeParameters,
    nu: CourantNumber,
    n_steps: usize,
) -> Result<SolutionState> {
    let mut current = state.clone();
    for k in 0..n_steps {
        current = step(&current, params, nu).map_err(|_| Error::BlowUp { step: k })?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn nu(v: f64) -> CourantNumber {
        CourantNumber::new(v).unwrap()
    }

    fn params(r: f64, s: f64, t: f64, u: f64) -> SchemeParameters {
        SchemeParameters::new(r, s, t, u).unwrap()
    }

    fn random_state(rng: &mut impl Rng, n: usize) -> SolutionState {
        let avg: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let pv: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        SolutionState::new(avg, pv).unwrap()
    }

    #[test]
    fn reconstruction_of_constant_data_is_constant() {
        let c = reconstruct(1.0, 1.0, 1.0, 0.1).unwrap();
        assert_eq!((c.c0, c.c1, c.c2), (1.0, 0.0, 0.0));
        assert_eq!(c.eval(0.03), 1.0);
    }

    #[test]
    fn reconstruction_of_linear_data() {
        let c = reconstruct(0.5, 0.0, 1.0, 1.0).unwrap();
        assert!((c.c0 - 0.5).abs() < 1e-15);
        assert!((c.c1 - 1.0).abs() < 1e-15);
        assert!(c.c2.abs() < 1e-15);
        assert!(c.eval(-0.5).abs() < 1e-15);
        assert!((c.eval(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_interpolates_and_preserves_mean() {
        // Direct-evaluation oracle: interpolation at the interfaces and the
        // exact mean over the cell must hold for random data.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let avg = rng.gen_range(-5.0..5.0);
            let ql = rng.gen_range(-5.0..5.0);
            let qr = rng.gen_range(-5.0..5.0);
            let dx = rng.gen_range(0.01..2.0);
            let c = reconstruct(avg, ql, qr, dx).unwrap();
            assert!((c.eval(-dx / 2.0) - ql).abs() < 1e-13 * (1.0 + ql.abs()));
            assert!((c.eval(dx / 2.0) - qr).abs() < 1e-13 * (1.0 + qr.abs()));
            assert!((c.cell_mean(dx) - avg).abs() < 1e-13 * (1.0 + avg.abs()));
        }
    }

    #[test]
    fn reconstruct_rejects_bad_input() {
        assert!(reconstruct(f64::NAN, 0.0, 0.0, 0.1).is_err());
        assert!(reconstruct(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(reconstruct(0.0, 0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn point_value_update_constant_preservation() {
        let p = params(3.0, 3.0, 0.3, 0.7);
        for v in [0.1, 0.5, 0.9, 1.0] {
            let out = point_value_update(2.5, 2.5, 2.5, &p, nu(v));
            assert!((out - 2.5).abs() < 1e-15);
        }
    }

    #[test]
    fn point_value_update_is_pure_shift_at_unit_courant() {
        // The ν(1-ν) factor vanishes, so R and S drop out entirely.
        for (r, s) in [(0.0, 0.0), (3.0, 3.0), (100.0, -7.0)] {
            let p = params(r, s, 0.0, 0.0);
            let out = point_value_update(1.7, -0.4, 0.9, &p, nu(1.0));
            assert_eq!(out, -0.4);
        }
    }

    #[test]
    fn point_value_update_symmetric_data_cancels_correction() {
        let p = params(3.0, 3.0, 0.0, 0.0);
        let out = point_value_update(1.0, 0.0, 0.5, &p, nu(0.5));
        assert!((out - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interface_time_average_examples() {
        let p = params(0.0, 0.0, 0.5, 0.5);
        assert!((interface_time_average(2.0, 2.0, 2.0, &p, nu(0.3)) - 2.0).abs() < 1e-15);
        assert_eq!(interface_time_average(1.0, 0.0, 0.5, &p, nu(1.0)), 0.5);

        // Traditional weights T = 1-ν, U = ν at ν = 1/2.
        let p = params(3.0, 3.0, 0.5, 0.5);
        let out = interface_time_average(1.0, 0.0, 0.5, &p, nu(0.5));
        assert!((out - 0.75).abs() < 1e-15);
    }

    #[test]
    fn simpson_matches_traditional_interface_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let avg = rng.gen_range(-3.0..3.0);
            let ql = rng.gen_range(-3.0..3.0);
            let qr = rng.gen_range(-3.0..3.0);
            let dx = rng.gen_range(0.01..1.0);
            let v = rng.gen_range(0.01..1.0);
            let p = params(3.0, 3.0, 1.0 - v, v);
            let simpson = simpson_time_average(avg, ql, qr, dx, nu(v));
            let explicit = interface_time_average(qr, ql, avg, &p, nu(v));
            assert!(
                (simpson - explicit).abs() < 1e-13 * (1.0 + explicit.abs()),
                "simpson={simpson} explicit={explicit} nu={v}"
            );
        }
    }

    #[test]
    fn simpson_full_traversal_returns_cell_mean() {
        // At ν = 1 Simpson integrates the quadratic over the whole cell.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let avg = rng.gen_range(-3.0..3.0);
            let ql = rng.gen_range(-3.0..3.0);
            let qr = rng.gen_range(-3.0..3.0);
            let s = simpson_time_average(avg, ql, qr, 0.25, nu(1.0));
            assert!((s - avg).abs() < 1e-13 * (1.0 + avg.abs()));
        }
    }

    #[test]
    fn average_update_examples() {
        assert_eq!(average_update(1.0, 0.7, 0.7, nu(0.5)), 1.0);
        assert_eq!(average_update(1.0, 1.0, 0.0, nu(0.5)), 0.5);
    }

    #[test]
    fn step_keeps_constant_state_fixed() {
        let state = SolutionState::new(vec![1.5; 16], vec![1.5; 16]).unwrap();
        for spec in [
            FamilySpec::Traditional,
            FamilySpec::SuperDuper,
            FamilySpec::Method3 { r: 2.0 },
            FamilySpec::Custom {
                r: 1.0,
                s: 7.0,
                t: -0.2,
                u: 1.4,
            },
        ] {
            let p = spec.resolve(nu(0.7)).unwrap();
            let out = step(&state, &p, nu(0.7)).unwrap();
            for (a, b) in out.averages().iter().zip(state.averages()) {
                assert!((a - b).abs() < 1e-14);
            }
            for (a, b) in out.point_values().iter().zip(state.point_values()) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn step_at_unit_courant_is_exact_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let state = random_state(&mut rng, 32);
        let p = params(4.0, 1.0, 0.25, 0.75);
        let out = step(&state, &p, nu(1.0)).unwrap();
        let shifted = state.shift_right(1);
        for i in 0..32 {
            assert!((out.averages()[i] - shifted.averages()[i]).abs() < 1e-14);
            assert!((out.point_values()[i] - shifted.point_values()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn step_conserves_total_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..50 {
            let state = random_state(&mut rng, 40);
            let p = params(
                rng.gen_range(0.0..8.0),
                rng.gen_range(0.0..8.0),
                rng.gen_range(-1.0..2.0),
                rng.gen_range(-1.0..2.0),
            );
            let v = nu(rng.gen_range(0.01..1.0));
            let out = step(&state, &p, v).unwrap();
            let before = state.total_average();
            let after = out.total_average();
            assert!(
                (after - before).abs() < 1e-13 * (1.0 + before.abs()),
                "mass drifted: {before} -> {after}"
            );
        }
    }

    #[test]
    fn step_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = params(2.0, 6.0, 0.4, 0.9);
        let v = nu(0.6);
        for _ in 0..20 {
            let u1 = random_state(&mut rng, 24);
            let u2 = random_state(&mut rng, 24);
            let (alpha, beta): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let combo = SolutionState::new(
                u1.averages()
                    .iter()
                    .zip(u2.averages())
                    .map(|(a, b)| alpha * a + beta * b)
                    .collect(),
                u1.point_values()
                    .iter()
                    .zip(u2.point_values())
                    .map(|(a, b)| alpha * a + beta * b)
                    .collect(),
            )
            .unwrap();
            let lhs = step(&combo, &p, v).unwrap();
            let s1 = step(&u1, &p, v).unwrap();
            let s2 = step(&u2, &p, v).unwrap();
            for i in 0..24 {
                let want = alpha * s1.averages()[i] + beta * s2.averages()[i];
                assert!((lhs.averages()[i] - want).abs() < 1e-13 * (1.0 + want.abs()));
                let want = alpha * s1.point_values()[i] + beta * s2.point_values()[i];
                assert!((lhs.point_values()[i] - want).abs() < 1e-13 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn step_commutes_with_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let state = random_state(&mut rng, 30);
        let p = params(3.5, 2.5, 0.1, 0.8);
        let v = nu(0.45);
        let a = step(&state.shift_right(1), &p, v).unwrap();
        let b = step(&state, &p, v).unwrap().shift_right(1);
        assert_eq!(a, b);
    }

    #[test]
    fn advance_zero_steps_is_identity() {
        let state = SolutionState::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap();
        let p = params(3.0, 3.0, 0.3, 0.7);
        assert_eq!(advance(&state, &p, nu(0.7), 0).unwrap(), state);
    }

    #[test]
    fn advance_two_steps_at_half_courant_shifts_one_cell() {
        // Parameter family that is exact at ν = 1/2: S = 8-R, T = (R-2)²/8,
        // U = (R-6)²/8. Two steps must reproduce a one-cell right shift.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let state = random_state(&mut rng, 20);
        for r in [2.0, 3.0, 4.0, 6.0] {
            let p = FamilySpec::HalfCflExact { r }.resolve(nu(0.5)).unwrap();
            let out = advance(&state, &p, nu(0.5), 2).unwrap();
            let shifted = state.shift_right(1);
            for i in 0..20 {
                assert!(
                    (out.averages()[i] - shifted.averages()[i]).abs() < 1e-12,
                    "R={r}"
                );
                assert!(
                    (out.point_values()[i] - shifted.point_values()[i]).abs() < 1e-12,
                    "R={r}"
                );
            }
        }
    }

    #[test]
    fn advance_full_revolution_at_unit_courant_recovers_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let state = random_state(&mut rng, 25);
        let p = params(3.0, 3.0, 0.0, 1.0);
        let out = advance(&state, &p, nu(1.0), 25).unwrap();
        for i in 0..25 {
            assert!((out.averages()[i] - state.averages()[i]).abs() < 1e-13);
            assert!((out.point_values()[i] - state.point_values()[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn advance_reports_blow_up_step() {
        // Grossly unstable parameters blow up quickly; the error carries the
        // step index at which the state stopped being finite.
        let state = SolutionState::new(
            (0..16).map(|i| (i as f64 * 0.7).sin()).collect(),
            (0..16).map(|i| (i as f64 * 0.7 + 0.3).sin()).collect(),
        )
        .unwrap();
        let p = params(500.0, 500.0, 50.0, -50.0);
        let err = advance(&state, &p, nu(0.9), 10_000).unwrap_err();
        match err {
            Error::BlowUp { step } => assert!(step > 0 && step < 10_000),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }
}
