//! `afl verify`: the full verification battery. Checks the closed-form
//! family conditions against each other, the amplification matrix against
//! the scalar update formulas, eigenvalue order slopes, leading error
//! coefficients, half-Courant exactness, and the eigenvalue-set invariances.
//! Writes verify.json and exits nonzero if any check fails.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::Serialize;

use afl_core::families::{fourth_order_stu, second_order_u, third_order_tu, FamilySpec};
use afl_core::scheme;
use afl_core::spectral::{
    amplification_matrix, default_theta_grid, leading_coefficient_check,
    matrix_consistency_residual, principal_order, EigenPair, OrderEstimate,
};
use afl_core::{CourantNumber, SchemeParameters, SolutionState};

use crate::config::resolve_out_dir;
use crate::CliError;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Output directory for verify.json (default $AFL_OUTPUT_DIR or ./afl-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CheckResult {
    name: String,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    checks: Vec<CheckResult>,
    all_pass: bool,
}

fn nu(v: f64) -> CourantNumber {
    CourantNumber::new(v).unwrap()
}

fn nu_grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

fn check(name: &str, pass: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass,
        detail,
    }
}

// The three third-order condition routes must agree with each other and with
// the named closed forms.
fn family_consistency() -> CheckResult {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();

    for &v in &nu_grid() {
        let c = nu(v);
        for r in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
            let (s, t, u) = fourth_order_stu(r, c);
            match third_order_tu(r, s, c) {
                Ok((t3, u3)) => {
                    let d = (t - t3).abs().max((u - u3).abs());
                    worst = worst.max(d);
                    if d > 1e-12 {
                        failures.push(format!("fourth->third r={r} nu={v}: {d:.2e}"));
                    }
                }
                Err(e) => failures.push(format!("fourth->third r={r} nu={v}: {e}")),
            }
            if let Ok((t3, u3)) = third_order_tu(r, r + 1.0, c) {
                let u2 = second_order_u(r, r + 1.0, t3).unwrap();
                let d = (u3 - u2).abs();
                worst = worst.max(d);
                if d > 1e-12 {
                    failures.push(format!("third->second r={r} nu={v}: {d:.2e}"));
                }
            }
        }

        let sd = FamilySpec::SuperDuper.resolve(c).unwrap();
        let (s4, t4, u4) = fourth_order_stu(sd.r, c);
        let d = (sd.s - s4).abs().max((sd.t - t4).abs()).max((sd.u - u4).abs());
        worst = worst.max(d);
        if d > 1e-13 {
            failures.push(format!("super-duper vs fourth at nu={v}: {d:.2e}"));
        }

        let a = FamilySpec::Traditional.resolve(c).unwrap();
        let b = FamilySpec::ThirdOrder { r: 3.0, s: 3.0 }.resolve(c).unwrap();
        let m = FamilySpec::Method3 { r: 3.0 }.resolve(c).unwrap();
        if a != b || a != m {
            failures.push(format!("traditional aliases differ at nu={v}"));
        }
    }

    for r in [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.5] {
        let a = FamilySpec::HalfCflExact { r }.resolve(nu(0.5)).unwrap();
        let b = FamilySpec::FourthOrder { r }.resolve(nu(0.5)).unwrap();
        let d = (a.s - b.s).abs().max((a.t - b.t).abs()).max((a.u - b.u).abs());
        worst = worst.max(d);
        if d > 1e-12 {
            failures.push(format!("halfcfl vs fourth r={r}: {d:.2e}"));
        }
    }

    check(
        "family-consistency",
        failures.is_empty(),
        if failures.is_empty() {
            format!("condition chains agree; worst deviation {worst:.2e}")
        } else {
            failures.join("; ")
        },
    )
}

fn matrix_consistency() -> CheckResult {
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for r in [0.0, 1.0, 3.0, 8.0] {
        for s in [0.0, 1.0, 3.0, 8.0] {
            for t in [-0.5, 0.5, 1.5] {
                for u in [-0.5, 0.5, 1.5] {
                    let params = SchemeParameters::new(r, s, t, u).unwrap();
                    for v in [0.15, 0.55, 0.95] {
                        for theta in [-2.4, 0.7, 3.0] {
                            worst =
                                worst.max(matrix_consistency_residual(&params, nu(v), theta));
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    check(
        "matrix-consistency",
        worst <= 1e-13,
        format!("{count} parameter/theta samples, worst entrywise residual {worst:.2e} (limit 1e-13)"),
    )
}

enum SlopeTarget {
    Slope(f64),
    Exact,
}

fn order_slopes() -> CheckResult {
    let mut failures = Vec::new();
    let mut count = 0usize;
    let mut worst = 0.0f64;
    let mut run = |spec: FamilySpec, v: f64, target: SlopeTarget| {
        count += 1;
        match (principal_order(&spec, nu(v)), target) {
            (Ok(OrderEstimate::Slope(s)), SlopeTarget::Slope(t)) => {
                worst = worst.max((s - t).abs());
                if (s - t).abs() > 0.1 {
                    failures.push(format!("{spec} nu={v}: slope {s:.3}, expected {t}"));
                }
            }
            (Ok(OrderEstimate::MachinePrecision), SlopeTarget::Exact) => {}
            (Ok(OrderEstimate::MachinePrecision), SlopeTarget::Slope(t)) => {
                failures.push(format!("{spec} nu={v}: exact, expected slope {t}"));
            }
            (Ok(OrderEstimate::Slope(s)), SlopeTarget::Exact) => {
                failures.push(format!("{spec} nu={v}: slope {s:.3}, expected exactness"));
            }
            (Err(e), _) => failures.push(format!("{spec} nu={v}: {e}")),
        }
    };

    for &v in &nu_grid() {
        run(FamilySpec::Traditional, v, SlopeTarget::Slope(4.0));
        for r in [2.0, 3.0, 4.0] {
            let target = if r == 4.0 && v == 0.5 {
                SlopeTarget::Exact
            } else {
                SlopeTarget::Slope(4.0)
            };
            run(FamilySpec::Method3 { r }, v, target);
        }
        {
            // R + S = 8 coincides with the halfcfl closed form at nu = 1/2,
            // where the scheme is exact.
            let target = if v == 0.5 {
                SlopeTarget::Exact
            } else {
                SlopeTarget::Slope(4.0)
            };
            run(FamilySpec::ThirdOrder { r: 2.0, s: 6.0 }, v, target);
        }
        for r in [2.0, 3.0, 4.0] {
            let target = if v == 0.5 {
                SlopeTarget::Exact
            } else {
                SlopeTarget::Slope(5.0)
            };
            run(FamilySpec::FourthOrder { r }, v, target);
        }
        {
            let target = if v == 0.5 {
                SlopeTarget::Exact
            } else {
                SlopeTarget::Slope(5.0)
            };
            run(FamilySpec::SuperDuper, v, target);
        }
        for r in [2.0, 3.0, 4.0, 6.0] {
            let target = if v == 0.5 {
                SlopeTarget::Exact
            } else {
                SlopeTarget::Slope(3.0)
            };
            run(FamilySpec::HalfCflExact { r }, v, target);
        }
    }
    for (r, s, t) in [(2.0, 3.0, 0.4), (4.0, 1.0, 1.2), (1.5, 5.0, 0.1)] {
        for v in [0.3, 0.7] {
            run(FamilySpec::SecondOrder { r, s, t }, v, SlopeTarget::Slope(3.0));
        }
    }

    check(
        "order-slopes",
        failures.is_empty(),
        if failures.is_empty() {
            format!("{count} slope estimates, worst |slope - target| = {worst:.3} (limit 0.1)")
        } else {
            failures.join("; ")
        },
    )
}

fn leading_coefficients() -> CheckResult {
    let mut failures = Vec::new();
    let mut worst_rel = 0.0f64;
    let mut worst_abs = 0.0f64;

    for r in [2.0, 3.0, 4.0] {
        for v in [0.3, 0.7] {
            match leading_coefficient_check(&FamilySpec::Method3 { r }, nu(v)) {
                Ok(c) => {
                    let rel = (c.measured - c.predicted).norm() / c.predicted.norm();
                    worst_rel = worst_rel.max(rel);
                    if rel > 0.01 {
                        failures.push(format!("method3 r={r} nu={v}: rel {rel:.2e}"));
                    }
                }
                Err(e) => failures.push(format!("method3 r={r} nu={v}: {e}")),
            }
        }
    }
    for spec in [FamilySpec::FourthOrder { r: 3.0 }, FamilySpec::SuperDuper] {
        match leading_coefficient_check(&spec, nu(0.7)) {
            Ok(c) => {
                let rel = (c.measured - c.predicted).norm() / c.predicted.norm();
                worst_rel = worst_rel.max(rel);
                if rel > 0.01 {
                    failures.push(format!("{spec} nu=0.7: rel {rel:.2e}"));
                }
            }
            Err(e) => failures.push(format!("{spec} nu=0.7: {e}")),
        }
        for v in [0.5, 1.0] {
            match leading_coefficient_check(&spec, nu(v)) {
                Ok(c) => {
                    if c.predicted != Complex64::new(0.0, 0.0) {
                        failures.push(format!("{spec} nu={v}: prediction should vanish"));
                    }
                    worst_abs = worst_abs.max(c.measured.norm());
                    if c.measured.norm() > 1e-10 {
                        failures.push(format!("{spec} nu={v}: measured {:.2e}", c.measured.norm()));
                    }
                }
                Err(e) => failures.push(format!("{spec} nu={v}: {e}")),
            }
        }
    }

    check(
        "leading-coefficients",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "worst relative deviation {worst_rel:.2e} (limit 1e-2); worst vanishing-case magnitude {worst_abs:.2e} (limit 1e-10)"
            )
        } else {
            failures.join("; ")
        },
    )
}

fn half_courant_exactness() -> CheckResult {
    let n = 64;
    let state = SolutionState::new(
        (0..n).map(|i| (0.37 * i as f64).sin() + 0.2 * (1.1 * i as f64).cos()).collect(),
        (0..n).map(|i| (0.53 * i as f64).cos() - 0.4 * (0.9 * i as f64).sin()).collect(),
    )
    .unwrap();
    let shifted = state.shift_right(1);

    let mut specs: Vec<FamilySpec> = [2.0, 3.0, 4.0, 6.0]
        .into_iter()
        .map(|r| FamilySpec::HalfCflExact { r })
        .collect();
    specs.push(FamilySpec::SuperDuper);
    specs.push(FamilySpec::FourthOrder { r: 5.0 });

    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for spec in &specs {
        let params = spec.resolve(nu(0.5)).unwrap();
        match scheme::advance(&state, &params, nu(0.5), 2) {
            Ok(two) => {
                for i in 0..n {
                    let d = (two.averages()[i] - shifted.averages()[i])
                        .abs()
                        .max((two.point_values()[i] - shifted.point_values()[i]).abs());
                    worst = worst.max(d);
                    if d > 1e-12 {
                        failures.push(format!("{spec}: cell {i} off by {d:.2e}"));
                        break;
                    }
                }
            }
            Err(e) => failures.push(format!("{spec}: {e}")),
        }
    }

    check(
        "half-courant-exactness",
        failures.is_empty(),
        if failures.is_empty() {
            format!(
                "{} families: two steps at nu=1/2 shift one cell, worst deviation {worst:.2e} (limit 1e-12)",
                specs.len()
            )
        } else {
            failures.join("; ")
        },
    )
}

fn eigen_set_distance(a: &EigenPair, b: &EigenPair) -> f64 {
    let direct = (a.principal - b.principal)
        .norm()
        .max((a.spurious - b.spurious).norm());
    let swapped = (a.principal - b.spurious)
        .norm()
        .max((a.spurious - b.principal).norm());
    direct.min(swapped)
}

fn eigenvalue_invariances() -> CheckResult {
    let thetas = default_theta_grid(64);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();

    for &v in &nu_grid() {
        let c = nu(v);
        let fourth: Vec<SchemeParameters> = [2.0, 4.0, 6.0 / (2.0 - v)]
            .iter()
            .map(|&r| FamilySpec::FourthOrder { r }.resolve(c).unwrap())
            .collect();
        let third: Vec<SchemeParameters> = [(2.0, 6.0), (4.0, 4.0), (1.0, 7.0)]
            .iter()
            .map(|&(r, s)| FamilySpec::ThirdOrder { r, s }.resolve(c).unwrap())
            .collect();
        for &theta in &thetas {
            for group in [&fourth, &third] {
                let base = amplification_matrix(&group[0], c, theta).eigenvalues();
                for p in &group[1..] {
                    let d = eigen_set_distance(
                        &base,
                        &amplification_matrix(p, c, theta).eigenvalues(),
                    );
                    worst = worst.max(d);
                    if d > 1e-10 {
                        failures.push(format!("nu={v} theta={theta:.3}: set distance {d:.2e}"));
                    }
                }
            }
        }
    }

    check(
        "eigenvalue-invariances",
        failures.is_empty(),
        if failures.is_empty() {
            format!("fourth order independent of R, third order a function of R+S; worst set distance {worst:.2e} (limit 1e-10)")
        } else {
            failures.join("; ")
        },
    )
}

pub fn execute(args: VerifyArgs) -> Result<(), CliError> {
    let out = resolve_out_dir(args.out, &Default::default())?;
    let checks = vec![
        family_consistency(),
        matrix_consistency(),
        order_slopes(),
        leading_coefficients(),
        half_courant_exactness(),
        eigenvalue_invariances(),
    ];
    let all_pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        println!("{} {:<24} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }

    fs::create_dir_all(&out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;
    let report = VerifyReport { checks, all_pass };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Config(format!("cannot encode verify JSON: {e}")))?;
    let path = out.join("verify.json");
    fs::write(&path, format!("{json}\n"))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;

    if all_pass {
        println!("verify: all checks passed ({})", path.display());
        Ok(())
    } else {
        eprintln!("verify: checks failed ({})", path.display());
        Err(CliError::VerifyFailed)
    }
}
