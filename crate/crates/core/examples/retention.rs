//! Long-run amplitude retention of a sine wave under two scheme families.

use afl_core::experiments::{run_experiment, ExperimentConfig, InitialCondition};
use afl_core::{CourantNumber, FamilySpec, Grid1D};

fn main() -> Result<(), afl_core::Error> {
    for family in ["superduper", "method3:R=3"] {
        let run = run_experiment(&ExperimentConfig {
            family: family.parse::<FamilySpec>()?,
            nu: CourantNumber::new(0.7)?,
            speed: 1.0,
            grid: Grid1D::new(-5.0, 5.0, 100)?,
            ic: InitialCondition::sine(10),
            t_final: 1000.0,
            retention_mode: Some(10),
        })?;
        println!(
            "{family}: retention after {} steps (T = {}) is {:.4}",
            run.n_steps,
            run.t_real,
            run.retention.unwrap()
        );
    }
    Ok(())
}
