//! `afl run`: one advection experiment, written out as a solution CSV, a
//! summary JSON, and optionally an SVG overlay of numerical vs exact
//! profiles.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use afl_core::experiments::{
    run_experiment, write_solution_csv, ExperimentConfig, ExperimentRun, InitialCondition,
};
use afl_core::{CourantNumber, Error, FamilySpec, Grid1D};

use crate::config::{
    load_optional, merge, parse_bool, parse_f64, parse_ic, parse_usize, require, resolve_out_dir,
};
use crate::svg::{self, LinePlot, Series};
use crate::CliError;

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Key=value config file; flags override file entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Scheme family, e.g. traditional, method3:R=4, superduper
    #[arg(long)]
    pub family: Option<String>,
    /// Courant number in (0, 1]
    #[arg(long)]
    pub nu: Option<f64>,
    /// Advection speed (default 1)
    #[arg(long)]
    pub a: Option<f64>,
    /// Left domain boundary (default -5)
    #[arg(long)]
    pub x_min: Option<f64>,
    /// Right domain boundary (default 5)
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Number of grid cells (default 100)
    #[arg(long, visible_alias = "n-cells")]
    pub cells: Option<usize>,
    /// Final time
    #[arg(long, visible_alias = "t-final")]
    pub tfinal: Option<f64>,
    /// Initial condition: sine:m=10, square, shapes (with optional knobs)
    #[arg(long)]
    pub ic: Option<String>,
    /// Output directory (default $AFL_OUTPUT_DIR or ./afl-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Render solution.svg alongside the CSV
    #[arg(long)]
    pub svg: bool,
    /// Fourier mode for amplitude retention (defaults to the sine mode)
    #[arg(long)]
    pub retention_mode: Option<usize>,
}

pub struct RunSettings {
    pub family: FamilySpec,
    pub nu: CourantNumber,
    pub speed: f64,
    pub grid: Grid1D,
    pub t_final: f64,
    pub ic: InitialCondition,
    pub out: PathBuf,
    pub svg: bool,
    pub retention_mode: Option<usize>,
}

impl RunSettings {
    pub fn resolve(args: RunArgs) -> Result<Self, CliError> {
        let file = load_optional(&args.config)?;
        let family_text = require(
            merge(args.family, &file, "family", |s| Ok(s.to_string()))?,
            "family",
        )?;
        let family: FamilySpec = family_text
            .parse()
            .map_err(|e: Error| CliError::Config(format!("invalid value for `family`: {e}")))?;
        let nu_raw = require(merge(args.nu, &file, "nu", parse_f64)?, "nu")?;
        let nu = CourantNumber::new(nu_raw)
            .map_err(|e| CliError::Config(format!("invalid value for `nu`: {e}")))?;
        let speed = merge(args.a, &file, "a", parse_f64)?.unwrap_or(1.0);
        let x_min = merge(args.x_min, &file, "x-min", parse_f64)?.unwrap_or(-5.0);
        let x_max = merge(args.x_max, &file, "x-max", parse_f64)?.unwrap_or(5.0);
        let cells = merge(args.cells, &file, "cells", parse_usize)?.unwrap_or(100);
        let grid = Grid1D::new(x_min, x_max, cells)
            .map_err(|e| CliError::Config(format!("invalid grid (x-min/x-max/cells): {e}")))?;
        let t_final = require(merge(args.tfinal, &file, "tfinal", parse_f64)?, "tfinal")?;
        let ic_text = require(merge(args.ic, &file, "ic", |s| Ok(s.to_string()))?, "ic")?;
        let ic = parse_ic(&ic_text)
            .map_err(|e| CliError::Config(format!("invalid value for `ic`: {e}")))?;
        let svg_flag = args.svg
            || merge(None::<bool>, &file, "svg", parse_bool)?.unwrap_or(false);
        let retention_mode =
            merge(args.retention_mode, &file, "retention-mode", parse_usize)?.or(
                match ic {
                    InitialCondition::SineWave { mode } => Some(mode),
                    _ => None,
                },
            );
        let out = resolve_out_dir(args.out, &file)?;
        Ok(Self {
            family,
            nu,
            speed,
            grid,
            t_final,
            ic,
            out,
            svg: svg_flag,
            retention_mode,
        })
    }
}

#[derive(Serialize)]
struct NormTripleJson {
    l1: f64,
    l2: f64,
    linf: f64,
}

#[derive(Serialize)]
struct NormsJson {
    averages: NormTripleJson,
    point_values: NormTripleJson,
}

#[derive(Serialize)]
struct SummaryJson {
    family: String,
    nu: f64,
    n_cells: usize,
    t_requested: f64,
    t_real: f64,
    n_steps: usize,
    norms: NormsJson,
    retention: Option<f64>,
    wall_seconds: f64,
}

fn norms_json(run: &ExperimentRun) -> NormsJson {
    NormsJson {
        averages: NormTripleJson {
            l1: run.norms.averages.l1,
            l2: run.norms.averages.l2,
            linf: run.norms.averages.linf,
        },
        point_values: NormTripleJson {
            l1: run.norms.point_values.l1,
            l2: run.norms.point_values.l2,
            linf: run.norms.point_values.linf,
        },
    }
}

pub fn map_core_error(e: Error) -> CliError {
    match e {
        Error::BlowUp { .. } | Error::NonFinite(_) => CliError::BlowUp(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn write_file(path: &PathBuf, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn solution_plot(settings: &RunSettings, run: &ExperimentRun) -> LinePlot {
    let grid = &settings.grid;
    let centers: Vec<f64> = (0..grid.n_cells()).map(|i| grid.cell_center(i)).collect();
    let series = vec![
        Series {
            label: settings.family.to_string(),
            points: centers
                .iter()
                .zip(run.final_state.averages())
                .map(|(&x, &y)| (x, y))
                .collect(),
            dashed: false,
            color: 0,
        },
        Series {
            label: "exact".into(),
            points: centers
                .iter()
                .zip(run.exact.averages())
                .map(|(&x, &y)| (x, y))
                .collect(),
            dashed: true,
            color: 3,
        },
    ];
    LinePlot {
        title: format!(
            "{} | nu={} | T={}",
            settings.family,
            settings.nu.get(),
            run.t_real
        ),
        x_label: "x".into(),
        y_label: "cell average".into(),
        series,
        legend: true,
    }
}

pub fn execute(args: RunArgs) -> Result<(), CliError> {
    let settings = RunSettings::resolve(args)?;
    let started = Instant::now();
    let run = run_experiment(&ExperimentConfig {
        family: settings.family,
        nu: settings.nu,
        speed: settings.speed,
        grid: settings.grid,
        ic: settings.ic.clone(),
        t_final: settings.t_final,
        retention_mode: settings.retention_mode,
    })
    .map_err(map_core_error)?;
    let wall_seconds = started.elapsed().as_secs_f64();

    fs::create_dir_all(&settings.out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", settings.out.display())))?;

    let mut csv = Vec::new();
    write_solution_csv(&mut csv, &settings.grid, &run.final_state, &run.exact)
        .map_err(|e| CliError::Config(format!("cannot encode solution CSV: {e}")))?;
    write_file(&settings.out.join("solution.csv"), &csv)?;

    let summary = SummaryJson {
        family: settings.family.to_string(),
        nu: settings.nu.get(),
        n_cells: settings.grid.n_cells(),
        t_requested: run.t_requested,
        t_real: run.t_real,
        n_steps: run.n_steps,
        norms: norms_json(&run),
        retention: run.retention,
        wall_seconds,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Config(format!("cannot encode summary JSON: {e}")))?;
    write_file(&settings.out.join("summary.json"), format!("{json}\n").as_bytes())?;

    if settings.svg {
        let plot = svg::render(&solution_plot(&settings, &run));
        write_file(&settings.out.join("solution.svg"), plot.as_bytes())?;
    }

    println!(
        "run: {} nu={} cells={} steps={} T={} (requested {}) Linf={:.3e}{}",
        settings.family,
        settings.nu.get(),
        settings.grid.n_cells(),
        run.n_steps,
        run.t_real,
        run.t_requested,
        run.norms.averages.linf,
        run.retention
            .map_or_else(String::new, |r| format!(" retention={r:.4}")),
    );
    println!("artifacts in {}", settings.out.display());
    Ok(())
}
