//! `afl spectra`: dissipation/dispersion sweeps over θ for one or more
//! families, one CSV per family per Courant number, plus optional panel
//! figures.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use afl_core::spectral::{default_theta_grid, theta_sweep, write_sweep_csv, SweepRow};
use afl_core::{CourantNumber, Error, FamilySpec};

use crate::config::{load_optional, merge, parse_bool, parse_f64_list, parse_usize, resolve_out_dir};
use crate::svg::{self, LinePlot, Series};
use crate::CliError;

#[derive(Debug, Args)]
pub struct SpectraArgs {
    /// Key=value config file; flags override file entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Families to sweep (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    pub family: Vec<String>,
    /// Courant numbers to sweep (default 0.1,0.3,0.5,0.7,0.9)
    #[arg(long, value_delimiter = ',')]
    pub nu_list: Vec<f64>,
    /// Number of theta samples on [-pi, pi] (default 1024)
    #[arg(long)]
    pub theta_samples: Option<usize>,
    /// Output directory (default $AFL_OUTPUT_DIR or ./afl-out)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Render dissipation.svg and dispersion.svg panel figures
    #[arg(long)]
    pub svg: bool,
}

fn family_slug(spec: &FamilySpec) -> String {
    spec.to_string().replace([':', '=', ','], "-")
}

pub fn execute(args: SpectraArgs) -> Result<(), CliError> {
    let file = load_optional(&args.config)?;

    let family_texts: Vec<String> = if args.family.is_empty() {
        match file.get("family") {
            Some(text) => text.split(',').map(|s| s.trim().to_string()).collect(),
            None => Vec::new(),
        }
    } else {
        args.family
    };
    if family_texts.is_empty() {
        return Err(CliError::Config(
            "missing required setting `family` (pass --family or put `family = ...` in a config file)"
                .into(),
        ));
    }
    let families = family_texts
        .iter()
        .map(|t| {
            t.parse::<FamilySpec>()
                .map_err(|e: Error| CliError::Config(format!("invalid value for `family`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let nu_values = if args.nu_list.is_empty() {
        merge(None, &file, "nu-list", parse_f64_list)?
            .unwrap_or_else(|| vec![0.1, 0.3, 0.5, 0.7, 0.9])
    } else {
        args.nu_list
    };
    let nus = nu_values
        .iter()
        .map(|&v| {
            CourantNumber::new(v)
                .map_err(|e| CliError::Config(format!("invalid value for `nu-list`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let theta_samples =
        merge(args.theta_samples, &file, "theta-samples", parse_usize)?.unwrap_or(1024);
    if theta_samples == 0 {
        return Err(CliError::Config(
            "invalid value for `theta-samples`: need at least one sample".into(),
        ));
    }
    let thetas = default_theta_grid(theta_samples);

    let emit_svg = args.svg || merge(None::<bool>, &file, "svg", parse_bool)?.unwrap_or(false);
    let out = resolve_out_dir(args.out, &file)?;
    fs::create_dir_all(&out)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", out.display())))?;

    // sweeps[nu_index][family_index]
    let mut sweeps: Vec<Vec<Vec<SweepRow>>> = Vec::new();
    for &nu in &nus {
        let mut per_family = Vec::new();
        for spec in &families {
            let rows = theta_sweep(spec, nu, &thetas).map_err(crate::run::map_core_error)?;
            let path = out.join(format!("spectra_{}_nu{}.csv", family_slug(spec), nu.get()));
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &rows)
                .map_err(|e| CliError::Config(format!("cannot encode sweep CSV: {e}")))?;
            fs::write(&path, &buf)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            per_family.push(rows);
        }
        sweeps.push(per_family);
    }

    if emit_svg {
        let dissipation: Vec<LinePlot> = nus
            .iter()
            .zip(&sweeps)
            .map(|(nu, per_family)| {
                let mut series = Vec::new();
                for (fi, rows) in per_family.iter().enumerate() {
                    series.push(Series {
                        label: families[fi].to_string(),
                        points: rows.iter().map(|r| (r.theta, r.e1_principal)).collect(),
                        dashed: false,
                        color: fi,
                    });
                    series.push(Series {
                        label: String::new(),
                        points: rows.iter().map(|r| (r.theta, r.e1_spurious)).collect(),
                        dashed: true,
                        color: fi,
                    });
                }
                LinePlot {
                    title: format!("relative amplitude, nu = {}", nu.get()),
                    x_label: "theta".into(),
                    y_label: "E1".into(),
                    series,
                    legend: true,
                }
            })
            .collect();
        let dispersion: Vec<LinePlot> = nus
            .iter()
            .zip(&sweeps)
            .map(|(nu, per_family)| {
                let series = per_family
                    .iter()
                    .enumerate()
                    .map(|(fi, rows)| Series {
                        label: families[fi].to_string(),
                        points: rows
                            .iter()
                            .map(|r| (r.theta, r.e2_principal.unwrap_or(f64::NAN)))
                            .collect(),
                        dashed: false,
                        color: fi,
                    })
                    .collect();
                LinePlot {
                    title: format!("relative wave speed, nu = {}", nu.get()),
                    x_label: "theta".into(),
                    y_label: "E2 (principal)".into(),
                    series,
                    legend: true,
                }
            })
            .collect();
        fs::write(out.join("dissipation.svg"), svg::render_grid(&dissipation))
            .map_err(|e| CliError::Config(format!("cannot write dissipation.svg: {e}")))?;
        fs::write(out.join("dispersion.svg"), svg::render_grid(&dispersion))
            .map_err(|e| CliError::Config(format!("cannot write dispersion.svg: {e}")))?;
    }

    println!(
        "spectra: {} families x {} nu values x {} theta samples -> {}",
        families.len(),
        nus.len(),
        theta_samples,
        out.display()
    );
    Ok(())
}
