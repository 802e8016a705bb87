//! Experiment pipelines behind the CLI subcommands. Everything here is a
//! plain function over the parsed config so the pipelines can be driven
//! from tests without spawning a process.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::adiabaticity::{
    analyze, build_trajectory, calibrate_rate, qac_epsilon, AdiabaticityReport, TrajectoryRecord,
};
use crate::config::{AnalysisConfig, EvolveConfig, ExperimentConfig, GsStudyConfig};
use crate::csvio::{
    self, config_hash, pairs_csv, real_field_csv, report_csv_row, report_text, trajectory_csv,
    write_file, Provenance, REPORT_COLUMNS,
};
use crate::eigen::{build_hamiltonian, dipole_element, lowest_eigenpairs};
use crate::error::{Error, Result};
use crate::grid::{density_of, Grid, WavefunctionState};
use crate::metrics::{
    density_distance, fit_slope_through_origin, sho_ratio, wavefunction_distance, MetricPair,
};
use crate::potential::{family_seeds, generate_random, PotentialKind, PotentialSpec};
use crate::propagate::{evolve, instantaneous_eig_track, EvolutionConfig};
use crate::svg::SvgPlot;

#[derive(Debug, Clone, Copy, Default)]
pub struct OutputOptions {
    pub svg: bool,
    pub frames: bool,
}

fn spec_seed(spec: &PotentialSpec) -> Option<u64> {
    match spec.kind {
        PotentialKind::RandomFourier { seed, .. } => seed,
        _ => None,
    }
}

// --- gs-study ---------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct GsStudySummary {
    pub slope: f64,
    pub r_squared: f64,
    pub n_pairs: usize,
}

fn ground_state(spec: &PotentialSpec, grid: Grid) -> Result<WavefunctionState> {
    let h = build_hamiltonian(spec, grid, 0.0)?;
    Ok(lowest_eigenpairs(&h, 1)?.states.remove(0))
}

/// The 23 family frequencies, geometrically spaced over [omega_min, omega_max]
/// so the frequency ratios sample both sides of the reference evenly.
pub fn sho_family_frequencies(cfg: &GsStudyConfig) -> Vec<f64> {
    let count = cfg.count.unwrap_or(23);
    let log_step = (cfg.omega_max / cfg.omega_min).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| cfg.omega_min * (i as f64 * log_step).exp())
        .collect()
}

pub fn cmd_gs_study(
    config: &ExperimentConfig,
    config_text: &str,
    out_dir: &Path,
) -> Result<GsStudySummary> {
    let study = config
        .gs_study
        .as_ref()
        .ok_or_else(|| Error::Config("gs-study needs a [gs_study] section".into()))?;
    let grid = config.grid.build()?;

    let mut rows: Vec<(String, MetricPair, Option<(f64, f64)>)> = Vec::new();
    let mut points = Vec::new();
    let mut seed = None;

    match study.family.as_str() {
        "sho" => {
            let frequencies = sho_family_frequencies(study);
            if frequencies.len() < 2 {
                return Err(Error::Config("need >= 2 systems in the family".into()));
            }
            let reference = ground_state(
                &PotentialSpec::harmonic(study.reference_omega)
                    .map_err(|e| Error::Config(e.to_string()))?,
                grid,
            )?;
            let reference_density = density_of(&reference);
            for omega in frequencies {
                let spec =
                    PotentialSpec::harmonic(omega).map_err(|e| Error::Config(e.to_string()))?;
                let state = ground_state(&spec, grid)?;
                let d_psi = wavefunction_distance(&reference, &state, 1)?;
                let d_n = density_distance(&reference_density, &density_of(&state))?;
                let pair = MetricPair { d_psi, d_n };
                let nu = omega / study.reference_omega;
                let gridded = if d_psi > 0.0 { d_n / d_psi } else { f64::NAN };
                rows.push((
                    format!("omega_{omega:.6}"),
                    pair,
                    Some((gridded, sho_ratio(nu)?)),
                ));
                points.push(pair);
            }
        }
        "random" => {
            let count = study.count.unwrap_or(10);
            if count < 2 {
                return Err(Error::Config("need >= 2 systems in the family".into()));
            }
            seed = Some(study.seed);
            let seeds = family_seeds(study.seed, count);
            let states: Result<Vec<WavefunctionState>> = seeds
                .iter()
                .map(|&s| ground_state(&generate_random(s, study.lambda, study.half_width)?, grid))
                .collect();
            let states = states?;
            let densities: Vec<_> = states.iter().map(density_of).collect();
            for i in 0..count {
                for j in i + 1..count {
                    let pair = MetricPair {
                        d_psi: wavefunction_distance(&states[i], &states[j], 1)?,
                        d_n: density_distance(&densities[i], &densities[j])?,
                    };
                    rows.push((format!("s{i}-s{j}"), pair, None));
                    points.push(pair);
                }
            }
        }
        other => {
            return Err(Error::Config(format!(
                "gs_study.family must be 'sho' or 'random', got '{other}'"
            )))
        }
    }

    // skip exact-origin points (a system paired with itself) in the fit
    let fit_points: Vec<MetricPair> = points.iter().copied().filter(|p| p.d_psi > 0.0).collect();
    let (slope, r_squared) = fit_slope_through_origin(&fit_points)?;

    let provenance = Provenance {
        config_hash: config_hash(config_text),
        seed,
        grid: Some(grid),
        dt: None,
    };
    write_file(
        &out_dir.join("pairs.csv"),
        &pairs_csv(&provenance, &rows, slope, r_squared),
    )?;

    if points.len() >= 2 {
        let mut plot = SvgPlot::new("ground-state metric scatter", "D_psi", "D_n");
        plot.add_series(
            &study.family,
            points.iter().map(|p| (p.d_psi, p.d_n)).collect(),
        );
        plot.add_line(slope, 0.0, &format!("slope {slope:.3}"));
        write_file(&out_dir.join("pairs.svg"), &plot.render())?;
    }

    Ok(GsStudySummary {
        slope,
        r_squared,
        n_pairs: points.len(),
    })
}

// --- evolve ------------------------------------------------------------------

#[derive(Debug)]
pub struct EvolveArtifacts {
    pub ramp_rate: f64,
    pub records: Vec<TrajectoryRecord>,
    pub report: AdiabaticityReport,
    pub max_norm_deviation: f64,
}

/// Calibrates the ramp, runs the evolution and the instantaneous-GS track,
/// and writes trajectory, report, and optional frame/SVG artifacts.
pub fn run_evolution(
    spec: &PotentialSpec,
    grid: Grid,
    evolve_cfg: &EvolveConfig,
    analysis: &AnalysisConfig,
    provenance: &Provenance,
    out_dir: &Path,
    opts: OutputOptions,
) -> Result<EvolveArtifacts> {
    let p = calibrate_rate(spec, grid, evolve_cfg.epsilon0)?;
    let ramped = spec.clone().with_ramp(p);
    let initial = ground_state(&ramped.clone().with_ramp(0.0), grid)?;

    let config = EvolutionConfig::new(
        evolve_cfg.dt,
        evolve_cfg.t_max,
        evolve_cfg.output_stride,
        ramped.clone(),
        grid,
        initial,
    )?;

    let mut states: Vec<WavefunctionState> = Vec::new();
    let outcome = evolve(&config, |state| states.push(state.clone()))?;

    if opts.frames {
        for state in &states {
            let density = density_of(state);
            write_file(
                &out_dir.join(format!("frames/t_{:.3}.csv", state.time())),
                &real_field_csv(grid, density.values()),
            )?;
        }
    }

    let times: Vec<f64> = states.iter().map(|s| s.time()).collect();
    let eig_track = instantaneous_eig_track(&ramped, grid, &times, 2)?;
    let records = build_trajectory(&states, &eig_track, p)?;
    let report = analyze(&records, analysis.slope, analysis.margin);

    write_file(&out_dir.join("potential.pot"), &ramped.to_file_string())?;
    write_file(
        &out_dir.join("trajectory.csv"),
        &trajectory_csv(provenance, &records),
    )?;
    write_file(&out_dir.join("report.txt"), &report_text(&report))?;
    write_file(
        &out_dir.join("report.csv"),
        &format!("{REPORT_COLUMNS}\n{}\n", report_csv_row(&report)),
    )?;

    if opts.svg {
        write_graphs(&records, analysis, out_dir)?;
    }

    Ok(EvolveArtifacts {
        ramp_rate: p,
        records,
        report,
        max_norm_deviation: outcome.max_norm_deviation,
    })
}

fn write_graphs(
    records: &[TrajectoryRecord],
    analysis: &AnalysisConfig,
    out_dir: &Path,
) -> Result<()> {
    let t_ref_record = analysis.t_ref.map(|t_ref| {
        records
            .iter()
            .min_by(|a, b| {
                (a.t - t_ref)
                    .abs()
                    .partial_cmp(&(b.t - t_ref).abs())
                    .unwrap()
            })
            .copied()
            .expect("records nonempty")
    });

    // (a): initial-state frame with the adiabatic slope line
    let mut graph_a = SvgPlot::new(
        "initial GS vs dynamic state",
        "D_psi(psi(0), psi(t))",
        "D_n(n(0), n(t))",
    );
    graph_a.add_series(
        "trajectory",
        records.iter().map(|r| (r.d_psi_0t, r.d_n_0t)).collect(),
    );
    graph_a.add_line(analysis.slope, 0.0, &format!("slope {:.2}", analysis.slope));
    write_file(&out_dir.join("graph_a.svg"), &graph_a.render())?;

    // (b): instantaneous-GS frame; adiabatic means staying at the origin
    let mut graph_b = SvgPlot::new(
        "instantaneous GS vs dynamic state",
        "D_psi(psi_GS(t), psi(t))",
        "D_n(n_GS(t), n(t))",
    );
    graph_b.add_series(
        "trajectory",
        records.iter().map(|r| (r.d_psi_gst, r.d_n_gst)).collect(),
    );
    graph_b.add_marker(0.0, 0.0, "adiabatic origin");
    write_file(&out_dir.join("graph_b.svg"), &graph_b.render())?;

    // (c): per-quantity frames with the y = x adiabatic line
    for (name, title, extract) in [
        (
            "graph_c_psi.svg",
            "wavefunction distances vs initial GS",
            (|r: &TrajectoryRecord| (r.d_psi_0gs, r.d_psi_0t)) as fn(&TrajectoryRecord) -> (f64, f64),
        ),
        (
            "graph_c_n.svg",
            "density distances vs initial GS",
            |r: &TrajectoryRecord| (r.d_n_0gs, r.d_n_0t),
        ),
    ] {
        let mut plot = SvgPlot::new(title, "distance to instantaneous GS frame", "dynamic distance");
        plot.add_series("trajectory", records.iter().map(extract).collect());
        plot.add_line(1.0, 0.0, "y = x");
        if let Some(r) = t_ref_record {
            let (x, y) = extract(&r);
            plot.add_marker(x, y, "t_ref");
        }
        write_file(&out_dir.join(name), &plot.render())?;
    }
    Ok(())
}

pub fn cmd_evolve(
    config: &ExperimentConfig,
    config_text: &str,
    base_dir: &Path,
    out_dir: &Path,
    opts: OutputOptions,
) -> Result<EvolveArtifacts> {
    let potential = config
        .potential
        .as_ref()
        .ok_or_else(|| Error::Config("evolve needs a [potential] section".into()))?;
    let evolve_cfg = config
        .evolve
        .as_ref()
        .ok_or_else(|| Error::Config("evolve needs an [evolve] section".into()))?;
    let spec = potential.resolve(base_dir)?;
    let grid = config.grid.build()?;
    let provenance = Provenance {
        config_hash: config_hash(config_text),
        seed: spec_seed(&spec),
        grid: Some(grid),
        dt: Some(evolve_cfg.dt),
    };
    run_evolution(
        &spec,
        grid,
        evolve_cfg,
        &config.analysis,
        &provenance,
        out_dir,
        opts,
    )
}

// --- sweep --------------------------------------------------------------------

#[derive(Debug)]
pub struct SweepSummary {
    pub completed: usize,
    pub failed: Vec<(String, String)>,
}

/// Runs every sweep cell on a worker pool. Cell outputs land in per-cell
/// directories and the summary row order follows the config order, so the
/// output bytes do not depend on scheduling.
pub fn cmd_sweep(
    config: &ExperimentConfig,
    config_text: &str,
    base_dir: &Path,
    out_dir: &Path,
    workers: usize,
    opts: OutputOptions,
) -> Result<SweepSummary> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs [[sweep.cells]] entries".into()))?;
    if sweep.cells.is_empty() {
        return Err(Error::Config("sweep has no cells".into()));
    }
    let evolve_cfg = config
        .evolve
        .as_ref()
        .ok_or_else(|| Error::Config("sweep needs an [evolve] section for numerics".into()))?;
    let grid = config.grid.build()?;
    let hash = config_hash(config_text);

    let cell_names: Vec<String> = sweep
        .cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            cell.name
                .clone()
                .unwrap_or_else(|| format!("cell{i:02}_eps{}", cell.epsilon0))
        })
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    let results: Vec<std::result::Result<EvolveArtifacts, String>> = pool.install(|| {
        sweep
            .cells
            .par_iter()
            .zip(&cell_names)
            .map(|(cell, name)| {
                let run = || -> Result<EvolveArtifacts> {
                    let spec = cell.potential.resolve(base_dir)?;
                    let provenance = Provenance {
                        config_hash: hash.clone(),
                        seed: spec_seed(&spec),
                        grid: Some(grid),
                        dt: Some(evolve_cfg.dt),
                    };
                    let cell_cfg = EvolveConfig {
                        epsilon0: cell.epsilon0,
                        ..evolve_cfg.clone()
                    };
                    run_evolution(
                        &spec,
                        grid,
                        &cell_cfg,
                        &config.analysis,
                        &provenance,
                        &out_dir.join("cells").join(name),
                        opts,
                    )
                };
                run().map_err(|e| e.to_string())
            })
            .collect()
    });

    let mut summary = format!("# config_hash = {hash}\ncell,epsilon0,ramp_rate,{REPORT_COLUMNS}\n");
    let mut completed = 0;
    let mut failed = Vec::new();
    for ((cell, name), result) in sweep.cells.iter().zip(&cell_names).zip(&results) {
        match result {
            Ok(artifacts) => {
                completed += 1;
                summary.push_str(&format!(
                    "{name},{},{},{}\n",
                    csvio::fmt_f64(cell.epsilon0),
                    csvio::fmt_f64(artifacts.ramp_rate),
                    report_csv_row(&artifacts.report)
                ));
            }
            Err(message) => {
                failed.push((name.clone(), message.clone()));
                summary.push_str(&format!("{name},{},FAILED\n", csvio::fmt_f64(cell.epsilon0)));
            }
        }
    }
    write_file(&out_dir.join("summary.csv"), &summary)?;

    Ok(SweepSummary { completed, failed })
}

// --- calibrate ------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct CalibrationInfo {
    pub ramp_rate: f64,
    pub e0: f64,
    pub e1: f64,
    pub dipole_01: f64,
    pub epsilon0: f64,
}

pub fn cmd_calibrate(
    config: &ExperimentConfig,
    base_dir: &Path,
) -> Result<CalibrationInfo> {
    let potential = config
        .potential
        .as_ref()
        .ok_or_else(|| Error::Config("calibrate needs a [potential] section".into()))?;
    let epsilon0 = config
        .evolve
        .as_ref()
        .ok_or_else(|| Error::Config("calibrate needs [evolve].epsilon0".into()))?
        .epsilon0;
    let spec = potential.resolve(base_dir)?;
    let grid = config.grid.build()?;
    let p = calibrate_rate(&spec, grid, epsilon0)?;

    let h = build_hamiltonian(&spec.clone().with_ramp(0.0), grid, 0.0)?;
    let sol = lowest_eigenpairs(&h, 2)?;
    let check = qac_epsilon(&sol, p, 1, 0)?;
    Ok(CalibrationInfo {
        ramp_rate: p,
        e0: sol.energies[0],
        e1: sol.energies[1],
        dipole_01: dipole_element(&sol, 1, 0)?,
        epsilon0: check,
    })
}

/// Maps errors to the CLI exit-code contract: 0 success, 1 experiment
/// failure, 2 config error.
pub fn exit_code_for(error: &Error) -> i32 {
    match error {
        Error::Config(_) | Error::InvalidGrid(_) => 2,
        _ => 1,
    }
}

pub fn resolve_base_dir(config_path: &Path) -> PathBuf {
    config_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
