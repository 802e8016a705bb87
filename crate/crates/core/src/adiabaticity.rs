//! Adiabaticity diagnostics: the two-level criterion epsilon(t), ramp-rate
//! calibration against a target epsilon(0), trajectory assembly in metric
//! space, and the post-run audits (degree of adiabaticity, arch period,
//! occupancy above the adiabatic line).

use crate::eigen::{build_hamiltonian, dipole_element, lowest_eigenpairs};
use crate::error::{Error, Result};
use crate::grid::{density_of, EigenSolution, Grid, WavefunctionState};
use crate::metrics::{density_distance, wavefunction_distance};
use crate::potential::PotentialSpec;

/// One output time of a run: all six metric distances between the initial
/// ground state (0), the dynamic state (t) and the instantaneous ground
/// state (gs), plus epsilon(t), the two lowest energies and the norm.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub d_psi_0t: f64,
    pub d_n_0t: f64,
    pub d_psi_gst: f64,
    pub d_n_gst: f64,
    pub d_psi_0gs: f64,
    pub d_n_0gs: f64,
    pub epsilon: f64,
    pub e0: f64,
    pub e1: f64,
    pub norm: f64,
}

/// Summary audit of one run.
#[derive(Debug, Clone, Copy)]
pub struct AdiabaticityReport {
    pub max_degree_percent: f64,
    pub mean_degree_percent: f64,
    pub arch_period_psi: Option<f64>,
    pub arch_period_n: Option<f64>,
    pub above_line_fraction: f64,
    pub slope_used: f64,
}

/// Two-level adiabatic criterion for the linear ramp: with Hdot = -p x,
/// epsilon = p |<m|x|n>| / (E_n - E_m)^2.
pub fn qac_epsilon(sol: &EigenSolution, p: f64, m: usize, n: usize) -> Result<f64> {
    let gap = sol.energies[n] - sol.energies[m];
    if gap.abs() <= 1e-12 {
        return Err(Error::Degenerate(n.min(m), n.max(m)));
    }
    let x_mn = dipole_element(sol, m, n)?;
    Ok(p * x_mn.abs() / (gap * gap))
}

/// Ramp rate p that makes epsilon(0) equal `epsilon0` for the lowest level
/// pair of the static potential.
pub fn calibrate_rate(spec: &PotentialSpec, grid: Grid, epsilon0: f64) -> Result<f64> {
    if !(epsilon0 > 0.0) {
        return Err(Error::InvalidParam(format!(
            "target epsilon(0) must be positive, got {epsilon0}"
        )));
    }
    let static_spec = spec.clone().with_ramp(0.0);
    let h = build_hamiltonian(&static_spec, grid, 0.0)?;
    let sol = lowest_eigenpairs(&h, 2)?;
    let gap = sol.energies[1] - sol.energies[0];
    if gap.abs() <= 1e-12 {
        return Err(Error::Degenerate(0, 1));
    }
    let x01 = dipole_element(&sol, 1, 0)?.abs();
    if x01 < 1e-12 {
        return Err(Error::ForbiddenTransition);
    }
    Ok(epsilon0 * gap * gap / x01)
}

/// Joins the dynamic states with the eigen track (k >= 2, matching times)
/// into per-time records. The first dynamic state is the initial reference.
pub fn build_trajectory(
    dynamic: &[WavefunctionState],
    eig_track: &[EigenSolution],
    p: f64,
) -> Result<Vec<TrajectoryRecord>> {
    if dynamic.is_empty() || dynamic.len() != eig_track.len() {
        return Err(Error::TimeMismatch(dynamic.len().min(eig_track.len())));
    }
    let initial = &dynamic[0];
    let initial_density = density_of(initial);
    let mut records = Vec::with_capacity(dynamic.len());
    for (i, (state, sol)) in dynamic.iter().zip(eig_track).enumerate() {
        if (state.time() - sol.time()).abs() > 1e-9 {
            return Err(Error::TimeMismatch(i));
        }
        let gs = sol.ground_state();
        let density = density_of(state);
        let gs_density = density_of(gs);
        records.push(TrajectoryRecord {
            t: state.time(),
            d_psi_0t: wavefunction_distance(initial, state, 1)?,
            d_n_0t: density_distance(&initial_density, &density)?,
            d_psi_gst: wavefunction_distance(gs, state, 1)?,
            d_n_gst: density_distance(&gs_density, &density)?,
            d_psi_0gs: wavefunction_distance(initial, gs, 1)?,
            d_n_0gs: density_distance(&initial_density, &gs_density)?,
            epsilon: qac_epsilon(sol, p, 1, 0)?,
            e0: sol.energies[0],
            e1: sol.energies[1],
            norm: state.norm(),
        });
    }
    Ok(records)
}

/// Percentage deviation of the dynamic state from the instantaneous ground
/// state, on the scale where D_psi = sqrt(N) is maximal non-adiabaticity
/// (N = 1 here). Values above 100 are possible since D_psi can reach
/// sqrt(2N); report aggregation caps them at 100.
pub fn degree_of_adiabaticity(record: &TrajectoryRecord) -> f64 {
    100.0 * record.d_psi_gst
}

/// Mean spacing of the prominent maxima of the linearly detrended series,
/// or None when fewer than three such maxima exist. The first maximum ends
/// the ramp-up phase, so only spacings between maxima enter.
pub fn arch_period(series: &[(f64, f64)]) -> Option<f64> {
    if series.len() < 5 {
        return None;
    }
    // linear detrend
    let n = series.len() as f64;
    let mean_t: f64 = series.iter().map(|(t, _)| t).sum::<f64>() / n;
    let mean_y: f64 = series.iter().map(|(_, y)| y).sum::<f64>() / n;
    let var_t: f64 = series.iter().map(|(t, _)| (t - mean_t).powi(2)).sum();
    let cov: f64 = series
        .iter()
        .map(|(t, y)| (t - mean_t) * (y - mean_y))
        .sum();
    let slope = if var_t > 0.0 { cov / var_t } else { 0.0 };
    let detrended: Vec<f64> = series
        .iter()
        .map(|(t, y)| y - slope * (t - mean_t))
        .collect();

    let lo = detrended.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = detrended.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let amplitude = hi - lo;
    // residual must rise above detrending round-off for peaks to mean anything
    let y_scale = series
        .iter()
        .fold(0.0f64, |acc, (_, y)| acc.max(y.abs()))
        .max(1e-300);
    if !(amplitude > 1e-12 * y_scale) {
        return None;
    }
    let min_prominence = 0.25 * amplitude;

    let mut peak_times = Vec::new();
    for i in 1..detrended.len() - 1 {
        if !(detrended[i] >= detrended[i - 1] && detrended[i] > detrended[i + 1]) {
            continue;
        }
        // prominence: drop to the lowest valley before meeting a higher
        // point, on each side; the smaller drop counts
        let peak = detrended[i];
        let side_drop = |range: &mut dyn Iterator<Item = usize>| -> f64 {
            let mut valley = peak;
            for j in range {
                if detrended[j] > peak {
                    break;
                }
                valley = valley.min(detrended[j]);
            }
            peak - valley
        };
        let left = side_drop(&mut (0..i).rev());
        let right = side_drop(&mut (i + 1..detrended.len()));
        if left.min(right) >= min_prominence {
            peak_times.push(series[i].0);
        }
    }
    if peak_times.len() < 3 {
        return None;
    }
    let spacings: Vec<f64> = peak_times.windows(2).map(|w| w[1] - w[0]).collect();
    Some(spacings.iter().sum::<f64>() / spacings.len() as f64)
}

/// Fraction of records lying above the adiabatic line by more than `margin`
/// in the initial-state frame (d_n_0t vs d_psi_0t).
pub fn occupancy_above_line(records: &[TrajectoryRecord], slope: f64, margin: f64) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let above = records
        .iter()
        .filter(|r| r.d_n_0t > slope * r.d_psi_0t + margin)
        .count();
    above as f64 / records.len() as f64
}

/// Full audit of a trajectory with the given adiabatic-line slope and
/// occupancy margin.
pub fn analyze(records: &[TrajectoryRecord], slope: f64, margin: f64) -> AdiabaticityReport {
    let degrees: Vec<f64> = records
        .iter()
        .map(|r| degree_of_adiabaticity(r).min(100.0))
        .collect();
    let max_degree = degrees.iter().cloned().fold(0.0, f64::max);
    let mean_degree = if degrees.is_empty() {
        0.0
    } else {
        degrees.iter().sum::<f64>() / degrees.len() as f64
    };
    let psi_series: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.d_psi_gst)).collect();
    let n_series: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.d_n_gst)).collect();
    AdiabaticityReport {
        max_degree_percent: max_degree,
        mean_degree_percent: mean_degree,
        arch_period_psi: arch_period(&psi_series),
        arch_period_n: arch_period(&n_series),
        above_line_fraction: occupancy_above_line(records, slope, margin),
        slope_used: slope,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{generate_random, PotentialSpec};
    use crate::propagate::instantaneous_eig_track;

    fn grid() -> Grid {
        Grid::default_box()
    }

    fn sho_solution() -> EigenSolution {
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        lowest_eigenpairs(&h, 2).unwrap()
    }

    #[test]
    fn epsilon_is_linear_in_rate() {
        let sol = sho_solution();
        assert_eq!(qac_epsilon(&sol, 0.0, 1, 0).unwrap(), 0.0);
        let e1 = qac_epsilon(&sol, 1e-4, 1, 0).unwrap();
        let e2 = qac_epsilon(&sol, 2e-4, 1, 0).unwrap();
        assert_eq!(e2, 2.0 * e1);
    }

    #[test]
    fn sho_calibration_matches_analytic_rate() {
        // p = eps0 * omega^2 * sqrt(2 omega) for the harmonic well
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let p = calibrate_rate(&spec, grid(), 0.01).unwrap();
        let analytic = 0.01 * 0.2f64.powi(2) * (2.0 * 0.2f64).sqrt();
        assert!((analytic - 2.530e-4).abs() < 1e-7);
        assert!((p - analytic).abs() / analytic < 1e-3, "{p} vs {analytic}");
    }

    #[test]
    fn calibration_round_trips_epsilon0() {
        for seed in [5u64, 17] {
            let spec = generate_random(seed, 0.2, 15.0).unwrap();
            let p = calibrate_rate(&spec, grid(), 0.01).unwrap();
            let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
            let sol = lowest_eigenpairs(&h, 2).unwrap();
            let eps = qac_epsilon(&sol, p, 1, 0).unwrap();
            assert!((eps - 0.01).abs() < 1e-10, "eps {eps}");
        }
    }

    #[test]
    fn same_parity_dipole_vanishes() {
        // levels 0 and 2 of a symmetric well share parity, so the criterion
        // applied to that pair has a vanishing matrix element
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let sol = lowest_eigenpairs(&h, 3).unwrap();
        let x20 = dipole_element(&sol, 2, 0).unwrap();
        assert!(x20.abs() < 1e-8);
        let eps = qac_epsilon(&sol, 1.0, 2, 0).unwrap();
        assert!(eps < 1e-7);
    }

    #[test]
    fn trajectory_start_and_idealized_adiabatic_run() {
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let p = calibrate_rate(&spec, grid(), 0.01).unwrap();
        let ramped = spec.with_ramp(p);
        let times = [0.0, 10.0, 20.0];
        let track = instantaneous_eig_track(&ramped, grid(), &times, 2).unwrap();
        // idealized dynamics: the dynamic state IS the instantaneous GS
        let dynamic: Vec<WavefunctionState> = track
            .iter()
            .map(|sol| sol.ground_state().clone())
            .collect();
        let records = build_trajectory(&dynamic, &track, p).unwrap();

        // self-distances: the overlap magnitude carries ~1e-16 of rounding,
        // which the square root amplifies to ~1e-8
        let r0 = &records[0];
        assert_eq!(r0.t, 0.0);
        for d in [r0.d_psi_0t, r0.d_n_0t, r0.d_psi_gst, r0.d_n_gst, r0.d_psi_0gs, r0.d_n_0gs] {
            assert!(d.abs() < 1e-7);
        }
        assert!((r0.epsilon - 0.01).abs() < 1e-10);

        for r in &records {
            assert!(r.d_psi_gst < 1e-7 && r.d_n_gst < 1e-12);
            assert!((r.d_psi_0t - r.d_psi_0gs).abs() < 1e-12);
            assert!((r.d_n_0t - r.d_n_0gs).abs() < 1e-12);
        }
    }

    #[test]
    fn trajectory_rejects_mismatched_times() {
        let spec = PotentialSpec::harmonic(0.2).unwrap().with_ramp(1e-4);
        let track_a = instantaneous_eig_track(&spec, grid(), &[0.0, 10.0], 2).unwrap();
        let track_b = instantaneous_eig_track(&spec, grid(), &[0.0, 11.0], 2).unwrap();
        let dynamic: Vec<WavefunctionState> = track_a
            .iter()
            .map(|sol| sol.ground_state().clone())
            .collect();
        assert!(matches!(
            build_trajectory(&dynamic, &track_b, 1e-4),
            Err(Error::TimeMismatch(1))
        ));
    }

    #[test]
    fn degree_scale() {
        let mut r = TrajectoryRecord {
            t: 0.0,
            d_psi_0t: 0.0,
            d_n_0t: 0.0,
            d_psi_gst: 0.0,
            d_n_gst: 0.0,
            d_psi_0gs: 0.0,
            d_n_0gs: 0.0,
            epsilon: 0.0,
            e0: 0.0,
            e1: 0.0,
            norm: 1.0,
        };
        assert_eq!(degree_of_adiabaticity(&r), 0.0);
        r.d_psi_gst = 1.0;
        assert_eq!(degree_of_adiabaticity(&r), 100.0);
        r.d_psi_gst = 0.05;
        assert!((degree_of_adiabaticity(&r) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn arch_period_on_synthetic_arches() {
        // |sin|-shaped arches with period 2 pi / 0.2 = 31.416
        let omega: f64 = 0.2;
        let series: Vec<(f64, f64)> = (0..2000)
            .map(|i| {
                let t = i as f64 * 0.05;
                (t, (0.5 * omega * t).sin().abs())
            })
            .collect();
        let period = arch_period(&series).unwrap();
        let exact = 2.0 * std::f64::consts::PI / omega;
        assert!((period - exact).abs() < 0.3, "{period} vs {exact}");
    }

    #[test]
    fn arch_period_absent_without_oscillation() {
        let flat: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, 0.3)).collect();
        assert!(arch_period(&flat).is_none());
        let monotone: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, i as f64 * 0.01)).collect();
        assert!(arch_period(&monotone).is_none());
    }

    #[test]
    fn occupancy_counts_displaced_points() {
        let mut records = Vec::new();
        for i in 0..10 {
            let d_psi = 0.1 * (i + 1) as f64;
            // half on the line, half displaced above by 2x the margin
            let offset = if i % 2 == 0 { 0.0 } else { 0.02 };
            records.push(TrajectoryRecord {
                t: i as f64,
                d_psi_0t: d_psi,
                d_n_0t: 1.5 * d_psi + offset,
                d_psi_gst: 0.0,
                d_n_gst: 0.0,
                d_psi_0gs: 0.0,
                d_n_0gs: 0.0,
                epsilon: 0.0,
                e0: 0.0,
                e1: 0.1,
                norm: 1.0,
            });
        }
        assert_eq!(occupancy_above_line(&records, 1.5, 0.01), 0.5);
        // all on the line: nothing above
        for r in records.iter_mut() {
            r.d_n_0t = 1.5 * r.d_psi_0t;
        }
        assert_eq!(occupancy_above_line(&records, 1.5, 0.01), 0.0);
    }
}
