//! Crank-Nicolson propagation of the wavefunction under the ramped
//! Hamiltonian, plus tracking of the instantaneous ground state.
//!
//! Each step solves `(I + i dt/2 H_mid) psi' = (I - i dt/2 H_mid) psi` with
//! the Hamiltonian frozen at the midpoint time `t + dt/2`. The scheme is
//! unitary for the tridiagonal H up to roundoff and time-symmetric, which
//! the time-reversal test below exercises directly.

use num_complex::Complex64;

use crate::eigen::{build_hamiltonian, lowest_eigenpairs, HamiltonianMatrix};
use crate::error::{Error, Result};
use crate::grid::{EigenSolution, Grid, WavefunctionState};
use crate::potential::PotentialSpec;

/// Hard abort threshold on norm drift; drift this large means dt or the
/// grid is too coarse for the run.
pub const NORM_DRIFT_ABORT: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_max: f64,
    pub output_stride: usize,
    pub spec: PotentialSpec,
    pub grid: Grid,
    pub initial: WavefunctionState,
}

impl EvolutionConfig {
    pub fn new(
        dt: f64,
        t_max: f64,
        output_stride: usize,
        spec: PotentialSpec,
        grid: Grid,
        initial: WavefunctionState,
    ) -> Result<Self> {
        if !(dt > 0.0 && dt <= 0.01) {
            return Err(Error::InvalidParam(format!(
                "dt must be in (0, 0.01], got {dt}"
            )));
        }
        if !(t_max > 0.0) {
            return Err(Error::InvalidParam(format!(
                "t_max must be positive, got {t_max}"
            )));
        }
        if output_stride == 0 {
            return Err(Error::InvalidParam("output_stride must be >= 1".into()));
        }
        if initial.grid() != grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            dt,
            t_max,
            output_stride,
            spec,
            grid,
            initial,
        })
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round().max(1.0) as usize
    }
}

#[derive(Debug)]
pub struct EvolveOutcome {
    pub final_state: WavefunctionState,
    /// Largest |norm - 1| observed over all steps.
    pub max_norm_deviation: f64,
}

/// One Crank-Nicolson step with the given midpoint Hamiltonian. Exposed so
/// the time-symmetry of the scheme can be tested by stepping backwards.
pub fn crank_nicolson_step(h_mid: &HamiltonianMatrix, dt: f64, psi: &mut [Complex64]) {
    let mut scratch = CnScratch::new(h_mid.dim());
    cn_step(h_mid.diagonal(), h_mid.off_diagonal(), dt, psi, &mut scratch);
}

struct CnScratch {
    rhs: Vec<Complex64>,
    cp: Vec<Complex64>,
}

impl CnScratch {
    fn new(m: usize) -> Self {
        Self {
            rhs: vec![Complex64::new(0.0, 0.0); m],
            cp: vec![Complex64::new(0.0, 0.0); m],
        }
    }
}

fn cn_step(diag: &[f64], off: f64, dt: f64, psi: &mut [Complex64], scratch: &mut CnScratch) {
    let m = diag.len();
    let a = Complex64::new(0.0, 0.5 * dt);
    let c = a * off; // constant off-diagonal of both CN operators

    // rhs = (I - a H) psi
    for i in 0..m {
        let mut r = (1.0 - a * diag[i]) * psi[i];
        if i > 0 {
            r -= c * psi[i - 1];
        }
        if i + 1 < m {
            r -= c * psi[i + 1];
        }
        scratch.rhs[i] = r;
    }

    // Thomas solve of (I + a H) psi' = rhs; the operator is diagonally
    // dominant for dt <= 0.01 on our grids, so no pivoting is needed.
    let b0 = 1.0 + a * diag[0];
    scratch.cp[0] = c / b0;
    psi[0] = scratch.rhs[0] / b0;
    for i in 1..m {
        let denom = 1.0 + a * diag[i] - c * scratch.cp[i - 1];
        scratch.cp[i] = c / denom;
        psi[i] = (scratch.rhs[i] - c * psi[i - 1]) / denom;
    }
    for i in (0..m - 1).rev() {
        let next = psi[i + 1];
        psi[i] -= scratch.cp[i] * next;
    }
}

/// Evolves the initial state to `t_max`, handing a state to `sink` at every
/// `output_stride`-th step (including t = 0 and the final step when it
/// lands on the stride). Aborts if the norm drifts past [`NORM_DRIFT_ABORT`].
pub fn evolve<F>(config: &EvolutionConfig, mut sink: F) -> Result<EvolveOutcome>
where
    F: FnMut(&WavefunctionState),
{
    let grid = config.grid;
    let m = grid.n_points() - 2;
    let dx = grid.dx();
    let off = -0.5 / (dx * dx);
    let kinetic = 1.0 / (dx * dx);
    let static_potential = config.spec.evaluate_static(grid)?;
    let diag_static: Vec<f64> = static_potential[1..grid.n_points() - 1]
        .iter()
        .map(|v| kinetic + v)
        .collect();
    let x_interior: Vec<f64> = grid.points().skip(1).take(m).collect();
    let p = config.spec.ramp_rate;

    let mut psi: Vec<Complex64> = config.initial.amplitudes()[1..grid.n_points() - 1].to_vec();
    let mut diag_mid = vec![0.0; m];
    let mut scratch = CnScratch::new(m);
    let n_steps = config.n_steps();
    let mut max_dev = 0.0f64;

    let emit = |psi: &[Complex64], t: f64| -> Result<WavefunctionState> {
        let mut amplitudes = Vec::with_capacity(grid.n_points());
        amplitudes.push(Complex64::new(0.0, 0.0));
        amplitudes.extend_from_slice(psi);
        amplitudes.push(Complex64::new(0.0, 0.0));
        WavefunctionState::new(grid, amplitudes, t)
    };

    sink(&emit(&psi, 0.0)?);

    for j in 0..n_steps {
        let t_mid = (j as f64 + 0.5) * config.dt;
        let pt = p * t_mid;
        for i in 0..m {
            diag_mid[i] = diag_static[i] - pt * x_interior[i];
        }
        cn_step(&diag_mid, off, config.dt, &mut psi, &mut scratch);

        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx;
        let dev = (norm - 1.0).abs();
        max_dev = max_dev.max(dev);
        let t = (j + 1) as f64 * config.dt;
        if dev > NORM_DRIFT_ABORT {
            return Err(Error::NormDrift { t, deviation: dev });
        }
        if (j + 1) % config.output_stride == 0 {
            sink(&emit(&psi, t)?);
        }
    }

    Ok(EvolveOutcome {
        final_state: emit(&psi, n_steps as f64 * config.dt)?,
        max_norm_deviation: max_dev,
    })
}

/// Lowest-k eigenpairs of the frozen Hamiltonian at each requested time.
pub fn instantaneous_eig_track(
    spec: &PotentialSpec,
    grid: Grid,
    times: &[f64],
    k: usize,
) -> Result<Vec<EigenSolution>> {
    times
        .iter()
        .map(|&t| {
            let h = build_hamiltonian(spec, grid, t)?;
            lowest_eigenpairs(&h, k)
        })
        .collect()
}

/// Ground state of the frozen Hamiltonian at each requested time.
pub fn instantaneous_gs_track(
    spec: &PotentialSpec,
    grid: Grid,
    times: &[f64],
) -> Result<Vec<WavefunctionState>> {
    Ok(instantaneous_eig_track(spec, grid, times, 1)?
        .into_iter()
        .map(|sol| sol.states.into_iter().next().expect("k = 1"))
        .collect())
}
