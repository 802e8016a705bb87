//! Uniform 1D spatial grid and the field types living on it.
//!
//! All integrals use the trapezoid rule, consistent in order with the
//! central-difference Hamiltonian. States carry hard-wall (Dirichlet)
//! boundaries: the amplitudes at both edge points are exactly zero.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on the trapezoid norm of stored states and densities.
pub const NORM_TOL: f64 = 1e-10;

/// Uniform grid on `[x_min, x_max]` with points `x_i = x_min + i*dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {n_points}"
            )));
        }
        let dx = (x_max - x_min) / (n_points - 1) as f64;
        Ok(Self {
            x_min,
            x_max,
            n_points,
            dx,
        })
    }

    /// Default box of the studies: half-width L = 15 a.u., dx = 0.025.
    pub fn default_box() -> Self {
        Self::new(-15.0, 15.0, 1201).expect("valid default grid")
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Trapezoid quadrature of real samples on this grid.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let interior: f64 = values[1..values.len() - 1].iter().sum();
        (interior + 0.5 * (values[0] + values[values.len() - 1])) * self.dx
    }

    /// Trapezoid quadrature of complex samples on this grid.
    pub fn trapezoid_complex(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.n_points);
        let mut sum = 0.5 * (values[0] + values[values.len() - 1]);
        for v in &values[1..values.len() - 1] {
            sum += v;
        }
        sum * self.dx
    }
}

/// Single-particle wavefunction sampled on a [`Grid`], normalized to N = 1.
#[derive(Debug, Clone)]
pub struct WavefunctionState {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    time: f64,
}

impl WavefunctionState {
    /// Wraps pre-normalized amplitudes. Errors if the trapezoid norm is off
    /// by more than [`NORM_TOL`] or the boundary values are nonzero; no
    /// silent renormalization happens here.
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::GridMismatch);
        }
        let first = amplitudes[0];
        let last = amplitudes[amplitudes.len() - 1];
        if first != Complex64::new(0.0, 0.0) || last != Complex64::new(0.0, 0.0) {
            return Err(Error::BoundaryNotZero);
        }
        let state = Self {
            grid,
            amplitudes,
            time,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NormViolation {
                norm: norm - 1.0,
                expected: 1.0,
            });
        }
        Ok(state)
    }

    /// Samples `f` on the grid, forces the hard-wall boundaries to zero and
    /// normalizes explicitly. The builder for analytic states.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: Grid, time: f64, f: F) -> Result<Self> {
        let mut amplitudes: Vec<Complex64> = grid.points().map(f).collect();
        let n = amplitudes.len();
        amplitudes[0] = Complex64::new(0.0, 0.0);
        amplitudes[n - 1] = Complex64::new(0.0, 0.0);
        normalize_in_place(grid, &mut amplitudes)?;
        Self::new(grid, amplitudes, time)
    }

    /// Normalizing builder for full-grid complex samples; boundaries are
    /// forced to zero.
    pub fn from_samples(grid: Grid, mut amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::GridMismatch);
        }
        let n = amplitudes.len();
        amplitudes[0] = Complex64::new(0.0, 0.0);
        amplitudes[n - 1] = Complex64::new(0.0, 0.0);
        normalize_in_place(grid, &mut amplitudes)?;
        Self::new(grid, amplitudes, time)
    }

    /// Normalizing builder for raw interior samples (boundaries added as zeros).
    pub fn from_interior(grid: Grid, interior: &[f64], time: f64) -> Result<Self> {
        if interior.len() != grid.n_points() - 2 {
            return Err(Error::GridMismatch);
        }
        let mut amplitudes = Vec::with_capacity(grid.n_points());
        amplitudes.push(Complex64::new(0.0, 0.0));
        amplitudes.extend(interior.iter().map(|&v| Complex64::new(v, 0.0)));
        amplitudes.push(Complex64::new(0.0, 0.0));
        normalize_in_place(grid, &mut amplitudes)?;
        Self::new(grid, amplitudes, time)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Trapezoid norm integral of |psi|^2.
    pub fn norm(&self) -> f64 {
        let sq: Vec<f64> = self.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        self.grid.trapezoid(&sq)
    }
}

fn normalize_in_place(grid: Grid, amplitudes: &mut [Complex64]) -> Result<()> {
    let sq: Vec<f64> = amplitudes.iter().map(|a| a.norm_sqr()).collect();
    let norm = grid.trapezoid(&sq);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidParam(format!(
            "cannot normalize samples with norm integral {norm}"
        )));
    }
    let scale = 1.0 / norm.sqrt();
    for a in amplitudes.iter_mut() {
        *a *= scale;
    }
    Ok(())
}

/// Nonnegative particle density on a [`Grid`], integrating to N = 1.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    grid: Grid,
    values: Vec<f64>,
}

impl DensityProfile {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParam(
                "density values must be finite and nonnegative".into(),
            ));
        }
        let integral = grid.trapezoid(&values);
        if (integral - 1.0).abs() > NORM_TOL {
            return Err(Error::NormViolation {
                norm: integral - 1.0,
                expected: 1.0,
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// n(x) = |psi(x)|^2 for a single particle.
pub fn density_of(psi: &WavefunctionState) -> DensityProfile {
    let values: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    DensityProfile {
        grid: psi.grid(),
        values,
    }
}

/// Trapezoid-rule overlap integral of conj(psi1) * psi2.
pub fn inner_product(psi1: &WavefunctionState, psi2: &WavefunctionState) -> Result<Complex64> {
    if psi1.grid() != psi2.grid() {
        return Err(Error::GridMismatch);
    }
    let products: Vec<Complex64> = psi1
        .amplitudes()
        .iter()
        .zip(psi2.amplitudes())
        .map(|(a, b)| a.conj() * b)
        .collect();
    Ok(psi1.grid().trapezoid_complex(&products))
}

/// Lowest eigenpairs of an instantaneous Hamiltonian: ascending energies and
/// mutually orthonormal states. `near_degenerate` flags adjacent pairs closer
/// than 1e-12, for which the adiabatic criterion is undefined.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub energies: Vec<f64>,
    pub states: Vec<WavefunctionState>,
    pub near_degenerate: Vec<(usize, usize)>,
}

impl EigenSolution {
    pub fn ground_state(&self) -> &WavefunctionState {
        &self.states[0]
    }

    pub fn time(&self) -> f64 {
        self.states[0].time()
    }
}
