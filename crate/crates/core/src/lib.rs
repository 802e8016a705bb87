//! One-dimensional single-particle quantum systems under a linearly ramped
//! electric field, with natural metrics on wavefunctions and densities for
//! quantifying how adiabatic an evolution is.
//!
//! The crate is organized bottom-up:
//! - [`grid`]: uniform hard-wall grid, normalized states, densities
//! - [`potential`]: harmonic, random Fourier, and tabulated potentials
//! - [`eigen`]: tridiagonal eigensolver for the lowest eigenpairs
//! - [`propagate`]: Crank-Nicolson time evolution
//! - [`metrics`]: the wavefunction and density distances and fits
//! - [`adiabaticity`]: ramp calibration, trajectories, reports
//! - [`commands`]: the experiment pipelines behind the `adiab` binary

pub mod adiabaticity;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod potential;
pub mod propagate;
pub mod rng;
pub mod svg;

pub use adiabaticity::{
    analyze, build_trajectory, calibrate_rate, degree_of_adiabaticity, qac_epsilon,
    AdiabaticityReport, TrajectoryRecord,
};
pub use config::ExperimentConfig;
pub use eigen::{build_hamiltonian, dipole_element, lowest_eigenpairs, HamiltonianMatrix};
pub use error::{Error, Result};
pub use grid::{density_of, inner_product, DensityProfile, EigenSolution, Grid, WavefunctionState};
pub use metrics::{
    density_distance, fit_slope_through_origin, sho_ratio, sho_ratio_limit, wavefunction_distance,
    MetricPair,
};
pub use potential::{generate_random, PotentialKind, PotentialSpec};
pub use propagate::{evolve, instantaneous_eig_track, EvolutionConfig};
pub use rng::SplitMix64;
