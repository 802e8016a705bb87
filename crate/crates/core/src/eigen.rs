//! Instantaneous Hamiltonian on the grid interior and its lowest eigenpairs.
//!
//! The kinetic term is the O(dx^2) central-difference stencil, so H is a
//! symmetric tridiagonal matrix over the interior points with constant
//! off-diagonal -1/(2 dx^2); the hard walls live at the two boundary points.
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with partial pivoting. Both paths are fully deterministic, so
//! repeated solves return bit-identical output.

use crate::error::{Error, Result};
use crate::grid::{EigenSolution, Grid, WavefunctionState};
use crate::potential::PotentialSpec;

#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    grid: Grid,
    /// Diagonal over the interior points: 1/dx^2 + V(x_i, t).
    diagonal: Vec<f64>,
    /// Constant off-diagonal: -1/(2 dx^2).
    off_diagonal: f64,
    time: f64,
}

impl HamiltonianMatrix {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off_diagonal
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Interior dimension (n_points - 2).
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_estimate(&self) -> f64 {
        let e2 = 2.0 * self.off_diagonal.abs();
        self.diagonal
            .iter()
            .map(|d| d.abs() + e2)
            .fold(0.0, f64::max)
    }

    /// y = H v on the interior.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let m = self.dim();
        let e = self.off_diagonal;
        for i in 0..m {
            let mut y = self.diagonal[i] * v[i];
            if i > 0 {
                y += e * v[i - 1];
            }
            if i + 1 < m {
                y += e * v[i + 1];
            }
            out[i] = y;
        }
    }
}

pub fn build_hamiltonian(spec: &PotentialSpec, grid: Grid, t: f64) -> Result<HamiltonianMatrix> {
    let potential = spec.evaluate(grid, t)?;
    let dx = grid.dx();
    let kinetic = 1.0 / (dx * dx);
    let diagonal: Vec<f64> = potential[1..grid.n_points() - 1]
        .iter()
        .map(|v| kinetic + v)
        .collect();
    Ok(HamiltonianMatrix {
        grid,
        diagonal,
        off_diagonal: -0.5 / (dx * dx),
        time: t,
    })
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`,
/// via the Sturm sequence of the shifted LDL^T recurrence.
fn sturm_count(diagonal: &[f64], off: f64, x: f64) -> usize {
    let e2 = off * off;
    let mut count = 0;
    let mut q = f64::INFINITY;
    for &d in diagonal {
        // first pivot is d - x; e2/inf = 0 covers it
        q = d - x - e2 / q;
        if q == 0.0 {
            q = f64::MIN_POSITIVE;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Bisection for the eigenvalue with ascending index `j` (0-based).
fn bisect_eigenvalue(diagonal: &[f64], off: f64, j: usize) -> f64 {
    let e2 = 2.0 * off.abs();
    let mut lo = diagonal.iter().cloned().fold(f64::INFINITY, f64::min) - e2;
    let mut hi = diagonal.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + e2;
    let scale = lo.abs().max(hi.abs()).max(1.0);
    while hi - lo > 1e-15 * scale {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if sturm_count(diagonal, off, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// LU factorization of (T - shift I) with partial pivoting.
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

fn factor_shifted(diagonal: &[f64], off: f64, shift: f64) -> ShiftedLu {
    let m = diagonal.len();
    let mut dl = vec![off; m.saturating_sub(1)];
    let mut d: Vec<f64> = diagonal.iter().map(|v| v - shift).collect();
    let mut du = vec![off; m.saturating_sub(1)];
    let mut du2 = vec![0.0; m.saturating_sub(2)];
    let mut swapped = vec![false; m.saturating_sub(1)];
    for i in 0..m - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = f64::MIN_POSITIVE;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < m {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if d[m - 1] == 0.0 {
        d[m - 1] = f64::MIN_POSITIVE;
    }
    ShiftedLu {
        dl,
        d,
        du,
        du2,
        swapped,
    }
}

impl ShiftedLu {
    fn solve_in_place(&self, b: &mut [f64]) {
        let m = b.len();
        for i in 0..m - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.dl[i] * b[i];
        }
        b[m - 1] /= self.d[m - 1];
        if m >= 2 {
            b[m - 2] = (b[m - 2] - self.du[m - 2] * b[m - 1]) / self.d[m - 2];
        }
        for i in (0..m.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

const MAX_INVERSE_ITERATIONS: usize = 30;
const RESIDUAL_FACTOR: f64 = 1e-8;
const DEGENERACY_GAP: f64 = 1e-12;

/// The `k` lowest eigenpairs, ascending, grid-normalized, with the sign
/// gauge fixed so the first extremum of each vector is positive.
pub fn lowest_eigenpairs(h: &HamiltonianMatrix, k: usize) -> Result<EigenSolution> {
    let m = h.dim();
    if k == 0 || k >= m {
        return Err(Error::InvalidParam(format!(
            "need 1 <= k < interior dimension, got k = {k}, dim = {m}"
        )));
    }
    let norm_h = h.norm_estimate();
    let tol = RESIDUAL_FACTOR * norm_h;

    let mut energies = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut scratch = vec![0.0; m];

    for j in 0..k {
        let lambda = bisect_eigenvalue(h.diagonal(), h.off_diagonal(), j);
        let mut rayleigh = lambda;
        let mut best: Option<Vec<f64>> = None;
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        // offset the shift off the bisected eigenvalue: an exactly singular
        // factorization overflows the solve; escalate if it still does
        for attempt in 0..4 {
            let delta = norm_h * 1e-14 * 100f64.powi(attempt);
            let lu = factor_shifted(h.diagonal(), h.off_diagonal(), lambda + delta);
            // seeded pseudo-random start: a constant vector can be exactly
            // orthogonal to the target (odd states of a symmetric well)
            let mut rng = crate::rng::SplitMix64::new(0x5EED ^ j as u64);
            let mut v: Vec<f64> = (0..m).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            for _ in 0..MAX_INVERSE_ITERATIONS {
                iterations += 1;
                lu.solve_in_place(&mut v);
                // keep the subspace clean of previously found pairs
                for prev in &vectors {
                    let dot: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                    for (vi, pi) in v.iter_mut().zip(prev) {
                        *vi -= dot * pi;
                    }
                }
                let nrm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(nrm > 0.0) || !nrm.is_finite() {
                    break;
                }
                for x in v.iter_mut() {
                    *x /= nrm;
                }
                h.apply(&v, &mut scratch);
                rayleigh = v.iter().zip(&scratch).map(|(a, b)| a * b).sum();
                residual = v
                    .iter()
                    .zip(&scratch)
                    .map(|(vi, hv)| (hv - rayleigh * vi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if residual <= tol {
                    best = Some(v);
                    break;
                }
            }
            if best.is_some() {
                break;
            }
        }
        let Some(v) = best else {
            return Err(Error::NoConvergence {
                index: j,
                residual,
                iterations,
            });
        };
        energies.push(rayleigh);
        vectors.push(v);
    }

    let mut near_degenerate = Vec::new();
    for j in 0..k - 1 {
        if (energies[j + 1] - energies[j]).abs() < DEGENERACY_GAP {
            near_degenerate.push((j, j + 1));
        }
    }

    let states: Result<Vec<WavefunctionState>> = vectors
        .iter_mut()
        .map(|v| {
            fix_sign_gauge(v);
            WavefunctionState::from_interior(h.grid(), v, h.time())
        })
        .collect();

    Ok(EigenSolution {
        energies,
        states: states?,
        near_degenerate,
    })
}

/// Flips the vector so its first interior extremum of nonzero magnitude is
/// positive.
fn fix_sign_gauge(v: &mut [f64]) {
    let max_abs = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let threshold = 1e-6 * max_abs;
    let m = v.len();
    for i in 0..m {
        let left = if i == 0 { 0.0 } else { v[i - 1].abs() };
        let right = if i + 1 == m { 0.0 } else { v[i + 1].abs() };
        let here = v[i].abs();
        if here > threshold && here >= left && here >= right {
            if v[i] < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            return;
        }
    }
}

/// Trapezoid matrix element of position: integral of psi_m * x * psi_n.
pub fn dipole_element(sol: &EigenSolution, m: usize, n: usize) -> Result<f64> {
    if m >= sol.states.len() || n >= sol.states.len() {
        return Err(Error::InvalidParam(format!(
            "dipole indices ({m}, {n}) out of range for {} states",
            sol.states.len()
        )));
    }
    let grid = sol.states[m].grid();
    let integrand: Vec<f64> = sol.states[m]
        .amplitudes()
        .iter()
        .zip(sol.states[n].amplitudes())
        .zip(grid.points())
        .map(|((am, an), x)| am.re * x * an.re)
        .collect();
    Ok(grid.trapezoid(&integrand))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::inner_product;
    use crate::potential::{generate_random, stock_r1, PotentialSpec};

    fn grid() -> Grid {
        Grid::default_box()
    }

    #[test]
    fn free_particle_stencil() {
        let g = Grid::new(0.0, 4.0, 5).unwrap();
        let spec = PotentialSpec::tabulated(vec![0.0; 5]).unwrap();
        let h = build_hamiltonian(&spec, g, 0.0).unwrap();
        assert_eq!(h.diagonal(), &[1.0, 1.0, 1.0]);
        assert_eq!(h.off_diagonal(), -0.5);
    }

    #[test]
    fn ramp_adds_to_diagonal() {
        let spec = PotentialSpec::harmonic(0.2).unwrap().with_ramp(0.01);
        let h0 = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let ht = build_hamiltonian(&spec, grid(), 3.0).unwrap();
        for ((a, b), x) in h0.diagonal().iter().zip(ht.diagonal()).zip(grid().points().skip(1)) {
            assert!((b - a + 0.01 * 3.0 * x).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_spectrum() {
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let sol = lowest_eigenpairs(&h, 6).unwrap();
        for (n, e) in sol.energies.iter().enumerate() {
            let exact = 0.2 * (n as f64 + 0.5);
            assert!((e - exact).abs() < 1e-4, "n={n}: {e} vs {exact}");
        }
    }

    #[test]
    fn particle_in_a_box() {
        let spec = PotentialSpec::tabulated(vec![0.0; 1201]).unwrap();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let sol = lowest_eigenpairs(&h, 1).unwrap();
        let exact = std::f64::consts::PI.powi(2) / (2.0 * 30.0f64.powi(2));
        assert!((sol.energies[0] - exact).abs() < 1e-5);
    }

    #[test]
    fn sho_dipole_ladder_value() {
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let sol = lowest_eigenpairs(&h, 2).unwrap();
        let x01 = dipole_element(&sol, 1, 0).unwrap();
        let exact = 1.0 / (2.0 * 0.2f64).sqrt();
        assert!((x01.abs() - exact).abs() < 1e-4, "{x01} vs {exact}");
        // parity: <0|x|0> = 0 for the symmetric well
        let x00 = dipole_element(&sol, 0, 0).unwrap();
        assert!(x00.abs() < 1e-8);
    }

    #[test]
    fn orthonormal_pairs_and_residuals() {
        let spec = generate_random(17, 0.2, 15.0).unwrap();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let sol = lowest_eigenpairs(&h, 4).unwrap();
        let tol = 1e-8 * h.norm_estimate();
        for i in 0..4 {
            for j in 0..4 {
                let o = inner_product(&sol.states[i], &sol.states[j]).unwrap().norm();
                if i == j {
                    assert!((o - 1.0).abs() < 1e-10);
                } else {
                    assert!(o < 1e-8, "overlap({i},{j}) = {o}");
                }
            }
            // residual in the grid convention matches the l2 check inside
            let interior: Vec<f64> = sol.states[i].amplitudes()
                [1..grid().n_points() - 1]
                .iter()
                .map(|a| a.re)
                .collect();
            let mut hv = vec![0.0; interior.len()];
            h.apply(&interior, &mut hv);
            let r: f64 = hv
                .iter()
                .zip(&interior)
                .map(|(hv, v)| (hv - sol.energies[i] * v).powi(2))
                .sum::<f64>()
                .sqrt()
                * grid().dx().sqrt();
            assert!(r <= tol, "residual {r} > {tol}");
        }
        assert!(sol.energies.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn gauge_is_deterministic() {
        let spec = stock_r1();
        let h = build_hamiltonian(&spec, grid(), 0.0).unwrap();
        let a = lowest_eigenpairs(&h, 3).unwrap();
        let b = lowest_eigenpairs(&h, 3).unwrap();
        for (sa, sb) in a.states.iter().zip(&b.states) {
            assert_eq!(sa.amplitudes(), sb.amplitudes());
        }
        assert_eq!(a.energies, b.energies);
    }

    #[test]
    fn eigenvalue_convergence_is_second_order() {
        let spec = PotentialSpec::harmonic(0.2).unwrap();
        let mut e0 = Vec::new();
        for n in [301usize, 601, 1201] {
            let g = Grid::new(-15.0, 15.0, n).unwrap();
            let h = build_hamiltonian(&spec, g, 0.0).unwrap();
            e0.push(lowest_eigenpairs(&h, 1).unwrap().energies[0]);
        }
        let ratio = (e0[0] - e0[1]) / (e0[1] - e0[2]);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    // independent dense oracle: cyclic Jacobi diagonalization on a coarse grid
    fn jacobi_lowest(diag: &[f64], off: f64, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let m = diag.len();
        let mut a = vec![vec![0.0; m]; m];
        for i in 0..m {
            a[i][i] = diag[i];
            if i + 1 < m {
                a[i][i + 1] = off;
                a[i + 1][i] = off;
            }
        }
        let mut v = vec![vec![0.0; m]; m];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for _sweep in 0..100 {
            let mut offdiag = 0.0f64;
            for p in 0..m {
                for q in p + 1..m {
                    offdiag = offdiag.max(a[p][q].abs());
                }
            }
            if offdiag < 1e-12 {
                break;
            }
            for p in 0..m {
                for q in p + 1..m {
                    if a[p][q].abs() < 1e-14 {
                        continue;
                    }
                    let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for i in 0..m {
                        let aip = a[i][p];
                        let aiq = a[i][q];
                        a[i][p] = c * aip - s * aiq;
                        a[i][q] = s * aip + c * aiq;
                    }
                    for i in 0..m {
                        let api = a[p][i];
                        let aqi = a[q][i];
                        a[p][i] = c * api - s * aqi;
                        a[q][i] = s * api + c * aqi;
                    }
                    for row in v.iter_mut() {
                        let vp = row[p];
                        let vq = row[q];
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap());
        let energies: Vec<f64> = order[..k].iter().map(|&i| a[i][i]).collect();
        let vectors: Vec<Vec<f64>> = order[..k]
            .iter()
            .map(|&col| v.iter().map(|row| row[col]).collect())
            .collect();
        (energies, vectors)
    }

    #[test]
    fn matches_dense_oracle_on_coarse_grid() {
        let g = Grid::new(-15.0, 15.0, 151).unwrap();
        let spec = stock_r1();
        let h = build_hamiltonian(&spec, g, 0.0).unwrap();
        let sol = lowest_eigenpairs(&h, 2).unwrap();
        assert!(sol.energies[1] - sol.energies[0] > 0.0);

        let (oracle_e, oracle_v) = jacobi_lowest(h.diagonal(), h.off_diagonal(), 2);
        for (e, oe) in sol.energies.iter().zip(&oracle_e) {
            assert!((e - oe).abs() < 1e-8, "{e} vs oracle {oe}");
        }
        // dipole against the oracle vectors; with psi = v/sqrt(dx) on the
        // interior the trapezoid dipole reduces to the plain l2 sum
        let x01 = dipole_element(&sol, 1, 0).unwrap();
        let mut oracle_x01 = 0.0;
        for (i, x) in g.points().skip(1).take(g.n_points() - 2).enumerate() {
            oracle_x01 += oracle_v[1][i] * x * oracle_v[0][i];
        }
        assert!(
            (x01.abs() - oracle_x01.abs()).abs() < 1e-6,
            "{x01} vs oracle {oracle_x01}"
        );
    }
}
