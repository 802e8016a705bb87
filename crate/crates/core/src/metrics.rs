//! Natural metrics on wavefunctions and densities, the analytic ratio for
//! pairs of harmonic-oscillator ground states, and the through-origin slope
//! fit used by the ground-state studies.
//!
//! For states normalized to N particles the metrics are
//! `D_psi = sqrt(2N - 2N |<psi1|psi2>|)` and `D_n = integral |n1 - n2| dx`,
//! bounded by sqrt(2N) and 2N. D_psi ignores a global phase by construction.

use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::grid::{inner_product, DensityProfile, WavefunctionState};

/// Gradient of D_n / D_psi for two harmonic oscillators as their frequency
/// ratio approaches 1: 4 / sqrt(e pi).
pub fn sho_ratio_limit() -> f64 {
    4.0 / (std::f64::consts::E * std::f64::consts::PI).sqrt()
}

/// One point of a metric-metric scatter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPair {
    pub d_psi: f64,
    pub d_n: f64,
}

/// Phase-invariant wavefunction distance for states normalized to
/// `n_particles`. A slightly negative radicand (within 1e-12) is clamped to
/// zero; anything below that signals an un-normalized input and errors.
pub fn wavefunction_distance(
    psi1: &WavefunctionState,
    psi2: &WavefunctionState,
    n_particles: u32,
) -> Result<f64> {
    let overlap = inner_product(psi1, psi2)?.norm();
    let n = n_particles as f64;
    let radicand = 2.0 * n * (1.0 - overlap);
    if radicand < -1e-12 {
        return Err(Error::NormViolation {
            norm: radicand,
            expected: 0.0,
        });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// L1 distance between two densities.
pub fn density_distance(n1: &DensityProfile, n2: &DensityProfile) -> Result<f64> {
    if n1.grid() != n2.grid() {
        return Err(Error::GridMismatch);
    }
    let diff: Vec<f64> = n1
        .values()
        .iter()
        .zip(n2.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(n1.grid().trapezoid(&diff))
}

/// Exact D_n / D_psi for the ground states of two harmonic oscillators with
/// frequency ratio `nu`, from the closed form in terms of erf. Within 1e-4
/// of nu = 1 the 0/0 form cancels catastrophically (the radicand in the
/// denominator is O((nu-1)^2)), so the expansion value 4 / sqrt(e pi) is
/// returned there instead.
pub fn sho_ratio(nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidParam(format!(
            "frequency ratio must be positive, got {nu}"
        )));
    }
    if (nu - 1.0).abs() < 1e-4 {
        return Ok(sho_ratio_limit());
    }
    let log_ratio = nu.ln() / (2.0 * (nu - 1.0));
    let numerator = 2.0 * (erf((nu * log_ratio).sqrt()) - erf(log_ratio.sqrt())).abs();
    let denominator = (2.0 - 2.0f64.powf(1.5) * nu.powf(0.25) / (nu + 1.0).sqrt()).sqrt();
    Ok(numerator / denominator)
}

/// Least-squares slope of d_n on d_psi through the origin, with r^2 against
/// the zero-intercept model.
pub fn fit_slope_through_origin(points: &[MetricPair]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::InvalidParam(format!(
            "need at least 2 points to fit, got {}",
            points.len()
        )));
    }
    let sum_xx: f64 = points.iter().map(|p| p.d_psi * p.d_psi).sum();
    if sum_xx == 0.0 {
        return Err(Error::InvalidParam(
            "all d_psi are zero; slope undefined".into(),
        ));
    }
    let sum_xy: f64 = points.iter().map(|p| p.d_psi * p.d_n).sum();
    let slope = sum_xy / sum_xx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.d_n - slope * p.d_psi).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| p.d_n * p.d_n).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, r_squared))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    use crate::grid::{density_of, Grid};

    fn grid() -> Grid {
        Grid::default_box()
    }

    fn sho_gs(omega: f64, g: Grid) -> WavefunctionState {
        WavefunctionState::from_fn(g, 0.0, |x| {
            Complex64::new((omega / std::f64::consts::PI).powf(0.25) * (-0.5 * omega * x * x).exp(), 0.0)
        })
        .unwrap()
    }

    #[test]
    fn phase_rotation_is_free() {
        let g = grid();
        let psi = sho_gs(0.2, g);
        let theta = 1.234;
        let rotated = WavefunctionState::new(
            g,
            psi.amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, theta))
                .collect(),
            0.0,
        )
        .unwrap();
        // overlap magnitude loses ~1e-16, the square root amplifies to ~1e-8
        let d = wavefunction_distance(&psi, &rotated, 1).unwrap();
        assert!(d < 1e-7, "{d}");
        let dn = density_distance(&density_of(&psi), &density_of(&rotated)).unwrap();
        assert!(dn < 1e-14, "{dn}");
    }

    #[test]
    fn orthogonal_states_reach_sqrt2() {
        let g = grid();
        // ground and first excited SHO states are orthogonal by parity
        let psi0 = sho_gs(0.2, g);
        let psi1 = WavefunctionState::from_fn(g, 0.0, |x| {
            Complex64::new(x * (-0.5 * 0.2 * x * x).exp(), 0.0)
        })
        .unwrap();
        let d = wavefunction_distance(&psi0, &psi1, 1).unwrap();
        assert!((d - 2.0f64.sqrt()).abs() < 1e-7, "{d}");
    }

    #[test]
    fn gaussian_pair_distance_matches_closed_form() {
        // nu = 0.5: sqrt(2 - 2^{3/2} nu^{1/4} / sqrt(nu + 1)) = 0.240900...
        let g = grid();
        let psi1 = sho_gs(0.1, g);
        let psi2 = sho_gs(0.2, g);
        let nu: f64 = 0.5;
        let expected = (2.0 - 2.0f64.powf(1.5) * nu.powf(0.25) / (nu + 1.0).sqrt()).sqrt();
        assert!((expected - 0.240900).abs() < 1e-5);
        let d = wavefunction_distance(&psi1, &psi2, 1).unwrap();
        assert!((d - expected).abs() < 1e-4, "{d} vs {expected}");

        // analytic Gaussian overlap cross-check: (2 sqrt(w1 w2)/(w1+w2))^{1/2}
        let overlap = crate::grid::inner_product(&psi1, &psi2).unwrap().norm();
        let exact = (2.0 * (0.1f64 * 0.2).sqrt() / 0.3).sqrt();
        assert!((exact - 0.970984).abs() < 1e-5);
        assert!((overlap - exact).abs() < 1e-6);
    }

    #[test]
    fn density_distance_consistent_with_sho_ratio() {
        let g = grid();
        let psi1 = sho_gs(0.1, g);
        let psi2 = sho_gs(0.2, g);
        let dn = density_distance(&density_of(&psi1), &density_of(&psi2)).unwrap();
        let expected = sho_ratio(0.5).unwrap() * 0.240900;
        assert!((dn - expected).abs() < 1e-3, "{dn} vs {expected}");
    }

    #[test]
    fn disjoint_densities_reach_two() {
        let g = grid();
        let left = WavefunctionState::from_fn(g, 0.0, |x| {
            Complex64::new((-(x + 7.0) * (x + 7.0)).exp(), 0.0)
        })
        .unwrap();
        let right = WavefunctionState::from_fn(g, 0.0, |x| {
            Complex64::new((-(x - 7.0) * (x - 7.0)).exp(), 0.0)
        })
        .unwrap();
        let d = density_distance(&density_of(&left), &density_of(&right)).unwrap();
        assert!((d - 2.0).abs() < 1e-10, "{d}");
    }

    #[test]
    fn ratio_limit_and_continuity() {
        let limit = sho_ratio_limit();
        assert!((limit - 1.368793).abs() < 1e-5);
        assert_eq!(sho_ratio(1.0).unwrap(), limit);
        // approach from both sides just outside the limit branch
        for nu in [1.0 - 2e-4, 1.0 + 2e-4] {
            assert!((sho_ratio(nu).unwrap() - limit).abs() < 1e-4);
        }
        assert!(sho_ratio(0.0).is_err());
        assert!(sho_ratio(-2.0).is_err());
    }

    #[test]
    fn ratio_is_symmetric_under_inversion() {
        for nu in [0.05, 0.3, 2.0, 7.5, 20.0] {
            let a = sho_ratio(nu).unwrap();
            let b = sho_ratio(1.0 / nu).unwrap();
            assert!((a - b).abs() < 1e-12, "nu = {nu}: {a} vs {b}");
        }
    }

    #[test]
    fn fit_trivial_cases() {
        let line: Vec<MetricPair> = (1..6)
            .map(|i| MetricPair {
                d_psi: i as f64 * 0.1,
                d_n: i as f64 * 0.15,
            })
            .collect();
        let (slope, r2) = fit_slope_through_origin(&line).unwrap();
        assert!((slope - 1.5).abs() < 1e-14);
        assert!((r2 - 1.0).abs() < 1e-14);

        let single = [
            MetricPair {
                d_psi: 2.0f64.sqrt(),
                d_n: 2.0,
            },
            MetricPair { d_psi: 0.0, d_n: 0.0 },
        ];
        let (slope, _) = fit_slope_through_origin(&single).unwrap();
        assert!((slope - 2.0f64.sqrt()).abs() < 1e-14);

        assert!(fit_slope_through_origin(&[]).is_err());
        assert!(fit_slope_through_origin(&[
            MetricPair { d_psi: 0.0, d_n: 0.0 },
            MetricPair { d_psi: 0.0, d_n: 1.0 }
        ])
        .is_err());
    }

    // random normalized states on a small grid for the axiom checks
    fn arb_state() -> impl Strategy<Value = WavefunctionState> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 101).prop_map(|samples| {
            let g = Grid::new(-5.0, 5.0, 101).unwrap();
            let mut amplitudes: Vec<Complex64> = samples
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect();
            // keep the norm away from zero when proptest shrinks toward it
            amplitudes[50] += Complex64::new(0.25, 0.0);
            WavefunctionState::from_samples(g, amplitudes, 0.0).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn metric_axioms(a in arb_state(), b in arb_state(), c in arb_state()) {
            let dab = wavefunction_distance(&a, &b, 1).unwrap();
            let dba = wavefunction_distance(&b, &a, 1).unwrap();
            prop_assert!((dab - dba).abs() < 1e-14);
            prop_assert!(dab <= 2.0f64.sqrt() + 1e-12);

            let dac = wavefunction_distance(&a, &c, 1).unwrap();
            let dbc = wavefunction_distance(&b, &c, 1).unwrap();
            prop_assert!(dac <= dab + dbc + 1e-12);

            let na = density_of(&a);
            let nb = density_of(&b);
            let nc = density_of(&c);
            let nab = density_distance(&na, &nb).unwrap();
            let nba = density_distance(&nb, &na).unwrap();
            prop_assert!((nab - nba).abs() < 1e-14);
            prop_assert!(nab <= 2.0 + 1e-12);
            let nac = density_distance(&na, &nc).unwrap();
            let nbc = density_distance(&nb, &nc).unwrap();
            prop_assert!(nac <= nab + nbc + 1e-12);
        }

        #[test]
        fn conjugate_symmetry(a in arb_state(), b in arb_state()) {
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-14);
        }
    }
}
