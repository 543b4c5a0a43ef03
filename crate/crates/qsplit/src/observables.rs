//! Expectation values over x-space fields and k-space packets: norms,
//! centers of mass, weighted spectral means, and the linear fits the
//! timing analysis reads intercepts from.

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{synthesize_with, SpectralError, SpectralPacket, SynthesisTable};
use crate::stationary::{lambda_prime, sigma_from_f, Channel};
use crate::transfer::ParamTable;
use crate::units::{hbar2_over_2m, HBAR};

#[derive(Debug, Error)]
pub enum ObservablesError {
    #[error("field norm² = {0:.3e} is below 1e-12; moments are undefined")]
    ZeroNorm(f64),
    #[error("subensemble weight ⟨{0}⟩ is below 1e-12; nothing to average over")]
    ZeroWeight(&'static str),
    #[error("x-grid must be uniform and hold at least 5 points")]
    BadXGrid,
    #[error("table and packet k-grids differ")]
    GridMismatch,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Trapezoid-rule moments of one x-space field.
#[derive(Debug, Clone)]
pub struct Moments {
    pub norm2: f64,
    /// ⟨x̂⟩, the center of mass every timing operation tracks (nm).
    pub mean_x: f64,
    pub var_x: f64,
    /// ⟨k⟩ from Im∫ψ*ψ′ (nm⁻¹); signed, so left-movers come out negative.
    pub mean_k: f64,
    /// Probability current (ħ/m)·Im(ψ*ψ′) per grid point.
    pub flux: Vec<f64>,
}

fn uniform_dx(xs: &[f64]) -> Result<f64, ObservablesError> {
    if xs.len() < 5 {
        return Err(ObservablesError::BadXGrid);
    }
    let dx = xs[1] - xs[0];
    if !(dx > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - dx).abs() > 1e-9 * dx) {
        return Err(ObservablesError::BadXGrid);
    }
    Ok(dx)
}

/// dψ/dx on a uniform grid: 5-point interior stencil (O(dx⁴)), one-sided
/// second-order at the two points on each edge.
fn gradient(field: &[Complex64], dx: f64) -> Vec<Complex64> {
    let n = field.len();
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    let c = 1.0 / (12.0 * dx);
    for i in 2..n - 2 {
        g[i] = (field[i - 2] - 8.0 * field[i - 1] + 8.0 * field[i + 1] - field[i + 2]) * c;
    }
    let e = 1.0 / (2.0 * dx);
    g[0] = (-3.0 * field[0] + 4.0 * field[1] - field[2]) * e;
    g[1] = (field[2] - field[0]) * e;
    g[n - 2] = (field[n - 1] - field[n - 3]) * e;
    g[n - 1] = (3.0 * field[n - 1] - 4.0 * field[n - 2] + field[n - 3]) * e;
    g
}

#[inline]
fn trapz(values: impl Iterator<Item = f64>, n: usize, dx: f64) -> f64 {
    let mut s = 0.0;
    for (i, v) in values.enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += v * w;
    }
    s * dx
}

pub fn moments_x(
    xs: &[f64],
    field: &[Complex64],
    mass_me: f64,
) -> Result<Moments, ObservablesError> {
    let dx = uniform_dx(xs)?;
    assert_eq!(xs.len(), field.len(), "grid and field lengths differ");
    let n = xs.len();
    let norm2 = trapz(field.iter().map(|v| v.norm_sqr()), n, dx);
    if norm2 < 1e-12 {
        return Err(ObservablesError::ZeroNorm(norm2));
    }
    let mean_x = trapz((0..n).map(|i| xs[i] * field[i].norm_sqr()), n, dx) / norm2;
    let var_x = trapz(
        (0..n).map(|i| (xs[i] - mean_x).powi(2) * field[i].norm_sqr()),
        n,
        dx,
    ) / norm2;
    let grad = gradient(field, dx);
    let mean_k = trapz((0..n).map(|i| (field[i].conj() * grad[i]).im), n, dx) / norm2;
    let vscale = 2.0 * hbar2_over_2m(mass_me) / HBAR;
    let flux = (0..n).map(|i| vscale * (field[i].conj() * grad[i]).im).collect();
    Ok(Moments { norm2, mean_x, var_x, mean_k, flux })
}

/// Weight of a spectral mean: the plain incident spectrum, or the
/// transmission/reflection subensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    One,
    T,
    R,
}

/// Tabulated quantity entering a weighted mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    JPrime,
    FPrime,
    LambdaPrime,
    K,
    TPrime,
}

fn check_grids(table: &ParamTable, packet: &SpectralPacket) -> Result<(), ObservablesError> {
    let ks = packet.grid.points();
    if table.entries.len() != ks.len() {
        return Err(ObservablesError::GridMismatch);
    }
    let tol = 1e-12 * packet.grid.k_max;
    for (e, k) in table.entries.iter().zip(&ks) {
        if (e.params.k - k).abs() > tol {
            return Err(ObservablesError::GridMismatch);
        }
    }
    Ok(())
}

/// Σ q·w·|A|²Δk / Σ w·|A|²Δk over the shared k-grid.
///
/// F′ rows whose finite-difference stencil straddles a resonance π-jump
/// carry no value and contribute zero; they only ever appear under the R
/// weight, which vanishes quadratically at exactly those wavenumbers driving
/// the product to zero anyway. Λ′ = σ·T′/(2√(RT)) stays finite and
/// continuous through resonances because σ and T′ flip sign together.
pub fn weighted_mean(
    table: &ParamTable,
    weight: Weight,
    quantity: Quantity,
    packet: &SpectralPacket,
) -> Result<f64, ObservablesError> {
    check_grids(table, packet)?;
    let w = packet.grid.weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, e) in table.entries.iter().enumerate() {
        let wgt = match weight {
            Weight::One => 1.0,
            Weight::T => e.params.t,
            Weight::R => e.params.r,
        };
        let q = match quantity {
            Quantity::JPrime => e.j_prime,
            Quantity::FPrime => e.f_prime.unwrap_or(0.0),
            Quantity::LambdaPrime => {
                sigma_from_f(e.params.f) * lambda_prime(e.params.t, e.params.r, e.t_prime)
            }
            Quantity::K => e.params.k,
            Quantity::TPrime => e.t_prime,
        };
        let m = wgt * packet.amps[i].norm_sqr() * w[i];
        num += q * m;
        den += m;
    }
    if den < 1e-12 {
        return Err(ObservablesError::ZeroWeight(match weight {
            Weight::One => "1",
            Weight::T => "T",
            Weight::R => "R",
        }));
    }
    Ok(num / den)
}

/// ⟨T⟩ or ⟨R⟩ over the incident spectrum: Σ w·|A|²Δk / Σ |A|²Δk.
pub fn channel_fraction(
    table: &ParamTable,
    weight: Weight,
    packet: &SpectralPacket,
) -> Result<f64, ObservablesError> {
    check_grids(table, packet)?;
    let w = packet.grid.weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, e) in table.entries.iter().enumerate() {
        let wgt = match weight {
            Weight::One => 1.0,
            Weight::T => e.params.t,
            Weight::R => e.params.r,
        };
        let m = packet.amps[i].norm_sqr() * w[i];
        num += wgt * m;
        den += m;
    }
    Ok(num / den)
}

/// Center of mass of the synthesized channel field at each time.
pub fn cm_trajectory(
    table: &SynthesisTable,
    packet: &SpectralPacket,
    channel: Channel,
    times: &[f64],
    xs: &[f64],
) -> Result<Vec<(f64, f64)>, ObservablesError> {
    times
        .iter()
        .map(|&t| {
            let field = synthesize_with(table, packet, channel, t, xs)?;
            Ok((t, moments_x(xs, &field, table.mass_me)?.mean_x))
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares through (t, y) points.
pub fn linear_fit(pts: &[(f64, f64)]) -> LinearFit {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LinearFit { slope, intercept, r2 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{PotentialSpec, Segment};
    use crate::spectral::{gaussian_spectrum, KGrid};
    use crate::units::{k_of_energy, velocity_of_k};
    use approx::assert_relative_eq;

    const L0: f64 = 7.5;
    const MASS: f64 = 0.067;

    fn k0() -> f64 {
        k_of_energy(0.25, MASS)
    }

    fn barrier(v0: f64) -> crate::potential::ValidatedPotential {
        PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(505.0),
            segments: Some(vec![Segment { width_nm: 5.0, v0_ev: v0 }]),
            delta: None,
            mass_me: MASS,
        }
        .validate()
        .unwrap()
    }

    fn free_pot() -> crate::potential::ValidatedPotential {
        PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(500.0),
            segments: Some(vec![]),
            delta: None,
            mass_me: MASS,
        }
        .validate()
        .unwrap()
    }

    fn xs_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).round() as usize;
        (0..=n).map(|i| lo + step * i as f64).collect()
    }

    #[test]
    fn free_gaussian_moments_and_parseval() {
        let grid = KGrid::around(k0(), L0, 6.2, 1024).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&free_pot(), &grid).unwrap();
        let xs = xs_range(-60.0, 60.0, 0.25);
        let field = synthesize_with(&table, &packet, Channel::Full, 0.0, &xs).unwrap();
        let m = moments_x(&xs, &field, MASS).unwrap();
        assert!((m.norm2 - packet.norm2()).abs() < 1e-6, "Parseval broke: {}", m.norm2);
        assert!(m.mean_x.abs() < 1e-6);
        assert_relative_eq!(m.var_x, L0 * L0, max_relative = 1e-3);
        // stencil dispersion caps mean_k at ~(k·dx)^4/30 relative
        assert_relative_eq!(m.mean_k, k0(), max_relative = 1e-4);
        // current at the peak is velocity times density
        let mid = xs.len() / 2;
        assert_relative_eq!(
            m.flux[mid],
            velocity_of_k(k0(), MASS) * field[mid].norm_sqr(),
            max_relative = 1e-2
        );
    }

    #[test]
    fn translated_spectrum_shifts_the_mean() {
        let grid = KGrid::around(k0(), L0, 6.2, 1024).unwrap();
        let mut packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let shift = 17.0;
        let ks = grid.points();
        for (a, &k) in packet.amps.iter_mut().zip(&ks) {
            *a *= Complex64::from_polar(1.0, -k * shift);
        }
        let table = SynthesisTable::build(&free_pot(), &grid).unwrap();
        let xs = xs_shifted(shift);
        let field = synthesize_with(&table, &packet, Channel::Full, 0.0, &xs).unwrap();
        let m = moments_x(&xs, &field, MASS).unwrap();
        assert_relative_eq!(m.mean_x, shift, epsilon = 1e-6);
    }

    fn xs_shifted(center: f64) -> Vec<f64> {
        xs_range(center - 60.0, center + 60.0, 0.25)
    }

    #[test]
    fn ehrenfest_free_slope() {
        let grid = KGrid::around(k0(), L0, 6.2, 1024).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&free_pot(), &grid).unwrap();
        let xs = xs_range(-80.0, 220.0, 0.25);
        let times: Vec<f64> = (0..11).map(|i| 10.0 * i as f64).collect();
        let cm = cm_trajectory(&table, &packet, Channel::Full, &times, &xs).unwrap();
        let fit = linear_fit(&cm);
        assert_relative_eq!(fit.slope, velocity_of_k(k0(), MASS), max_relative = 1e-3);
        assert!(fit.intercept.abs() < 1e-3);
        assert!(fit.r2 > 0.999999);
    }

    #[test]
    fn transmission_fractions_match_reference_values() {
        let grid = KGrid::around(k0(), L0, 6.2, 4096).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        for (v0, expect) in [(0.3, 0.148679), (-0.3, 0.863272)] {
            let pot = barrier(v0);
            let table = ParamTable::build(&pot, &grid.points(), 1e-3).unwrap();
            let t_mean = channel_fraction(&table, Weight::T, &packet).unwrap();
            let r_mean = channel_fraction(&table, Weight::R, &packet).unwrap();
            assert_relative_eq!(t_mean, expect, epsilon = 5e-6);
            assert!((t_mean + r_mean - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_momentum_shift_identity() {
        // exact for a Gaussian spectrum: ⟨k⟩_T − k0 = ⟨T′⟩/(4 l0² ⟨T⟩),
        // by integrating (k−k0)T|A|² by parts
        let grid = KGrid::around(k0(), L0, 6.2, 4096).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let pot = barrier(0.3);
        let table = ParamTable::build(&pot, &grid.points(), 1e-3).unwrap();
        let k_tr = weighted_mean(&table, Weight::T, Quantity::K, &packet).unwrap();
        let t_mean = channel_fraction(&table, Weight::T, &packet).unwrap();
        let tp_mean = weighted_mean(&table, Weight::One, Quantity::TPrime, &packet).unwrap();
        let lhs = k_tr - k0();
        let rhs = tp_mean / (4.0 * L0 * L0 * t_mean);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
    }

    #[test]
    fn opaque_barrier_has_no_transmitted_subensemble() {
        let pot = PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(510.0),
            segments: Some(vec![Segment { width_nm: 10.0, v0_ev: 5.0 }]),
            delta: None,
            mass_me: MASS,
        }
        .validate()
        .unwrap();
        let grid = KGrid::around(k0(), L0, 6.2, 256).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = ParamTable::build(&pot, &grid.points(), 1e-3).unwrap();
        match weighted_mean(&table, Weight::T, Quantity::JPrime, &packet) {
            Err(ObservablesError::ZeroWeight("T")) => {}
            other => panic!("expected empty subensemble, got {other:?}"),
        }
    }

    #[test]
    fn zero_field_has_no_moments() {
        let xs = xs_range(0.0, 10.0, 0.5);
        let field = vec![Complex64::new(0.0, 0.0); xs.len()];
        match moments_x(&xs, &field, MASS) {
            Err(ObservablesError::ZeroNorm(_)) => {}
            other => panic!("expected zero-norm rejection, got {other:?}"),
        }
    }

    #[test]
    fn early_tr_channel_intercept_is_minus_mean_lambda_prime() {
        let grid = KGrid::around(k0(), L0, 6.2, 2048).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let pot = barrier(0.3);
        let synth = SynthesisTable::build(&pot, &grid).unwrap();
        let table = ParamTable::build(&pot, &grid.points(), 1e-3).unwrap();

        let times: Vec<f64> = (0..11).map(|i| 10.0 * i as f64).collect();
        let xs = xs_range(-100.0, 260.0, 0.5);
        let cm = cm_trajectory(&synth, &packet, Channel::Tr, &times, &xs).unwrap();
        let fit = linear_fit(&cm);

        let lam_mean = weighted_mean(&table, Weight::T, Quantity::LambdaPrime, &packet).unwrap();
        let k_tr = weighted_mean(&table, Weight::T, Quantity::K, &packet).unwrap();
        assert!(
            (fit.intercept + lam_mean).abs() < 5e-3,
            "intercept {} vs -⟨Λ′⟩ {}",
            fit.intercept,
            -lam_mean
        );
        assert_relative_eq!(fit.slope, velocity_of_k(k_tr, MASS), max_relative = 1e-4);
        assert!(fit.r2 > 0.9999999);
    }
}
