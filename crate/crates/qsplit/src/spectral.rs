//! Gaussian spectra on a positive k-grid, x-space synthesis of the channel
//! fields, and the free asymptote packets the timing analysis uses.
//!
//! Every nonstationary field here is the trapezoid quadrature
//!
//!   Ψ_ch(x, t) = (2π)^{-1/2} Σ_k A(k) ψ_ch(x; k) e^{-iE(k)t/ħ} w_k
//!
//! over one shared grid of positive wavenumbers, with ψ_ch a stationary
//! channel state. The reflected out-asymptote is the one packet that truly
//! lives at negative wavenumbers; after k → −k it becomes an integral over
//! the same positive grid with an e^{-ikx} basis, recorded in `Basis`.
//!
//! Quadrature instead of FFT because the stationary states are plane waves
//! only outside the profile; inside they are the matched piecewise
//! solutions, which an FFT cannot represent.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::potential::ValidatedPotential;
use crate::stationary::{self, Channel, StationaryError, StationaryState};
use crate::transfer::{self, TransferError, TunnelingParams};
use crate::units::{energy_of_k, HBAR};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("k-grid needs 0 < k_min < k_max and n >= 2, got [{k_min}, {k_max}] with n = {n}")]
    BadGrid { k_min: f64, k_max: f64, n: usize },
    #[error("packet parameters need l0 > 0 and k0 > 0, got l0 = {l0}, k0 = {k0}")]
    BadPacket { l0: f64, k0: f64 },
    #[error("spectral mass {mass:.3e} at k <= 0; parts of the packet would move away from the profile")]
    SpectrumLeaksNegativeK { mass: f64 },
    #[error("|A| at a grid edge is {ratio:.3e} of the peak (cutoff 1e-8); widen the span")]
    TailNotResolved { ratio: f64 },
    #[error("dk*max|x| = {product:.3} > pi; the k-grid cannot resolve phases at the far x points")]
    GridTooCoarse { product: f64 },
    #[error("packet grid does not match the table grid")]
    GridMismatch,
    #[error("operation needs a packet on the e^{{+ikx}} basis")]
    WrongBasis,
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Stationary(#[from] StationaryError),
}

/// Uniform grid of strictly positive wavenumbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n: usize,
}

impl KGrid {
    pub fn new(k_min: f64, k_max: f64, n: usize) -> Result<KGrid, SpectralError> {
        if !(k_min > 0.0) || !(k_max > k_min) || n < 2 {
            return Err(SpectralError::BadGrid { k_min, k_max, n });
        }
        Ok(KGrid { k_min, k_max, n })
    }

    /// Grid spanning k0 ± span_sigmas standard deviations of the amplitude
    /// |A(k)| of a Gaussian packet with half-width l0 (σ = 1/(√2·l0)),
    /// clipped to k > 0. The edge amplitude is e^{-span²/2} of the peak, so
    /// the 1e-8 cutoff needs span_sigmas > 6.07; the bundled scenarios use
    /// 6.2.
    pub fn around(k0: f64, l0: f64, span_sigmas: f64, n: usize) -> Result<KGrid, SpectralError> {
        if !(l0 > 0.0) || !(k0 > 0.0) {
            return Err(SpectralError::BadPacket { l0, k0 });
        }
        let half = span_sigmas / (std::f64::consts::SQRT_2 * l0);
        KGrid::new((k0 - half).max(k0 * 1e-9), k0 + half, n)
    }

    #[inline]
    pub fn dk(&self) -> f64 {
        (self.k_max - self.k_min) / (self.n - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let span = self.k_max - self.k_min;
        (0..self.n)
            .map(|i| self.k_min + span * i as f64 / (self.n - 1) as f64)
            .collect()
    }

    /// Trapezoid weights: Δk inside, Δk/2 at the two ends.
    pub fn weights(&self) -> Vec<f64> {
        let dk = self.dk();
        let mut w = vec![dk; self.n];
        w[0] = 0.5 * dk;
        w[self.n - 1] = 0.5 * dk;
        w
    }

    fn matches(&self, other: &KGrid) -> bool {
        self.n == other.n
            && (self.k_min - other.k_min).abs() <= 1e-12 * self.k_max
            && (self.k_max - other.k_max).abs() <= 1e-12 * self.k_max
    }
}

/// Which field a packet's amplitudes multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PacketChannel {
    FullIn,
    FullOut,
    Tr,
    Ref,
}

/// Plane-wave basis the amplitudes attach to: e^{+ikx} or e^{-ikx} over
/// the positive grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    PlusK,
    MinusK,
}

/// Amplitudes over a `KGrid` at reference time `t0` (fs).
#[derive(Debug, Clone)]
pub struct SpectralPacket {
    pub grid: KGrid,
    pub amps: Vec<Complex64>,
    pub channel: PacketChannel,
    pub basis: Basis,
    pub t0: f64,
}

impl SpectralPacket {
    /// Σ|A|²w, the squared norm of the x-space field the packet represents.
    pub fn norm2(&self) -> f64 {
        let w = self.grid.weights();
        self.amps.iter().zip(&w).map(|(a, wi)| a.norm_sqr() * wi).sum()
    }

    /// Mean wavenumber over the grid. For a `MinusK` packet the physical
    /// momentum is the negative of this.
    pub fn mean_k(&self) -> f64 {
        let w = self.grid.weights();
        let ks = self.grid.points();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.amps.len() {
            let m = self.amps[i].norm_sqr() * w[i];
            num += ks[i] * m;
            den += m;
        }
        num / den
    }
}

/// Negative-k mass of the normalized Gaussian |A|² = √(2l0²/π)·e^{-2l0²(k-k0)²},
/// by trapezoid over the monotone tail; accurate to ~1e-6 relative, ample
/// for a 1e-8 gate.
fn negative_k_mass(l0: f64, k0: f64) -> f64 {
    let norm2 = (2.0 * l0 * l0 / std::f64::consts::PI).sqrt();
    let upper = k0 + 10.0 / (std::f64::consts::SQRT_2 * l0);
    let n = 4000;
    let h = (upper - k0) / n as f64;
    let f = |u: f64| norm2 * (-2.0 * l0 * l0 * u * u).exp();
    let mut s = 0.5 * (f(k0) + f(upper));
    for i in 1..n {
        s += f(k0 + h * i as f64);
    }
    s * h
}

/// Normalized Gaussian incident spectrum A(k) = (2l0²/π)^{1/4}·e^{-l0²(k-k0)²}
/// with ∫|A|²dk = 1; the x-space packet it transforms to has ⟨x⟩ = 0 and
/// ⟨x²⟩ = l0² at t = 0.
pub fn gaussian_spectrum(l0: f64, k0: f64, grid: &KGrid) -> Result<SpectralPacket, SpectralError> {
    if !(l0 > 0.0) || !(k0 > 0.0) {
        return Err(SpectralError::BadPacket { l0, k0 });
    }
    let mass = negative_k_mass(l0, k0);
    if mass >= 1e-8 {
        return Err(SpectralError::SpectrumLeaksNegativeK { mass });
    }
    let pref = (2.0 * l0 * l0 / std::f64::consts::PI).powf(0.25);
    let amps: Vec<Complex64> = grid
        .points()
        .iter()
        .map(|&k| Complex64::new(pref * (-l0 * l0 * (k - k0) * (k - k0)).exp(), 0.0))
        .collect();
    let peak = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let ratio = amps[0].norm().max(amps[grid.n - 1].norm()) / peak;
    if ratio >= 1e-8 {
        return Err(SpectralError::TailNotResolved { ratio });
    }
    Ok(SpectralPacket { grid: *grid, amps, channel: PacketChannel::FullIn, basis: Basis::PlusK, t0: 0.0 })
}

/// Stationary states and tunneling parameters tabulated over a k-grid,
/// built once and shared read-only across synthesis calls.
#[derive(Debug, Clone)]
pub struct SynthesisTable {
    pub grid: KGrid,
    pub ks: Vec<f64>,
    pub params: Vec<TunnelingParams>,
    full: Vec<StationaryState>,
    /// (tr, ref) per k; None when the profile is asymmetric and the split
    /// is undefined.
    split: Option<Vec<(StationaryState, StationaryState)>>,
    pub symmetric: bool,
    pub mass_me: f64,
}

impl SynthesisTable {
    pub fn build(pot: &ValidatedPotential, grid: &KGrid) -> Result<SynthesisTable, SpectralError> {
        let ks = grid.points();
        let rows: Result<Vec<_>, SpectralError> = ks
            .par_iter()
            .map(|&k| {
                let params = transfer::tunneling_params(pot, k)?;
                if pot.symmetric {
                    let cs = stationary::channel_states(&params, pot)?;
                    Ok((params, cs.full, Some((cs.tr, cs.rf))))
                } else {
                    Ok((params, stationary::full_state(&params, pot), None))
                }
            })
            .collect();
        let rows = rows?;
        let mut params = Vec::with_capacity(rows.len());
        let mut full = Vec::with_capacity(rows.len());
        let mut split = pot.symmetric.then(|| Vec::with_capacity(rows.len()));
        for (p, f, s) in rows {
            params.push(p);
            full.push(f);
            if let (Some(v), Some(pair)) = (split.as_mut(), s) {
                v.push(pair);
            }
        }
        Ok(SynthesisTable {
            grid: *grid,
            ks,
            params,
            full,
            split,
            symmetric: pot.symmetric,
            mass_me: pot.mass_me,
        })
    }

    pub(crate) fn states_for(
        &self,
        channel: Channel,
    ) -> Result<Vec<&StationaryState>, SpectralError> {
        match channel {
            Channel::Full => Ok(self.full.iter().collect()),
            Channel::Tr | Channel::Ref => {
                let split = self
                    .split
                    .as_ref()
                    .ok_or(SpectralError::Stationary(StationaryError::AsymmetricPotential))?;
                Ok(split
                    .iter()
                    .map(|(tr, rf)| if channel == Channel::Tr { tr } else { rf })
                    .collect())
            }
        }
    }
}

pub(crate) fn nyquist_check(dk: f64, xs: &[f64]) -> Result<(), SpectralError> {
    let xmax = xs.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let product = dk * xmax;
    if product > std::f64::consts::PI {
        return Err(SpectralError::GridTooCoarse { product });
    }
    Ok(())
}

/// A(k)·w_k·e^{-iE(k)(t-t0)/ħ}/√(2π) for each grid point.
pub(crate) fn quadrature_coefs(packet: &SpectralPacket, mass_me: f64, t: f64) -> Vec<Complex64> {
    let w = packet.grid.weights();
    let ks = packet.grid.points();
    let pref = 1.0 / std::f64::consts::TAU.sqrt();
    let dt = t - packet.t0;
    (0..packet.amps.len())
        .map(|i| {
            let phase = Complex64::from_polar(1.0, -energy_of_k(ks[i], mass_me) * dt / HBAR);
            packet.amps[i] * w[i] * pref * phase
        })
        .collect()
}

/// Synthesizes the x-space channel field at time t (fs) against a
/// prebuilt table. The packet holds incident-spectrum amplitudes A(k);
/// the per-x sums run over k in grid order, so results do not depend on
/// the thread count.
pub fn synthesize_with(
    table: &SynthesisTable,
    packet: &SpectralPacket,
    channel: Channel,
    t: f64,
    xs: &[f64],
) -> Result<Vec<Complex64>, SpectralError> {
    if !table.grid.matches(&packet.grid) {
        return Err(SpectralError::GridMismatch);
    }
    if packet.basis != Basis::PlusK {
        return Err(SpectralError::WrongBasis);
    }
    nyquist_check(packet.grid.dk(), xs)?;
    let states = table.states_for(channel)?;
    let coef = quadrature_coefs(packet, table.mass_me, t);
    Ok(xs
        .par_iter()
        .map(|&x| {
            let mut s = Complex64::new(0.0, 0.0);
            for (c, st) in coef.iter().zip(&states) {
                s += c * st.eval(x);
            }
            s
        })
        .collect())
}

/// One-shot synthesis; builds the table internally. Prefer
/// `SynthesisTable::build` + `synthesize_with` when sweeping times.
pub fn synthesize(
    packet: &SpectralPacket,
    channel: Channel,
    pot: &ValidatedPotential,
    t: f64,
    xs: &[f64],
) -> Result<Vec<Complex64>, SpectralError> {
    let table = SynthesisTable::build(pot, &packet.grid)?;
    synthesize_with(&table, packet, channel, t, xs)
}

/// The five free packets the scattering solution approaches far from the
/// profile: the incident packet, the transmitted and reflected packets it
/// leaves behind, and the two incident-side precursors that evolve into
/// them (defined for symmetric profiles only).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoteKind {
    InFull,
    OutTr,
    OutRef,
    InTr,
    InRef,
}

/// Builds the asymptote packet at time t from the incident spectrum.
///
/// Per-k coefficients multiplying A(k), all exact in q, p:
///   in_full  1                              (e^{+ikx})
///   out_tr   1/q        = √T·e^{i(J-kd)}    (e^{+ikx})
///   out_ref  p*/q       = √R·e^{i(J-F-π/2+2ka)}  (e^{-ikx})
///   in_tr    T - iσ√(RT) = √T·e^{i(Λ-απ/2)}  (e^{+ikx})
///   in_ref   R + iσ√(RT) = √R·e^{iΛ}         (e^{+ikx})
/// with Λ = σ·atan2(√T, √R), σ the odd-root sign from F, and α = sign(Λ).
/// The algebraic forms make in_tr + in_ref = in_full hold to rounding for
/// every k, resonances included.
pub fn asymptote(
    packet: &SpectralPacket,
    which: AsymptoteKind,
    table: &SynthesisTable,
    t: f64,
) -> Result<SpectralPacket, SpectralError> {
    if !table.grid.matches(&packet.grid) {
        return Err(SpectralError::GridMismatch);
    }
    if packet.basis != Basis::PlusK {
        return Err(SpectralError::WrongBasis);
    }
    if matches!(which, AsymptoteKind::InTr | AsymptoteKind::InRef) && !table.symmetric {
        return Err(SpectralError::Stationary(StationaryError::AsymmetricPotential));
    }
    let dt = t - packet.t0;
    let one = Complex64::new(1.0, 0.0);
    let amps: Vec<Complex64> = (0..packet.amps.len())
        .map(|i| {
            let p = &table.params[i];
            let coef = match which {
                AsymptoteKind::InFull => one,
                AsymptoteKind::OutTr => one / p.q,
                AsymptoteKind::OutRef => p.p.conj() / p.q,
                AsymptoteKind::InTr => {
                    let sigma = stationary::sigma_from_f(p.f);
                    Complex64::new(p.t, -sigma * (p.r * p.t).sqrt())
                }
                AsymptoteKind::InRef => {
                    let sigma = stationary::sigma_from_f(p.f);
                    Complex64::new(p.r, sigma * (p.r * p.t).sqrt())
                }
            };
            let phase = Complex64::from_polar(1.0, -energy_of_k(p.k, table.mass_me) * dt / HBAR);
            packet.amps[i] * coef * phase
        })
        .collect();
    let channel = match which {
        AsymptoteKind::InFull => PacketChannel::FullIn,
        AsymptoteKind::OutTr | AsymptoteKind::InTr => PacketChannel::Tr,
        AsymptoteKind::OutRef | AsymptoteKind::InRef => PacketChannel::Ref,
    };
    let basis = if which == AsymptoteKind::OutRef { Basis::MinusK } else { Basis::PlusK };
    Ok(SpectralPacket { grid: packet.grid, amps, channel, basis, t0: t })
}

/// Free x-space field of a packet: (2π)^{-1/2} Σ A_k e^{±ikx} e^{-iE(t-t0)/ħ} w_k,
/// the sign set by the packet's basis.
pub fn free_field(
    packet: &SpectralPacket,
    mass_me: f64,
    t: f64,
    xs: &[f64],
) -> Result<Vec<Complex64>, SpectralError> {
    nyquist_check(packet.grid.dk(), xs)?;
    let sign = match packet.basis {
        Basis::PlusK => 1.0,
        Basis::MinusK => -1.0,
    };
    let coef = quadrature_coefs(packet, mass_me, t);
    let ks = packet.grid.points();
    Ok(xs
        .par_iter()
        .map(|&x| {
            let mut s = Complex64::new(0.0, 0.0);
            for (c, &k) in coef.iter().zip(&ks) {
                s += c * Complex64::from_polar(1.0, sign * k * x);
            }
            s
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{PotentialSpec, Segment};
    use crate::units::k_of_energy;
    use approx::assert_relative_eq;

    const L0: f64 = 7.5;
    const MASS: f64 = 0.067;

    fn k0() -> f64 {
        k_of_energy(0.25, MASS)
    }

    fn fig1_barrier() -> ValidatedPotential {
        PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(505.0),
            segments: Some(vec![Segment { width_nm: 5.0, v0_ev: 0.3 }]),
            delta: None,
            mass_me: MASS,
        }
        .validate()
        .unwrap()
    }

    fn free_pot() -> ValidatedPotential {
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

    fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn gaussian_spectrum_is_normalized_and_centered() {
        let grid = KGrid::around(k0(), L0, 6.2, 4096).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        assert_relative_eq!(packet.norm2(), 1.0, epsilon = 1e-8);
        assert_relative_eq!(packet.mean_k(), k0(), epsilon = 1e-10);
    }

    #[test]
    fn slow_packet_leaks_negative_k() {
        let grid = KGrid::around(0.1, L0, 6.2, 256).unwrap();
        match gaussian_spectrum(L0, 0.1, &grid) {
            Err(SpectralError::SpectrumLeaksNegativeK { mass }) => assert!(mass > 1e-8),
            other => panic!("expected negative-k leak, got {other:?}"),
        }
    }

    #[test]
    fn narrow_grid_fails_tail_cutoff() {
        let grid = KGrid::around(k0(), L0, 5.0, 256).unwrap();
        match gaussian_spectrum(L0, k0(), &grid) {
            Err(SpectralError::TailNotResolved { ratio }) => assert!(ratio >= 1e-8),
            other => panic!("expected unresolved tail, got {other:?}"),
        }
    }

    // Independent closed form: Gaussian integral of the free evolution,
    // ψ(x,t) = (2π)^{-1/2}(2l0²/π)^{1/4}√(π/α)·exp(γ²/(4α) - l0²k0²),
    // α = l0² + i(ħ/2m)t, γ = 2l0²k0 + ix.
    fn free_gaussian_closed(x: f64, t: f64) -> Complex64 {
        let beta = crate::units::hbar2_over_2m(MASS) * t / HBAR;
        let alpha = Complex64::new(L0 * L0, beta);
        let gamma = Complex64::new(2.0 * L0 * L0 * k0(), x);
        let pref = (2.0 * L0 * L0 / std::f64::consts::PI).powf(0.25)
            / std::f64::consts::TAU.sqrt();
        pref * (std::f64::consts::PI / alpha).sqrt()
            * (gamma * gamma / (4.0 * alpha) - L0 * L0 * k0() * k0()).exp()
    }

    #[test]
    fn full_channel_far_from_profile_is_the_free_gaussian() {
        let grid = KGrid::around(k0(), L0, 6.2, 2048).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&free_pot(), &grid).unwrap();

        let xs = xs_range(-40.0, 40.0, 0.25);
        let synth = synthesize_with(&table, &packet, Channel::Full, 0.0, &xs).unwrap();
        let closed: Vec<Complex64> = xs.iter().map(|&x| free_gaussian_closed(x, 0.0)).collect();
        assert!(rel_l2(&synth, &closed) < 1e-6);

        // after 500 fs the free packet has moved ~573 nm and spread ~8x
        let xs = xs_range(300.0, 850.0, 0.5);
        let synth = synthesize_with(&table, &packet, Channel::Full, 500.0, &xs).unwrap();
        let closed: Vec<Complex64> = xs.iter().map(|&x| free_gaussian_closed(x, 500.0)).collect();
        assert!(rel_l2(&synth, &closed) < 1e-6);
    }

    #[test]
    fn channel_fields_sum_to_the_full_field() {
        let grid = KGrid::around(k0(), L0, 6.2, 256).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&fig1_barrier(), &grid).unwrap();
        let xs = xs_range(-30.0, 530.0, 1.0);
        for &t in &[0.0, 400.0, 420.0] {
            let full = synthesize_with(&table, &packet, Channel::Full, t, &xs).unwrap();
            let tr = synthesize_with(&table, &packet, Channel::Tr, t, &xs).unwrap();
            let rf = synthesize_with(&table, &packet, Channel::Ref, t, &xs).unwrap();
            let peak = full.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for i in 0..xs.len() {
                assert!(
                    (full[i] - tr[i] - rf[i]).norm() < 1e-10 * peak,
                    "decomposition broke at x = {}, t = {t}",
                    xs[i]
                );
            }
        }
    }

    #[test]
    fn channel_norms_match_the_weighted_transmission() {
        let grid = KGrid::around(k0(), L0, 6.2, 512).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&fig1_barrier(), &grid).unwrap();
        let w = grid.weights();
        let t_mean: f64 = (0..grid.n)
            .map(|i| table.params[i].t * packet.amps[i].norm_sqr() * w[i])
            .sum();

        let xs = xs_range(-400.0, 1300.0, 0.5);
        let dx = 0.5;
        let mut norms_tr = Vec::new();
        let mut norms_rf = Vec::new();
        for &t in &[0.0, 200.0, 400.0, 600.0] {
            let tr = synthesize_with(&table, &packet, Channel::Tr, t, &xs).unwrap();
            let rf = synthesize_with(&table, &packet, Channel::Ref, t, &xs).unwrap();
            let n_tr: f64 = tr.iter().map(|v| v.norm_sqr() * dx).sum();
            let n_rf: f64 = rf.iter().map(|v| v.norm_sqr() * dx).sum();
            norms_tr.push(n_tr);
            norms_rf.push(n_rf);
        }

        // the ref state vanishes at x_mid for every k, so no probability
        // crosses the midpoint and its norm is constant at all times
        for n_rf in &norms_rf {
            assert_relative_eq!(*n_rf, 1.0 - t_mean, max_relative = 1e-5);
        }

        // the tr norm equals the T-weighted spectrum mass away from the
        // interaction era (t = 0, 0.2 ps before; 0.6 ps after, where a
        // ~2e-4 residual is still draining through the barrier region)
        assert_relative_eq!(norms_tr[0], t_mean, max_relative = 1e-6);
        assert_relative_eq!(norms_tr[1], t_mean, max_relative = 1e-6);
        assert_relative_eq!(norms_tr[3], t_mean, max_relative = 1e-3);

        // during overlap (t = 0.4 ps) the tr norm genuinely rises: its
        // derivative kink at x_mid sits at a non-node, so the tr state
        // alone does not conserve probability there. Pinned as a
        // regression guard; the ~+5.9% value is x- and k-step converged.
        let bump = norms_tr[2] - t_mean;
        assert!(
            (0.004..0.012).contains(&bump),
            "transit bump changed: {bump:.6} (norm {:.6} vs mean {t_mean:.6})",
            norms_tr[2]
        );
    }

    #[test]
    fn in_asymptotes_split_the_incident_packet_exactly() {
        let grid = KGrid::around(k0(), L0, 6.2, 512).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&fig1_barrier(), &grid).unwrap();
        let t = 37.0;
        let f_in = asymptote(&packet, AsymptoteKind::InFull, &table, t).unwrap();
        let f_tr = asymptote(&packet, AsymptoteKind::InTr, &table, t).unwrap();
        let f_rf = asymptote(&packet, AsymptoteKind::InRef, &table, t).unwrap();
        for i in 0..grid.n {
            let sum = f_tr.amps[i] + f_rf.amps[i];
            assert!((sum - f_in.amps[i]).norm() <= 1e-12 * f_in.amps[i].norm().max(1e-300));
            let m = f_tr.amps[i].norm_sqr() + f_rf.amps[i].norm_sqr();
            assert!((m - f_in.amps[i].norm_sqr()).abs() <= 1e-12 * f_in.amps[i].norm_sqr().max(1e-300));
        }
        // transmitted subensembles agree on ⟨k⟩ before and after the profile
        let out_tr = asymptote(&packet, AsymptoteKind::OutTr, &table, t).unwrap();
        assert_relative_eq!(out_tr.mean_k(), f_tr.mean_k(), epsilon = 1e-12);
        // and the magnitudes are the √T / √R reweightings of the spectrum
        for i in 0..grid.n {
            let a = packet.amps[i].norm();
            assert_relative_eq!(
                out_tr.amps[i].norm(),
                table.params[i].t.sqrt() * a,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                f_rf.amps[i].norm(),
                table.params[i].r.sqrt() * a,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn late_time_channels_meet_their_out_asymptotes() {
        let grid = KGrid::around(k0(), L0, 6.2, 4096).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&fig1_barrier(), &grid).unwrap();

        // transmitted side at 900 fs: CM near 505 + v̄(900 - delay) ≈ 1100 nm
        let t = 900.0;
        let xs = xs_range(750.0, 1500.0, 0.5);
        let tr = synthesize_with(&table, &packet, Channel::Tr, t, &xs).unwrap();
        let out_tr = asymptote(&packet, AsymptoteKind::OutTr, &table, t).unwrap();
        let free_tr = free_field(&out_tr, MASS, t, &xs).unwrap();
        assert!(rel_l2(&tr, &free_tr) < 1e-4, "tr mismatch {}", rel_l2(&tr, &free_tr));

        // reflected side on the e^{-ikx} basis, CM near 2a - v̄·t ≈ -10 nm
        let xs = xs_range(-370.0, 280.0, 0.5);
        let rf = synthesize_with(&table, &packet, Channel::Ref, t, &xs).unwrap();
        let out_rf = asymptote(&packet, AsymptoteKind::OutRef, &table, t).unwrap();
        let free_rf = free_field(&out_rf, MASS, t, &xs).unwrap();
        assert!(rel_l2(&rf, &free_rf) < 1e-4, "ref mismatch {}", rel_l2(&rf, &free_rf));
    }

    #[test]
    fn coarse_grid_is_rejected_at_far_x() {
        let grid = KGrid::around(k0(), L0, 6.2, 64).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&free_pot(), &grid).unwrap();
        let xs = vec![500.0];
        match synthesize_with(&table, &packet, Channel::Full, 0.0, &xs) {
            Err(SpectralError::GridTooCoarse { product }) => assert!(product > std::f64::consts::PI),
            other => panic!("expected coarse-grid rejection, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_profile_has_no_channel_split() {
        let pot = PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(505.0),
            segments: Some(vec![
                Segment { width_nm: 2.0, v0_ev: 0.3 },
                Segment { width_nm: 3.0, v0_ev: 0.1 },
            ]),
            delta: None,
            mass_me: MASS,
        }
        .validate()
        .unwrap();
        let grid = KGrid::around(k0(), L0, 6.2, 128).unwrap();
        let packet = gaussian_spectrum(L0, k0(), &grid).unwrap();
        let table = SynthesisTable::build(&pot, &grid).unwrap();
        let xs = xs_range(-10.0, 10.0, 1.0);
        assert!(synthesize_with(&table, &packet, Channel::Full, 0.0, &xs).is_ok());
        match synthesize_with(&table, &packet, Channel::Tr, 0.0, &xs) {
            Err(SpectralError::Stationary(StationaryError::AsymmetricPotential)) => {}
            other => panic!("expected asymmetric rejection, got {other:?}"),
        }
        match asymptote(&packet, AsymptoteKind::InTr, &table, 0.0) {
            Err(SpectralError::Stationary(StationaryError::AsymmetricPotential)) => {}
            other => panic!("expected asymmetric rejection, got {other:?}"),
        }
    }
}
