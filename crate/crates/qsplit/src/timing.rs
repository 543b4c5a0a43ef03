//! Tunneling times: exact ones by root-finding on channel centers of
//! mass, asymptotic ones from weighted parameter slopes, closed forms
//! for rectangular profiles and point spikes, and the legacy
//! stationary-phase times kept for comparison.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::observables::{weighted_mean, ObservablesError, Quantity, Weight};
use crate::potential::ValidatedPotential;
use crate::spectral::{quadrature_coefs, SpectralError, SpectralPacket, SynthesisTable};
use crate::stationary::{lambda_prime, sigma_from_f, Channel};
use crate::transfer::{params_derivatives, tunneling_params, ParamTable, TransferError};
use crate::units::{hbar2_over_2m, velocity_of_k};

#[derive(Debug, Error)]
pub enum TimingError {
    #[error("time window ({t_lo}, {t_hi}) fs is not an ascending pair starting at or after 0")]
    BadWindow { t_lo: f64, t_hi: f64 },
    #[error("{channel:?} center of mass has not settled to ballistic motion: speed varies by {variation:.2e} over the last tenth of the window")]
    WindowTooShort { channel: Channel, variation: f64 },
    #[error("negative margins make no sense: L1 = {l1} nm, L2 = {l2} nm")]
    NegativeMargin { l1: f64, l2: f64 },
    #[error("transmission/reflection timing needs a mirror-symmetric potential")]
    AsymmetricPotential,
    #[error(transparent)]
    Observables(#[from] ObservablesError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
}

/// A root-found crossing time, or a typed absence: the center of mass of
/// a channel may turn back without ever entering the probed region, and
/// that outcome is not a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "fs", rename_all = "snake_case")]
pub enum ExactTime {
    Time(f64),
    NoRoot,
}

/// Asymptotic times, effective widths, and starting points of the two
/// subensembles, with the weighted wavenumbers they were built from.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticReport {
    pub tau_tr_fs: f64,
    pub tau_ref_fs: f64,
    pub d_eff_tr_nm: f64,
    pub d_eff_ref_nm: f64,
    pub x_start_tr_nm: f64,
    pub x_start_ref_nm: f64,
    /// T-weighted mean wavenumber (conserved between in and out).
    pub mean_k_tr: f64,
    /// R-weighted mean wavenumber, as a positive magnitude.
    pub mean_k_ref: f64,
    mass_me: f64,
}

impl AsymptoticReport {
    /// Predicted transit times across [a − L1, b + L2] (transmission) and
    /// the round trip to the plane a − L1 (reflection), in the limit of
    /// large margins: (d_eff + L1 + L2)/v_tr and (d_eff + 2L1)/v_ref.
    pub fn with_margins(&self, l1: f64, l2: f64) -> (f64, f64) {
        let v_tr = velocity_of_k(self.mean_k_tr, self.mass_me);
        let v_ref = velocity_of_k(self.mean_k_ref, self.mass_me);
        (
            (self.d_eff_tr_nm + l1 + l2) / v_tr,
            (self.d_eff_ref_nm + 2.0 * l1) / v_ref,
        )
    }
}

/// Weighted-slope means over the packet: d_eff^tr = ⟨J′ − Λ′⟩_T,
/// d_eff^ref = ⟨J′ − F′ − Λ′⟩_R, x_start = −⟨Λ′⟩, τ = d_eff/v(⟨k⟩).
pub fn asymptotic_times(
    pot: &ValidatedPotential,
    packet: &SpectralPacket,
) -> Result<AsymptoticReport, TimingError> {
    if !pot.symmetric {
        return Err(TimingError::AsymmetricPotential);
    }
    let table = ParamTable::build(pot, &packet.grid.points(), 1e-3)?;
    let jp_tr = weighted_mean(&table, Weight::T, Quantity::JPrime, packet)?;
    let lam_tr = weighted_mean(&table, Weight::T, Quantity::LambdaPrime, packet)?;
    let k_tr = weighted_mean(&table, Weight::T, Quantity::K, packet)?;
    let jp_ref = weighted_mean(&table, Weight::R, Quantity::JPrime, packet)?;
    let fp_ref = weighted_mean(&table, Weight::R, Quantity::FPrime, packet)?;
    let lam_ref = weighted_mean(&table, Weight::R, Quantity::LambdaPrime, packet)?;
    let k_ref = weighted_mean(&table, Weight::R, Quantity::K, packet)?;
    let d_eff_tr = jp_tr - lam_tr;
    let d_eff_ref = jp_ref - fp_ref - lam_ref;
    Ok(AsymptoticReport {
        tau_tr_fs: d_eff_tr / velocity_of_k(k_tr, pot.mass_me),
        tau_ref_fs: d_eff_ref / velocity_of_k(k_ref, pot.mass_me),
        d_eff_tr_nm: d_eff_tr,
        d_eff_ref_nm: d_eff_ref,
        x_start_tr_nm: -lam_tr,
        x_start_ref_nm: -lam_ref,
        mean_k_tr: k_tr,
        mean_k_ref: k_ref,
        mass_me: pot.mass_me,
    })
}

/// Per-k effective width J′(k) − Λ′(k) and starting point −Λ′(k) by
/// finite differences, over an ascending k-grid. Works for any
/// mirror-symmetric profile, spikes included.
pub fn deff_xstart_sweep(
    pot: &ValidatedPotential,
    ks: &[f64],
    h: f64,
) -> Result<Vec<(f64, f64, f64)>, TimingError> {
    if !pot.symmetric {
        return Err(TimingError::AsymmetricPotential);
    }
    let table = ParamTable::build(pot, ks, h)?;
    Ok(table
        .entries
        .iter()
        .map(|e| {
            let lp = sigma_from_f(e.params.f) * lambda_prime(e.params.t, e.params.r, e.t_prime);
            (e.params.k, e.j_prime - lp, -lp)
        })
        .collect())
}

/// Same per-k quantities at a single wavenumber. Fails inside the
/// five-point stencil of a resonance; use `deff_xstart_sweep` when that
/// matters.
pub fn deff_xstart_fd(
    pot: &ValidatedPotential,
    k: f64,
    h: f64,
) -> Result<(f64, f64), TimingError> {
    if !pot.symmetric {
        return Err(TimingError::AsymmetricPotential);
    }
    let p = tunneling_params(pot, k)?;
    let (t_prime, j_prime, _) = params_derivatives(pot, k, h)?;
    let lp = sigma_from_f(p.f) * lambda_prime(p.t, p.r, t_prime);
    Ok((j_prime - lp, -lp))
}

/// Closed-form effective width and starting point for one rectangular
/// segment of height `v0_ev` on a width `d_nm`, evaluated at wavenumber
/// `k`. Below the barrier uses the hyperbolic branch, above it (and for
/// wells) the trigonometric one with β = sign(V0); the removable point
/// E = V0 switches to a series in κd.
pub fn rect_deff_xstart(v0_ev: f64, d_nm: f64, mass_me: f64, k: f64) -> (f64, f64) {
    let c = hbar2_over_2m(mass_me);
    let k0sq = v0_ev.abs() / c;
    let beta = if v0_ev > 0.0 {
        1.0
    } else if v0_ev < 0.0 {
        -1.0
    } else {
        0.0
    };
    let ksq = k * k;
    let d = d_nm;
    // κ² with the branch sign folded in: positive under the barrier,
    // and reused as the trig argument squared above it / in wells
    let below = beta > 0.0 && ksq < k0sq;
    let kap_sq = if below { k0sq - ksq } else { ksq - beta * k0sq };
    let kap = kap_sq.sqrt();
    if kap * d < 1e-4 {
        // E = V0 neighborhood, common limit of both branches
        let denom = 4.0 * ksq + k0sq * k0sq * d * d;
        let d_eff = 4.0 * ksq * d * (1.0 + k0sq * d * d / 6.0) / denom;
        let x_start = -2.0 * k0sq * d * (1.0 + ksq * d * d / 3.0) / denom;
        return (d_eff, x_start);
    }
    if below {
        let sh = (kap * d).sinh();
        let sh2 = (kap * d / 2.0).sinh();
        let denom = 4.0 * ksq * kap_sq + k0sq * k0sq * sh * sh;
        let d_eff =
            (4.0 / kap) * (ksq + k0sq * sh2 * sh2) * (k0sq * sh - ksq * kap * d) / denom;
        let x_start = -2.0 * (k0sq / kap)
            * ((kap_sq - ksq) * sh + ksq * kap * d * (kap * d).cosh())
            / denom;
        (d_eff, x_start)
    } else {
        let sn = (kap * d).sin();
        let sn2 = (kap * d / 2.0).sin();
        let denom = 4.0 * ksq * kap_sq + k0sq * k0sq * sn * sn;
        let d_eff =
            (4.0 / kap) * (ksq - beta * k0sq * sn2 * sn2) * (ksq * kap * d - beta * k0sq * sn)
                / denom;
        let x_start = -2.0 * beta * (k0sq / kap)
            * ((kap_sq + ksq) * sn - ksq * kap * d * (kap * d).cos())
            / denom;
        (d_eff, x_start)
    }
}

/// Closed-form starting point for a spike W·δ(x − x0); the effective
/// width is identically zero there. Agrees with the d → 0, V0·d → W
/// limit of `rect_deff_xstart` and with finite differences of Λ′.
pub fn delta_xstart(w_ev_nm: f64, mass_me: f64, k: f64) -> f64 {
    let c = hbar2_over_2m(mass_me);
    -(w_ev_nm / (2.0 * c)) / (k * k + w_ev_nm * w_ev_nm / (4.0 * c * c))
}

/// Legacy stationary-phase times. The explicit `a` argument exposes the
/// defect these formulas are kept to demonstrate: the result depends on
/// where the packet was launched, through a·(1/v_sub − 1/v0).
pub fn swpa_times(
    pot: &ValidatedPotential,
    packet: &SpectralPacket,
    l1: f64,
    l2: f64,
    a: f64,
) -> Result<(f64, f64), TimingError> {
    if !pot.symmetric {
        return Err(TimingError::AsymmetricPotential);
    }
    let table = ParamTable::build(pot, &packet.grid.points(), 1e-3)?;
    let k0 = packet.mean_k();
    let v0 = velocity_of_k(k0, pot.mass_me);
    let jp_tr = weighted_mean(&table, Weight::T, Quantity::JPrime, packet)?;
    let k_tr = weighted_mean(&table, Weight::T, Quantity::K, packet)?;
    let v_tr = velocity_of_k(k_tr, pot.mass_me);
    let jp_ref = weighted_mean(&table, Weight::R, Quantity::JPrime, packet)?;
    let fp_ref = weighted_mean(&table, Weight::R, Quantity::FPrime, packet)?;
    let k_ref = weighted_mean(&table, Weight::R, Quantity::K, packet)?;
    let v_ref = velocity_of_k(k_ref, pot.mass_me);
    let dt_tr = (jp_tr + l2) / v_tr + l1 / v0 + a * (1.0 / v_tr - 1.0 / v0);
    let dt_ref = (jp_ref - fp_ref + l1) / v_ref + l1 / v0 + a * (1.0 / v_ref - 1.0 / v0);
    Ok((dt_tr, dt_ref))
}

// Coarse enough that a window scan stays affordable on large k-grids;
// a crossing of a tangent plane near the CM turnaround still spans
// tens of fs, so brackets cannot slip between samples.
const SCAN_DT_FS: f64 = 4.0;
const REFINE_DT_FS: f64 = 0.01;
const EMPTY_CHANNEL: f64 = 1e-12;

/// Per-channel stationary values cached on a fixed x-grid, so each time
/// sample reduces to one coefficient refresh and a row-wise dot product.
/// Summation runs over k in grid order for every x, matching the direct
/// synthesis bit for bit.
struct ChannelCache<'a> {
    xs: Vec<f64>,
    /// Row-major: vals[ix * nk + ik] = ψ_{k_ik}(x_ix).
    vals: Vec<Complex64>,
    nk: usize,
    packet: &'a SpectralPacket,
    mass_me: f64,
}

impl<'a> ChannelCache<'a> {
    fn build(
        table: &SynthesisTable,
        packet: &'a SpectralPacket,
        channel: Channel,
        xs: Vec<f64>,
    ) -> Result<ChannelCache<'a>, TimingError> {
        crate::spectral::nyquist_check(packet.grid.dk(), &xs)?;
        let states = table.states_for(channel)?;
        let nk = states.len();
        let vals: Vec<Complex64> = xs
            .par_iter()
            .flat_map_iter(|&x| states.iter().map(move |s| s.eval(x)))
            .collect();
        Ok(ChannelCache { xs, vals, nk, packet, mass_me: table.mass_me })
    }

    /// Trapezoid center of mass at time t (fs).
    fn cm(&self, t: f64) -> f64 {
        let coef = quadrature_coefs(self.packet, self.mass_me, t);
        let n = self.xs.len();
        let rows: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|ix| {
                let row = &self.vals[ix * self.nk..(ix + 1) * self.nk];
                let mut s = Complex64::new(0.0, 0.0);
                for (c, v) in coef.iter().zip(row) {
                    s += c * v;
                }
                let w = if ix == 0 || ix == n - 1 { 0.5 } else { 1.0 };
                let dens = w * s.norm_sqr();
                (dens, dens * self.xs[ix])
            })
            .collect();
        // sequential reduction keeps the result independent of thread count
        let (norm, first) = rows.iter().fold((0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1));
        first / norm
    }
}

fn uniform_range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

/// Packet-wide k statistics needed to size the x-window: weighted mean
/// and the spread of the incident spectrum.
fn weighted_k_stats(table: &SynthesisTable, packet: &SpectralPacket, weight: Weight) -> (f64, f64) {
    let w = packet.grid.weights();
    let (mut m0, mut m1) = (0.0, 0.0);
    for (i, p) in table.params.iter().enumerate() {
        let wgt = match weight {
            Weight::One => 1.0,
            Weight::T => p.t,
            Weight::R => p.r,
        };
        let mass = wgt * packet.amps[i].norm_sqr() * w[i];
        m0 += mass;
        m1 += p.k * mass;
    }
    (m0, if m0 > 0.0 { m1 / m0 } else { 0.0 })
}

fn spectrum_sigma_k(table: &SynthesisTable, packet: &SpectralPacket) -> f64 {
    let w = packet.grid.weights();
    let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
    for (i, p) in table.params.iter().enumerate() {
        let mass = packet.amps[i].norm_sqr() * w[i];
        m0 += mass;
        m1 += p.k * mass;
        m2 += p.k * p.k * mass;
    }
    let mean = m1 / m0;
    (m2 / m0 - mean * mean).max(1e-12).sqrt()
}

fn first_crossing(ts: &[f64], g: &[f64]) -> Option<(f64, f64)> {
    g.windows(2)
        .position(|w| w[0].signum() != w[1].signum() || w[1] == 0.0)
        .map(|i| (ts[i], ts[i + 1]))
}

fn last_crossing(ts: &[f64], g: &[f64]) -> Option<(f64, f64)> {
    (0..g.len() - 1)
        .rev()
        .find(|&i| g[i].signum() != g[i + 1].signum() || g[i + 1] == 0.0)
        .map(|i| (ts[i], ts[i + 1]))
}

fn bisect(cache: &ChannelCache, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = cache.cm(lo) - target;
    while hi - lo > REFINE_DT_FS {
        let mid = 0.5 * (lo + hi);
        let g_mid = cache.cm(mid) - target;
        if g_lo.signum() == g_mid.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Returns Err(variation) when the CM speed wanders by ≥ 1% of its mean
/// over the last tenth of the window, i.e. the motion is not yet
/// ballistic and any root near the window end is untrustworthy.
fn ballistic_settled(ts: &[f64], cms: &[f64]) -> Result<(), f64> {
    let t_cut = ts[ts.len() - 1] - 0.1 * (ts[ts.len() - 1] - ts[0]);
    let start = ts.partition_point(|&t| t < t_cut).min(ts.len().saturating_sub(4));
    let speeds: Vec<f64> = (start..ts.len() - 1)
        .map(|i| (cms[i + 1] - cms[i]) / (ts[i + 1] - ts[i]))
        .collect();
    let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
    let spread = speeds.iter().fold(0.0_f64, |m, v| m.max((v - mean).abs()));
    let variation = if mean.abs() > 1e-9 { spread / mean.abs() } else { f64::INFINITY };
    if variation < 0.01 {
        Ok(())
    } else {
        Err(variation)
    }
}

struct ChannelScan {
    ts: Vec<f64>,
    cms: Vec<f64>,
}

fn scan_channel(cache: &ChannelCache, t_lo: f64, t_hi: f64) -> ChannelScan {
    // uniform, endpoint-exact; the step shrinks below SCAN_DT to fit
    let n = ((t_hi - t_lo) / SCAN_DT_FS).ceil().max(1.0) as usize;
    let ts: Vec<f64> = (0..=n)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / n as f64)
        .collect();
    let cms = ts.iter().map(|&t| cache.cm(t)).collect();
    ChannelScan { ts, cms }
}

/// Exact transit times by root-finding on the channel centers of mass:
/// the transmission time spans the smallest root of CM_tr = a − L1 to the
/// largest root of CM_tr = b + L2; the reflection time spans the smallest
/// to the largest root of CM_ref = a − L1. Roots come from a dense scan
/// refined by bisection to 0.01 fs.
pub fn exact_times(
    pot: &ValidatedPotential,
    packet: &SpectralPacket,
    l1: f64,
    l2: f64,
    window: (f64, f64),
) -> Result<(ExactTime, ExactTime), TimingError> {
    Ok(exact_times_multi(pot, packet, &[(l1, l2)], window)?.remove(0))
}

/// `exact_times` for several margin pairs at once. The CM trajectories do
/// not depend on the margins, so the expensive scan runs once per channel
/// and only the per-pair crossing search and bisection repeat.
pub fn exact_times_multi(
    pot: &ValidatedPotential,
    packet: &SpectralPacket,
    pairs: &[(f64, f64)],
    window: (f64, f64),
) -> Result<Vec<(ExactTime, ExactTime)>, TimingError> {
    let (t_lo, t_hi) = window;
    // the settle check needs a meaningful last tenth of the scan
    if !(t_lo >= 0.0 && t_hi >= t_lo + 30.0 * SCAN_DT_FS) {
        return Err(TimingError::BadWindow { t_lo, t_hi });
    }
    for &(l1, l2) in pairs {
        if l1 < 0.0 || l2 < 0.0 {
            return Err(TimingError::NegativeMargin { l1, l2 });
        }
    }
    if !pot.symmetric {
        return Err(TimingError::AsymmetricPotential);
    }
    let table = SynthesisTable::build(pot, &packet.grid)?;

    let (t_frac, k_tr) = weighted_k_stats(&table, packet, Weight::T);
    let (r_frac, k_ref) = weighted_k_stats(&table, packet, Weight::R);
    let total = t_frac + r_frac;
    let sig_k = spectrum_sigma_k(&table, packet);
    let sig_x0 = 0.5 / sig_k;
    let spread_v = 2.0 * hbar2_over_2m(pot.mass_me) * sig_k / crate::units::HBAR;
    let margin = |t: f64| 8.0 * (sig_x0 * sig_x0 + (spread_v * t).powi(2)).sqrt() + 30.0;

    let tr_times: Vec<ExactTime> = if t_frac / total < EMPTY_CHANNEL {
        vec![ExactTime::NoRoot; pairs.len()]
    } else {
        let v = velocity_of_k(k_tr, pot.mass_me);
        let xs = uniform_range(-margin(0.0), pot.b + v * t_hi + margin(t_hi), 0.5);
        let cache = ChannelCache::build(&table, packet, Channel::Tr, xs)?;
        let scan = scan_channel(&cache, t_lo, t_hi);
        ballistic_settled(&scan.ts, &scan.cms)
            .map_err(|variation| TimingError::WindowTooShort { channel: Channel::Tr, variation })?;
        let mut times = Vec::with_capacity(pairs.len());
        for &(l1, l2) in pairs {
            let enter = pot.a - l1;
            let exit = pot.b + l2;
            let g_in: Vec<f64> = scan.cms.iter().map(|c| c - enter).collect();
            let g_out: Vec<f64> = scan.cms.iter().map(|c| c - exit).collect();
            if g_in[0] >= 0.0 {
                // entry predates the window; the caller must start earlier
                return Err(TimingError::WindowTooShort { channel: Channel::Tr, variation: f64::NAN });
            }
            match (first_crossing(&scan.ts, &g_in), last_crossing(&scan.ts, &g_out)) {
                (Some((a1, b1)), Some((a2, b2))) => {
                    let t1 = bisect(&cache, enter, a1, b1);
                    let t2 = bisect(&cache, exit, a2, b2);
                    times.push(ExactTime::Time(t2 - t1));
                }
                // a settled forward-moving CM that has not crossed yet would
                // cross after the window: not a missing root, a short window
                _ => {
                    return Err(TimingError::WindowTooShort {
                        channel: Channel::Tr,
                        variation: f64::NAN,
                    })
                }
            }
        }
        times
    };

    let ref_times: Vec<ExactTime> = if r_frac / total < EMPTY_CHANNEL {
        vec![ExactTime::NoRoot; pairs.len()]
    } else {
        let v = velocity_of_k(k_ref, pot.mass_me);
        let t_turn = (pot.x_mid / v).clamp(0.0, t_hi);
        let cm_end = pot.x_mid - v * (t_hi - t_turn);
        let xs = uniform_range(
            (cm_end - margin(t_hi)).min(-margin(0.0)),
            pot.b + margin(t_hi),
            0.5,
        );
        let cache = ChannelCache::build(&table, packet, Channel::Ref, xs)?;
        let scan = scan_channel(&cache, t_lo, t_hi);
        ballistic_settled(&scan.ts, &scan.cms)
            .map_err(|variation| TimingError::WindowTooShort { channel: Channel::Ref, variation })?;
        let mut times = Vec::with_capacity(pairs.len());
        for &(l1, _) in pairs {
            let plane = pot.a - l1;
            let g: Vec<f64> = scan.cms.iter().map(|c| c - plane).collect();
            if g[0] >= 0.0 {
                return Err(TimingError::WindowTooShort { channel: Channel::Ref, variation: f64::NAN });
            }
            match (first_crossing(&scan.ts, &g), last_crossing(&scan.ts, &g)) {
                (Some((a1, b1)), Some((a2, b2))) => {
                    if *g.last().unwrap() >= 0.0 {
                        // entered but not yet back out by the window end
                        return Err(TimingError::WindowTooShort {
                            channel: Channel::Ref,
                            variation: f64::NAN,
                        });
                    }
                    let t1 = bisect(&cache, plane, a1, b1);
                    let t2 = bisect(&cache, plane, a2, b2);
                    times.push(ExactTime::Time(t2 - t1));
                }
                // the CM turned back without reaching the plane
                _ => times.push(ExactTime::NoRoot),
            }
        }
        times
    };

    Ok(tr_times.into_iter().zip(ref_times).collect())
}

/// Everything the `times` subcommand prints: exact, asymptotic, and
/// legacy times with the margins and launch distance they used.
#[derive(Debug, Clone, Serialize)]
pub struct TimingReport {
    pub l1_nm: f64,
    pub l2_nm: f64,
    pub window_fs: (f64, f64),
    pub exact_tr: ExactTime,
    pub exact_ref: ExactTime,
    pub asym_tr_fs: f64,
    pub asym_ref_fs: f64,
    pub asym_tr_at_margins_fs: f64,
    pub asym_ref_at_margins_fs: f64,
    pub d_eff_tr_nm: f64,
    pub d_eff_ref_nm: f64,
    pub x_start_tr_nm: f64,
    pub x_start_ref_nm: f64,
    pub mean_k_tr: f64,
    pub mean_k_ref: f64,
    pub swpa_tr_fs: f64,
    pub swpa_ref_fs: f64,
    pub swpa_a_nm: f64,
}

pub fn timing_report(
    pot: &ValidatedPotential,
    packet: &SpectralPacket,
    l1: f64,
    l2: f64,
    window: (f64, f64),
) -> Result<TimingReport, TimingError> {
    let asym = asymptotic_times(pot, packet)?;
    let (asym_tr_l, asym_ref_l) = asym.with_margins(l1, l2);
    let (swpa_tr, swpa_ref) = swpa_times(pot, packet, l1, l2, pot.a)?;
    let (exact_tr, exact_ref) = exact_times(pot, packet, l1, l2, window)?;
    Ok(TimingReport {
        l1_nm: l1,
        l2_nm: l2,
        window_fs: window,
        exact_tr,
        exact_ref,
        asym_tr_fs: asym.tau_tr_fs,
        asym_ref_fs: asym.tau_ref_fs,
        asym_tr_at_margins_fs: asym_tr_l,
        asym_ref_at_margins_fs: asym_ref_l,
        d_eff_tr_nm: asym.d_eff_tr_nm,
        d_eff_ref_nm: asym.d_eff_ref_nm,
        x_start_tr_nm: asym.x_start_tr_nm,
        x_start_ref_nm: asym.x_start_ref_nm,
        mean_k_tr: asym.mean_k_tr,
        mean_k_ref: asym.mean_k_ref,
        swpa_tr_fs: swpa_tr,
        swpa_ref_fs: swpa_ref,
        swpa_a_nm: pot.a,
    })
}
