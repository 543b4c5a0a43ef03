//! Stationary scattering states at fixed k and their split into a
//! transmission part and a reflection part.
//!
//! For a unit wave incident from the left, the full state has outer
//! amplitudes (1, p*/q) on the left and (1/q, 0) on the right. The split
//! assigns the reflected outgoing wave to a zero-flux reflection state and
//! the transmitted one to a constant-flux transmission state:
//!
//!   ψ_full(x; k) = ψ_tr(x; k) + ψ_ref(x; k).
//!
//! The reflection state's left outer form is fixed by two requirements:
//! its outgoing amplitude is the full reflected amplitude p*/q, and its
//! flux vanishes, which forces the incoming amplitude to √R·e^{iλ} with
//! cos λ = √R, i.e. λ = ±arctan√(T/R). For mirror-symmetric potentials
//! exactly one root makes ψ_ref odd about the midpoint x_mid (the phase F
//! is then 0 or π, and the sign of cos F picks the root); oddness forces
//! ψ_ref(x_mid) = 0, and the reflection state is truncated to vanish
//! identically for x ≥ x_mid. The transmission state is then everywhere
//! continuous with a derivative kink at x_mid and carries the whole flux
//! (ħk/m)·T, with no jump across the kink.
//!
//! Interior representation: each uniform piece holds a (value, derivative)
//! anchor, propagated with the exact cosine/sinc pair of the piece, which
//! covers trigonometric and evanescent pieces in one form. The reflection
//! interior is built backward from its midpoint node and scaled onto the
//! outer form at x = a; the leftover mismatch in the non-scaled component
//! is a direct numerical witness that the selected root really is the odd
//! one, so the constructor checks it and fails loudly rather than return a
//! corrupt state.

use num_complex::Complex64;
use thiserror::Error;

use crate::potential::ValidatedPotential;
use crate::transfer::{cs_pair, TunnelingParams};
use crate::units::{hbar2_over_2m, velocity_of_k, HBAR};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Full,
    Tr,
    Ref,
}

#[derive(Debug, Error, PartialEq)]
pub enum StationaryError {
    #[error("R = {r} below 1e-14 at k = {k}: reflection state vanishes and lambda is undefined")]
    FullTransmission { k: f64, r: f64 },
    #[error("transmission/reflection split needs a mirror-symmetric potential")]
    AsymmetricPotential,
    #[error("odd-parity probe failed at k = {k}: residual {residual}")]
    OddProbeFailed { k: f64, residual: f64 },
    #[error("interior does not join the outer form at k = {k}: residual {residual}")]
    ConstructionInconsistent { k: f64, residual: f64 },
}

/// Analytic form of one region of a stationary state.
#[derive(Debug, Clone, Copy)]
pub enum Representation {
    /// A·e^{ikx} + B·e^{−ikx} with the state's own k.
    PlaneWave { a_amp: Complex64, b_amp: Complex64 },
    /// Value/derivative anchor at x0 inside a uniform piece with local
    /// k2sq = k² − V0/(ħ²/2m); propagated by the cosine/sinc pair.
    Anchored { x0: f64, psi0: Complex64, dpsi0: Complex64, k2sq: f64 },
    Zero,
}

#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub x_left: f64,
    pub x_right: f64,
    pub rep: Representation,
}

/// A stationary channel state at fixed k, piecewise analytic over
/// contiguous regions covering the whole axis.
#[derive(Debug, Clone)]
pub struct StationaryState {
    pub k: f64,
    pub channel: Channel,
    /// Selected root λ for tr/ref channels; None for the full state.
    pub lambda: Option<f64>,
    /// Nominal probability current in nm/fs: (ħk/m)·T for full/tr, 0 for ref.
    pub flux: f64,
    pub mass_me: f64,
    pub regions: Vec<Region>,
}

impl StationaryState {
    pub fn eval_with_derivative(&self, x: f64) -> (Complex64, Complex64) {
        let idx = self.regions.partition_point(|r| r.x_right <= x);
        let r = &self.regions[idx.min(self.regions.len() - 1)];
        eval_rep(&r.rep, self.k, x)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.eval_with_derivative(x).0
    }

    /// Probability current (ħ/m)·Im(ψ*ψ′) at x, in nm/fs.
    pub fn flux_at(&self, x: f64) -> f64 {
        let (psi, dpsi) = self.eval_with_derivative(x);
        2.0 * hbar2_over_2m(self.mass_me) / HBAR * (psi.conj() * dpsi).im
    }

    /// Largest relative value mismatch between adjacent representations,
    /// evaluated exactly on their shared boundaries.
    pub fn boundary_mismatch(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.regions.windows(2) {
            let xb = w[0].x_right;
            let (va, _) = eval_rep(&w[0].rep, self.k, xb);
            let (vb, _) = eval_rep(&w[1].rep, self.k, xb);
            let scale = va.norm().max(vb.norm()).max(1e-30);
            // fully zero on both sides counts as matched
            let rel = if va.norm() + vb.norm() == 0.0 { 0.0 } else { (va - vb).norm() / scale };
            worst = worst.max(rel);
        }
        worst
    }
}

fn eval_rep(rep: &Representation, k: f64, x: f64) -> (Complex64, Complex64) {
    match *rep {
        Representation::PlaneWave { a_amp, b_amp } => {
            let e = Complex64::from_polar(1.0, k * x);
            (a_amp * e + b_amp * e.conj(), I * k * (a_amp * e - b_amp * e.conj()))
        }
        Representation::Anchored { x0, psi0, dpsi0, k2sq } => {
            let (c, s) = cs_pair(k2sq, x - x0);
            (psi0 * c + dpsi0 * s, -k2sq * psi0 * s + dpsi0 * c)
        }
        Representation::Zero => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    }
}

#[inline]
fn propagate(psi: Complex64, dpsi: Complex64, k2sq: f64, dx: f64) -> (Complex64, Complex64) {
    let (c, s) = cs_pair(k2sq, dx);
    (psi * c + dpsi * s, -k2sq * psi * s + dpsi * c)
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    xl: f64,
    xr: f64,
    k2sq: f64,
}

/// Uniform interior pieces with the midpoint inserted as an edge, so that
/// tr/ref regions can end or start exactly at x_mid.
fn interior_pieces(pot: &ValidatedPotential, k: f64) -> Vec<Piece> {
    let c = hbar2_over_2m(pot.mass_me);
    let tol = 1e-9 * pot.d.max(1.0);
    let mut pieces = Vec::new();
    for (xl, xr, v0) in pot.pieces() {
        let k2sq = k * k - v0 / c;
        if pot.x_mid > xl + tol && pot.x_mid < xr - tol {
            pieces.push(Piece { xl, xr: pot.x_mid, k2sq });
            pieces.push(Piece { xl: pot.x_mid, xr, k2sq });
        } else {
            pieces.push(Piece { xl, xr, k2sq });
        }
    }
    pieces
}

fn plane_wave_at(a_amp: Complex64, b_amp: Complex64, k: f64, x: f64) -> (Complex64, Complex64) {
    let e = Complex64::from_polar(1.0, k * x);
    (a_amp * e + b_amp * e.conj(), I * k * (a_amp * e - b_amp * e.conj()))
}

/// Full scattering state per unit incident amplitude.
pub fn full_state(params: &TunnelingParams, pot: &ValidatedPotential) -> StationaryState {
    let k = params.k;
    let one = Complex64::new(1.0, 0.0);
    let b_out = params.p.conj() / params.q;
    let a_out = one / params.q;
    let mut regions = vec![Region {
        x_left: f64::NEG_INFINITY,
        x_right: pot.a,
        rep: Representation::PlaneWave { a_amp: one, b_amp: b_out },
    }];
    let (mut psi, mut dpsi) = plane_wave_at(one, b_out, k, pot.a);
    for piece in interior_pieces(pot, k) {
        regions.push(Region {
            x_left: piece.xl,
            x_right: piece.xr,
            rep: Representation::Anchored { x0: piece.xl, psi0: psi, dpsi0: dpsi, k2sq: piece.k2sq },
        });
        let next = propagate(psi, dpsi, piece.k2sq, piece.xr - piece.xl);
        psi = next.0;
        dpsi = next.1;
    }
    regions.push(Region {
        x_left: pot.b,
        x_right: f64::INFINITY,
        rep: Representation::PlaneWave { a_amp: a_out, b_amp: Complex64::new(0.0, 0.0) },
    });
    StationaryState {
        k,
        channel: Channel::Full,
        lambda: None,
        flux: velocity_of_k(k, pot.mass_me) * params.t,
        mass_me: pot.mass_me,
        regions,
    }
}

/// Both roots (λ₊, λ₋) of exp(iλ) = √R ± i√T.
pub fn lambda_roots(params: &TunnelingParams) -> Result<(f64, f64), StationaryError> {
    if params.r < 1e-14 {
        return Err(StationaryError::FullTransmission { k: params.k, r: params.r });
    }
    let lam1 = f64::atan2(params.t.sqrt(), params.r.sqrt());
    Ok((lam1, -lam1))
}

/// λ′ = T′/(2√(RT)), the k-derivative of arctan√(T/R). The signed branch
/// Λ = σλ has Λ′ = σλ′; both σ and T′ flip together across a resonance, so
/// the product stays continuous there.
pub fn lambda_prime(t: f64, r: f64, t_prime: f64) -> f64 {
    let denom = 2.0 * (r * t).sqrt();
    if denom < 1e-30 {
        // exact resonance or opaque limit: T' vanishes at the same order
        0.0
    } else {
        t_prime / denom
    }
}

/// Sign of the odd root from the phase F of a symmetric profile: +1 when
/// F ≡ 0 (mod 2π), −1 when F ≡ π.
pub fn sigma_from_f(f: f64) -> f64 {
    if f.cos() >= 0.0 { 1.0 } else { -1.0 }
}

/// Antisymmetry residual of the outer form for the root σλ₁ with its tied
/// outer sign, probed at mirror points x′ = ±x0 outside the profile:
/// |σ·sin(arg − F) − sin(arg)| with arg = (kd + λ − J − π/2 + F)/2 + kx0.
fn odd_probe_residual(params: &TunnelingParams, d: f64, sigma: f64, lam1: f64, x0: f64) -> f64 {
    let lam = sigma * lam1;
    let arg = 0.5 * (params.k * d + lam - params.j - std::f64::consts::FRAC_PI_2 + params.f)
        + params.k * x0;
    (sigma * (arg - params.f).sin() - arg.sin()).abs()
}

/// Selects the root λ for which the outer reflection form is odd about
/// x_mid, using the sign of cos F, then verifies the choice on a mirror
/// pair of probe points. A probe failure is a hard error: it would mean a
/// phase-branch bug that would silently corrupt every downstream Λ(k).
pub fn select_odd_root(
    params: &TunnelingParams,
    pot: &ValidatedPotential,
) -> Result<f64, StationaryError> {
    if !pot.symmetric {
        return Err(StationaryError::AsymmetricPotential);
    }
    let (lam_plus, _) = lambda_roots(params)?;
    let sigma = sigma_from_f(params.f);
    let x0 = -0.5 * pot.d - (0.25 * pot.d).max(0.5 / params.k);
    let residual = odd_probe_residual(params, pot.d, sigma, lam_plus, x0);
    if residual > 1e-9 {
        return Err(StationaryError::OddProbeFailed { k: params.k, residual });
    }
    Ok(sigma * lam_plus)
}

/// Root selection by probing both candidates instead of reading F; used to
/// cross-check the F-rule. Returns the root with the smaller antisymmetry
/// residual; ambiguous when both residuals nearly vanish (an accidental
/// node at the probe), in which case the F-rule result is returned.
pub fn select_odd_root_by_probe(
    params: &TunnelingParams,
    pot: &ValidatedPotential,
) -> Result<f64, StationaryError> {
    if !pot.symmetric {
        return Err(StationaryError::AsymmetricPotential);
    }
    let (lam_plus, _) = lambda_roots(params)?;
    let x0 = -0.5 * pot.d - (0.25 * pot.d).max(0.5 / params.k);
    let res_plus = odd_probe_residual(params, pot.d, 1.0, lam_plus, x0);
    let res_minus = odd_probe_residual(params, pot.d, -1.0, lam_plus, x0);
    if res_plus < 1e-9 && res_minus < 1e-9 {
        return select_odd_root(params, pot);
    }
    Ok(if res_plus < res_minus { lam_plus } else { -lam_plus })
}

/// Reflection-state outer amplitudes for x ≤ a: (√R·e^{iλ}, p*/q).
fn ref_outer_amps(params: &TunnelingParams, lam: f64) -> (Complex64, Complex64) {
    (Complex64::from_polar(params.r.sqrt(), lam), params.p.conj() / params.q)
}

struct BackwardBuild {
    regions: Vec<Region>,
    /// (value, derivative) the backward walk reaches at x = a.
    at_a: (Complex64, Complex64),
}

/// Walks anchors from x_mid down to a through the left-half pieces,
/// storing each piece anchored at its right edge. `seed` is the (value,
/// derivative) at x_mid.
fn backward_left_half(pot: &ValidatedPotential, k: f64, seed: (Complex64, Complex64)) -> BackwardBuild {
    let tol = 1e-9 * pot.d.max(1.0);
    let left: Vec<Piece> = interior_pieces(pot, k)
        .into_iter()
        .filter(|p| p.xr <= pot.x_mid + tol)
        .collect();
    let (mut psi, mut dpsi) = seed;
    let mut regions = Vec::with_capacity(left.len());
    for piece in left.iter().rev() {
        regions.push(Region {
            x_left: piece.xl,
            x_right: piece.xr,
            rep: Representation::Anchored { x0: piece.xr, psi0: psi, dpsi0: dpsi, k2sq: piece.k2sq },
        });
        let next = propagate(psi, dpsi, piece.k2sq, piece.xl - piece.xr);
        psi = next.0;
        dpsi = next.1;
    }
    regions.reverse();
    BackwardBuild { regions, at_a: (psi, dpsi) }
}

/// Relative disagreement between the backward-propagated interior and the
/// outer form at x = a, after matching the dominant component.
fn join_residual(
    k: f64,
    outer: (Complex64, Complex64),
    trial: (Complex64, Complex64),
) -> (Complex64, f64) {
    let (po, dpo) = outer;
    let (pt, dpt) = trial;
    let mscale = (po.norm() + dpo.norm() / k).max(1e-300);
    // scale on whichever component carries the trial's weight
    if pt.norm() * k >= dpt.norm() {
        let sc = po / pt;
        (sc, (dpo - sc * dpt).norm() / k / mscale)
    } else {
        let sc = dpo / dpt;
        (sc, (po - sc * pt).norm() / mscale)
    }
}

/// Reflection state: outer odd form for x ≤ a, interior from the midpoint
/// node backward, identically zero for x ≥ x_mid. Zero flux everywhere.
pub fn ref_state(
    params: &TunnelingParams,
    pot: &ValidatedPotential,
    lambda_sel: f64,
) -> Result<StationaryState, StationaryError> {
    if !pot.symmetric {
        return Err(StationaryError::AsymmetricPotential);
    }
    let k = params.k;
    let (a_ref, b_ref) = ref_outer_amps(params, lambda_sel);
    let mut regions = vec![Region {
        x_left: f64::NEG_INFINITY,
        x_right: pot.a,
        rep: Representation::PlaneWave { a_amp: a_ref, b_amp: b_ref },
    }];
    if pot.d > 0.0 {
        let seed = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let mut build = backward_left_half(pot, k, seed);
        let outer_at_a = plane_wave_at(a_ref, b_ref, k, pot.a);
        let (scale, residual) = join_residual(k, outer_at_a, build.at_a);
        if residual > 1e-6 {
            return Err(StationaryError::ConstructionInconsistent { k, residual });
        }
        for r in &mut build.regions {
            if let Representation::Anchored { psi0, dpsi0, .. } = &mut r.rep {
                *psi0 *= scale;
                *dpsi0 *= scale;
            }
        }
        regions.extend(build.regions);
    }
    regions.push(Region {
        x_left: pot.x_mid,
        x_right: f64::INFINITY,
        rep: Representation::Zero,
    });
    Ok(StationaryState {
        k,
        channel: Channel::Ref,
        lambda: Some(lambda_sel),
        flux: 0.0,
        mass_me: pot.mass_me,
        regions,
    })
}

/// Transmission state, built independently of the pointwise difference so
/// that full = tr + ref is a checkable property rather than a tautology:
/// left outer form (1 − √R·e^{iλ})·e^{ikx} with no left-going wave, right
/// half equal to the full state, left interior anchored at x_mid with the
/// full value and the kinked derivative.
pub fn tr_state(
    params: &TunnelingParams,
    pot: &ValidatedPotential,
    lambda_sel: f64,
) -> Result<StationaryState, StationaryError> {
    if !pot.symmetric {
        return Err(StationaryError::AsymmetricPotential);
    }
    let k = params.k;
    let one = Complex64::new(1.0, 0.0);
    let a_tr = one - Complex64::from_polar(params.r.sqrt(), lambda_sel);
    let a_out = one / params.q;
    let zero = Complex64::new(0.0, 0.0);

    let mut regions = vec![Region {
        x_left: f64::NEG_INFINITY,
        x_right: pot.a,
        rep: Representation::PlaneWave { a_amp: a_tr, b_amp: zero },
    }];

    if pot.d > 0.0 {
        // full-state values at the midpoint
        let b_out = params.p.conj() / params.q;
        let (mut fpsi, mut fdpsi) = plane_wave_at(one, b_out, k, pot.a);
        let tol = 1e-9 * pot.d.max(1.0);
        let pieces = interior_pieces(pot, k);
        for piece in pieces.iter().filter(|p| p.xr <= pot.x_mid + tol) {
            let next = propagate(fpsi, fdpsi, piece.k2sq, piece.xr - piece.xl);
            fpsi = next.0;
            fdpsi = next.1;
        }
        // reflection derivative at the midpoint node, scaled as in ref_state
        let seed = (zero, one);
        let ref_build = backward_left_half(pot, k, seed);
        let outer = ref_outer_amps(params, lambda_sel);
        let outer_at_a = plane_wave_at(outer.0, outer.1, k, pot.a);
        let (ref_scale, ref_residual) = join_residual(k, outer_at_a, ref_build.at_a);
        if ref_residual > 1e-6 {
            return Err(StationaryError::ConstructionInconsistent { k, residual: ref_residual });
        }

        // left half: anchor at x_mid with the kinked derivative
        let build = backward_left_half(pot, k, (fpsi, fdpsi - ref_scale));
        let tr_outer_at_a = plane_wave_at(a_tr, zero, k, pot.a);
        let (vo, dvo) = tr_outer_at_a;
        let (vt, dvt) = build.at_a;
        let mscale = (vo.norm() + dvo.norm() / k).max(1e-300);
        let residual = ((vo - vt).norm() + (dvo - dvt).norm() / k) / mscale;
        if residual > 1e-6 {
            return Err(StationaryError::ConstructionInconsistent { k, residual });
        }
        regions.extend(build.regions);

        // right half: the full state continued from the midpoint
        let (mut psi, mut dpsi) = (fpsi, fdpsi);
        for piece in pieces.iter().filter(|p| p.xl >= pot.x_mid - tol) {
            regions.push(Region {
                x_left: piece.xl,
                x_right: piece.xr,
                rep: Representation::Anchored {
                    x0: piece.xl,
                    psi0: psi,
                    dpsi0: dpsi,
                    k2sq: piece.k2sq,
                },
            });
            let next = propagate(psi, dpsi, piece.k2sq, piece.xr - piece.xl);
            psi = next.0;
            dpsi = next.1;
        }
    }

    regions.push(Region {
        x_left: pot.b,
        x_right: f64::INFINITY,
        rep: Representation::PlaneWave { a_amp: a_out, b_amp: zero },
    });
    Ok(StationaryState {
        k,
        channel: Channel::Tr,
        lambda: Some(lambda_sel),
        flux: velocity_of_k(k, pot.mass_me) * params.t,
        mass_me: pot.mass_me,
        regions,
    })
}

/// The full, transmission, and reflection states at one k. At resonances
/// (R < 1e-14) the reflection state is identically zero and the
/// transmission state equals the full one, keeping the split continuous.
#[derive(Debug, Clone)]
pub struct ChannelStates {
    pub full: StationaryState,
    pub tr: StationaryState,
    pub rf: StationaryState,
}

pub fn channel_states(
    params: &TunnelingParams,
    pot: &ValidatedPotential,
) -> Result<ChannelStates, StationaryError> {
    let full = full_state(params, pot);
    if params.r < 1e-14 {
        let mut tr = full.clone();
        tr.channel = Channel::Tr;
        let rf = StationaryState {
            k: params.k,
            channel: Channel::Ref,
            lambda: None,
            flux: 0.0,
            mass_me: pot.mass_me,
            regions: vec![Region {
                x_left: f64::NEG_INFINITY,
                x_right: f64::INFINITY,
                rep: Representation::Zero,
            }],
        };
        return Ok(ChannelStates { full, tr, rf });
    }
    let lam = select_odd_root(params, pot)?;
    let tr = tr_state(params, pot, lam)?;
    let rf = ref_state(params, pot, lam)?;
    Ok(ChannelStates { full, tr, rf })
}

/// The four plane-wave amplitudes of a one-source or one-sink setting.
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeSet {
    pub a_in: Complex64,
    pub b_out: Complex64,
    pub a_out: Complex64,
    pub b_in: Complex64,
}

impl AmplitudeSet {
    /// Unit left incidence: (1, p*/q, 1/q, 0).
    pub fn problem_at_hand(params: &TunnelingParams) -> AmplitudeSet {
        let one = Complex64::new(1.0, 0.0);
        AmplitudeSet {
            a_in: one,
            b_out: params.p.conj() / params.q,
            a_out: one / params.q,
            b_in: Complex64::new(0.0, 0.0),
        }
    }

    /// Two-source one-sink setting whose only outgoing wave is the
    /// reflected one: (R, p*/q, 0, p*/|q|²).
    pub fn aux_ref(params: &TunnelingParams) -> AmplitudeSet {
        let qn = params.q.norm_sqr();
        AmplitudeSet {
            a_in: Complex64::new(params.p.norm_sqr() / qn, 0.0),
            b_out: params.p.conj() / params.q,
            a_out: Complex64::new(0.0, 0.0),
            b_in: params.p.conj() / qn,
        }
    }

    /// Two-source one-sink setting whose only outgoing wave is the
    /// transmitted one: (T, 0, 1/q, −p*/|q|²).
    pub fn aux_tr(params: &TunnelingParams) -> AmplitudeSet {
        let qn = params.q.norm_sqr();
        AmplitudeSet {
            a_in: Complex64::new(1.0 / qn, 0.0),
            b_out: Complex64::new(0.0, 0.0),
            a_out: Complex64::new(1.0, 0.0) / params.q,
            b_in: -params.p.conj() / qn,
        }
    }
}

/// Scattering matrix [[1/q, −p/q], [p*/q, 1/q]] applied to (a_in, b_in).
pub fn smatrix_apply(params: &TunnelingParams, a_in: Complex64, b_in: Complex64) -> (Complex64, Complex64) {
    let q = params.q;
    let p = params.p;
    ((a_in - p * b_in) / q, (p.conj() * a_in + b_in) / q)
}

/// Eigenvalue (1 + iμ|p|)/q of the scattering matrix, μ = ±1.
pub fn s_eigenvalue(params: &TunnelingParams, mu: f64) -> Complex64 {
    (Complex64::new(1.0, mu * params.p.norm())) / params.q
}

/// The two amplitude sets generated by the scattering-matrix eigenvector
/// for eigenvalue branch μ: a bilateral-reflection set pinned to
/// b_out = p*/q and a bilateral-transmission set pinned to a_out = 1/q.
/// The branch that matches the one-source reflection state is μ = sign(Λ).
pub fn smatrix_eigensolutions(
    params: &TunnelingParams,
    mu: f64,
) -> Result<(AmplitudeSet, AmplitudeSet), StationaryError> {
    assert!(mu == 1.0 || mu == -1.0, "mu must be +1 or -1");
    if params.r < 1e-14 {
        return Err(StationaryError::FullTransmission { k: params.k, r: params.r });
    }
    let one = Complex64::new(1.0, 0.0);
    let pabs = params.p.norm();
    let denom = Complex64::new(1.0, mu * pabs);
    let refl = AmplitudeSet {
        a_in: I * mu * pabs / denom,
        b_out: params.p.conj() / params.q,
        a_out: I * mu * pabs / params.q,
        b_in: params.p.conj() / denom,
    };
    let trans = AmplitudeSet {
        a_in: one / denom,
        b_out: -I * mu * pabs / (params.p * params.q),
        a_out: one / params.q,
        b_in: -I * mu * pabs / (params.p * denom),
    };
    Ok((refl, trans))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{DeltaSpike, PotentialSpec, Segment};
    use crate::transfer::tunneling_params;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rect(v0: f64) -> ValidatedPotential {
        PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(505.0),
            segments: Some(vec![Segment { width_nm: 5.0, v0_ev: v0 }]),
            delta: None,
            mass_me: 0.067,
        }
        .validate()
        .unwrap()
    }

    fn probe_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(480.0..525.0)).collect()
    }

    #[test]
    fn full_state_is_continuous_and_flux_conserving() {
        for &v0 in &[0.3, -0.3] {
            let pot = rect(v0);
            for &k in &[0.45, 0.6630497, 0.9, 1.2] {
                let params = tunneling_params(&pot, k).unwrap();
                let st = full_state(&params, &pot);
                assert!(st.boundary_mismatch() < 1e-9, "mismatch {}", st.boundary_mismatch());
                for &x in &[460.0, 500.0, 501.7, 502.5, 504.2, 505.0, 540.0] {
                    assert_relative_eq!(st.flux_at(x), st.flux, max_relative = 1e-10);
                }
                // transmitted density at the right edge is T per unit incidence
                assert_relative_eq!(st.eval(pot.b).norm_sqr(), params.t, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn left_fringe_contrast_matches_reflection() {
        let pot = rect(0.3);
        let k = 0.6630497;
        let params = tunneling_params(&pot, k).unwrap();
        let st = full_state(&params, &pot);
        let period = std::f64::consts::PI / k;
        let n = 4000;
        let (mut dmin, mut dmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let x = 300.0 + period * i as f64 / n as f64;
            let d = st.eval(x).norm_sqr();
            dmin = dmin.min(d);
            dmax = dmax.max(d);
        }
        let contrast = (dmax - dmin) / (dmax + dmin);
        assert_relative_eq!(contrast, 2.0 * params.r.sqrt() / (1.0 + params.r), epsilon = 1e-6);
    }

    #[test]
    fn lambda_roots_match_exponential_identity() {
        let pot = rect(0.3);
        let params = tunneling_params(&pot, 0.6630497).unwrap();
        let (lp, lm) = lambda_roots(&params).unwrap();
        for (lam, sign) in [(lp, 1.0), (lm, -1.0)] {
            let e = Complex64::from_polar(1.0, lam);
            let want = Complex64::new(params.r.sqrt(), sign * params.t.sqrt());
            assert!((e - want).norm() < 1e-12);
        }
        // half-and-half split puts the roots at +-pi/4
        let mut half = params;
        half.t = 0.5;
        half.r = 0.5;
        let (lp, lm) = lambda_roots(&half).unwrap();
        assert_relative_eq!(lp, std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(lm, -std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn odd_root_follows_the_f_rule() {
        let pot = rect(0.3);
        // tunneling side: F = 0, root +; above the barrier: F = pi, root -
        for &(k, sign) in &[(0.5, 1.0), (0.6630497, 1.0), (0.95, 1.0), (1.05, -1.0), (1.3, -1.0)] {
            let params = tunneling_params(&pot, k).unwrap();
            let lam = select_odd_root(&params, &pot).unwrap();
            assert_eq!(lam.signum(), sign, "k = {k}");
            assert_eq!(select_odd_root_by_probe(&params, &pot).unwrap(), lam);
        }
        let well = rect(-0.3);
        for &(k, sign) in &[(0.3, 1.0), (0.6630497, 1.0), (1.02, 1.0), (1.3, -1.0)] {
            let params = tunneling_params(&well, k).unwrap();
            let lam = select_odd_root(&params, &well).unwrap();
            assert_eq!(lam.signum(), sign, "well k = {k}");
        }
    }

    #[test]
    fn probe_selection_agrees_with_f_rule_on_random_rectangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 200 {
            let v0: f64 = rng.gen_range(-0.5..0.5);
            let d: f64 = rng.gen_range(0.5..12.0);
            let k: f64 = rng.gen_range(0.05..1.8);
            if v0.abs() < 1e-3 {
                continue;
            }
            let pot = PotentialSpec {
                a_nm: Some(500.0),
                b_nm: Some(500.0 + d),
                segments: Some(vec![Segment { width_nm: d, v0_ev: v0 }]),
                delta: None,
                mass_me: 0.067,
            }
            .validate()
            .unwrap();
            let params = tunneling_params(&pot, k).unwrap();
            if params.r < 1e-6 {
                continue;
            }
            let by_f = select_odd_root(&params, &pot).unwrap();
            let by_probe = select_odd_root_by_probe(&params, &pot).unwrap();
            assert_eq!(by_f, by_probe, "v0={v0} d={d} k={k}");
            checked += 1;
        }
    }

    #[test]
    fn ref_state_is_odd_zero_flux_and_truncated() {
        for &v0 in &[0.3, -0.3] {
            let pot = rect(v0);
            for &k in &[0.5, 0.6630497, 1.1] {
                let params = tunneling_params(&pot, k).unwrap();
                let lam = select_odd_root(&params, &pot).unwrap();
                let rf = ref_state(&params, &pot, lam).unwrap();
                assert_eq!(rf.eval(pot.x_mid), Complex64::new(0.0, 0.0));
                assert_eq!(rf.eval(pot.x_mid + 3.0), Complex64::new(0.0, 0.0));
                assert_eq!(rf.eval(600.0), Complex64::new(0.0, 0.0));
                assert!(rf.boundary_mismatch() < 1e-9);
                let vel = velocity_of_k(k, pot.mass_me);
                for &x in &[430.0, 490.0, 500.9, 502.1] {
                    assert!(rf.flux_at(x).abs() < 1e-10 * vel, "flux at {x}");
                }
                // outer amplitudes both carry weight R
                let (a_ref, b_ref) = ref_outer_amps(&params, lam);
                assert_relative_eq!(a_ref.norm_sqr(), params.r, max_relative = 1e-12);
                assert_relative_eq!(b_ref.norm_sqr(), params.r, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn rectangle_interior_matches_half_interval_closed_form() {
        // below the top: prefactor [cos(ka+phi_-)sinh(kap d/2)
        //   - (k/kap)sin(ka+phi_-)cosh(kap d/2)] on sinh(kap(x - x_mid));
        // above: -[cos sin + (k/kap)sin cos] on sin(kap(x - x_mid))
        for &(v0, k) in &[(0.3, 0.5), (0.3, 0.6630497), (-0.3, 0.45), (0.3, 1.2)] {
            let pot = rect(v0);
            let params = tunneling_params(&pot, k).unwrap();
            let lam = select_odd_root(&params, &pot).unwrap();
            let rf = ref_state(&params, &pot, lam).unwrap();
            let phase = params.j - params.f - std::f64::consts::FRAC_PI_2 + 2.0 * k * pot.a;
            let phi_p = 0.5 * (lam + phase);
            let phi_m = 0.5 * (lam - phase);
            let sr = params.r.sqrt();
            let c = hbar2_over_2m(pot.mass_me);
            let k2sq = k * k - v0 / c;
            for &x in &[500.4, 501.3, 502.1] {
                let want = if k2sq < 0.0 {
                    let kap = (-k2sq).sqrt();
                    2.0 * sr
                        * ((k * pot.a + phi_m).cos() * (kap * pot.d / 2.0).sinh()
                            - (k / kap) * (k * pot.a + phi_m).sin() * (kap * pot.d / 2.0).cosh())
                        * (kap * (x - pot.x_mid)).sinh()
                } else {
                    let kap = k2sq.sqrt();
                    -2.0 * sr
                        * ((k * pot.a + phi_m).cos() * (kap * pot.d / 2.0).sin()
                            + (k / kap) * (k * pot.a + phi_m).sin() * (kap * pot.d / 2.0).cos())
                        * (kap * (x - pot.x_mid)).sin()
                };
                let got = rf.eval(x) * Complex64::from_polar(1.0, -phi_p);
                assert!(got.im.abs() < 1e-10, "interior not a real profile times e^{{i phi}}");
                assert_relative_eq!(got.re, want, epsilon = 1e-10, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn decomposition_and_tr_flux_across_the_kink() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &v0 in &[0.3, -0.3] {
            let pot = rect(v0);
            for &k in &[0.5, 0.6630497, 1.15] {
                let params = tunneling_params(&pot, k).unwrap();
                let st = channel_states(&params, &pot).unwrap();
                for &x in probe_points(&mut rng, 64).iter() {
                    let sum = st.tr.eval(x) + st.rf.eval(x);
                    let full = st.full.eval(x);
                    assert!((sum - full).norm() <= 1e-9 * full.norm().max(1.0), "x = {x}");
                }
                // flux continuity across the derivative kink at x_mid
                let eps = 1e-7;
                let jl = st.tr.flux_at(pot.x_mid - eps);
                let jr = st.tr.flux_at(pot.x_mid + eps);
                assert_relative_eq!(jl, jr, max_relative = 1e-9);
                assert_relative_eq!(jl, st.tr.flux, max_relative = 1e-8);
                // tr equals full to the right of the midpoint
                for &x in &[502.5, 503.4, 505.0, 560.0] {
                    assert!((st.tr.eval(x) - st.full.eval(x)).norm() < 1e-10);
                }
                assert!(st.tr.boundary_mismatch() < 1e-9);
            }
        }
    }

    #[test]
    fn delta_spike_states_split_cleanly() {
        let pot = PotentialSpec {
            a_nm: None,
            b_nm: None,
            segments: None,
            delta: Some(DeltaSpike { x_nm: 500.0, w_ev_nm: -1.0 }),
            mass_me: 0.067,
        }
        .validate()
        .unwrap();
        let params = tunneling_params(&pot, 0.663).unwrap();
        let st = channel_states(&params, &pot).unwrap();
        // reflection node sits on the spike; nothing leaks past it
        assert_eq!(st.rf.eval(500.0), Complex64::new(0.0, 0.0));
        assert!(st.rf.eval(499.999999).norm() > 0.0);
        for &x in &[420.0, 470.0, 499.5, 500.0, 500.5, 580.0] {
            let sum = st.tr.eval(x) + st.rf.eval(x);
            assert!((sum - st.full.eval(x)).norm() < 1e-10);
        }
        // tr left amplitude joins 1/q continuously at the spike
        assert!(st.tr.boundary_mismatch() < 1e-12);
        assert!(st.rf.flux_at(450.0).abs() < 1e-12);
    }

    #[test]
    fn free_potential_keeps_everything_in_the_tr_channel() {
        let pot = PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(500.0),
            segments: Some(vec![]),
            delta: None,
            mass_me: 0.067,
        }
        .validate()
        .unwrap();
        let params = tunneling_params(&pot, 0.7).unwrap();
        assert!(matches!(
            select_odd_root(&params, &pot),
            Err(StationaryError::FullTransmission { .. })
        ));
        let st = channel_states(&params, &pot).unwrap();
        for &x in &[460.0, 500.0, 540.0] {
            let e = Complex64::from_polar(1.0, 0.7 * x);
            assert!((st.tr.eval(x) - e).norm() < 1e-12);
            assert_eq!(st.rf.eval(x), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn asymmetric_profiles_are_rejected_for_the_split() {
        let pot = PotentialSpec {
            a_nm: Some(500.0),
            b_nm: Some(505.0),
            segments: Some(vec![
                Segment { width_nm: 2.0, v0_ev: 0.3 },
                Segment { width_nm: 3.0, v0_ev: 0.1 },
            ]),
            delta: None,
            mass_me: 0.067,
        }
        .validate()
        .unwrap();
        let params = tunneling_params(&pot, 0.7).unwrap();
        assert_eq!(select_odd_root(&params, &pot), Err(StationaryError::AsymmetricPotential));
        // the full state still works and conserves flux
        let st = full_state(&params, &pot);
        assert!(st.boundary_mismatch() < 1e-9);
        assert_relative_eq!(st.flux_at(501.0), st.flux, max_relative = 1e-10);
    }

    #[test]
    fn amplitude_sets_keep_their_interference_bookkeeping() {
        let pot = rect(0.3);
        let params = tunneling_params(&pot, 0.6630497).unwrap();
        let hand = AmplitudeSet::problem_at_hand(&params);
        assert_eq!(hand.a_in, Complex64::new(1.0, 0.0));
        assert_eq!(hand.b_in, Complex64::new(0.0, 0.0));
        let rf = AmplitudeSet::aux_ref(&params);
        let tr = AmplitudeSet::aux_tr(&params);
        // sink amplitudes recombine into the one-source outgoing waves
        assert!((rf.b_out - hand.b_out).norm() < 1e-15);
        assert!((tr.a_out - hand.a_out).norm() < 1e-15);
        assert!(((rf.a_in + tr.a_in) - hand.a_in).norm() < 1e-12);
        assert!((rf.b_in + tr.b_in).norm() < 1e-12);
        // incoming weights grow to R and T once interference reorients them
        assert_relative_eq!(
            rf.a_in.norm_sqr() + rf.b_in.norm_sqr(),
            params.r,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            tr.a_in.norm_sqr() + tr.b_in.norm_sqr(),
            params.t,
            max_relative = 1e-10
        );
    }

    #[test]
    fn smatrix_eigensolutions_verify_and_match_the_odd_root() {
        let pot = rect(0.3);
        for &k in &[0.5, 0.6630497, 1.1] {
            let params = tunneling_params(&pot, k).unwrap();
            for mu in [1.0, -1.0] {
                let s = s_eigenvalue(&params, mu);
                let (refl, trans) = smatrix_eigensolutions(&params, mu).unwrap();
                for set in [&refl, &trans] {
                    let (ao, bo) = smatrix_apply(&params, set.a_in, set.b_in);
                    assert!((ao - s * set.a_in).norm() < 1e-12);
                    assert!((bo - s * set.b_in).norm() < 1e-12);
                    assert!((ao - set.a_out).norm() < 1e-12);
                    assert!((bo - set.b_out).norm() < 1e-12);
                }
                // closed forms of the incoming amplitudes
                let sr = params.r.sqrt();
                let st = params.t.sqrt();
                let want_r = sr * Complex64::new(sr, mu * st);
                let want_t = st * Complex64::new(st, -mu * sr);
                assert!((refl.a_in - want_r).norm() < 1e-12);
                assert!((trans.a_in - want_t).norm() < 1e-12);
            }
            // the branch matching the one-source split is mu = sign(lambda)
            let lam = select_odd_root(&params, &pot).unwrap();
            let (refl, _) = smatrix_eigensolutions(&params, lam.signum()).unwrap();
            let a_in_ref = Complex64::from_polar(params.r.sqrt(), lam);
            assert!((refl.a_in - a_in_ref).norm() < 1e-12);
        }
    }
}
