//! Transfer matrix across the potential and the real tunneling parameters
//! T, R, J, F extracted from it.
//!
//! The matrix has the structure Y = [[q, p], [p*, q*]] with |q|² − |p|² = 1
//! and connects plane-wave amplitudes (A, B) of ψ = A·e^{ikx} + B·e^{−ikx}
//! on the left of the scatterer to those on the right:
//! (A_left, B_left)ᵀ = Y · (A_right, B_right)ᵀ. Left incidence therefore
//! transmits with amplitude 1/q and reflects with p*/q, giving
//!
//!   T = 1/|q|²,   R = |p|²/|q|²,
//!   q = T^{-1/2}·e^{i(kd − J)},   p = (R/T)^{1/2}·e^{i(π/2 + F − ks)},
//!
//! where d = b − a and s = a + b. R is computed as |p|²/|q|² rather than
//! 1 − T so that near-resonance values keep full relative precision; the
//! two agree to rounding because |q|² = 1 + |p|² exactly.
//!
//! Phase branches: `tunneling_params` reduces J and F to (−π, π]. The
//! table builder makes J continuous in k by walking a dense path up from
//! k near zero, where J → −π/2 for any profile that suppresses
//! transmission at threshold, and unwrapping along the way; derivatives
//! use 5-point central stencils on the unwrapped phases.

use num_complex::Complex64;
use thiserror::Error;

use crate::potential::{Profile, ValidatedPotential};
use crate::units::hbar2_over_2m;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, PartialEq)]
pub enum TransferError {
    #[error("wavenumber must be positive, got k = {0} nm^-1")]
    NonPositiveK(f64),
    #[error("finite-difference step too large: phase jump {jump} rad > pi/2 near k = {k}")]
    StepTooLarge { k: f64, jump: f64 },
}

/// Y = [[q, p], [p*, q*]]; the other two entries are implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub q: Complex64,
    pub p: Complex64,
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix =
        TransferMatrix { q: Complex64::new(1.0, 0.0), p: Complex64::new(0.0, 0.0) };

    /// Matrix product; the [[q, p], [p*, q*]] structure is closed under it.
    #[inline]
    pub fn mul(&self, rhs: &TransferMatrix) -> TransferMatrix {
        TransferMatrix {
            q: self.q * rhs.q + self.p * rhs.p.conj(),
            p: self.q * rhs.p + self.p * rhs.q.conj(),
        }
    }

    /// det Y = |q|² − |p|², identically 1 for any physical profile.
    #[inline]
    pub fn det(&self) -> f64 {
        self.q.norm_sqr() - self.p.norm_sqr()
    }
}

/// cos/sinc pair for ψ'' = −k2sq·ψ over a signed interval w:
/// returns (C, S) with C = cos(k₂w), S = sin(k₂w)/k₂ when k2sq > 0 and the
/// cosh/sinh analogues when k2sq < 0. Near k2sq = 0 a series keeps full
/// precision. C is even and S is odd in w, so callers may pass negative w.
#[inline]
pub(crate) fn cs_pair(k2sq: f64, w: f64) -> (f64, f64) {
    let z = k2sq * w * w;
    if z.abs() < 1e-10 {
        // C = 1 - z/2 + z^2/24, S = w(1 - z/6 + z^2/120); error O(z^3) < 1e-30
        let c = 1.0 - z / 2.0 + z * z / 24.0;
        let s = w * (1.0 - z / 6.0 + z * z / 120.0);
        (c, s)
    } else if k2sq > 0.0 {
        let k2 = k2sq.sqrt();
        ((k2 * w).cos(), (k2 * w).sin() / k2)
    } else {
        let kap = (-k2sq).sqrt();
        ((kap * w).cosh(), (kap * w).sinh() / kap)
    }
}

/// Transfer matrix of one constant segment [x1, x1 + w] with interior
/// k2sq = k² − V0/(ħ²/2m). Evanescent segments keep real hyperbolics, so
/// opaque barriers (κw up to ~30, cosh ≈ 5e12) stay far from overflow.
pub(crate) fn segment_matrix(k: f64, k2sq: f64, w: f64, x1: f64) -> TransferMatrix {
    let (c, s) = cs_pair(k2sq, w);
    let q = (Complex64::new(c, 0.0) - I * 0.5 * (k + k2sq / k) * s)
        * Complex64::from_polar(1.0, k * w);
    let p = I * 0.5 * (k - k2sq / k) * s * Complex64::from_polar(1.0, -k * (2.0 * x1 + w));
    TransferMatrix { q, p }
}

/// Transfer matrix of W·δ(x − x0): q = 1 + iγ, p = iγ·e^{−2ikx0} with
/// γ = mW/(ħ²k), giving T = 1/(1 + γ²) = ħ⁴k²/(ħ⁴k² + m²W²).
pub(crate) fn delta_matrix(k: f64, w_ev_nm: f64, x0: f64, mass_me: f64) -> TransferMatrix {
    let gamma = w_ev_nm / (2.0 * hbar2_over_2m(mass_me) * k);
    TransferMatrix {
        q: Complex64::new(1.0, gamma),
        p: I * gamma * Complex64::from_polar(1.0, -2.0 * k * x0),
    }
}

/// Full transfer matrix at wavenumber k: ordered product of the per-segment
/// matrices (leftmost first), or the closed δ form.
pub fn transfer_matrix(pot: &ValidatedPotential, k: f64) -> Result<TransferMatrix, TransferError> {
    if !(k > 0.0) {
        return Err(TransferError::NonPositiveK(k));
    }
    let c = hbar2_over_2m(pot.mass_me);
    match &pot.profile {
        Profile::Delta { w_ev_nm } => Ok(delta_matrix(k, *w_ev_nm, pot.a, pot.mass_me)),
        Profile::Segments { segments, edges } => {
            let mut y = TransferMatrix::IDENTITY;
            for (j, seg) in segments.iter().enumerate() {
                let k2sq = k * k - seg.v0_ev / c;
                y = y.mul(&segment_matrix(k, k2sq, seg.width_nm, edges[j]));
            }
            Ok(y)
        }
    }
}

/// Per-wavenumber tunneling parameters. J and F are reduced to (−π, π]
/// here; `ParamTable` rows carry the k-continuous J branch instead.
#[derive(Debug, Clone, Copy)]
pub struct TunnelingParams {
    pub k: f64,
    pub t: f64,
    pub r: f64,
    pub j: f64,
    pub f: f64,
    pub q: Complex64,
    pub p: Complex64,
}

/// Reduce an angle to (−π, π].
#[inline]
pub(crate) fn wrap_pi(x: f64) -> f64 {
    let y = x.rem_euclid(std::f64::consts::TAU);
    if y > std::f64::consts::PI { y - std::f64::consts::TAU } else { y }
}

fn params_from_matrix(pot: &ValidatedPotential, k: f64, y: TransferMatrix) -> TunnelingParams {
    let qn = y.q.norm_sqr();
    let pn = y.p.norm_sqr();
    let t = 1.0 / qn;
    let r = pn / qn;
    let j = wrap_pi(k * pot.d - y.q.arg());
    // with p = 0 the reflected channel is empty and F is immaterial
    let f = if pn == 0.0 {
        0.0
    } else {
        wrap_pi(y.p.arg() - std::f64::consts::FRAC_PI_2 + k * pot.s)
    };
    TunnelingParams { k, t, r, j, f, q: y.q, p: y.p }
}

pub fn tunneling_params(
    pot: &ValidatedPotential,
    k: f64,
) -> Result<TunnelingParams, TransferError> {
    Ok(params_from_matrix(pot, k, transfer_matrix(pot, k)?))
}

/// 5-point central derivative of the samples f(k − 2h) .. f(k + 2h).
#[inline]
fn stencil5(v: &[f64; 5], h: f64) -> f64 {
    (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h)
}

/// Unwrap a short phase sequence in place; errors if any step exceeds π/2,
/// which means the stencil straddles a branch feature the step cannot see.
fn unwrap_seq(vals: &mut [f64; 5], k: f64) -> Result<(), TransferError> {
    for i in 1..5 {
        let d = wrap_pi(vals[i] - vals[i - 1]);
        if d.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(TransferError::StepTooLarge { k, jump: d.abs() });
        }
        vals[i] = vals[i - 1] + d;
    }
    Ok(())
}

/// Finite-difference k-derivatives (T′, J′, F′) with locally unwrapped
/// phases. Near a resonance of a symmetric profile F jumps by π, so any
/// stencil straddling it fails with `StepTooLarge`; shrink h or use the
/// table quantities, which never need F′.
pub fn params_derivatives(
    pot: &ValidatedPotential,
    k: f64,
    h: f64,
) -> Result<(f64, f64, f64), TransferError> {
    if !(k - 2.0 * h > 0.0) {
        return Err(TransferError::NonPositiveK(k - 2.0 * h));
    }
    let mut tv = [0.0; 5];
    let mut jv = [0.0; 5];
    let mut fv = [0.0; 5];
    for (i, dj) in (-2..=2).enumerate() {
        let p = tunneling_params(pot, k + dj as f64 * h)?;
        tv[i] = p.t;
        jv[i] = p.j;
        fv[i] = p.f;
    }
    unwrap_seq(&mut jv, k)?;
    unwrap_seq(&mut fv, k)?;
    Ok((stencil5(&tv, h), stencil5(&jv, h), stencil5(&fv, h)))
}

/// Table-row derivatives from one stencil pass. J is smooth in k everywhere
/// (q never vanishes), so T′ and J′ cannot fail at resonances. F jumps by π
/// where p crosses zero; a stencil straddling that yields None rather than
/// an error, because every consumer weights F′ by R, which vanishes
/// quadratically at exactly those points.
fn row_derivatives(
    pot: &ValidatedPotential,
    k: f64,
    h: f64,
) -> Result<(f64, f64, Option<f64>), TransferError> {
    if !(k - 2.0 * h > 0.0) {
        return Err(TransferError::NonPositiveK(k - 2.0 * h));
    }
    let mut tv = [0.0; 5];
    let mut jv = [0.0; 5];
    let mut fv = [0.0; 5];
    for (i, dj) in (-2..=2).enumerate() {
        let p = tunneling_params(pot, k + dj as f64 * h)?;
        tv[i] = p.t;
        jv[i] = p.j;
        fv[i] = p.f;
    }
    unwrap_seq(&mut jv, k)?;
    let f_prime = match unwrap_seq(&mut fv, k) {
        Ok(()) => Some(stencil5(&fv, h)),
        Err(_) => None,
    };
    Ok((stencil5(&tv, h), stencil5(&jv, h), f_prime))
}

/// One table row: parameters with the continuous J branch plus the
/// k-derivatives the timing module averages. `f_prime` is None only on
/// rows whose stencil straddles a resonance π-jump of F.
#[derive(Debug, Clone, Copy)]
pub struct TableEntry {
    pub params: TunnelingParams,
    pub t_prime: f64,
    pub j_prime: f64,
    pub f_prime: Option<f64>,
}

/// Tunneling parameters tabulated over an ascending k-grid with J made
/// continuous in k.
#[derive(Debug, Clone)]
pub struct ParamTable {
    pub entries: Vec<TableEntry>,
}

impl ParamTable {
    /// Builds the table. `h` is the finite-difference step (1e-3 nm⁻¹ is a
    /// good default: stencil error ~h⁴ while phases move ≪ π/2 per step).
    ///
    /// The continuous J branch is anchored by walking a dense path from
    /// k = 1e-3 nm⁻¹, where the principal value already equals the
    /// continuous one (J(0⁺) = ±π/2 and the slope is finite), up to the
    /// first grid point, then along the grid itself.
    pub fn build(
        pot: &ValidatedPotential,
        ks: &[f64],
        h: f64,
    ) -> Result<ParamTable, TransferError> {
        assert!(!ks.is_empty(), "empty k-grid");
        assert!(ks.windows(2).all(|w| w[1] > w[0]), "k-grid must be ascending");

        // anchor leg: dense enough that J moves well under pi/2 per step
        let k_anchor = (1e-3_f64).min(ks[0]);
        let n_dense = (((ks[0] - k_anchor) / 2e-4).ceil() as usize).clamp(1, 40_000);
        let mut j_cont = tunneling_params(pot, k_anchor)?.j;
        let mut j_prev = j_cont;
        for i in 1..=n_dense {
            let k = k_anchor + (ks[0] - k_anchor) * i as f64 / n_dense as f64;
            let j = tunneling_params(pot, k)?.j;
            let d = wrap_pi(j - j_prev);
            if d.abs() > std::f64::consts::FRAC_PI_2 {
                return Err(TransferError::StepTooLarge { k, jump: d.abs() });
            }
            j_cont += d;
            j_prev = j;
        }

        let mut entries = Vec::with_capacity(ks.len());
        for (i, &k) in ks.iter().enumerate() {
            let mut params = tunneling_params(pot, k)?;
            if i > 0 {
                // sparse grids sub-walk each interval at the anchor
                // density, so grid spacing never limits the branch
                let k_lo = ks[i - 1];
                let n_sub = (((k - k_lo) / 2e-4).ceil() as usize).clamp(1, 40_000);
                for s in 1..=n_sub {
                    let j = if s == n_sub {
                        params.j
                    } else {
                        let km = k_lo + (k - k_lo) * s as f64 / n_sub as f64;
                        tunneling_params(pot, km)?.j
                    };
                    let d = wrap_pi(j - j_prev);
                    if d.abs() > std::f64::consts::FRAC_PI_2 {
                        return Err(TransferError::StepTooLarge { k, jump: d.abs() });
                    }
                    j_cont += d;
                    j_prev = j;
                }
            } else {
                j_prev = params.j;
            }
            params.j = j_cont;
            let (t_prime, j_prime, f_prime) = row_derivatives(pot, k, h)?;
            entries.push(TableEntry { params, t_prime, j_prime, f_prime });
        }
        Ok(ParamTable { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
