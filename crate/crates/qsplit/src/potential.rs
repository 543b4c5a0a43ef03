//! Scattering potential geometry: piecewise-constant stacks on [a, b] and
//! point spikes, with the derived quantities everything else keys off
//! (width d, edge sum s, midpoint, mirror symmetry).
//!
//! All potentials vanish outside [a, b] and a > 0, so the scatterer sits
//! strictly to the right of the origin. Segment boundaries follow a
//! left-closed, right-open convention and V(b) = 0; pointwise values are
//! only used for display and the finite-difference cross-check, never by
//! the stationary solver, which works from segment data directly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One constant piece of the potential: `width_nm` wide, `v0_ev` high.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub width_nm: f64,
    #[serde(rename = "v0_eV")]
    pub v0_ev: f64,
}

/// A point spike W·δ(x − x0) with `w_ev_nm` in eV·nm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSpike {
    pub x_nm: f64,
    #[serde(rename = "w_eV_nm")]
    pub w_ev_nm: f64,
}

/// Potential as it appears in scenario files, prior to validation.
///
/// Exactly one of `segments` / `delta` must be present. For segment stacks
/// the widths must tile [a, b]; for a spike, `a_nm`/`b_nm` are omitted and
/// both edges collapse onto the spike position (d = 0).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(default)]
    pub a_nm: Option<f64>,
    #[serde(default)]
    pub b_nm: Option<f64>,
    #[serde(default)]
    pub segments: Option<Vec<Segment>>,
    #[serde(default)]
    pub delta: Option<DeltaSpike>,
    pub mass_me: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("left edge must be positive, got a = {0} nm")]
    NonPositiveA(f64),
    #[error("segments do not tile [a, b]: widths sum to {sum} nm, b - a = {d} nm")]
    GapError { sum: f64, d: f64 },
    #[error("mass must be positive, got {0} m_e")]
    NonPositiveMass(f64),
    #[error("delta potentials have no pointwise value")]
    DeltaNotPointwise,
    #[error("potential needs either a segment list or a delta spike, not {0}")]
    ShapeError(&'static str),
    #[error("segment widths must be positive, got {0} nm")]
    NonPositiveWidth(f64),
}

/// The interior profile after validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// Ordered segments; `edges[j]..edges[j+1]` holds `segments[j]`.
    Segments { segments: Vec<Segment>, edges: Vec<f64> },
    /// W·δ(x − a) with zero width.
    Delta { w_ev_nm: f64 },
}

/// A checked potential with its derived geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedPotential {
    pub a: f64,
    pub b: f64,
    /// d = b − a.
    pub d: f64,
    /// s = a + b.
    pub s: f64,
    /// (a + b) / 2.
    pub x_mid: f64,
    /// true iff the segment list equals its own reversal (spikes are symmetric).
    pub symmetric: bool,
    pub mass_me: f64,
    pub profile: Profile,
}

impl PotentialSpec {
    /// Checks the geometry and precomputes d, s, x_mid and the symmetry flag.
    pub fn validate(&self) -> Result<ValidatedPotential, PotentialError> {
        if self.mass_me <= 0.0 {
            return Err(PotentialError::NonPositiveMass(self.mass_me));
        }
        match (&self.segments, &self.delta) {
            (Some(_), Some(_)) => Err(PotentialError::ShapeError("both")),
            (None, None) => Err(PotentialError::ShapeError("neither")),
            (None, Some(spike)) => {
                if spike.x_nm <= 0.0 {
                    return Err(PotentialError::NonPositiveA(spike.x_nm));
                }
                let a = spike.x_nm;
                Ok(ValidatedPotential {
                    a,
                    b: a,
                    d: 0.0,
                    s: 2.0 * a,
                    x_mid: a,
                    symmetric: true,
                    mass_me: self.mass_me,
                    profile: Profile::Delta { w_ev_nm: spike.w_ev_nm },
                })
            }
            (Some(segments), None) => {
                let a = self.a_nm.unwrap_or(f64::NAN);
                let b = self.b_nm.unwrap_or(f64::NAN);
                if !(a > 0.0) {
                    return Err(PotentialError::NonPositiveA(a));
                }
                let d = b - a;
                let mut sum = 0.0;
                for seg in segments {
                    if seg.width_nm <= 0.0 {
                        return Err(PotentialError::NonPositiveWidth(seg.width_nm));
                    }
                    sum += seg.width_nm;
                }
                // widths must tile [a,b] to 1e-12 relative (empty list needs b = a)
                let scale = d.abs().max(1.0);
                if !(d >= 0.0) || (sum - d).abs() > 1e-12 * scale {
                    return Err(PotentialError::GapError { sum, d });
                }
                let mut edges = Vec::with_capacity(segments.len() + 1);
                let mut x = a;
                edges.push(x);
                for seg in segments {
                    x += seg.width_nm;
                    edges.push(x);
                }
                // guard against accumulated rounding at the right edge
                *edges.last_mut().unwrap() = b;
                let symmetric = {
                    let rev: Vec<Segment> = segments.iter().rev().copied().collect();
                    segments.len() == rev.len()
                        && segments.iter().zip(&rev).all(|(s1, s2)| {
                            (s1.width_nm - s2.width_nm).abs() <= 1e-12 * scale
                                && (s1.v0_ev - s2.v0_ev).abs() <= 1e-12
                        })
                };
                Ok(ValidatedPotential {
                    a,
                    b,
                    d,
                    s: a + b,
                    x_mid: 0.5 * (a + b),
                    symmetric,
                    mass_me: self.mass_me,
                    profile: Profile::Segments { segments: segments.clone(), edges },
                })
            }
        }
    }
}

impl ValidatedPotential {
    /// Pointwise V(x) in eV. Zero outside [a, b); segments are left-closed,
    /// so V(a) is the first segment's height and V(b) = 0.
    pub fn evaluate(&self, x: f64) -> Result<f64, PotentialError> {
        match &self.profile {
            Profile::Delta { .. } => Err(PotentialError::DeltaNotPointwise),
            Profile::Segments { segments, edges } => {
                if x < self.a || x >= self.b {
                    return Ok(0.0);
                }
                // binary search over edges; partition_point gives the first
                // edge > x, so the containing segment is that index - 1
                let j = edges.partition_point(|&e| e <= x).saturating_sub(1);
                Ok(segments[j.min(segments.len() - 1)].v0_ev)
            }
        }
    }

    /// Segment heights as (x_left, x_right, v0) triples; empty for spikes.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        match &self.profile {
            Profile::Delta { .. } => Vec::new(),
            Profile::Segments { segments, edges } => segments
                .iter()
                .enumerate()
                .map(|(j, seg)| (edges[j], edges[j + 1], seg.v0_ev))
                .collect(),
        }
    }

    /// The spike strength if this is a point potential.
    pub fn delta_strength(&self) -> Option<f64> {
        match &self.profile {
            Profile::Delta { w_ev_nm } => Some(*w_ev_nm),
            _ => None,
        }
    }
}
