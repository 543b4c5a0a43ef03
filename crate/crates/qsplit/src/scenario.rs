//! Scenario files: one JSON document naming the profile, the incident
//! packet, the working grids, checkpoint times, and timing margins.
//! Two reference scenarios ship with the crate and can be requested by
//! name instead of a path.

use serde::Deserialize;
use thiserror::Error;

use crate::potential::{PotentialError, PotentialSpec, ValidatedPotential};
use crate::spectral::{gaussian_spectrum, KGrid, SpectralError, SpectralPacket};
use crate::units::k_of_energy;

pub const BARRIER_FIG1: &str = include_str!("../../../scenarios/barrier_fig1.json");
pub const WELL_FIG4: &str = include_str!("../../../scenarios/well_fig4.json");

/// Look up a bundled scenario by name, with or without extension.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name.strip_suffix(".json").unwrap_or(name) {
        "barrier_fig1" => Some(BARRIER_FIG1),
        "well_fig4" => Some(WELL_FIG4),
        _ => None,
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("scenario does not parse: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("packet takes exactly one of e0_eV and k0_inm")]
    EnergyChoice,
    #[error("packet width l0_nm must be positive and finite, got {0}")]
    BadWidth(f64),
    #[error("packet energy and wavenumber must be positive and finite")]
    BadEnergy,
    #[error("x grid needs min < max and a positive step smaller than the range")]
    BadXGrid,
    #[error("checkpoint times must be finite and non-negative (ps)")]
    BadTimes,
    #[error("timing margins must be non-negative and the window positive")]
    BadTiming,
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub potential: PotentialSpec,
    pub packet: PacketSpec,
    pub grids: GridsSpec,
    /// Checkpoint times in ps.
    pub times: Vec<f64>,
    pub timing: TimingSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub l0_nm: f64,
    #[serde(rename = "e0_eV", default)]
    pub e0_ev: Option<f64>,
    #[serde(default)]
    pub k0_inm: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsSpec {
    pub k: KSpec,
    pub x: XSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KSpec {
    pub n: usize,
    pub span_sigmas: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XSpec {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSpec {
    #[serde(rename = "L1_nm")]
    pub l1_nm: f64,
    #[serde(rename = "L2_nm")]
    pub l2_nm: f64,
    pub window_ps: f64,
}

impl Scenario {
    /// Parse and validate a scenario document.
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let sc: Scenario = serde_json::from_str(text)?;
        sc.check()?;
        Ok(sc)
    }

    /// Load from a bundled name first, then from the filesystem.
    pub fn load(path_or_name: &str) -> Result<Scenario, ScenarioError> {
        if let Some(text) = bundled(path_or_name) {
            return Scenario::from_json(text);
        }
        let text = std::fs::read_to_string(path_or_name).map_err(|source| ScenarioError::Io {
            path: path_or_name.to_string(),
            source,
        })?;
        Scenario::from_json(&text)
    }

    fn check(&self) -> Result<(), ScenarioError> {
        self.potential.validate()?;
        if !(self.packet.l0_nm.is_finite() && self.packet.l0_nm > 0.0) {
            return Err(ScenarioError::BadWidth(self.packet.l0_nm));
        }
        match (self.packet.e0_ev, self.packet.k0_inm) {
            (Some(e), None) if e.is_finite() && e > 0.0 => {}
            (None, Some(k)) if k.is_finite() && k > 0.0 => {}
            (Some(_), None) | (None, Some(_)) => return Err(ScenarioError::BadEnergy),
            _ => return Err(ScenarioError::EnergyChoice),
        }
        let x = &self.grids.x;
        if !(x.min.is_finite() && x.max.is_finite() && x.step.is_finite())
            || x.min >= x.max
            || x.step <= 0.0
            || x.step > x.max - x.min
        {
            return Err(ScenarioError::BadXGrid);
        }
        if self.times.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(ScenarioError::BadTimes);
        }
        let tm = &self.timing;
        if !(tm.l1_nm >= 0.0 && tm.l2_nm >= 0.0 && tm.window_ps > 0.0)
            || !(tm.l1_nm.is_finite() && tm.l2_nm.is_finite() && tm.window_ps.is_finite())
        {
            return Err(ScenarioError::BadTiming);
        }
        Ok(())
    }

    pub fn potential(&self) -> Result<ValidatedPotential, ScenarioError> {
        Ok(self.potential.validate()?)
    }

    /// Central wavenumber, from k0_inm directly or from e0_eV.
    pub fn k0(&self) -> f64 {
        match self.packet.k0_inm {
            Some(k) => k,
            None => k_of_energy(self.packet.e0_ev.expect("checked at load"), self.potential.mass_me),
        }
    }

    pub fn kgrid(&self) -> Result<KGrid, ScenarioError> {
        Ok(KGrid::around(
            self.k0(),
            self.packet.l0_nm,
            self.grids.k.span_sigmas,
            self.grids.k.n,
        )?)
    }

    pub fn spectrum(&self, grid: &KGrid) -> Result<SpectralPacket, ScenarioError> {
        Ok(gaussian_spectrum(self.packet.l0_nm, self.k0(), grid)?)
    }

    /// Endpoint-exact uniform output grid.
    pub fn xs(&self) -> Vec<f64> {
        let x = &self.grids.x;
        let n = ((x.max - x.min) / x.step).round().max(1.0) as usize;
        (0..=n)
            .map(|i| x.min + (x.max - x.min) * i as f64 / n as f64)
            .collect()
    }

    pub fn times_fs(&self) -> Vec<f64> {
        self.times.iter().map(|t| t * 1000.0).collect()
    }

    pub fn window_fs(&self) -> (f64, f64) {
        (0.0, self.timing.window_ps * 1000.0)
    }
}
