//! Unit system: energies in eV, lengths in nm, times in fs.
//!
//! Everything downstream assumes this triple. The two constants below pin it:
//! `HBAR` = ħ in eV·fs and `HBAR2_OVER_2ME` = ħ²/(2mₑ) in eV·nm². Particle
//! masses are entered as multiples of the electron mass, so for a particle of
//! mass `m·mₑ` the dispersion is E(k) = `HBAR2_OVER_2ME`/m · k².
//!
//! Picoseconds in figure captions convert as 1 ps = 1000 fs.

/// ħ in eV·fs.
pub const HBAR: f64 = 0.658_211_956_9;

/// ħ²/(2·mₑ) in eV·nm².
pub const HBAR2_OVER_2ME: f64 = 0.038_099_8;

/// ħ²/(2m) in eV·nm² for a particle of mass `mass_me`·mₑ.
#[inline]
pub fn hbar2_over_2m(mass_me: f64) -> f64 {
    HBAR2_OVER_2ME / mass_me
}

/// Kinetic energy E(k) = ħ²k²/(2m) in eV; `k` in nm⁻¹.
#[inline]
pub fn energy_of_k(k: f64, mass_me: f64) -> f64 {
    hbar2_over_2m(mass_me) * k * k
}

/// Wavenumber k(E) = √(2mE)/ħ in nm⁻¹; `e` in eV, must be ≥ 0.
#[inline]
pub fn k_of_energy(e: f64, mass_me: f64) -> f64 {
    (e / hbar2_over_2m(mass_me)).sqrt()
}

/// Group velocity ħk/m in nm/fs.
#[inline]
pub fn velocity_of_k(k: f64, mass_me: f64) -> f64 {
    2.0 * hbar2_over_2m(mass_me) * k / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn figure_parameters_reproduce() {
        // E = 0.25 eV at m = 0.067 me sits near k = 0.663 nm^-1
        let k = k_of_energy(0.25, 0.067);
        assert_relative_eq!(k, 0.663_049_7, epsilon = 1e-6);
        assert_relative_eq!(energy_of_k(k, 0.067), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn velocity_consistent_with_dispersion() {
        // v = dE/dk / hbar
        let m = 0.067;
        let k = 0.7;
        let h = 1e-6;
        let dedk = (energy_of_k(k + h, m) - energy_of_k(k - h, m)) / (2.0 * h);
        assert_relative_eq!(velocity_of_k(k, m), dedk / HBAR, epsilon = 1e-8);
    }
}
