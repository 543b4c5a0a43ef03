//! One-dimensional quantum scattering split into separately evolving
//! transmission and reflection wave functions, with exact and asymptotic
//! transmission/reflection times and an independent finite-difference
//! cross-check.

pub mod observables;
pub mod oracle;
pub mod potential;
pub mod scenario;
pub mod spectral;
pub mod stationary;
pub mod timing;
pub mod transfer;
pub mod units;
