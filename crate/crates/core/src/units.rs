//! Unit system: time in ps, frequencies/energies in rad/ps with hbar = 1.
//!
//! All physical constants enter the simulation through this module so that
//! eV <-> rad/ps round trips use a single value of hbar.

use crate::scalar::Scalar;

/// hbar in eV.ps (0.6582119 eV.fs). Single source of truth for conversions.
pub const HBAR_EV_PS: f64 = 0.6582119e-3;

/// Boltzmann constant in eV/K.
pub const KB_EV_PER_K: f64 = 8.617333262e-5;

/// Elementary charge in J/eV, used when converting SI material constants.
pub const EV_J: f64 = 1.602176634e-19;

/// hbar in J.s, derived from [`HBAR_EV_PS`] so the two never disagree.
pub const HBAR_J_S: f64 = HBAR_EV_PS * EV_J * 1e-12;

/// Convert an energy in eV to an angular frequency in rad/ps.
#[inline]
pub fn ev_to_rad_per_ps<F: Scalar>(energy_ev: F) -> F {
    energy_ev / F::of(HBAR_EV_PS)
}

/// Convert an angular frequency in rad/ps to an energy in eV.
#[inline]
pub fn rad_per_ps_to_ev<F: Scalar>(omega: F) -> F {
    omega * F::of(HBAR_EV_PS)
}

/// Thermal frequency k_B T / hbar in rad/ps for a temperature in K.
#[inline]
pub fn thermal_frequency<F: Scalar>(temperature_k: F) -> F {
    temperature_k * F::of(KB_EV_PER_K / HBAR_EV_PS)
}
