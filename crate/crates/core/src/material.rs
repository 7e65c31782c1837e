//! Material constants and the super-ohmic phonon spectral density.
//!
//! A deformation-potential acoustic-phonon environment of a spherical GaAs
//! dot is reduced to the two-parameter form
//! `j(w) = prefactor * w^3 * exp(-(w/cutoff)^2)` with `w` in rad/ps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::units;

/// Physical constants of the dot/phonon environment, in lab units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams<F> {
    /// Difference of electron and hole bulk deformation potentials, eV.
    pub deformation_potential_diff: F,
    /// Mass density, kg/m^3.
    pub mass_density: F,
    /// Longitudinal sound speed, m/s.
    pub sound_speed: F,
    /// Carrier ground-state localization length, nm.
    pub localization_length: F,
    /// Bath temperature, K.
    pub temperature: F,
}

impl<F: Scalar> MaterialParams<F> {
    /// GaAs constants used throughout: sigma_e - sigma_h = 9 eV,
    /// rho = 5350 kg/m^3, c = 5150 m/s, l = 4.5 nm.
    pub fn gaas(temperature: F) -> Self {
        Self {
            deformation_potential_diff: F::of(9.0),
            mass_density: F::of(5350.0),
            sound_speed: F::of(5150.0),
            localization_length: F::of(4.5),
            temperature,
        }
    }

    /// Validate invariants. The deformation-potential difference may be zero
    /// (phonons decoupled); all other material constants must be positive.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, reason: &str| Error::InvalidParameter {
            field,
            reason: reason.to_string(),
        };
        if !(self.deformation_potential_diff >= F::zero()) {
            return Err(bad("deformation_potential_diff", "must be >= 0"));
        }
        if !(self.mass_density > F::zero()) {
            return Err(bad("mass_density", "must be > 0"));
        }
        if !(self.sound_speed > F::zero()) {
            return Err(bad("sound_speed", "must be > 0"));
        }
        if !(self.localization_length > F::zero()) {
            return Err(bad("localization_length", "must be > 0"));
        }
        if !(self.temperature >= F::zero()) {
            return Err(bad("temperature", "must be >= 0"));
        }
        Ok(())
    }
}

/// Reduced spectral density `j(w) = prefactor * w^3 * exp(-(w/cutoff)^2)`,
/// prefactor in ps^2, cutoff in rad/ps, j in rad/ps (hbar = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralModel<F> {
    pub prefactor: F,
    pub cutoff: F,
}

impl<F: Scalar> SpectralModel<F> {
    pub fn validate(&self) -> Result<()> {
        if !(self.prefactor >= F::zero()) {
            return Err(Error::InvalidParameter {
                field: "prefactor",
                reason: "must be >= 0".into(),
            });
        }
        if !(self.cutoff > F::zero()) {
            return Err(Error::InvalidParameter {
                field: "cutoff",
                reason: "must be > 0".into(),
            });
        }
        Ok(())
    }

    /// Unchecked evaluation; callers guarantee `omega >= 0`.
    #[inline]
    pub(crate) fn j(&self, omega: F) -> F {
        let r = omega / self.cutoff;
        self.prefactor * omega * omega * omega * (-r * r).exp()
    }
}

/// Convert material constants to the simulation-unit spectral density.
///
/// prefactor = (sigma_e - sigma_h)^2 / (4 pi^2 rho c^5 hbar) in ps^2,
/// cutoff = sqrt(2/3) c / l in rad/ps.
pub fn derive_spectral_model<F: Scalar>(m: &MaterialParams<F>) -> Result<SpectralModel<F>> {
    m.validate()?;
    let sigma_j = m.deformation_potential_diff.to_f64() * units::EV_J;
    let rho = m.mass_density.to_f64();
    let c = m.sound_speed.to_f64();
    let l_m = m.localization_length.to_f64() * 1e-9;

    let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let prefactor_s2 = sigma_j * sigma_j / (four_pi2 * rho * c.powi(5) * units::HBAR_J_S);
    let cutoff_per_s = (2.0f64 / 3.0).sqrt() * c / l_m;

    Ok(SpectralModel {
        prefactor: F::of(prefactor_s2 * 1e24), // s^2 -> ps^2
        cutoff: F::of(cutoff_per_s * 1e-12),   // rad/s -> rad/ps
    })
}

/// Evaluate `j(omega)`; `omega` in rad/ps, result in rad/ps.
pub fn spectral_density<F: Scalar>(s: &SpectralModel<F>, omega: F) -> Result<F> {
    if omega < F::zero() {
        return Err(Error::Domain {
            op: "spectral_density",
            reason: format!("omega = {omega} must be >= 0"),
        });
    }
    Ok(s.j(omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaas30() -> MaterialParams<f64> {
        MaterialParams::gaas(30.0)
    }

    #[test]
    fn cutoff_matches_hand_arithmetic() {
        // sqrt(2/3) * (5150 m/s) / (4.5 nm) in rad/ps, computed independently.
        let s = derive_spectral_model(&gaas30()).unwrap();
        let expect = (2.0f64 / 3.0).sqrt() * 5150.0 / 4.5 * 1e-3;
        assert!((s.cutoff - expect).abs() < 1e-12);
        assert!((s.cutoff - 0.9344).abs() < 1e-4);
    }

    #[test]
    fn prefactor_matches_golden_value() {
        // Golden value frozen from an independent unit-conversion script.
        let golden: f64 = include_str!("../tests/golden/spectral_prefactor_ps2.txt")
            .trim()
            .parse()
            .unwrap();
        let s = derive_spectral_model(&gaas30()).unwrap();
        assert!(
            ((s.prefactor - golden) / golden).abs() < 1e-12,
            "prefactor {} vs golden {}",
            s.prefactor,
            golden
        );
    }

    #[test]
    fn zero_coupling_gives_zero_prefactor() {
        let mut m = gaas30();
        m.deformation_potential_diff = 0.0;
        let s = derive_spectral_model(&m).unwrap();
        assert_eq!(s.prefactor, 0.0);
        for w in [0.0, 0.3, 1.7, 12.0] {
            assert_eq!(spectral_density(&s, w).unwrap(), 0.0);
        }
    }

    #[test]
    fn non_positive_field_rejected() {
        let mut m = gaas30();
        m.sound_speed = 0.0;
        assert!(derive_spectral_model(&m).is_err());
        let mut m = gaas30();
        m.temperature = -1.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn density_zero_at_origin_and_negative_omega_rejected() {
        let s = derive_spectral_model(&gaas30()).unwrap();
        assert_eq!(spectral_density(&s, 0.0).unwrap(), 0.0);
        assert!(spectral_density(&s, -0.1).is_err());
    }

    #[test]
    fn argmax_at_sqrt_3_2_cutoff() {
        // Brute-force scan over a fine grid.
        let s = derive_spectral_model(&gaas30()).unwrap();
        let mut best = (0.0, 0.0);
        let n = 400_000;
        for i in 0..=n {
            let w = 6.0 * s.cutoff * i as f64 / n as f64;
            let v = spectral_density(&s, w).unwrap();
            if v > best.1 {
                best = (w, v);
            }
        }
        let expect = (1.5f64).sqrt() * s.cutoff;
        assert!((best.0 - expect).abs() < 6.0 * s.cutoff / n as f64 * 2.0);
    }

    #[test]
    fn gaussian_tail_is_negligible() {
        let s = derive_spectral_model(&gaas30()).unwrap();
        let peak = spectral_density(&s, (1.5f64).sqrt() * s.cutoff).unwrap();
        let tail = spectral_density(&s, 10.0 * s.cutoff).unwrap();
        assert!(tail < 1e-20 * peak);
    }

    proptest! {
        #[test]
        fn density_nonnegative(w in 0.0f64..50.0) {
            let s = derive_spectral_model(&gaas30()).unwrap();
            prop_assert!(spectral_density(&s, w).unwrap() >= 0.0);
        }

        #[test]
        fn doubling_coupling_quadruples_prefactor(sigma in 0.1f64..20.0) {
            let mut m = gaas30();
            m.deformation_potential_diff = sigma;
            let s1 = derive_spectral_model(&m).unwrap();
            m.deformation_potential_diff = 2.0 * sigma;
            let s2 = derive_spectral_model(&m).unwrap();
            prop_assert!((s2.prefactor / s1.prefactor - 4.0).abs() < 1e-12);
        }
    }
}
