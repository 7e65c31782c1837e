//! Gaussian pulse envelope and the complex drive alpha(t).

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Gaussian pulse f(t) = A exp(-((t - t0)/a)^2) / (sqrt(2 pi) a).
///
/// `detuning` is the residual laser-exciton detuning delta_L in the rotating
/// frame; the resonant carrier (delta_L = 0) makes alpha real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseParams<F> {
    /// Amplitude A; the full pulse area is int f dt = A / sqrt(2).
    pub amplitude: F,
    /// Width a in ps.
    pub width: F,
    /// Center t0 in ps.
    pub center: F,
    /// delta_L = omega_ex - omega_L in rad/ps.
    pub detuning: F,
}

impl<F: Scalar> PulseParams<F> {
    /// Construct from the pulse area Theta = int f dt, so A = Theta sqrt(2).
    pub fn from_area(area: F, width: F, center: F, detuning: F) -> Self {
        PulseParams {
            amplitude: area * F::SQRT_2(),
            width,
            center,
            detuning,
        }
    }

    /// Total pulse area int f dt = A / sqrt(2).
    pub fn area(&self) -> F {
        self.amplitude / F::SQRT_2()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > F::zero()) {
            return Err(Error::InvalidParameter {
                field: "width",
                reason: "must be > 0".into(),
            });
        }
        if !(self.amplitude >= F::zero()) {
            return Err(Error::InvalidParameter {
                field: "amplitude",
                reason: "must be >= 0".into(),
            });
        }
        Ok(())
    }
}

/// Real envelope f(t), rad/ps.
#[inline]
pub fn envelope<F: Scalar>(p: &PulseParams<F>, t: F) -> F {
    let u = (t - p.center) / p.width;
    let norm = (F::of(2.0) * F::PI()).sqrt() * p.width;
    p.amplitude * (-u * u).exp() / norm
}

/// Complex drive alpha(t) = f(t) exp(i delta_L t).
#[inline]
pub fn alpha<F: Scalar>(p: &PulseParams<F>, t: F) -> Complex<F> {
    let f = envelope(p, t);
    if p.detuning == F::zero() {
        Complex::new(f, F::zero())
    } else {
        let phase = p.detuning * t;
        Complex::new(f * phase.cos(), f * phase.sin())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pulse(amplitude: f64, width: f64, center: f64, detuning: f64) -> PulseParams<f64> {
        PulseParams { amplitude, width, center, detuning }
    }

    #[test]
    fn peak_value_at_center() {
        let p = pulse(3.0, 10.0, 25.0, 0.0);
        let peak = envelope(&p, 25.0);
        assert!((peak - 3.0 / ((2.0 * std::f64::consts::PI).sqrt() * 10.0)).abs() < 1e-15);
    }

    #[test]
    fn area_by_simpson_quadrature() {
        // int f dt = A / sqrt(2), integrated over t0 +- 8a by composite Simpson.
        let p = pulse(5.2, 7.0, 12.0, 0.0);
        let (a, b) = (12.0 - 8.0 * 7.0, 12.0 + 8.0 * 7.0);
        let n = 100_000;
        let h = (b - a) / n as f64;
        let mut sum = envelope(&p, a) + envelope(&p, b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * envelope(&p, a + i as f64 * h);
        }
        sum *= h / 3.0;
        let expect = 5.2 / 2.0f64.sqrt();
        assert!(((sum - expect) / expect).abs() < 1e-8);
    }

    #[test]
    fn resonant_alpha_is_real_envelope() {
        let p = pulse(2.0, 4.0, 0.0, 0.0);
        for t in [-3.0, 0.0, 1.5] {
            let a = alpha(&p, t);
            assert_eq!(a.im, 0.0);
            assert_eq!(a.re, envelope(&p, t));
        }
    }

    #[test]
    fn detuned_phase_arithmetic() {
        // delta_L = 1 rad/ps at t = pi ps gives a phase factor of -1.
        let p = pulse(2.0, 4.0, 0.0, 1.0);
        let t = std::f64::consts::PI;
        let a = alpha(&p, t);
        assert!((a.re + envelope(&p, t)).abs() < 1e-15);
        assert!(a.im.abs() < 1e-15);
    }

    #[test]
    fn envelope_negligible_beyond_eight_widths() {
        let p = pulse(1.0, 5.0, 0.0, 0.0);
        let peak = envelope(&p, 0.0);
        assert!(envelope(&p, 8.001 * 5.0) < 1e-20 * peak);
    }

    #[test]
    fn area_constructor_round_trips() {
        let p = PulseParams::from_area(std::f64::consts::PI, 10.0, 0.0, 0.0);
        assert!((p.area() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn zero_width_rejected() {
        assert!(pulse(1.0, 0.0, 0.0, 0.0).validate().is_err());
        assert!(pulse(-1.0, 1.0, 0.0, 0.0).validate().is_err());
    }

    proptest! {
        #[test]
        fn envelope_symmetric_about_center(s in 0.0f64..40.0) {
            let p = pulse(1.7, 6.0, 11.0, 0.0);
            let left = envelope(&p, 11.0 - s);
            let right = envelope(&p, 11.0 + s);
            prop_assert!((left - right).abs() <= 1e-12 * left.abs().max(1e-300));
        }

        #[test]
        fn modulus_of_alpha_is_envelope(t in -50.0f64..50.0, d in -3.0f64..3.0) {
            let p = pulse(2.3, 9.0, 5.0, d);
            let a = alpha(&p, t);
            let f = envelope(&p, t);
            prop_assert!((a.norm() - f).abs() <= 1e-12 * f.max(1e-300));
        }

        #[test]
        fn pulse_area_independent_of_detuning_and_center(d in -2.0f64..2.0, c in -20.0f64..20.0) {
            // quadrature of |alpha| over center +- 8 widths
            let p = pulse(3.0, 5.0, c, d);
            let (a, b) = (c - 40.0, c + 40.0);
            let n = 20_000;
            let h = (b - a) / n as f64;
            let mut sum = 0.0;
            for i in 0..n {
                sum += alpha(&p, a + (i as f64 + 0.5) * h).norm();
            }
            sum *= h;
            prop_assert!(((sum - p.area()) / p.area()).abs() < 1e-6);
        }
    }
}
