//! Fixed-step classical Runge-Kutta on flat complex state vectors.

use num_complex::Complex;

use crate::scalar::Scalar;

pub(crate) struct Rk4<F> {
    k1: Vec<Complex<F>>,
    k2: Vec<Complex<F>>,
    k3: Vec<Complex<F>>,
    k4: Vec<Complex<F>>,
    tmp: Vec<Complex<F>>,
}

#[inline]
fn scaled_sum<F: Scalar>(out: &mut [Complex<F>], y: &[Complex<F>], k: &[Complex<F>], c: F) {
    for ((o, a), b) in out.iter_mut().zip(y).zip(k) {
        o.re = a.re + b.re * c;
        o.im = a.im + b.im * c;
    }
}

impl<F: Scalar> Rk4<F> {
    pub fn new(len: usize) -> Self {
        let zero = vec![Complex::new(F::zero(), F::zero()); len];
        Rk4 {
            k1: zero.clone(),
            k2: zero.clone(),
            k3: zero.clone(),
            k4: zero.clone(),
            tmp: zero,
        }
    }

    /// One step of size `dt` starting at time `t`, updating `y` in place.
    pub fn step(
        &mut self,
        deriv: &mut impl FnMut(F, &[Complex<F>], &mut [Complex<F>]),
        t: F,
        dt: F,
        y: &mut [Complex<F>],
    ) {
        let half = F::of(0.5) * dt;
        deriv(t, y, &mut self.k1);
        scaled_sum(&mut self.tmp, y, &self.k1, half);
        deriv(t + half, &self.tmp, &mut self.k2);
        scaled_sum(&mut self.tmp, y, &self.k2, half);
        deriv(t + half, &self.tmp, &mut self.k3);
        scaled_sum(&mut self.tmp, y, &self.k3, dt);
        deriv(t + dt, &self.tmp, &mut self.k4);
        let sixth = dt / F::of(6.0);
        let third = dt / F::of(3.0);
        for i in 0..y.len() {
            let acc_re = self.k1[i].re * sixth
                + self.k2[i].re * third
                + self.k3[i].re * third
                + self.k4[i].re * sixth;
            let acc_im = self.k1[i].im * sixth
                + self.k2[i].im * third
                + self.k3[i].im * third
                + self.k4[i].im * sixth;
            y[i].re += acc_re;
            y[i].im += acc_im;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_fourth_order() {
        // y' = i w y, |y| conserved, phase w t.
        let w = 2.0f64;
        let run = |dt: f64| {
            let mut y = vec![Complex::new(1.0, 0.0)];
            let mut rk = Rk4::new(1);
            let mut deriv = |_t: f64, s: &[Complex<f64>], d: &mut [Complex<f64>]| {
                d[0] = Complex::new(0.0, w) * s[0];
            };
            let n = (10.0 / dt).round() as usize;
            for i in 0..n {
                rk.step(&mut deriv, i as f64 * dt, dt, &mut y);
            }
            let exact = Complex::from_polar(1.0, w * 10.0);
            (y[0] - exact).norm()
        };
        let e1 = run(0.02);
        let e2 = run(0.01);
        let ratio = e1 / e2;
        assert!(ratio > 8.0 && ratio < 32.0, "order-4 ratio was {ratio}");
        assert!(e2 < 1e-7);
    }
}
