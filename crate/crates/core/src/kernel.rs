//! Bath correlation kernel K(t) and the cumulative dephasing coefficient
//! Gamma(t) = int_0^t K(s) ds.
//!
//! K(t) = int_0^inf dw j(w) [coth(w / 2 theta) cos(w t) - i sin(w t)]
//! with theta = k_B T / hbar in rad/ps. Real and imaginary parts are
//! integrated by two independent adaptive quadratures, so the imaginary
//! part is bit-for-bit temperature independent.

use std::io::{BufRead, Write};

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::material::SpectralModel;
use crate::quad::integrate_adaptive;
use crate::scalar::Scalar;
use crate::units;

/// Default absolute quadrature tolerance, in kernel units (1/ps^2).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Integration domain extends to this multiple of the cutoff; the Gaussian
/// tail beyond it is below 1e-20 of the peak.
pub const OMEGA_SPAN: f64 = 20.0;

const MAX_PANELS: usize = 40_000;

/// coth(x) with the x -> 0 limit handled by series to avoid cancellation.
#[inline]
fn coth<F: Scalar>(x: F) -> F {
    if x < F::of(1e-4) {
        x.recip() + x / F::of(3.0)
    } else {
        x.tanh().recip()
    }
}

/// Evaluate K(t) with an explicit tolerance; returns the value and the
/// summed quadrature error estimate.
pub fn kernel_at_tol<F: Scalar>(
    s: &SpectralModel<F>,
    temperature: F,
    t: F,
    tol: F,
) -> Result<(Complex<F>, F)> {
    if t < F::zero() {
        return Err(Error::Domain {
            op: "kernel_at",
            reason: format!("t = {t} must be >= 0"),
        });
    }
    if temperature < F::zero() {
        return Err(Error::Domain {
            op: "kernel_at",
            reason: format!("temperature = {temperature} must be >= 0"),
        });
    }
    s.validate()?;
    Ok(kernel_unchecked(s, temperature, t, tol)?)
}

/// Evaluate K(t) at the default tolerance.
pub fn kernel_at<F: Scalar>(s: &SpectralModel<F>, temperature: F, t: F) -> Result<Complex<F>> {
    kernel_at_tol(s, temperature, t, F::of(DEFAULT_TOL)).map(|(k, _)| k)
}

fn kernel_unchecked<F: Scalar>(
    s: &SpectralModel<F>,
    temperature: F,
    t: F,
    tol: F,
) -> Result<(Complex<F>, F)> {
    if s.prefactor == F::zero() {
        return Ok((Complex::new(F::zero(), F::zero()), F::zero()));
    }
    let upper = F::of(OMEGA_SPAN) * s.cutoff;
    let theta = units::thermal_frequency(temperature);
    let s_re = *s;
    let re = integrate_adaptive(
        move |w: F| {
            let c = if theta > F::zero() {
                coth(w / (F::of(2.0) * theta))
            } else {
                F::one()
            };
            s_re.j(w) * c * (w * t).cos()
        },
        F::zero(),
        upper,
        tol,
        MAX_PANELS,
    )?;
    let s_im = *s;
    let im = integrate_adaptive(
        move |w: F| -s_im.j(w) * (w * t).sin(),
        F::zero(),
        upper,
        tol,
        MAX_PANELS,
    )?;
    Ok((Complex::new(re.value, im.value), re.error + im.error))
}

/// Tabulated K and Gamma on a uniform time grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelTable<F> {
    dt: F,
    k: Vec<Complex<F>>,
    gamma: Vec<Complex<F>>,
    temperature: F,
    model: SpectralModel<F>,
}

impl<F: Scalar> KernelTable<F> {
    /// A table with K = Gamma = 0, for runs with phonons decoupled.
    pub fn zero(cutoff: F, t_max: F, dt: F) -> Self {
        let n = grid_len(t_max, dt);
        KernelTable {
            dt,
            k: vec![Complex::new(F::zero(), F::zero()); n],
            gamma: vec![Complex::new(F::zero(), F::zero()); n],
            temperature: F::zero(),
            model: SpectralModel {
                prefactor: F::zero(),
                cutoff,
            },
        }
    }

    pub fn dt(&self) -> F {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn t_max(&self) -> F {
        F::of((self.k.len() - 1) as f64) * self.dt
    }

    pub fn temperature(&self) -> F {
        self.temperature
    }

    pub fn model(&self) -> &SpectralModel<F> {
        &self.model
    }

    pub fn time(&self, i: usize) -> F {
        F::of(i as f64) * self.dt
    }

    pub fn k_values(&self) -> &[Complex<F>] {
        &self.k
    }

    pub fn gamma_values(&self) -> &[Complex<F>] {
        &self.gamma
    }

    /// Linear interpolation of Gamma; exact at grid points.
    pub fn gamma_at(&self, t: F) -> Result<Complex<F>> {
        let slack = self.dt * F::of(1e-9);
        if t < -slack || t > self.t_max() + slack {
            return Err(Error::Domain {
                op: "gamma_at",
                reason: format!("t = {} outside table range [0, {}]", t, self.t_max()),
            });
        }
        Ok(self.gamma_interp(t))
    }

    /// Interpolation without the domain check, for integrator stage times
    /// already validated against the table range. Clamps at the ends.
    #[inline]
    pub(crate) fn gamma_interp(&self, t: F) -> Complex<F> {
        let u = t / self.dt;
        if u <= F::zero() {
            return self.gamma[0];
        }
        let i = u.floor().to_f64() as usize;
        if i >= self.gamma.len() - 1 {
            return self.gamma[self.gamma.len() - 1];
        }
        let frac = u - F::of(i as f64);
        if frac == F::zero() {
            return self.gamma[i];
        }
        let a = self.gamma[i];
        let b = self.gamma[i + 1];
        a + (b - a) * frac
    }

    /// Dump as CSV: `t,re_k,im_k,re_gamma,im_gamma` with shortest
    /// round-trip float formatting, preceded by `#` metadata lines.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# prefactor={}", self.model.prefactor)?;
        writeln!(w, "# cutoff={}", self.model.cutoff)?;
        writeln!(w, "# temperature={}", self.temperature)?;
        writeln!(w, "# dt={}", self.dt)?;
        writeln!(w, "t,re_k,im_k,re_gamma,im_gamma")?;
        for i in 0..self.k.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.time(i),
                self.k[i].re,
                self.k[i].im,
                self.gamma[i].re,
                self.gamma[i].im
            )?;
        }
        Ok(())
    }

    /// Reload a table written by [`KernelTable::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut meta = std::collections::HashMap::new();
        let mut k = Vec::new();
        let mut gamma = Vec::new();
        let mut header_seen = false;
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((key, val)) = rest.trim().split_once('=') {
                    meta.insert(key.trim().to_string(), val.trim().to_string());
                }
                continue;
            }
            if !header_seen {
                header_seen = true; // column header row
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(Error::TableFormat(format!("expected 5 columns: {line}")));
            }
            let parse = |s: &str| -> Result<F> {
                s.parse::<f64>()
                    .map(F::of)
                    .map_err(|e| Error::TableFormat(format!("bad float {s}: {e}")))
            };
            k.push(Complex::new(parse(cols[1])?, parse(cols[2])?));
            gamma.push(Complex::new(parse(cols[3])?, parse(cols[4])?));
        }
        let get = |key: &str| -> Result<F> {
            meta.get(key)
                .ok_or_else(|| Error::TableFormat(format!("missing metadata `{key}`")))?
                .parse::<f64>()
                .map(F::of)
                .map_err(|e| Error::TableFormat(format!("bad metadata `{key}`: {e}")))
        };
        if k.len() < 2 {
            return Err(Error::TableFormat("table needs at least 2 rows".into()));
        }
        Ok(KernelTable {
            dt: get("dt")?,
            k,
            gamma,
            temperature: get("temperature")?,
            model: SpectralModel {
                prefactor: get("prefactor")?,
                cutoff: get("cutoff")?,
            },
        })
    }
}

fn grid_len<F: Scalar>(t_max: F, dt: F) -> usize {
    // Smallest uniform grid with spacing dt covering [0, t_max].
    let n = (t_max / dt).to_f64();
    (n - 1e-9).ceil() as usize + 1
}

/// Tabulate K on a uniform grid and accumulate Gamma by a fourth-order
/// cumulative Newton-Cotes rule. Kernel evaluations run in parallel.
pub fn build_table<F: Scalar>(
    s: &SpectralModel<F>,
    temperature: F,
    t_max: F,
    dt: F,
) -> Result<KernelTable<F>> {
    build_table_tol(s, temperature, t_max, dt, F::of(DEFAULT_TOL))
}

pub fn build_table_tol<F: Scalar>(
    s: &SpectralModel<F>,
    temperature: F,
    t_max: F,
    dt: F,
    tol: F,
) -> Result<KernelTable<F>> {
    if !(dt > F::zero()) {
        return Err(Error::InvalidParameter {
            field: "dt",
            reason: "must be > 0".into(),
        });
    }
    if t_max < dt {
        return Err(Error::InvalidParameter {
            field: "t_max",
            reason: "must be >= dt".into(),
        });
    }
    let n = grid_len(t_max, dt);
    let k: Vec<Complex<F>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = F::of(i as f64) * dt;
            kernel_unchecked(s, temperature, t, tol).map(|(v, _)| v)
        })
        .collect::<Result<_>>()?;
    let gamma = cumulative_integral(&k, dt);
    Ok(KernelTable {
        dt,
        k,
        gamma,
        temperature,
        model: *s,
    })
}

/// Cumulative integral of uniformly sampled values, O(dt^4) accurate.
fn cumulative_integral<F: Scalar>(f: &[Complex<F>], dt: F) -> Vec<Complex<F>> {
    let n = f.len();
    let zero = Complex::new(F::zero(), F::zero());
    let mut out = vec![zero; n];
    if n < 2 {
        return out;
    }
    let half = F::of(0.5);
    if n < 4 {
        // Too few points for cubic rules; trapezoid.
        for i in 1..n {
            out[i] = out[i - 1] + (f[i - 1] + f[i]) * (half * dt);
        }
        return out;
    }
    let c = F::of(1.0 / 24.0) * dt;
    // First step: cubic through the first four points, left-edge rule.
    out[1] = (f[0] * F::of(9.0) + f[1] * F::of(19.0) - f[2] * F::of(5.0) + f[3]) * c;
    // Interior steps: symmetric four-point rule.
    for i in 2..n - 1 {
        let seg =
            (f[i - 1] + f[i]) * F::of(13.0) - f[i - 2] - f[i + 1];
        out[i] = out[i - 1] + seg * c;
    }
    // Last step: right-edge rule.
    let m = n - 1;
    let seg = f[m - 3] - f[m - 2] * F::of(5.0) + f[m - 1] * F::of(19.0) + f[m] * F::of(9.0);
    out[m] = out[m - 1] + seg * c;
    out
}
