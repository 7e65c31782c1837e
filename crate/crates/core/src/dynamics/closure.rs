//! Reduced element-family closure of the full master equation.
//!
//! Starting from the QD-cavity ground state, the generator only ever
//! populates four element families of the density matrix:
//!
//! * `pe[n] = rho_{en,en}` — excited populations,
//! * `pg[n] = rho_{gn,gn}` — ground populations,
//! * `s[n]  = rho_{e(n-1),gn}` — exciton-photon exchange coherences,
//! * `c[n]  = rho_{en,gn}` — drive coherences,
//!
//! closed under the equations of motion once the photon coherences between
//! different Fock states at the same QD level (rho_{en,em}, rho_{gn,gm},
//! n != m) are dropped. Those are sourced only when the drive and the cavity
//! coupling act within the same coherence chain, so the closure is exact for
//! an undriven cavity and a controlled approximation for short pulses.
//!
//! State layout (N = n_trunc): `pe[0..=N], pg[0..=N], s[1..=N], c[0..=N]`,
//! 4 N + 3 complex entries in place of the full (2 N + 2)^2.

use num_complex::Complex;

use crate::drive::{envelope, PulseParams};
use crate::error::{Error, Result};
use crate::kernel::KernelTable;
use crate::scalar::Scalar;

use super::rk4::Rk4;
use super::state::{state_index, DensityMatrix, QDCavityState};
use super::{
    GridSpec, InvariantReport, SnapshotObserver, StateRecorder, SystemParams, Trajectory,
};

/// Divergence guard only: the closure admits genuinely negative transient
/// populations when the drive overlaps the exchange dynamics.
const CLOSURE_POPULATION_ABORT: f64 = -0.1;

struct Layout {
    n: usize,
}

impl Layout {
    fn new(n_trunc: usize) -> Self {
        Layout { n: n_trunc }
    }
    fn len(&self) -> usize {
        4 * self.n + 3
    }
    fn pe(&self, m: usize) -> usize {
        m
    }
    fn pg(&self, m: usize) -> usize {
        self.n + 1 + m
    }
    /// Valid for 1 <= m <= n.
    fn s(&self, m: usize) -> usize {
        2 * (self.n + 1) + (m - 1)
    }
    fn c(&self, m: usize) -> usize {
        3 * self.n + 2 + m
    }
}

fn project<F: Scalar>(layout: &Layout, rho: &DensityMatrix<F>) -> Vec<Complex<F>> {
    let mut y = vec![Complex::new(F::zero(), F::zero()); layout.len()];
    for m in 0..=layout.n {
        y[layout.pe(m)] = rho.get(state_index(m, true), state_index(m, true));
        y[layout.pg(m)] = rho.get(state_index(m, false), state_index(m, false));
        y[layout.c(m)] = rho.get(state_index(m, true), state_index(m, false));
        if m >= 1 {
            y[layout.s(m)] = rho.get(state_index(m - 1, true), state_index(m, false));
        }
    }
    y
}

fn expand<F: Scalar>(layout: &Layout, y: &[Complex<F>]) -> DensityMatrix<F> {
    let mut rho = DensityMatrix::zeros(layout.n);
    for m in 0..=layout.n {
        let e = state_index(m, true);
        let g = state_index(m, false);
        rho.set(e, e, y[layout.pe(m)]);
        rho.set(g, g, y[layout.pg(m)]);
        rho.set(e, g, y[layout.c(m)]);
        rho.set(g, e, y[layout.c(m)].conj());
        if m >= 1 {
            let e_prev = state_index(m - 1, true);
            rho.set(e_prev, g, y[layout.s(m)]);
            rho.set(g, e_prev, y[layout.s(m)].conj());
        }
    }
    rho
}

/// Check the reduced state lies outside the retained families by at most
/// `tol` (used by tests comparing against the full propagator).
#[cfg(test)]
fn residual_outside_families<F: Scalar>(layout: &Layout, rho: &DensityMatrix<F>) -> F {
    let projected = expand(layout, &project(layout, rho));
    rho.max_abs_diff(&projected).unwrap()
}

fn derivative<F: Scalar>(
    layout: &Layout,
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    table: &KernelTable<F>,
    t: F,
    y: &[Complex<F>],
    d: &mut [Complex<F>],
) {
    let i_unit = Complex::new(F::zero(), F::one());
    let gamma = table.gamma_interp(t);
    let f = envelope(pulse, t);
    let phase_jc = {
        let p = sys.detuning * t;
        Complex::new(p.cos(), p.sin())
    };
    let phase_drive = {
        let p = pulse.detuning * t;
        Complex::new(p.cos(), p.sin())
    };
    let n = layout.n;

    for m in 0..=n {
        let c = y[layout.c(m)];
        // drive contribution shared by pe[m] and pg[m]
        let drive_flow = if f > F::zero() {
            let z = c * phase_drive.conj();
            // i (c e^{-i dL t} - conj) = -2 Im(z)
            Complex::new(-F::of(2.0) * z.im, F::zero()) * f
        } else {
            Complex::new(F::zero(), F::zero())
        };

        // pe[m]: exchanges with s[m+1]
        let mut dpe = drive_flow;
        if m < n {
            let g_amp = sys.coupling * F::of(((m + 1) as f64).sqrt());
            let z = y[layout.s(m + 1)] * phase_jc.conj();
            dpe += Complex::new(-F::of(2.0) * z.im, F::zero()) * g_amp;
        }
        d[layout.pe(m)] = dpe;

        // pg[m]: exchanges with s[m]
        let mut dpg = -drive_flow;
        if m >= 1 {
            let g_amp = sys.coupling * F::of((m as f64).sqrt());
            let z = y[layout.s(m)] * phase_jc.conj();
            dpg += Complex::new(F::of(2.0) * z.im, F::zero()) * g_amp;
        }
        d[layout.pg(m)] = dpg;

        // c[m] = rho_{em,gm}
        d[layout.c(m)] = i_unit * phase_drive * (y[layout.pe(m)] - y[layout.pg(m)]) * f - gamma * c;

        // s[m] = rho_{e(m-1),gm}
        if m >= 1 {
            let g_amp = sys.coupling * F::of((m as f64).sqrt());
            d[layout.s(m)] = i_unit * phase_jc * (y[layout.pe(m - 1)] - y[layout.pg(m)]) * g_amp
                - gamma * y[layout.s(m)];
        }
    }
}

/// Propagate the retained families, reporting expanded snapshots.
pub fn closure_integrate<F: Scalar>(
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    table: &KernelTable<F>,
    rho0: &QDCavityState<F>,
    grid: &GridSpec<F>,
    observer: &mut dyn SnapshotObserver<F>,
) -> Result<InvariantReport> {
    sys.validate()?;
    pulse.validate()?;
    let dim = 2 * (sys.n_trunc + 1);
    if rho0.rho.dim() != dim {
        return Err(Error::Shape {
            op: "closure_integrate",
            expected: dim,
            got: rho0.rho.dim(),
        });
    }
    let n_steps = grid.validate()?;
    let slack = grid.dt * F::of(1e-6);
    if grid.t_end > table.t_max() + slack || grid.t_start < -slack {
        return Err(Error::Domain {
            op: "closure_integrate",
            reason: format!(
                "span [{}, {}] exceeds kernel table range [0, {}]",
                grid.t_start,
                grid.t_end,
                table.t_max()
            ),
        });
    }

    let layout = Layout::new(sys.n_trunc);
    let mut y = project(&layout, &rho0.rho);
    let mut rk = Rk4::new(layout.len());
    let mut report = InvariantReport::default();
    let initial_excitation = super::excitation_number(&rho0.rho);

    let mut deriv = |t: F, s: &[Complex<F>], d: &mut [Complex<F>]| {
        derivative(&layout, sys, pulse, table, t, s, d);
    };

    for step in 0..=n_steps {
        let t = grid.t_start + F::of(step as f64) * grid.dt;
        if step % grid.stride == 0 || step == n_steps {
            let rho = expand(&layout, &y);
            report.merge_state_with_floor(t, &rho, initial_excitation, CLOSURE_POPULATION_ABORT)?;
            observer.record(t, &rho);
        }
        if step < n_steps {
            rk.step(&mut deriv, t, grid.dt, &mut y);
        }
    }
    Ok(report)
}

/// Convenience wrapper that collects expanded snapshots into a [`Trajectory`].
pub fn closure_integrate_recorded<F: Scalar>(
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    table: &KernelTable<F>,
    rho0: &QDCavityState<F>,
    grid: &GridSpec<F>,
) -> Result<Trajectory<F>> {
    let mut rec = StateRecorder::new();
    let report = closure_integrate(sys, pulse, table, rho0, grid, &mut rec)?;
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::super::full::integrate_recorded;
    use super::*;
    use crate::kernel::KernelTable;

    fn no_pulse() -> PulseParams<f64> {
        PulseParams {
            amplitude: 0.0,
            width: 1.0,
            center: 0.0,
            detuning: 0.0,
        }
    }

    #[test]
    fn layout_indices_tile_the_state_vector() {
        let l = Layout::new(3);
        let mut seen = vec![false; l.len()];
        for m in 0..=3 {
            seen[l.pe(m)] = true;
            seen[l.pg(m)] = true;
            seen[l.c(m)] = true;
            if m >= 1 {
                seen[l.s(m)] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn project_expand_round_trip() {
        let l = Layout::new(2);
        let mut rho = DensityMatrix::<f64>::zeros(2);
        rho.set(1, 1, Complex::new(0.4, 0.0));
        rho.set(2, 2, Complex::new(0.6, 0.0));
        rho.set(1, 2, Complex::new(0.1, -0.2)); // s[1]
        rho.set(2, 1, Complex::new(0.1, 0.2));
        rho.set(3, 2, Complex::new(0.05, 0.02)); // c[1]
        rho.set(2, 3, Complex::new(0.05, -0.02));
        assert_eq!(residual_outside_families(&l, &rho), 0.0);
        let back = expand(&l, &project(&l, &rho));
        assert_eq!(back.max_abs_diff(&rho).unwrap(), 0.0);
    }

    #[test]
    fn matches_full_propagator_without_drive() {
        // Undriven JC exchange from |e,0> with dephasing on: the closure is
        // exact, so both propagators must agree to integrator accuracy.
        let sys = SystemParams { coupling: 0.5, detuning: 0.7, n_trunc: 2 };
        let mut table = KernelTable::zero(1.0, 12.0, 0.01);
        // constant Gamma = 0.05 via CSV editing
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let edited: String = String::from_utf8(buf)
            .unwrap()
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i < 5 {
                    l.to_string()
                } else {
                    let t = l.split(',').next().unwrap();
                    format!("{t},0,0,0.05,0")
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        table = KernelTable::read_csv(std::io::BufReader::new(edited.as_bytes())).unwrap();

        let rho0 = QDCavityState {
            rho: DensityMatrix::pure(2, 0, true),
            time: 0.0,
        };
        let grid = GridSpec::from_span(10.0, 1e-3, 500);
        let fast = closure_integrate_recorded(&sys, &no_pulse(), &table, &rho0, &grid).unwrap();
        let full = integrate_recorded(&sys, &no_pulse(), &table, &rho0, &grid).unwrap();
        for (a, b) in fast.states.iter().zip(&full.states) {
            assert!(a.max_abs_diff(b).unwrap() < 1e-12);
        }
        assert!(fast.report.within_tolerances());
    }

    #[test]
    fn driven_closure_deviation_from_full_is_bounded() {
        // When the pulse overlaps the exchange dynamics the dropped photon
        // coherences are sourced at second order, so the closure deviates
        // from the full run by a finite amount. This test documents that the
        // deviation stays bounded and the comparison machinery works; the
        // scenario layer records the measured value per run.
        let sys = SystemParams { coupling: 0.5, detuning: 0.0, n_trunc: 6 };
        let pulse = PulseParams::from_area(std::f64::consts::PI, 0.5, 0.0, 0.0);
        let table = KernelTable::zero(1.0, 30.0, 0.01);
        let rho0 = QDCavityState::ground(6);
        let grid = GridSpec::from_span(30.0, 1e-3, 1000);
        let fast = closure_integrate_recorded(&sys, &pulse, &table, &rho0, &grid).unwrap();
        let full = integrate_recorded(&sys, &pulse, &table, &rho0, &grid).unwrap();
        let mut worst: f64 = 0.0;
        let l = Layout::new(6);
        for (a, b) in fast.states.iter().zip(&full.states) {
            // compare within the retained families only
            let pa = project(&l, a);
            let pb = project(&l, b);
            for (x, y) in pa.iter().zip(&pb) {
                worst = worst.max((x - y).norm());
            }
        }
        assert!(worst > 1e-3 && worst < 0.5, "worst family deviation {worst}");
        assert!(fast.report.max_trace_drift < 1e-12);
    }

    #[test]
    fn trace_is_conserved_exactly_by_construction() {
        let sys = SystemParams { coupling: 0.8, detuning: 0.3, n_trunc: 4 };
        let pulse = PulseParams::from_area(2.0, 1.0, 2.0, 0.5);
        let table = KernelTable::zero(1.0, 16.0, 0.01);
        let rho0 = QDCavityState::ground(4);
        let grid = GridSpec::from_span(15.0, 1e-3, 300);
        let traj = closure_integrate_recorded(&sys, &pulse, &table, &rho0, &grid).unwrap();
        assert!(traj.report.max_trace_drift < 1e-12);
    }
}
