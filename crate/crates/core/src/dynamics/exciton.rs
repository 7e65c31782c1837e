//! Reduced exciton dynamics without the cavity: coherence P = <e|rho|g> and
//! population N_e, driven by the complex pulse alpha(t) and dephased by
//! Gamma(t).
//!
//! dP/dt   = i alpha(t) (2 N_e - 1) - Gamma(t) P
//! dN_e/dt = -2 Im(alpha* P)

use num_complex::Complex;

use crate::drive::{alpha, PulseParams};
use crate::error::{Error, Result};
use crate::kernel::KernelTable;
use crate::scalar::Scalar;

use super::rk4::Rk4;
use super::state::ExcitonState;
use super::{GridSpec, InvariantReport};

const NEGATIVE_POPULATION_ABORT: f64 = -1e-5;
const COHERENCE_EXCESS_ABORT: f64 = 1e-5;

/// Snapshot series of reduced states plus the invariant report.
#[derive(Debug, Clone)]
pub struct ExcitonTrajectory<F> {
    pub times: Vec<F>,
    pub states: Vec<ExcitonState<F>>,
    pub report: InvariantReport,
}

fn check_state<F: Scalar>(
    report: &mut InvariantReport,
    t: F,
    p: Complex<F>,
    n_e: F,
) -> Result<()> {
    let n = n_e.to_f64();
    let pop_margin = n.min(1.0 - n);
    report.min_population = report.min_population.min(pop_margin);
    // Purity bound for a two-level state: |P|^2 <= N_e (1 - N_e).
    let excess = (p.norm_sqr().to_f64()) - n * (1.0 - n);
    report.max_coherence_excess = report.max_coherence_excess.max(excess);
    if pop_margin < NEGATIVE_POPULATION_ABORT {
        return Err(Error::IntegrationDiverged {
            time: t.to_f64(),
            what: format!("population outside [0, 1] by {:e}", -pop_margin),
        });
    }
    if excess > COHERENCE_EXCESS_ABORT {
        return Err(Error::IntegrationDiverged {
            time: t.to_f64(),
            what: format!("coherence excess {excess:e}"),
        });
    }
    Ok(())
}

/// Propagate (P, N_e) from `x0` over `grid`, recording every `stride`-th step.
pub fn exciton_only_integrate<F: Scalar>(
    pulse: &PulseParams<F>,
    table: &KernelTable<F>,
    x0: &ExcitonState<F>,
    grid: &GridSpec<F>,
) -> Result<ExcitonTrajectory<F>> {
    pulse.validate()?;
    let n_steps = grid.validate()?;
    let slack = grid.dt * F::of(1e-6);
    if grid.t_end > table.t_max() + slack || grid.t_start < -slack {
        return Err(Error::Domain {
            op: "exciton_only_integrate",
            reason: format!(
                "span [{}, {}] exceeds kernel table range [0, {}]",
                grid.t_start,
                grid.t_end,
                table.t_max()
            ),
        });
    }

    // y[0] = P, y[1] = N_e carried as complex (imaginary part stays at
    // roundoff and is dropped on output).
    let mut y = vec![x0.p, Complex::new(x0.n_e, F::zero())];
    let mut rk = Rk4::new(2);
    let mut report = InvariantReport::default();
    let mut times = Vec::new();
    let mut states = Vec::new();

    let mut deriv = |t: F, s: &[Complex<F>], d: &mut [Complex<F>]| {
        let a = alpha(pulse, t);
        let gamma = table.gamma_interp(t);
        let inversion = s[1] * F::of(2.0) - Complex::new(F::one(), F::zero());
        d[0] = Complex::new(F::zero(), F::one()) * a * inversion - gamma * s[0];
        let im = a.conj() * s[0];
        d[1] = Complex::new(-F::of(2.0) * im.im, F::zero());
    };

    for step in 0..=n_steps {
        let t = grid.t_start + F::of(step as f64) * grid.dt;
        if step % grid.stride == 0 || step == n_steps {
            check_state(&mut report, t, y[0], y[1].re)?;
            times.push(t);
            states.push(ExcitonState {
                p: y[0],
                n_e: y[1].re,
                time: t,
            });
        }
        if step < n_steps {
            rk.step(&mut deriv, t, grid.dt, &mut y);
        }
    }
    Ok(ExcitonTrajectory {
        times,
        states,
        report,
    })
}
