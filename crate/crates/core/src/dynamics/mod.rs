//! Rotating-frame Hamiltonian, time-local dissipator, and density-matrix
//! propagation.
//!
//! Three modes are provided:
//! * [`integrate`] — full Liouvillian over the truncated product space,
//! * [`exciton_only_integrate`] — the two-variable reduced dynamics (P, N_e),
//! * [`closure_integrate`] — the reduced element-family closure in which
//!   same-QD-state photon coherences are structurally absent.

mod closure;
mod exciton;
mod full;
mod rk4;
mod state;

pub use closure::{closure_integrate, closure_integrate_recorded};
pub use exciton::{exciton_only_integrate, ExcitonTrajectory};
pub use full::{dissipator_apply, hamiltonian_apply, integrate, integrate_recorded};
pub use state::{state_index, DensityMatrix, ExcitonState, QDCavityState};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Reporting tolerances for state invariants (see also the abort thresholds,
/// which are 100-1000x looser and turn a breach into a hard error).
pub const TRACE_TOL: f64 = 1e-9;
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const NEGATIVE_POPULATION_TOL: f64 = -1e-8;

const TRACE_ABORT: f64 = 1e-6;
const HERMITICITY_ABORT: f64 = 1e-7;
const NEGATIVE_POPULATION_ABORT: f64 = -1e-5;

/// Exciton-cavity coupling, cavity detuning, and Fock truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams<F> {
    /// g in rad/ps.
    pub coupling: F,
    /// Delta = omega_ex - omega_c in rad/ps.
    pub detuning: F,
    /// Highest retained Fock state.
    pub n_trunc: usize,
}

impl<F: Scalar> SystemParams<F> {
    pub fn validate(&self) -> Result<()> {
        if self.n_trunc < 1 {
            return Err(Error::InvalidParameter {
                field: "n_trunc",
                reason: "must be >= 1".into(),
            });
        }
        if !(self.coupling >= F::zero()) {
            return Err(Error::InvalidParameter {
                field: "coupling",
                reason: "must be >= 0".into(),
            });
        }
        Ok(())
    }
}

/// Uniform integration grid. The propagator takes `n = round(span / dt)`
/// steps of exactly `dt`; snapshots fire every `stride` steps and at the
/// final step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<F> {
    pub t_start: F,
    pub t_end: F,
    pub dt: F,
    pub stride: usize,
}

impl<F: Scalar> GridSpec<F> {
    pub fn from_span(t_end: F, dt: F, stride: usize) -> Self {
        GridSpec {
            t_start: F::zero(),
            t_end,
            dt,
            stride,
        }
    }

    pub fn validate(&self) -> Result<usize> {
        if !(self.dt > F::zero()) {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: "must be > 0".into(),
            });
        }
        if !(self.t_end > self.t_start) {
            return Err(Error::InvalidParameter {
                field: "t_end",
                reason: "must exceed t_start".into(),
            });
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter {
                field: "stride",
                reason: "must be >= 1".into(),
            });
        }
        let n = ((self.t_end - self.t_start) / self.dt).to_f64().round() as usize;
        if n == 0 {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: "span shorter than one step".into(),
            });
        }
        Ok(n)
    }
}

/// Worst-case invariant excursions observed along a trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InvariantReport {
    pub max_trace_drift: f64,
    pub max_hermiticity_drift: f64,
    /// Smallest diagonal (population) encountered; small negative values are
    /// tolerated transients of the second-order time-local generator.
    pub min_population: f64,
    /// max_t |Tr[rho (a^dag a + sigma_ee)](t) - same at t_start|.
    pub max_excitation_drift: f64,
    /// Exciton mode only: max_t (|P|^2 - N_e (1 - N_e)).
    pub max_coherence_excess: f64,
}

impl Default for InvariantReport {
    fn default() -> Self {
        InvariantReport {
            max_trace_drift: 0.0,
            max_hermiticity_drift: 0.0,
            min_population: 1.0,
            max_excitation_drift: 0.0,
            max_coherence_excess: 0.0,
        }
    }
}

impl InvariantReport {
    /// True when every excursion is inside the reporting tolerances.
    pub fn within_tolerances(&self) -> bool {
        self.max_trace_drift <= TRACE_TOL
            && self.max_hermiticity_drift <= HERMITICITY_TOL
            && self.min_population >= NEGATIVE_POPULATION_TOL
    }

    pub(crate) fn merge_state<F: Scalar>(
        &mut self,
        t: F,
        rho: &DensityMatrix<F>,
        initial_excitation: F,
    ) -> Result<()> {
        self.merge_state_with_floor(t, rho, initial_excitation, NEGATIVE_POPULATION_ABORT)
    }

    /// Like [`merge_state`], but with an explicit negative-population abort
    /// floor. The closure mode is not a positive map when the drive and the
    /// cavity coupling overlap, so its floor only guards against divergence.
    pub(crate) fn merge_state_with_floor<F: Scalar>(
        &mut self,
        t: F,
        rho: &DensityMatrix<F>,
        initial_excitation: F,
        pop_abort: f64,
    ) -> Result<()> {
        let trace_drift = (rho.trace() - Complex::new(F::one(), F::zero()))
            .norm()
            .to_f64();
        let herm = rho.hermiticity_drift().to_f64();
        let min_pop = rho.min_diagonal().to_f64();
        let exc_drift = (excitation_number(rho) - initial_excitation).abs().to_f64();
        self.max_trace_drift = self.max_trace_drift.max(trace_drift);
        self.max_hermiticity_drift = self.max_hermiticity_drift.max(herm);
        self.min_population = self.min_population.min(min_pop);
        self.max_excitation_drift = self.max_excitation_drift.max(exc_drift);
        if trace_drift > TRACE_ABORT {
            return Err(Error::IntegrationDiverged {
                time: t.to_f64(),
                what: format!("trace drift {trace_drift:e}"),
            });
        }
        if herm > HERMITICITY_ABORT {
            return Err(Error::IntegrationDiverged {
                time: t.to_f64(),
                what: format!("hermiticity drift {herm:e}"),
            });
        }
        if min_pop < pop_abort {
            return Err(Error::IntegrationDiverged {
                time: t.to_f64(),
                what: format!("negative population {min_pop:e}"),
            });
        }
        Ok(())
    }
}

/// Receives the state at snapshot times during propagation.
pub trait SnapshotObserver<F: Scalar> {
    fn record(&mut self, t: F, rho: &DensityMatrix<F>);
}

/// Observer that clones every snapshot.
#[derive(Debug, Default)]
pub struct StateRecorder<F> {
    pub times: Vec<F>,
    pub states: Vec<DensityMatrix<F>>,
}

impl<F: Scalar> StateRecorder<F> {
    pub fn new() -> Self {
        StateRecorder {
            times: Vec::new(),
            states: Vec::new(),
        }
    }
}

impl<F: Scalar> SnapshotObserver<F> for StateRecorder<F> {
    fn record(&mut self, t: F, rho: &DensityMatrix<F>) {
        self.times.push(t);
        self.states.push(rho.clone());
    }
}

/// Snapshot series of full states plus the invariant report.
#[derive(Debug)]
pub struct Trajectory<F> {
    pub times: Vec<F>,
    pub states: Vec<DensityMatrix<F>>,
    pub report: InvariantReport,
}

/// Tr[rho (a^dag a + sigma_ee)]: conserved by the coherent part when the
/// drive is off, and by the dephasing always.
pub fn excitation_number<F: Scalar>(rho: &DensityMatrix<F>) -> F {
    let mut total = F::zero();
    for n in 0..=rho.n_trunc() {
        let g = rho.get(state_index(n, false), state_index(n, false)).re;
        let e = rho.get(state_index(n, true), state_index(n, true)).re;
        total += F::of(n as f64) * (g + e) + e;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excitation_number_of_basis_states() {
        let e0: DensityMatrix<f64> = DensityMatrix::pure(3, 0, true);
        assert_eq!(excitation_number(&e0), 1.0);
        let g0: DensityMatrix<f64> = DensityMatrix::pure(3, 0, false);
        assert_eq!(excitation_number(&g0), 0.0);
        let g2: DensityMatrix<f64> = DensityMatrix::pure(3, 2, false);
        assert_eq!(excitation_number(&g2), 2.0);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        let g = GridSpec::<f64> {
            t_start: 0.0,
            t_end: 1.0,
            dt: 0.0,
            stride: 1,
        };
        assert!(g.validate().is_err());
        let g = GridSpec::<f64> {
            t_start: 1.0,
            t_end: 1.0,
            dt: 0.1,
            stride: 1,
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn system_params_validation() {
        assert!(SystemParams::<f64> { coupling: 0.5, detuning: 0.0, n_trunc: 0 }
            .validate()
            .is_err());
        assert!(SystemParams::<f64> { coupling: -0.5, detuning: 0.0, n_trunc: 2 }
            .validate()
            .is_err());
        assert!(SystemParams::<f64> { coupling: 0.0, detuning: 1.0, n_trunc: 1 }
            .validate()
            .is_ok());
    }
}
