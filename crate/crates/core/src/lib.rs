//! Phonon-dressed exciton-photon dynamics for a driven quantum dot in a
//! cavity.
//!
//! The crate is organized as a pipeline:
//! material parameters -> spectral density -> bath kernel K(t) and its
//! running integral Gamma(t) -> time-local master-equation propagation ->
//! photon-statistics observables, with a scenario layer that wires the
//! pieces together from JSON configs.
//!
//! Everything numeric is generic over [`scalar::Scalar`] (f32 or f64); the
//! aliases below fix f64 for ordinary use.

pub mod drive;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod material;
pub mod observables;
pub mod quad;
pub mod scalar;
pub mod scenario;
pub mod units;

/// Default scalar for production runs.
pub type Real = f64;

pub type MaterialParams = material::MaterialParams<Real>;
pub type SpectralModel = material::SpectralModel<Real>;
pub type KernelTable = kernel::KernelTable<Real>;
pub type PulseParams = drive::PulseParams<Real>;
pub type SystemParams = dynamics::SystemParams<Real>;
pub type GridSpec = dynamics::GridSpec<Real>;
pub type DensityMatrix = dynamics::DensityMatrix<Real>;
pub type QDCavityState = dynamics::QDCavityState<Real>;
pub type ExcitonState = dynamics::ExcitonState<Real>;
pub type ObservableRecord = observables::ObservableRecord<Real>;
