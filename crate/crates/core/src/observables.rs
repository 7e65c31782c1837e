//! Photon-statistics observables extracted from density-matrix snapshots.

use num_complex::Complex;

use crate::dynamics::{state_index, DensityMatrix, SnapshotObserver};
use crate::scalar::Scalar;

/// Mean photon numbers below this are treated as vacuum: the Mandel
/// parameter and g2(0) are undefined there.
pub const EPS_MEAN: f64 = 1e-12;

/// Photon number distribution p(n) = rho_{en,en} + rho_{gn,gn}.
pub fn photon_distribution<F: Scalar>(rho: &DensityMatrix<F>) -> Vec<F> {
    (0..=rho.n_trunc())
        .map(|n| {
            rho.get(state_index(n, false), state_index(n, false)).re
                + rho.get(state_index(n, true), state_index(n, true)).re
        })
        .collect()
}

/// <n> from a photon number distribution.
pub fn mean_photon<F: Scalar>(p: &[F]) -> F {
    p.iter()
        .enumerate()
        .fold(F::zero(), |acc, (n, &v)| acc + F::of(n as f64) * v)
}

/// <n^2> from a photon number distribution.
pub fn second_moment<F: Scalar>(p: &[F]) -> F {
    p.iter()
        .enumerate()
        .fold(F::zero(), |acc, (n, &v)| acc + F::of((n * n) as f64) * v)
}

/// Mandel parameter M = (<n^2> - <n>^2) / <n> - 1, undefined near vacuum.
pub fn mandel<F: Scalar>(p: &[F]) -> Option<F> {
    let mean = mean_photon(p);
    if mean.to_f64() < EPS_MEAN {
        return None;
    }
    let var = second_moment(p) - mean * mean;
    Some(var / mean - F::one())
}

/// Equal-time second-order correlation
/// g2(0) = sum_n n (n-1) p(n) / (sum_n n p(n))^2, undefined near vacuum.
pub fn g2_zero<F: Scalar>(p: &[F]) -> Option<F> {
    let mean = mean_photon(p);
    if mean.to_f64() < EPS_MEAN {
        return None;
    }
    let num = p.iter().enumerate().fold(F::zero(), |acc, (n, &v)| {
        acc + F::of((n * (n - n.min(1))) as f64) * v
    });
    Some(num / (mean * mean))
}

/// |M - <n> (g2 - 1)|: identically zero in exact arithmetic, a roundoff
/// diagnostic in practice. Undefined near vacuum.
pub fn g2_mandel_residual<F: Scalar>(p: &[F]) -> Option<F> {
    let m = mandel(p)?;
    let g2 = g2_zero(p)?;
    let mean = mean_photon(p);
    Some((m - mean * (g2 - F::one())).abs())
}

/// QD excited-state population summed over photon numbers.
pub fn exciton_population<F: Scalar>(rho: &DensityMatrix<F>) -> F {
    (0..=rho.n_trunc()).fold(F::zero(), |acc, n| {
        acc + rho.get(state_index(n, true), state_index(n, true)).re
    })
}

/// The single-excitation exciton-photon coherence <e,0|rho|g,1>.
pub fn polarization_one_photon<F: Scalar>(rho: &DensityMatrix<F>) -> Complex<F> {
    rho.get(state_index(0, true), state_index(1, false))
}

/// Sum over n of the drive coherences <e,n|rho|g,n>.
pub fn polarization_drive<F: Scalar>(rho: &DensityMatrix<F>) -> Complex<F> {
    (0..=rho.n_trunc()).fold(Complex::new(F::zero(), F::zero()), |acc, n| {
        acc + rho.get(state_index(n, true), state_index(n, false))
    })
}

/// One snapshot's worth of derived quantities.
#[derive(Debug, Clone)]
pub struct ObservableRecord<F> {
    pub t: F,
    /// QD excited-state population.
    pub n_e: F,
    /// 2 n_e - 1.
    pub inversion: F,
    /// Drive coherence sum_n <e,n|rho|g,n>.
    pub p_drive: Complex<F>,
    /// Exchange coherence <e,0|rho|g,1>.
    pub p_exchange: Complex<F>,
    pub n_mean: F,
    pub n2_mean: F,
    pub mandel: Option<F>,
    pub g2: Option<F>,
    /// Full photon number distribution.
    pub p: Vec<F>,
}

impl<F: Scalar> ObservableRecord<F> {
    pub fn from_state(t: F, rho: &DensityMatrix<F>) -> Self {
        let p = photon_distribution(rho);
        let n_e = exciton_population(rho);
        ObservableRecord {
            t,
            n_e,
            inversion: F::of(2.0) * n_e - F::one(),
            p_drive: polarization_drive(rho),
            p_exchange: polarization_one_photon(rho),
            n_mean: mean_photon(&p),
            n2_mean: second_moment(&p),
            mandel: mandel(&p),
            g2: g2_zero(&p),
            p,
        }
    }
}

/// Observer that reduces snapshots to [`ObservableRecord`]s, keeping memory
/// independent of the Fock truncation squared.
#[derive(Debug, Default)]
pub struct ObservableRecorder<F> {
    pub records: Vec<ObservableRecord<F>>,
}

impl<F: Scalar> ObservableRecorder<F> {
    pub fn new() -> Self {
        ObservableRecorder { records: Vec::new() }
    }
}

impl<F: Scalar> SnapshotObserver<F> for ObservableRecorder<F> {
    fn record(&mut self, t: F, rho: &DensityMatrix<F>) {
        self.records.push(ObservableRecord::from_state(t, rho));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poisson(mean: f64, n_max: usize) -> Vec<f64> {
        let mut p = Vec::with_capacity(n_max + 1);
        let mut v = (-mean).exp();
        for n in 0..=n_max {
            p.push(v);
            v *= mean / (n + 1) as f64;
        }
        p
    }

    #[test]
    fn poisson_light_is_neutral() {
        // M = 0 and g2 = 1 for a Poisson distribution; truncation at 60
        // leaves a tail below 1e-20 for mean 2.
        let p = poisson(2.0, 60);
        assert!(mandel(&p).unwrap().abs() < 1e-12);
        assert!((g2_zero(&p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_photon_fock_state() {
        let mut p = vec![0.0; 5];
        p[1] = 1.0;
        assert_eq!(mandel(&p).unwrap(), -1.0);
        assert_eq!(g2_zero(&p).unwrap(), 0.0);
    }

    #[test]
    fn two_photon_fock_state() {
        let mut p = vec![0.0; 5];
        p[2] = 1.0;
        assert_eq!(g2_zero(&p).unwrap(), 0.5);
        assert_eq!(mandel(&p).unwrap(), -1.0);
        assert!(g2_mandel_residual(&p).unwrap() < 1e-15);
    }

    #[test]
    fn thermal_light_is_super_poissonian() {
        // Geometric distribution with mean 1: p(n) = (1/2)^{n+1}; M = <n> = 1
        // and g2 = 2.
        let p: Vec<f64> = (0..1000).map(|n| 0.5f64.powi(n as i32 + 1)).collect();
        assert!((mandel(&p).unwrap() - 1.0).abs() < 1e-10);
        assert!((g2_zero(&p).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn vacuum_statistics_are_undefined() {
        let p = vec![1.0, 0.0, 0.0];
        assert!(mandel(&p).is_none());
        assert!(g2_zero(&p).is_none());
        assert!(g2_mandel_residual(&p).is_none());
    }

    #[test]
    fn record_from_pure_state() {
        let rho: DensityMatrix<f64> = DensityMatrix::pure(3, 1, false);
        let r = ObservableRecord::from_state(0.0, &rho);
        assert_eq!(r.n_e, 0.0);
        assert_eq!(r.inversion, -1.0);
        assert_eq!(r.n_mean, 1.0);
        assert_eq!(r.mandel, Some(-1.0));
        assert_eq!(r.g2, Some(0.0));
    }

    proptest! {
        #[test]
        fn mandel_g2_identity_holds(weights in proptest::collection::vec(0.0f64..1.0, 2..12)) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 1e-6);
            let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
            if let Some(res) = g2_mandel_residual(&p) {
                prop_assert!(res < 1e-10, "residual {res}");
            }
        }

        #[test]
        fn mean_bounded_by_truncation(weights in proptest::collection::vec(0.0f64..1.0, 2..12)) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 1e-6);
            let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let mean = mean_photon(&p);
            prop_assert!(mean >= 0.0 && mean <= (p.len() - 1) as f64 + 1e-12);
        }
    }
}
