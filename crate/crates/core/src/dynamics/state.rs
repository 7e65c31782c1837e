//! Density-matrix storage for the two-level exciton x truncated Fock space.
//!
//! Basis ordering: |g,0>, |e,0>, |g,1>, |e,1>, ... so index = 2 n + s with
//! s = 0 for |g>, 1 for |e>.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Flat index of the product state |s, n>.
#[inline]
pub fn state_index(n_photon: usize, excited: bool) -> usize {
    2 * n_photon + excited as usize
}

/// Dense complex matrix over the product basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<F> {
    dim: usize,
    data: Vec<Complex<F>>,
}

impl<F: Scalar> DensityMatrix<F> {
    /// Zero matrix for a Fock space truncated at `n_trunc`.
    pub fn zeros(n_trunc: usize) -> Self {
        let dim = 2 * (n_trunc + 1);
        DensityMatrix {
            dim,
            data: vec![Complex::new(F::zero(), F::zero()); dim * dim],
        }
    }

    /// Pure state |s, n><s, n|.
    pub fn pure(n_trunc: usize, n_photon: usize, excited: bool) -> Self {
        let mut m = Self::zeros(n_trunc);
        let i = state_index(n_photon, excited);
        m.set(i, i, Complex::new(F::one(), F::zero()));
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_trunc(&self) -> usize {
        self.dim / 2 - 1
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<F> {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<F>) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[Complex<F>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<F>] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex<F> {
        let mut tr = Complex::new(F::zero(), F::zero());
        for i in 0..self.dim {
            tr += self.get(i, i);
        }
        tr
    }

    /// max_{ij} |rho_ij - conj(rho_ji)|.
    pub fn hermiticity_drift(&self) -> F {
        let mut worst = F::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Smallest real part among diagonal entries.
    pub fn min_diagonal(&self) -> F {
        let mut min = F::infinity();
        for i in 0..self.dim {
            let v = self.get(i, i).re;
            if v < min {
                min = v;
            }
        }
        min
    }

    /// Largest elementwise modulus of the difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<F> {
        if other.dim != self.dim {
            return Err(Error::Shape {
                op: "max_abs_diff",
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut worst = F::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = (*a - *b).norm();
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    }
}

/// Density matrix plus the time it refers to.
#[derive(Debug, Clone)]
pub struct QDCavityState<F> {
    pub rho: DensityMatrix<F>,
    pub time: F,
}

impl<F: Scalar> QDCavityState<F> {
    /// Ground state with the cavity in vacuum, at t = 0.
    pub fn ground(n_trunc: usize) -> Self {
        QDCavityState {
            rho: DensityMatrix::pure(n_trunc, 0, false),
            time: F::zero(),
        }
    }
}

/// Exciton-only reduced state: coherence P = <e|rho|g> and population
/// N_e = <e|rho|e>.
#[derive(Debug, Clone, Copy)]
pub struct ExcitonState<F> {
    pub p: Complex<F>,
    pub n_e: F,
    pub time: F,
}

impl<F: Scalar> ExcitonState<F> {
    pub fn ground() -> Self {
        ExcitonState {
            p: Complex::new(F::zero(), F::zero()),
            n_e: F::zero(),
            time: F::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_ordering() {
        assert_eq!(state_index(0, false), 0);
        assert_eq!(state_index(0, true), 1);
        assert_eq!(state_index(1, false), 2);
        assert_eq!(state_index(2, true), 5);
    }

    #[test]
    fn pure_state_has_unit_trace() {
        let m: DensityMatrix<f64> = DensityMatrix::pure(3, 2, true);
        assert_eq!(m.trace(), Complex::new(1.0, 0.0));
        assert_eq!(m.hermiticity_drift(), 0.0);
        assert_eq!(m.min_diagonal(), 0.0);
    }

    #[test]
    fn shape_mismatch_detected() {
        let a: DensityMatrix<f64> = DensityMatrix::zeros(2);
        let b: DensityMatrix<f64> = DensityMatrix::zeros(3);
        assert!(a.max_abs_diff(&b).is_err());
    }
}
