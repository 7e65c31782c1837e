//! Full-Liouvillian propagation over the truncated product space.
//!
//! drho/dt = i [rho, H0(t)] - Gamma(t) [s_ee, s_ee rho] + Gamma*(t) [s_ee, rho s_ee]
//! with H0(t) = g (s_eg a e^{i Delta t} + a^dag s_ge e^{-i Delta t})
//!            + f(t) (s_eg e^{i delta_L t} + s_ge e^{-i delta_L t}).

use num_complex::Complex;
use rayon::prelude::*;

use crate::drive::{envelope, PulseParams};
use crate::error::{Error, Result};
use crate::kernel::KernelTable;
use crate::scalar::Scalar;

use super::rk4::Rk4;
use super::state::{state_index, DensityMatrix, QDCavityState};
use super::{
    excitation_number, GridSpec, InvariantReport, SnapshotObserver, StateRecorder, SystemParams,
    Trajectory,
};

/// Add `i (rho H - H rho)` restricted to the single entry H[i][j] = h.
#[inline]
fn add_commutator_entry<F: Scalar>(
    out: &mut [Complex<F>],
    rho: &[Complex<F>],
    dim: usize,
    i: usize,
    j: usize,
    h: Complex<F>,
) {
    let ih = Complex::new(-h.im, h.re); // i * h
    // i rho H: column j accumulates i h rho[:, i].
    for r in 0..dim {
        let v = rho[r * dim + i];
        let o = &mut out[r * dim + j];
        o.re += ih.re * v.re - ih.im * v.im;
        o.im += ih.re * v.im + ih.im * v.re;
    }
    // -i H rho: row i accumulates -i h rho[j, :].
    let (row_rho, row_out) = (&rho[j * dim..(j + 1) * dim], &mut out[i * dim..(i + 1) * dim]);
    for (o, v) in row_out.iter_mut().zip(row_rho) {
        o.re -= ih.re * v.re - ih.im * v.im;
        o.im -= ih.re * v.im + ih.im * v.re;
    }
}

/// Upper diagonal of H0(t): in the interleaved |g,n>,|e,n> ordering both the
/// drive (|e,n> <-> |g,n>) and the exchange (|e,n> <-> |g,n+1>) couple
/// adjacent indices, so the Hamiltonian is tridiagonal with zero diagonal.
/// `h[k] = H[k, k+1]`; the lower diagonal is its conjugate.
fn upper_diagonal<F: Scalar>(
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    t: F,
    h: &mut [Complex<F>],
) {
    let dim = 2 * (sys.n_trunc + 1);
    debug_assert_eq!(h.len(), dim - 1);
    let f = envelope(pulse, t);
    let drive = {
        // H[2n+1, 2n] = f e^{i dL t}  =>  h[2n] = conj of that
        let phase = pulse.detuning * t;
        Complex::new(f * phase.cos(), -(f * phase.sin()))
    };
    let jc = {
        let phase = sys.detuning * t;
        Complex::new(phase.cos(), phase.sin())
    };
    for n in 0..=sys.n_trunc {
        h[2 * n] = drive;
        if n < sys.n_trunc {
            let amp = sys.coupling * F::of(((n + 1) as f64).sqrt());
            h[2 * n + 1] = Complex::new(jc.re * amp, jc.im * amp);
        }
    }
}

/// Full generator, overwriting `out` row by row (rows in parallel):
/// `out = i [rho, H] + D(rho)` for tridiagonal `H` given by its upper
/// diagonal and the pure-dephasing dissipator with coefficient `gamma`.
/// Same arithmetic as [`add_coherent`] + [`add_dissipator`], restructured
/// for sequential memory access in the propagation hot loop.
fn generator_rows<F: Scalar>(
    h: &[Complex<F>],
    hc: &[Complex<F>],
    gamma: Complex<F>,
    dim: usize,
    rho: &[Complex<F>],
    out: &mut [Complex<F>],
) {
    let zero = Complex::new(F::zero(), F::zero());
    let gc = gamma.conj();
    out.par_chunks_mut(dim).enumerate().for_each(|(r, orow)| {
        let row = &rho[r * dim..(r + 1) * dim];
        // Missing neighbor rows alias `row` with a zero coefficient.
        let (h_up, above) = if r > 0 {
            (hc[r - 1], &rho[(r - 1) * dim..r * dim])
        } else {
            (zero, row)
        };
        let (h_dn, below) = if r + 1 < dim {
            (h[r], &rho[(r + 1) * dim..(r + 2) * dim])
        } else {
            (zero, row)
        };
        // (rho H)[r][j] = row[j-1] h[j-1] + row[j+1] conj(h[j])
        // (H rho)[r][j] = h[r] below[j] + conj(h[r-1]) above[j]
        let edge = |j: usize, rho_h: Complex<F>| {
            let acc = rho_h - h_dn * below[j] - h_up * above[j];
            Complex::new(-acc.im, acc.re)
        };
        orow[0] = edge(0, row[1] * hc[0]);
        for j in 1..dim - 1 {
            let acc =
                row[j - 1] * h[j - 1] + row[j + 1] * hc[j] - h_dn * below[j] - h_up * above[j];
            orow[j].re = -acc.im;
            orow[j].im = acc.re;
        }
        orow[dim - 1] = edge(dim - 1, row[dim - 2] * h[dim - 2]);
        // Dephasing touches exciton-ground coherences only: odd rows decay
        // on even columns with gamma, even rows on odd columns with gamma*.
        if gamma.re != F::zero() || gamma.im != F::zero() {
            let (start, g) = if r % 2 == 1 { (0, gamma) } else { (1, gc) };
            let mut j = start;
            while j < dim {
                let d = g * row[j];
                orow[j].re -= d.re;
                orow[j].im -= d.im;
                j += 2;
            }
        }
    });
}

/// Coherent part: adds `i [rho, H0(t)]` into `out`.
fn add_coherent<F: Scalar>(
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    t: F,
    rho: &[Complex<F>],
    out: &mut [Complex<F>],
) {
    let dim = 2 * (sys.n_trunc + 1);
    if sys.coupling > F::zero() {
        let phase = sys.detuning * t;
        let jc = Complex::new(phase.cos(), phase.sin());
        for n in 0..sys.n_trunc {
            let amp = sys.coupling * F::of(((n + 1) as f64).sqrt());
            let h = Complex::new(jc.re * amp, jc.im * amp);
            let i = state_index(n, true);
            let j = state_index(n + 1, false);
            add_commutator_entry(out, rho, dim, i, j, h);
            add_commutator_entry(out, rho, dim, j, i, h.conj());
        }
    }
    let f = envelope(pulse, t);
    if f > F::zero() {
        let phase = pulse.detuning * t;
        let h = Complex::new(f * phase.cos(), f * phase.sin());
        for n in 0..=sys.n_trunc {
            let i = state_index(n, true);
            let j = state_index(n, false);
            add_commutator_entry(out, rho, dim, i, j, h);
            add_commutator_entry(out, rho, dim, j, i, h.conj());
        }
    }
}

/// Dissipative part: e<->g coherences decay with Gamma(t); populations and
/// same-QD-state blocks are untouched.
#[inline]
fn add_dissipator<F: Scalar>(
    gamma: Complex<F>,
    dim: usize,
    rho: &[Complex<F>],
    out: &mut [Complex<F>],
) {
    let gc = gamma.conj();
    let mut e_row = 1;
    while e_row < dim {
        let base = e_row * dim;
        let mut g_col = 0;
        while g_col < dim {
            let idx = base + g_col;
            let v = rho[idx];
            let o = &mut out[idx];
            o.re -= gamma.re * v.re - gamma.im * v.im;
            o.im -= gamma.re * v.im + gamma.im * v.re;
            let idx2 = g_col * dim + e_row;
            let v2 = rho[idx2];
            let o2 = &mut out[idx2];
            o2.re -= gc.re * v2.re - gc.im * v2.im;
            o2.im -= gc.re * v2.im + gc.im * v2.re;
            g_col += 2;
        }
        e_row += 2;
    }
}

/// i [rho, H0(t)] as a standalone operation.
pub fn hamiltonian_apply<F: Scalar>(
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    t: F,
    rho: &QDCavityState<F>,
) -> Result<DensityMatrix<F>> {
    sys.validate()?;
    let dim = 2 * (sys.n_trunc + 1);
    if rho.rho.dim() != dim {
        return Err(Error::Shape {
            op: "hamiltonian_apply",
            expected: dim,
            got: rho.rho.dim(),
        });
    }
    let mut out = DensityMatrix::zeros(sys.n_trunc);
    add_coherent(sys, pulse, t, rho.rho.data(), out.data_mut());
    Ok(out)
}

/// The time-local pure-dephasing term with coefficient `gamma` = Gamma(t).
pub fn dissipator_apply<F: Scalar>(
    gamma: Complex<F>,
    rho: &QDCavityState<F>,
) -> DensityMatrix<F> {
    let mut out = DensityMatrix::zeros(rho.rho.n_trunc());
    add_dissipator(gamma, rho.rho.dim(), rho.rho.data(), out.data_mut());
    out
}

fn validate_span<F: Scalar>(grid: &GridSpec<F>, table: &KernelTable<F>) -> Result<usize> {
    let n_steps = grid.validate()?;
    let slack = grid.dt * F::of(1e-6);
    if grid.t_end > table.t_max() + slack || grid.t_start < -slack {
        return Err(Error::Domain {
            op: "integrate",
            reason: format!(
                "span [{}, {}] exceeds kernel table range [0, {}]",
                grid.t_start,
                grid.t_end,
                table.t_max()
            ),
        });
    }
    Ok(n_steps)
}

/// Propagate the full density matrix, reporting snapshots to `observer`.
pub fn integrate<F: Scalar>(
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
            op: "integrate",
            expected: dim,
            got: rho0.rho.dim(),
        });
    }
    let n_steps = validate_span(grid, table)?;

    let mut rho = rho0.rho.clone();
    let mut rk = Rk4::new(dim * dim);
    let mut report = InvariantReport::default();
    let initial_excitation = excitation_number(&rho);

    let mut h = vec![Complex::new(F::zero(), F::zero()); dim - 1];
    let mut hc = h.clone();
    let mut deriv = |t: F, y: &[Complex<F>], out: &mut [Complex<F>]| {
        upper_diagonal(sys, pulse, t, &mut h);
        for (c, v) in hc.iter_mut().zip(&h) {
            *c = v.conj();
        }
        let gamma = table.gamma_interp(t);
        generator_rows(&h, &hc, gamma, dim, y, out);
    };

    for step in 0..=n_steps {
        let t = grid.t_start + F::of(step as f64) * grid.dt;
        if step % grid.stride == 0 || step == n_steps {
            report.merge_state(t, &rho, initial_excitation)?;
            observer.record(t, &rho);
        }
        if step < n_steps {
            rk.step(&mut deriv, t, grid.dt, rho.data_mut());
        }
    }
    Ok(report)
}

/// Convenience wrapper that collects snapshots into a [`Trajectory`].
pub fn integrate_recorded<F: Scalar>(
    sys: &SystemParams<F>,
    pulse: &PulseParams<F>,
    table: &KernelTable<F>,
    rho0: &QDCavityState<F>,
    grid: &GridSpec<F>,
) -> Result<Trajectory<F>> {
    let mut rec = StateRecorder::new();
    let report = integrate(sys, pulse, table, rho0, grid, &mut rec)?;
    Ok(Trajectory {
        times: rec.times,
        states: rec.states,
        report,
    })
}
