//! One-period propagators of the damped kicked top.
//!
//! The generator `Λ - i L0` never mixes Liouville basis elements `|a⟩⟨b|`
//! with different `a - b`: the Hamiltonian part is diagonal and the
//! damping moves `|a⟩⟨b|` to `|a-1⟩⟨b-1|`. It therefore splits into
//! `2d - 1` small blocks, one per diagonal line of the density matrix, and
//! is exponentiated block by block. The kick is applied as conjugation
//! by the Hilbert-space unitary `exp(-i H1)`.

use faer::{Mat, Side};
use num_complex::Complex64;

use super::{commutator_superop, dissipator_superop, liouville_index, matrix_exponential, ModelParams, Sector, Superoperator};
use crate::spin::{build_jy, ladder_coefficient, Operator, Spin};
use crate::{Error, Result};

/// The Liouville indices of one diagonal line `a - b = offset` of a
/// density matrix, ordered by ascending `b`.
#[derive(Debug, Clone)]
pub struct DiagonalLine {
    pub offset: isize,
    pub entries: Vec<(usize, usize)>,
    pub indices: Vec<usize>,
}

impl DiagonalLine {
    pub fn all(spin: Spin) -> Vec<DiagonalLine> {
        let d = spin.dim() as isize;
        (-(d - 1)..d)
            .map(|offset| {
                let entries: Vec<(usize, usize)> = (0..d)
                    .filter_map(|b| {
                        let a = b + offset;
                        (0..d).contains(&a).then_some((a as usize, b as usize))
                    })
                    .collect();
                let indices = entries.iter().map(|&(a, b)| liouville_index(d as usize, a, b)).collect();
                DiagonalLine { offset, entries, indices }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `H0 = p J_z + (k0 / 2j) J_z^2`.
pub fn hamiltonian_h0(spin: Spin, p: f64, k0: f64) -> Operator {
    Operator::diagonal(spin, |k| Complex64::new(level_energy(spin, p, k0, k), 0.0))
}

/// `H1 = (k1 / 2j) J_y^2`.
pub fn hamiltonian_h1(spin: Spin, k1: f64) -> Operator {
    let jy = build_jy(spin);
    jy.mul(&jy).scale(Complex64::new(k1 / spin.twice_j() as f64, 0.0))
}

fn level_energy(spin: Spin, p: f64, k0: f64, k: usize) -> f64 {
    let m = spin.m(k);
    p * m + k0 / spin.twice_j() as f64 * m * m
}

/// `<k-1| J_- |k>`.
fn lowering(spin: Spin, k: usize) -> f64 {
    ladder_coefficient(spin, spin.m(k) - 1.0)
}

/// Block of `Λ - i L0` (or of `Λ` alone) on one diagonal line.
fn generator_block(params: &ModelParams, line: &DiagonalLine, with_hamiltonian: bool) -> Mat<Complex64> {
    let spin = params.spin;
    let top = params.top;
    let rate = top.gamma / spin.twice_j() as f64;
    let n = line.len();
    let mut block = Mat::<Complex64>::zeros(n, n);
    for (i, &(a, b)) in line.entries.iter().enumerate() {
        let (ca, cb) = (lowering(spin, a), lowering(spin, b));
        let mut diag = Complex64::new(-rate * (ca * ca + cb * cb), 0.0);
        if with_hamiltonian {
            let de = level_energy(spin, top.p, top.k0, a) - level_energy(spin, top.p, top.k0, b);
            diag -= Complex64::new(0.0, de);
        }
        block[(i, i)] = diag;
        if i > 0 {
            block[(i - 1, i)] = Complex64::new(2.0 * rate * ca * cb, 0.0);
        }
    }
    block
}

/// Dense generator `Λ - i L0`, assembled from the spin operators.
pub fn generator(params: &ModelParams) -> Superoperator {
    let spin = params.spin;
    let h0 = hamiltonian_h0(spin, params.top.p, params.top.k0);
    dissipator_superop(spin, params.top.gamma).sub(&commutator_superop(&h0).scale(Complex64::new(0.0, 1.0)))
}

/// `exp(-i (k1/2j) J_y^2)`. `J_y^2` is real symmetric and keeps parity, so
/// each parity block is diagonalized separately and the result is exactly
/// parity-block-diagonal.
pub fn kick_unitary(spin: Spin, k1: f64) -> Result<Operator> {
    let d = spin.dim();
    let jy = build_jy(spin);
    let jy2 = jy.mul(&jy);
    let angle = k1 / spin.twice_j() as f64;
    let mut u = Mat::<Complex64>::zeros(d, d);
    for parity in 0..2 {
        let idx: Vec<usize> = (parity..d).step_by(2).collect();
        if idx.is_empty() {
            continue;
        }
        let n = idx.len();
        let sub = Mat::<f64>::from_fn(n, n, |r, c| jy2.get(idx[r], idx[c]).re);
        let eig = sub.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
        let vecs = eig.U();
        let vals: Vec<f64> = eig.S().column_vector().iter().copied().collect();
        let phases: Vec<Complex64> = vals.iter().map(|&mu| Complex64::new(0.0, -angle * mu).exp()).collect();
        for r in 0..n {
            for c in 0..n {
                let mut z = Complex64::new(0.0, 0.0);
                for (k, ph) in phases.iter().enumerate() {
                    z += *ph * (vecs[(r, k)] * vecs[(c, k)]);
                }
                u[(idx[r], idx[c])] = z;
            }
        }
    }
    Operator::from_matrix(spin, u)
}

/// Floquet operator of the isolated top, `F = exp(-i H1) exp(-i H0)`.
pub fn isolated_floquet(spin: Spin, p: f64, k0: f64, k1: f64) -> Result<Operator> {
    let kick = kick_unitary(spin, k1)?;
    let d = spin.dim();
    let phases: Vec<Complex64> = (0..d).map(|k| Complex64::new(0.0, -level_energy(spin, p, k0, k)).exp()).collect();
    let m = Mat::from_fn(d, d, |r, c| kick.get(r, c) * phases[c]);
    Operator::from_matrix(spin, m)
}

/// Sorted eigenphases `arg λ ∈ (-π, π]` of the isolated Floquet operator
/// restricted to one Hilbert-space parity sector (`Full` takes both).
pub fn isolated_eigenphases(spin: Spin, p: f64, k0: f64, k1: f64, sector: Sector) -> Result<Vec<f64>> {
    let f = isolated_floquet(spin, p, k0, k1)?;
    let idx: Vec<usize> = (0..spin.dim())
        .filter(|&k| match sector {
            Sector::Positive => spin.is_even_parity(k),
            Sector::Negative => !spin.is_even_parity(k),
            Sector::Full => true,
        })
        .collect();
    if idx.is_empty() {
        return Ok(Vec::new());
    }
    let block = Mat::from_fn(idx.len(), idx.len(), |r, c| f.get(idx[r], idx[c]));
    let eig = block.eigenvalues().map_err(|_| Error::Eigensolver)?;
    let mut phases: Vec<f64> = eig.iter().map(|z| z.arg()).collect();
    if phases.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver);
    }
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// `exp(Λ)` as a dense superoperator.
pub fn dissipator_exponential(spin: Spin, gamma: f64) -> Result<Superoperator> {
    let params = ModelParams { top: super::TopParams { p: 0.0, k0: 0.0, k1: 0.0, gamma }, spin };
    let n = spin.liouville_dim();
    let mut out = Mat::<Complex64>::zeros(n, n);
    for line in DiagonalLine::all(spin) {
        let e = matrix_exponential(generator_block(&params, &line, false).as_ref())?;
        for (i, &ri) in line.indices.iter().enumerate() {
            for (k, &ck) in line.indices.iter().enumerate() {
                out[(ri, ck)] = e[(i, k)];
            }
        }
    }
    Superoperator::from_matrix(spin, out)
}

/// Dissipative Floquet superoperator `D = exp(-i L1) exp(Λ - i L0)`.
pub fn dissipative_floquet(params: &ModelParams) -> Result<Superoperator> {
    params.top.validate()?;
    params.warn_if_unvalidated();
    let spin = params.spin;
    let d = spin.dim();
    let n = spin.liouville_dim();
    let u = kick_unitary(spin, params.top.k1)?;
    let um = u.matrix();

    let mut out = Mat::<Complex64>::zeros(n, n);
    for line in DiagonalLine::all(spin) {
        let e = matrix_exponential(generator_block(params, &line, true).as_ref())?;
        // columns of the kick channel restricted to this line:
        // vec(u |a><b| u^dagger)[x + d y] = u[x, a] conj(u[y, b])
        let kick_cols = Mat::from_fn(n, line.len(), |r, i| {
            let (a, b) = line.entries[i];
            um[(r % d, a)] * um[(r / d, b)].conj()
        });
        let cols = &kick_cols * &e;
        for (i, &ci) in line.indices.iter().enumerate() {
            out.col_mut(ci).copy_from(cols.col(i));
        }
    }
    Superoperator::from_matrix(spin, out)
}

/// Split-step approximation `exp(Λ) ∘ (rho -> F rho F^dagger)`.
pub fn decoupled_floquet(params: &ModelParams) -> Result<Superoperator> {
    params.top.validate()?;
    params.warn_if_unvalidated();
    let spin = params.spin;
    let d = spin.dim();
    let n = spin.liouville_dim();
    let f = isolated_floquet(spin, params.top.p, params.top.k0, params.top.k1)?;
    let fm = f.matrix();

    let mut out = Mat::<Complex64>::zeros(n, n);
    for line in DiagonalLine::all(spin) {
        let e = matrix_exponential(generator_block(params, &line, false).as_ref())?;
        // rows of the unitary channel restricted to this line
        let unitary_rows = Mat::from_fn(line.len(), n, |i, col| {
            let (a, b) = line.entries[i];
            fm[(a, col % d)] * fm[(b, col / d)].conj()
        });
        let rows = &e * &unitary_rows;
        for (i, &ri) in line.indices.iter().enumerate() {
            out.row_mut(ri).copy_from(rows.row(i));
        }
    }
    Superoperator::from_matrix(spin, out)
}
