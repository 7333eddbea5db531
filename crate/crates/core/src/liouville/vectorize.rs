use faer::Mat;
use num_complex::Complex64;

use crate::spin::{build_jminus, build_jplus, Operator, Spin};
use crate::{Error, Result};

/// Position of `rho[row, col]` in the column-stacked vector.
#[inline]
pub fn liouville_index(dim: usize, row: usize, col: usize) -> usize {
    row + dim * col
}

pub fn vectorize(rho: &Operator) -> Vec<Complex64> {
    let d = rho.dim();
    let mut v = Vec::with_capacity(d * d);
    for col in 0..d {
        for row in 0..d {
            v.push(rho.get(row, col));
        }
    }
    v
}

pub fn devectorize(spin: Spin, v: &[Complex64]) -> Result<Operator> {
    let d = spin.dim();
    if v.len() != d * d {
        return Err(Error::DimensionMismatch { expected: d * d, found: v.len() });
    }
    Ok(Operator::from_fn(spin, |row, col| v[liouville_index(d, row, col)]))
}

/// Dense linear map on vectorized density matrices of a given spin.
#[derive(Clone, Debug)]
pub struct Superoperator {
    spin: Spin,
    matrix: Mat<Complex64>,
}

impl Superoperator {
    pub fn from_matrix(spin: Spin, matrix: Mat<Complex64>) -> Result<Self> {
        let n = spin.liouville_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Superoperator { spin, matrix })
    }

    pub fn zeros(spin: Spin) -> Self {
        let n = spin.liouville_dim();
        Superoperator { spin, matrix: Mat::zeros(n, n) }
    }

    pub fn identity(spin: Spin) -> Self {
        let n = spin.liouville_dim();
        Superoperator { spin, matrix: Mat::identity(n, n) }
    }

    /// The map `rho -> left * rho * right`, i.e. `right^T ⊗ left`.
    pub fn sandwich(left: &Operator, right: &Operator) -> Self {
        let spin = left.spin();
        let d = spin.dim();
        let n = d * d;
        let (l, r) = (left.matrix(), right.matrix());
        let matrix = Mat::from_fn(n, n, |i, k| {
            let (a, b) = (i % d, i / d);
            let (c, e) = (k % d, k / d);
            l[(a, c)] * r[(e, b)]
        });
        Superoperator { spin, matrix }
    }

    /// The unitary channel `rho -> u rho u^dagger`.
    pub fn conjugation(u: &Operator) -> Self {
        Self::sandwich(u, &u.adjoint())
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<Complex64> {
        self.matrix
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(v.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, &vk) in v.iter().enumerate() {
            if vk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(k);
            for (o, &m) in out.iter_mut().zip(col.iter()) {
                *o += m * vk;
            }
        }
        out
    }

    /// Action on an operator: `devec(S vec(rho))`.
    pub fn apply_to(&self, rho: &Operator) -> Operator {
        let v = self.apply(&vectorize(rho));
        devectorize(self.spin, &v).expect("dimension fixed by construction")
    }

    /// Row vector `w^dagger S`, returned as the coefficients of `(S^dagger w)^*`.
    pub fn left_apply(&self, w: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(w.len(), n);
        (0..n)
            .map(|k| self.matrix.col(k).iter().zip(w).map(|(&m, &wi)| wi.conj() * m).sum())
            .collect()
    }

    pub fn mul(&self, rhs: &Superoperator) -> Self {
        Superoperator { spin: self.spin, matrix: &self.matrix * &rhs.matrix }
    }

    pub fn add(&self, rhs: &Superoperator) -> Self {
        Superoperator { spin: self.spin, matrix: &self.matrix + &rhs.matrix }
    }

    pub fn sub(&self, rhs: &Superoperator) -> Self {
        Superoperator { spin: self.spin, matrix: &self.matrix - &rhs.matrix }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let n = self.dim();
        Superoperator { spin: self.spin, matrix: Mat::from_fn(n, n, |i, k| self.matrix[(i, k)] * factor) }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.norm_max()
    }
}

/// `rho -> [h, rho]`.
pub fn commutator_superop(h: &Operator) -> Superoperator {
    let id = Operator::identity(h.spin());
    Superoperator::sandwich(h, &id).sub(&Superoperator::sandwich(&id, h))
}

/// Superradiant damping `rho -> (gamma / 2j) (2 J- rho J+ - {J+ J-, rho})`.
pub fn dissipator_superop(spin: Spin, gamma: f64) -> Superoperator {
    if gamma == 0.0 {
        return Superoperator::zeros(spin);
    }
    let (jp, jm) = (build_jplus(spin), build_jminus(spin));
    let jpjm = jp.mul(&jm);
    let id = Operator::identity(spin);
    let rate = Complex64::new(gamma / spin.twice_j() as f64, 0.0);
    let jump = Superoperator::sandwich(&jm, &jp).scale(Complex64::new(2.0, 0.0));
    let anti = Superoperator::sandwich(&jpjm, &id).add(&Superoperator::sandwich(&id, &jpjm));
    jump.sub(&anti).scale(rate)
}
