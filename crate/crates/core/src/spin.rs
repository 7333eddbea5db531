//! Angular-momentum operators on the spin-j Hilbert space.
//!
//! Basis convention used throughout the crate: the Hilbert space of spin `j`
//! has dimension `d = 2j + 1` and basis index `k = 0..d` labels the state
//! `|j, m⟩` with `m = -j + k`, i.e. `m` ascends with the index. Parity
//! sectors, Liouville vectorization and the classical correspondence all
//! rely on this ordering.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Spin quantum number `j`, stored as the integer `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 1.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Spin { twice: twice as u32 })
    }

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin(0.0));
        }
        Ok(Spin { twice })
    }

    pub fn j(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn twice_j(self) -> u32 {
        self.twice
    }

    /// Hilbert-space dimension `2j + 1`.
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    /// Liouville-space dimension `(2j + 1)^2`.
    pub fn liouville_dim(self) -> usize {
        self.dim() * self.dim()
    }

    /// Magnetic quantum number of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        k as f64 - self.j()
    }

    /// `m + j` for basis index `k`; it is the index itself.
    pub fn is_even_parity(self, k: usize) -> bool {
        k % 2 == 0
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;

    fn try_from(j: f64) -> Result<Self> {
        Spin::new(j)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.j()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Dense complex matrix on the Hilbert space of a given spin.
#[derive(Clone, Debug)]
pub struct Operator {
    spin: Spin,
    matrix: Mat<Complex64>,
}

impl Operator {
    pub fn from_matrix(spin: Spin, matrix: Mat<Complex64>) -> Result<Self> {
        let d = spin.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if matrix.nrows() != d { matrix.nrows() } else { matrix.ncols() },
            });
        }
        Ok(Operator { spin, matrix })
    }

    pub fn from_fn(spin: Spin, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let d = spin.dim();
        Operator { spin, matrix: Mat::from_fn(d, d, f) }
    }

    pub fn identity(spin: Spin) -> Self {
        Self::from_fn(spin, |a, b| if a == b { ONE } else { ZERO })
    }

    pub fn diagonal(spin: Spin, mut f: impl FnMut(usize) -> Complex64) -> Self {
        Self::from_fn(spin, |a, b| if a == b { f(a) } else { ZERO })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<Complex64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Operator { spin: self.spin, matrix: self.matrix.adjoint().to_owned() }
    }

    pub fn mul(&self, rhs: &Operator) -> Self {
        debug_assert_eq!(self.spin, rhs.spin);
        Operator { spin: self.spin, matrix: &self.matrix * &rhs.matrix }
    }

    pub fn add(&self, rhs: &Operator) -> Self {
        Operator { spin: self.spin, matrix: &self.matrix + &rhs.matrix }
    }

    pub fn sub(&self, rhs: &Operator) -> Self {
        Operator { spin: self.spin, matrix: &self.matrix - &rhs.matrix }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Operator {
            spin: self.spin,
            matrix: Mat::from_fn(self.dim(), self.dim(), |a, b| self.matrix[(a, b)] * factor),
        }
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Operator) -> Self {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for b in 0..d {
            for a in 0..d {
                m = m.max(self.matrix[(a, b)].norm());
            }
        }
        m
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|a| (0..d).all(|b| (self.matrix[(a, b)] - self.matrix[(b, a)].conj()).norm() <= tol))
    }
}

/// `J_z = diag(-j, ..., j)`.
pub fn build_jz(spin: Spin) -> Operator {
    Operator::diagonal(spin, |k| Complex64::new(spin.m(k), 0.0))
}

/// Matrix element `<m+1|J_+|m> = sqrt(j(j+1) - m(m+1))`.
pub fn ladder_coefficient(spin: Spin, m: f64) -> f64 {
    let j = spin.j();
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

pub fn build_jplus(spin: Spin) -> Operator {
    Operator::from_fn(spin, |a, b| {
        if a == b + 1 {
            Complex64::new(ladder_coefficient(spin, spin.m(b)), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn build_jminus(spin: Spin) -> Operator {
    build_jplus(spin).adjoint()
}

/// `J_x = (J_+ + J_-) / 2`.
pub fn build_jx(spin: Spin) -> Operator {
    build_jplus(spin).add(&build_jminus(spin)).scale(Complex64::new(0.5, 0.0))
}

/// `J_y = (J_+ - J_-) / (2i)`.
pub fn build_jy(spin: Spin) -> Operator {
    build_jplus(spin).sub(&build_jminus(spin)).scale(Complex64::new(0.0, -0.5))
}

/// Parity `exp(i pi (J_z + j))`, i.e. `diag((-1)^(m + j))`.
pub fn build_parity(spin: Spin) -> Operator {
    Operator::diagonal(spin, |k| if spin.is_even_parity(k) { ONE } else { -ONE })
}
