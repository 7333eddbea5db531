use std::fmt;
use std::str::FromStr;

use faer::MatRef;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Eigenvalues with modulus below this are numerical noise.
pub const DEFAULT_EPSILON: f64 = 1e-16;

/// Eigenvalues this close to the negative real axis have a
/// branch-ambiguous eigenphase and are counted as a diagnostic.
pub const BRANCH_CUT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Positive,
    Negative,
    Full,
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Positive => "positive",
            Sector::Negative => "negative",
            Sector::Full => "full",
        })
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "positive" | "+" | "even" => Ok(Sector::Positive),
            "negative" | "-" | "odd" => Ok(Sector::Negative),
            "full" | "both" => Ok(Sector::Full),
            other => Err(Error::InvalidParameter(format!("unknown sector `{other}`"))),
        }
    }
}

/// Complex spectrum of a propagator together with its eigenphases
/// `ln|λ| + i Arg λ`, `Arg ∈ (-π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub eigenphases: Vec<Complex64>,
    pub sector: Sector,
    /// Eigenvalues dropped by [`precision_filter`].
    pub n_filtered: usize,
    /// Eigenvalues within [`BRANCH_CUT_TOL`] of the negative real axis.
    pub branch_cut_count: usize,
}

impl ComplexSpectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<Complex64>, sector: Sector) -> Self {
        // canonical order: decreasing modulus, then increasing argument
        eigenvalues.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(a.arg().total_cmp(&b.arg())));
        let eigenphases = eigenvalues.iter().map(|&z| eigenphase(z)).collect();
        let branch_cut_count = eigenvalues.iter().filter(|z| z.re < 0.0 && z.im.abs() < BRANCH_CUT_TOL).count();
        ComplexSpectrum { eigenvalues, eigenphases, sector, n_filtered: 0, branch_cut_count }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Number of eigenvalues within `tol` of 1.
    pub fn count_near_one(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|z| (*z - Complex64::new(1.0, 0.0)).norm() <= tol).count()
    }
}

/// Principal complex logarithm, with the argument on `(-π, π]`.
pub fn eigenphase(z: Complex64) -> Complex64 {
    let mut arg = z.im.atan2(z.re);
    if arg == -std::f64::consts::PI {
        arg = std::f64::consts::PI;
    }
    Complex64::new(z.norm().ln(), arg)
}

/// Eigenvalues of a dense square matrix (eigenvectors are not formed).
pub fn spectrum(matrix: MatRef<'_, Complex64>, sector: Sector) -> Result<ComplexSpectrum> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
    }
    if matrix.col_iter().any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::NonFinite("spectrum input"));
    }
    let eigenvalues = matrix.eigenvalues().map_err(|_| Error::Eigensolver)?;
    if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver);
    }
    Ok(ComplexSpectrum::from_eigenvalues(eigenvalues, sector))
}

/// Drops eigenvalues with `|λ| < epsilon`; returns the kept spectrum and
/// the dropped fraction `N_ε / N`.
pub fn precision_filter(spec: &ComplexSpectrum, epsilon: f64) -> Result<(ComplexSpectrum, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if spec.eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("precision filter input"));
    }
    let total = spec.len() + spec.n_filtered;
    let (mut eigenvalues, mut eigenphases) = (Vec::new(), Vec::new());
    for (&z, &phi) in spec.eigenvalues.iter().zip(&spec.eigenphases) {
        if z.norm() >= epsilon {
            eigenvalues.push(z);
            eigenphases.push(phi);
        }
    }
    let n_filtered = total - eigenvalues.len();
    let fraction = if total == 0 { 0.0 } else { n_filtered as f64 / total as f64 };
    let branch_cut_count = eigenvalues.iter().filter(|z| z.re < 0.0 && z.im.abs() < BRANCH_CUT_TOL).count();
    Ok((ComplexSpectrum { eigenvalues, eigenphases, sector: spec.sector, n_filtered, branch_cut_count }, fraction))
}
