//! Liouville-space machinery for the damped kicked top.
//!
//! Density matrices are vectorized by column stacking: entry `rho[a, b]`
//! sits at index `a + d * b` (see [`liouville_index`]). Under this
//! convention `vec(A rho B) = (B^T ⊗ A) vec(rho)`, which is what
//! [`Superoperator::sandwich`] builds.

mod expm;
mod floquet;
mod parity;
mod spectrum;
mod vectorize;

pub use expm::matrix_exponential;
pub use floquet::{
    decoupled_floquet, dissipative_floquet, dissipator_exponential, generator, hamiltonian_h0,
    hamiltonian_h1, isolated_eigenphases, isolated_floquet, kick_unitary, DiagonalLine,
};
pub use parity::{parity_block_dims, parity_sectors, sector_indices, ParityBlocks, SectorMatrix, PARITY_LEAK_TOL};
pub use spectrum::{
    eigenphase, precision_filter, spectrum, ComplexSpectrum, Sector, BRANCH_CUT_TOL, DEFAULT_EPSILON,
};
pub use vectorize::{
    commutator_superop, devectorize, dissipator_superop, liouville_index, vectorize,
    Superoperator,
};

use serde::{Deserialize, Serialize};

use crate::spin::Spin;
use crate::{Error, Result};

/// Upper end of the dissipation range in which the numerical spectrum is
/// trusted; beyond it eigenvalues sink below machine precision.
pub const VALIDATED_GAMMA_MAX: f64 = 0.4;

/// Coupling constants of the kicked top: precession `p`, torsion `k0`,
/// kick strength `k1`, and damping `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopParams {
    pub p: f64,
    pub k0: f64,
    pub k1: f64,
    pub gamma: f64,
}

impl TopParams {
    pub fn new(p: f64, k0: f64, k1: f64, gamma: f64) -> Result<Self> {
        let params = TopParams { p, k0, k1, gamma };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("k0", self.k0), ("k1", self.k1), ("gamma", self.gamma)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
            }
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        TopParams { gamma, ..self }
    }

    pub fn with_k1(self, k1: f64) -> Self {
        TopParams { k1, ..self }
    }
}

/// A quantum parameter point: couplings plus spin size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub top: TopParams,
    pub spin: Spin,
}

impl ModelParams {
    pub fn new(p: f64, k0: f64, k1: f64, gamma: f64, j: f64) -> Result<Self> {
        Ok(ModelParams { top: TopParams::new(p, k0, k1, gamma)?, spin: Spin::new(j)? })
    }

    /// Quantum spectral analyses above this damping are numerically unreliable.
    pub fn outside_validated_regime(&self) -> bool {
        self.top.gamma > VALIDATED_GAMMA_MAX
    }

    pub(crate) fn warn_if_unvalidated(&self) {
        if self.outside_validated_regime() {
            log::warn!(
                "gamma = {} exceeds {VALIDATED_GAMMA_MAX}; eigenvalues may collapse below machine precision",
                self.top.gamma
            );
        }
    }
}
