//! Numerical laboratory for the periodically kicked top with superradiant
//! damping.
//!
//! The quantum side builds the one-period dissipative Floquet superoperator
//! on Liouville space, splits it into parity sectors, and extracts complex
//! spacing-ratio statistics from its spectrum. The classical side iterates
//! the mean-field stroboscopic maps and measures Lyapunov spectra, chaotic
//! fractions and attractor dimensions. [`harness`] ties both to parameter
//! sweeps and CSV/JSON output.

pub mod classical;
pub mod error;
pub mod harness;
pub mod liouville;
pub mod spin;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;
