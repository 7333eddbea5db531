//! Mean-field (j → ∞) dynamics of the damped kicked top on the unit
//! sphere, and the chaos indicators built on it.

mod dimension;
mod fraction;
mod lyapunov;
mod maps;
mod scans;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use dimension::{default_epsilons, hausdorff_dimension, HausdorffFit};
pub use fraction::{chaotic_fraction, initial_condition_grid, FractionResult, PointMetrics, DEFAULT_GRID_POINTS};
pub use lyapunov::{
    classify, lyapunov_dimension, lyapunov_spectrum, mean_log_area_factor, LyapunovOptions, LyapunovSpectrum,
    DEFAULT_H_TOL, DEFAULT_PERIODS, DEFAULT_TRANSIENT,
};
pub use maps::{
    decoupled_map, dissipation_map, flow_period, flow_period_with, isolated_map, kick_map, step, step_with_jacobian,
    stroboscopic_map, to_plane, to_sphere, trajectory, Mat3, DEFAULT_STEPS,
};
pub use scans::{bifurcation_scan, poincare_section, set_distance, BifurcationSlice, BIFURCATION_KEEP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl BlochVector {
    pub const SOUTH: BlochVector = BlochVector { jx: 0.0, jy: 0.0, jz: -1.0 };
    pub const NORTH: BlochVector = BlochVector { jx: 0.0, jy: 0.0, jz: 1.0 };

    pub fn new(jx: f64, jy: f64, jz: f64) -> Self {
        BlochVector { jx, jy, jz }
    }

    /// Direction of `(jx, jy, jz)` rescaled onto the unit sphere.
    pub fn normalized(jx: f64, jy: f64, jz: f64) -> Result<Self> {
        let v = BlochVector { jx, jy, jz };
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NonFinite("Bloch vector"));
        }
        Ok(BlochVector { jx: jx / n, jy: jy / n, jz: jz / n })
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector { jx: a[0], jy: a[1], jz: a[2] }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.jx, self.jy, self.jz]
    }

    pub fn norm(&self) -> f64 {
        (self.jx * self.jx + self.jy * self.jy + self.jz * self.jz).sqrt()
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let (a, b) = (self.to_array(), other.to_array());
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.jx.is_finite() && self.jy.is_finite() && self.jz.is_finite()
    }
}

/// Canonical chart coordinates; the sphere maps onto the disk `q² + p² ≤ 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        PhasePoint { q, p }
    }

    pub fn radius_sq(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }
}

/// Which one-period map to iterate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapVariant {
    /// Damped flow between kicks, then the kick.
    #[default]
    Coupled,
    /// Undamped period followed by the closed-form damping step.
    Decoupled,
    /// No damping.
    Isolated,
}

impl fmt::Display for MapVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapVariant::Coupled => "coupled",
            MapVariant::Decoupled => "decoupled",
            MapVariant::Isolated => "isolated",
        })
    }
}

impl FromStr for MapVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coupled" => Ok(MapVariant::Coupled),
            "decoupled" => Ok(MapVariant::Decoupled),
            "isolated" => Ok(MapVariant::Isolated),
            other => Err(Error::InvalidParameter(format!("unknown map variant `{other}`"))),
        }
    }
}
