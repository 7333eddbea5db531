use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::PhasePoint;
use crate::{Error, Result};

/// Box-counting estimate and the quality of its straight-line fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HausdorffFit {
    pub dimension: f64,
    /// Root-mean-square residual of `ln C` about the fitted line.
    pub residual: f64,
    pub epsilons: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Ten cell sizes log-spaced over `[2^-5.05, 2^-3]`.
pub fn default_epsilons() -> Vec<f64> {
    let n = 10;
    let (lo, hi) = (-5.05f64, -3.0f64);
    (0..n).map(|i| 2f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64)).collect()
}

fn box_count(points: &[PhasePoint], eps: f64) -> usize {
    let cells: HashSet<(i64, i64)> =
        points.iter().map(|pp| (((pp.q + 2.0) / eps).floor() as i64, ((pp.p + 2.0) / eps).floor() as i64)).collect();
    cells.len()
}

/// Slope of `ln C(ε)` against `-ln ε` for square cells anchored at `(-2, -2)`.
pub fn hausdorff_dimension(points: &[PhasePoint], epsilons: &[f64]) -> Result<HausdorffFit> {
    if points.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    if epsilons.len() < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 cell sizes, got {}", epsilons.len())));
    }
    if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter("cell sizes must be positive".into()));
    }
    if points.iter().any(|pp| !pp.q.is_finite() || !pp.p.is_finite()) {
        return Err(Error::NonFinite("trajectory"));
    }
    let counts: Vec<usize> = epsilons.iter().map(|&e| box_count(points, e)).collect();
    let xs: Vec<f64> = epsilons.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("cell sizes must not all be equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(HausdorffFit { dimension: slope, residual, epsilons: epsilons.to_vec(), counts })
}
