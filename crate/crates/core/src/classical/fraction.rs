use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lyapunov::{lyapunov_dimension, lyapunov_spectrum, LyapunovOptions};
use super::maps::to_sphere;
use super::PhasePoint;
use crate::liouville::TopParams;
use crate::{Error, Result};

/// Lattice size aimed for when none is given.
pub const DEFAULT_GRID_POINTS: usize = 1245;

fn lattice(pitch: f64) -> Vec<PhasePoint> {
    let n = (2.0 / pitch).floor() as i64 + 1;
    let mut out = Vec::new();
    for i in -n..=n {
        for k in -n..=n {
            let pp = PhasePoint::new(i as f64 * pitch, k as f64 * pitch);
            if pp.radius_sq() < 4.0 {
                out.push(pp);
            }
        }
    }
    out
}

/// Square lattice through the origin clipped to the open disk
/// `q² + p² < 4`, with the pitch chosen to bring the count as close to
/// `target` as possible. Points are ordered row by row.
pub fn initial_condition_grid(target: usize) -> Result<Vec<PhasePoint>> {
    if target == 0 {
        return Err(Error::EmptyGrid);
    }
    // count falls as the pitch grows
    let (mut lo, mut hi) = (1e-3, 4.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if lattice(mid).len() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (lattice(lo), lattice(hi));
    let best = if a.len().abs_diff(target) < b.len().abs_diff(target) { a } else { b };
    Ok(best)
}

/// Per-initial-condition classical metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub ic_index: usize,
    pub q0: f64,
    pub p0: f64,
    pub h1: f64,
    pub h2: f64,
    pub upsilon: u8,
    pub d_lyapunov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionResult {
    pub f_c: f64,
    pub mean_d_lyapunov: f64,
    pub n_points: usize,
    pub points: Vec<PointMetrics>,
}

/// Fraction of lattice initial conditions whose largest exponent exceeds
/// `h_tol`, plus the grid-averaged Lyapunov dimension. Runs on the current
/// rayon pool; results are in lattice order whatever the thread count.
pub fn chaotic_fraction(par: &TopParams, grid: &[PhasePoint], opts: &LyapunovOptions) -> Result<FractionResult> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    opts.validate()?;
    let points = grid
        .par_iter()
        .enumerate()
        .map(|(ic_index, &pp)| {
            let spec = lyapunov_spectrum(to_sphere(pp)?, par, opts)?;
            Ok(PointMetrics {
                ic_index,
                q0: pp.q,
                p0: pp.p,
                h1: spec.h1,
                h2: spec.h2,
                upsilon: u8::from(spec.h1 > opts.h_tol),
                d_lyapunov: lyapunov_dimension(&spec, opts.h_tol),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = points.len() as f64;
    let f_c = points.iter().map(|m| m.upsilon as f64).sum::<f64>() / n;
    let mean_d_lyapunov = points.iter().map(|m| m.d_lyapunov).sum::<f64>() / n;
    Ok(FractionResult { f_c, mean_d_lyapunov, n_points: points.len(), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_shape() {
        let g = initial_condition_grid(DEFAULT_GRID_POINTS).unwrap();
        assert!(g.len().abs_diff(DEFAULT_GRID_POINTS) <= 10, "{}", g.len());
        assert!(g.iter().all(|pp| pp.radius_sq() < 4.0));
        assert!(g.contains(&PhasePoint::new(0.0, 0.0)));
        assert_eq!(initial_condition_grid(1250).unwrap().len().abs_diff(1250) <= 10, true);
        assert!(initial_condition_grid(0).is_err());
    }

    #[test]
    fn fraction_is_thread_count_independent() {
        let par = TopParams { p: 2.0, k0: 10.0, k1: 3.0, gamma: 0.1 };
        let grid = initial_condition_grid(40).unwrap();
        let opts = LyapunovOptions { n_periods: 200, transient: 50, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| chaotic_fraction(&par, &grid, &opts)).unwrap();
        let b = four.install(|| chaotic_fraction(&par, &grid, &opts)).unwrap();
        assert_eq!(a, b);
        assert!((0.0..=1.0).contains(&a.f_c));
        assert!(chaotic_fraction(&par, &[], &opts).is_err());
    }
}
