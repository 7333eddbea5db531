use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::maps::{step, to_plane, to_sphere, DEFAULT_STEPS};
use super::{BlochVector, MapVariant, PhasePoint};
use crate::liouville::TopParams;
use crate::{Error, Result};

/// Periods recorded at the end of each bifurcation run.
pub const BIFURCATION_KEEP: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationSlice {
    pub gamma: f64,
    pub jy: Vec<f64>,
    /// Set at `gamma = 0`, where there is no attractor to sample.
    pub conservative: bool,
}

/// For each `gamma`, iterate the coupled map `n_periods` times from `x0`
/// and keep `J_y` of the last [`BIFURCATION_KEEP`] periods.
pub fn bifurcation_scan(
    base: &TopParams,
    gammas: &[f64],
    x0: BlochVector,
    n_periods: usize,
) -> Result<Vec<BifurcationSlice>> {
    if n_periods < BIFURCATION_KEEP {
        return Err(Error::InvalidParameter(format!("need at least {BIFURCATION_KEEP} periods, got {n_periods}")));
    }
    gammas
        .par_iter()
        .map(|&gamma| {
            let par = base.with_gamma(gamma);
            par.validate()?;
            let mut x = x0;
            let mut jy = Vec::with_capacity(BIFURCATION_KEEP);
            for period in 0..n_periods {
                x = step(MapVariant::Coupled, x, &par, DEFAULT_STEPS)?;
                if period >= n_periods - BIFURCATION_KEEP {
                    jy.push(x.jy);
                }
            }
            if gamma == 0.0 {
                log::warn!("bifurcation slice at gamma = 0 is conservative; no attractor");
            }
            Ok(BifurcationSlice { gamma, jy, conservative: gamma == 0.0 })
        })
        .collect()
}

/// Stroboscopic `(Q, P)` records for each initial condition, the initial
/// point excluded.
pub fn poincare_section(
    initials: &[PhasePoint],
    par: &TopParams,
    variant: MapVariant,
    n_periods: usize,
) -> Result<Vec<Vec<PhasePoint>>> {
    initials
        .par_iter()
        .map(|&pp| {
            let mut x = to_sphere(pp)?;
            let mut out = Vec::with_capacity(n_periods);
            for _ in 0..n_periods {
                x = step(variant, x, par, DEFAULT_STEPS)?;
                out.push(to_plane(x));
            }
            Ok(out)
        })
        .collect()
}

struct CellIndex {
    h: f64,
    n: usize,
    cells: Vec<Vec<PhasePoint>>,
}

impl CellIndex {
    fn new(points: &[PhasePoint], h: f64) -> CellIndex {
        let n = (4.0 / h).ceil() as usize + 1;
        let mut cells = vec![Vec::new(); n * n];
        let mut idx = CellIndex { h, n, cells: Vec::new() };
        for &pp in points {
            let (i, k) = idx.cell(pp);
            cells[i + n * k].push(pp);
        }
        idx.cells = cells;
        idx
    }

    fn cell(&self, pp: PhasePoint) -> (usize, usize) {
        let f = |x: f64| (((x + 2.0) / self.h).floor().max(0.0) as usize).min(self.n - 1);
        (f(pp.q), f(pp.p))
    }

    fn nearest(&self, pp: PhasePoint) -> f64 {
        let (ci, ck) = self.cell(pp);
        let mut best = f64::INFINITY;
        for ring in 0..=self.n as isize {
            for dk in -ring..=ring {
                for di in -ring..=ring {
                    if di.abs() != ring && dk.abs() != ring {
                        continue;
                    }
                    let (i, k) = (ci as isize + di, ck as isize + dk);
                    if i < 0 || k < 0 || i >= self.n as isize || k >= self.n as isize {
                        continue;
                    }
                    for q in &self.cells[i as usize + self.n * k as usize] {
                        best = best.min((q.q - pp.q).hypot(q.p - pp.p));
                    }
                }
            }
            if best <= ring as f64 * self.h {
                break;
            }
        }
        best
    }
}

/// Symmetric Hausdorff distance between two finite point sets in the disk.
pub fn set_distance(a: &[PhasePoint], b: &[PhasePoint]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let directed = |from: &[PhasePoint], to: &[PhasePoint]| {
        let index = CellIndex::new(to, 0.05);
        from.par_iter().map(|&pp| index.nearest(pp)).reduce(|| 0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}
