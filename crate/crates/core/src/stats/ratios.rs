use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::constants::{MEAN_R_COE, MEAN_R_GINUE, MEAN_R_POISSON, MEAN_R_POISSON_2D, NEG_COS_GINUE};
use crate::{Error, Result};

/// Points closer than this are treated as one eigenvalue.
pub const MERGE_DISTANCE: f64 = 1e-14;

/// Below this many samples the normalized metrics are not reported.
pub const MIN_SAMPLES_FOR_NORMALIZED: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub r: f64,
    pub theta: f64,
}

/// Ratios for every retained point, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSet {
    /// The retained points; `samples[k]` belongs to `points[k]`.
    pub points: Vec<Complex64>,
    pub samples: Vec<RatioSample>,
    /// Input points dropped as duplicates of an earlier point.
    pub merged: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStatistics {
    pub mean_r: f64,
    pub mean_neg_cos: f64,
    pub n_samples: usize,
    pub r_c: Option<f64>,
    pub theta_c: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborSearch {
    #[default]
    Exhaustive,
    Grid,
}

#[derive(Clone, Copy)]
struct Candidate {
    d2: f64,
    index: usize,
}

impl Candidate {
    const NONE: Candidate = Candidate { d2: f64::INFINITY, index: usize::MAX };

    fn before(&self, other: &Candidate) -> bool {
        (self.d2, self.index) < (other.d2, other.index)
    }
}

#[derive(Clone, Copy)]
struct TwoNearest {
    first: Candidate,
    second: Candidate,
}

impl TwoNearest {
    fn new() -> Self {
        TwoNearest { first: Candidate::NONE, second: Candidate::NONE }
    }

    fn offer(&mut self, c: Candidate) {
        if c.before(&self.first) {
            self.second = self.first;
            self.first = c;
        } else if c.before(&self.second) {
            self.second = c;
        }
    }
}

#[inline]
fn dist2(a: Complex64, b: Complex64) -> f64 {
    let (dx, dy) = (a.re - b.re, a.im - b.im);
    dx * dx + dy * dy
}

fn dedupe(points: &[Complex64]) -> (Vec<Complex64>, usize) {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].re.total_cmp(&points[b].re).then(a.cmp(&b)));
    let mut removed = vec![false; points.len()];
    for (pos, &i) in order.iter().enumerate() {
        if removed[i] {
            continue;
        }
        for &j in &order[pos + 1..] {
            if points[j].re - points[i].re >= MERGE_DISTANCE {
                break;
            }
            if !removed[j] && dist2(points[i], points[j]) < MERGE_DISTANCE * MERGE_DISTANCE {
                removed[i.max(j)] = true;
                if i > j {
                    break;
                }
            }
        }
    }
    let kept: Vec<Complex64> = points.iter().zip(&removed).filter(|(_, &r)| !r).map(|(&z, _)| z).collect();
    let merged = points.len() - kept.len();
    (kept, merged)
}

fn exhaustive_neighbours(points: &[Complex64]) -> Vec<TwoNearest> {
    points
        .iter()
        .enumerate()
        .map(|(k, &z)| {
            let mut best = TwoNearest::new();
            for (i, &w) in points.iter().enumerate() {
                if i != k {
                    best.offer(Candidate { d2: dist2(z, w), index: i });
                }
            }
            best
        })
        .collect()
}

struct Grid {
    x0: f64,
    y0: f64,
    h: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<usize>>,
}

impl Grid {
    fn build(points: &[Complex64]) -> Grid {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for z in points {
            x0 = x0.min(z.re);
            x1 = x1.max(z.re);
            y0 = y0.min(z.im);
            y1 = y1.max(z.im);
        }
        let (w, hgt) = ((x1 - x0).max(0.0), (y1 - y0).max(0.0));
        let n = points.len() as f64;
        let mut h = ((w * hgt) / n).sqrt() * 1.5;
        if !(h > 0.0) {
            h = (w.max(hgt) / n).max(f64::MIN_POSITIVE);
        }
        let nx = ((w / h).floor() as usize + 1).min(4 * points.len());
        let ny = ((hgt / h).floor() as usize + 1).min(4 * points.len());
        let mut cells = vec![Vec::new(); nx * ny];
        let mut grid = Grid { x0, y0, h, nx, ny, cells: Vec::new() };
        for (i, &z) in points.iter().enumerate() {
            let (cx, cy) = grid.cell(z);
            cells[cx + nx * cy].push(i);
        }
        grid.cells = cells;
        grid
    }

    fn cell(&self, z: Complex64) -> (usize, usize) {
        let cx = (((z.re - self.x0) / self.h).floor().max(0.0) as usize).min(self.nx - 1);
        let cy = (((z.im - self.y0) / self.h).floor().max(0.0) as usize).min(self.ny - 1);
        (cx, cy)
    }

    fn visit_ring(&self, cx: usize, cy: usize, ring: usize, mut f: impl FnMut(usize)) {
        let (cx, cy, r) = (cx as isize, cy as isize, ring as isize);
        for y in (cy - r)..=(cy + r) {
            if y < 0 || y >= self.ny as isize {
                continue;
            }
            let edge_row = y == cy - r || y == cy + r;
            let mut x = cx - r;
            while x <= cx + r {
                if x >= 0 && x < self.nx as isize {
                    for &i in &self.cells[x as usize + self.nx * y as usize] {
                        f(i);
                    }
                }
                x += if edge_row || r == 0 { 1 } else { 2 * r };
            }
        }
    }

    fn neighbours(&self, points: &[Complex64], k: usize) -> TwoNearest {
        let z = points[k];
        let (cx, cy) = self.cell(z);
        let max_ring = self.nx.max(self.ny);
        let mut best = TwoNearest::new();
        for ring in 0..=max_ring {
            self.visit_ring(cx, cy, ring, |i| {
                if i != k {
                    best.offer(Candidate { d2: dist2(z, points[i]), index: i });
                }
            });
            // anything in ring + 1 is at least ring * h away
            let bound = ring as f64 * self.h * (1.0 - 1e-12);
            if best.second.index != usize::MAX && bound * bound > best.second.d2 {
                break;
            }
        }
        best
    }
}

fn grid_neighbours(points: &[Complex64]) -> Vec<TwoNearest> {
    let grid = Grid::build(points);
    (0..points.len()).map(|k| grid.neighbours(points, k)).collect()
}

/// `Z_k = (φ_NN - φ_k) / (φ_NNN - φ_k)` for every point, neighbours ranked by
/// Euclidean distance with ties broken by lower index.
pub fn complex_spacing_ratios(points: &[Complex64], search: NeighborSearch) -> Result<RatioSet> {
    if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("spacing-ratio input"));
    }
    let (points, merged) = dedupe(points);
    if points.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: points.len() });
    }
    let neighbours = match search {
        NeighborSearch::Exhaustive => exhaustive_neighbours(&points),
        NeighborSearch::Grid => grid_neighbours(&points),
    };
    let samples = neighbours
        .iter()
        .enumerate()
        .map(|(k, nb)| {
            if nb.second.d2 == 0.0 {
                return Err(Error::CoincidentNeighbours(k));
            }
            let z = (points[nb.first.index] - points[k]) / (points[nb.second.index] - points[k]);
            Ok(RatioSample { r: z.norm().min(1.0), theta: z.im.atan2(z.re) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioSet { points, samples, merged })
}

pub fn ratio_statistics(samples: &[RatioSample]) -> Result<RatioStatistics> {
    if samples.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let n = samples.len() as f64;
    let mean_r = samples.iter().map(|s| s.r).sum::<f64>() / n;
    let mean_neg_cos = -samples.iter().map(|s| s.theta.cos()).sum::<f64>() / n;
    let normalized = samples.len() >= MIN_SAMPLES_FOR_NORMALIZED;
    Ok(RatioStatistics {
        mean_r,
        mean_neg_cos,
        n_samples: samples.len(),
        r_c: normalized.then(|| (mean_r - MEAN_R_POISSON_2D) / (MEAN_R_GINUE - MEAN_R_POISSON_2D)),
        theta_c: normalized.then(|| mean_neg_cos / NEG_COS_GINUE),
    })
}

/// Consecutive-gap ratios `min(δ_k, δ_{k-1}) / max(δ_k, δ_{k-1})` of a real
/// spectrum; the input is sorted internally.
pub fn real_spacing_ratios(phases: &[f64]) -> Result<Vec<f64>> {
    if phases.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: phases.len() });
    }
    if phases.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("spacing-ratio input"));
    }
    let mut sorted = phases.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.windows(2)
        .enumerate()
        .map(|(k, w)| {
            let (lo, hi) = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            if hi == 0.0 {
                Err(Error::CoincidentNeighbours(k + 1))
            } else {
                Ok(lo / hi)
            }
        })
        .collect()
}

/// `(<r> - <r>_P) / (<r>_COE - <r>_P)`.
pub fn normalized_real_ratio(mean_r: f64) -> f64 {
    (mean_r - MEAN_R_POISSON) / (MEAN_R_COE - MEAN_R_POISSON)
}
