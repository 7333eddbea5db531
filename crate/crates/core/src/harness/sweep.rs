use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ClassicalOptions, QuantumOptions, SweepConfig};
use crate::classical::{chaotic_fraction, initial_condition_grid, PhasePoint};
use crate::liouville::{
    dissipative_floquet, parity_sectors, precision_filter, spectrum, ComplexSpectrum, ModelParams, Sector, TopParams,
};
use crate::stats::{complex_spacing_ratios, ratio_statistics, NeighborSearch};
use crate::{Error, Result};

/// One point of the parameter product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub p: f64,
    pub k0: f64,
    pub k1: f64,
    pub gamma: f64,
    pub j: f64,
}

impl ParamPoint {
    pub fn top(&self) -> TopParams {
        TopParams { p: self.p, k0: self.k0, k1: self.k1, gamma: self.gamma }
    }

    fn classical_key(&self) -> [u64; 4] {
        [self.p.to_bits(), self.k0.to_bits(), self.k1.to_bits(), self.gamma.to_bits()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumRecord {
    pub sector: Sector,
    pub n_eigs: usize,
    pub n_filtered: usize,
    pub filtered_fraction: f64,
    pub mean_r: f64,
    pub mean_neg_cos: f64,
    pub r_c: Option<f64>,
    pub theta_c: Option<f64>,
    pub branch_cut_count: usize,
    pub merged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalRecord {
    pub n_points: usize,
    pub f_c: f64,
    pub mean_d_lyapunov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

impl FailureRecord {
    fn new(stage: &str, e: &Error) -> Self {
        FailureRecord { stage: stage.into(), kind: e.kind().into(), message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    pub point: ParamPoint,
    pub quantum: Option<QuantumRecord>,
    pub classical: Option<ClassicalRecord>,
    pub failures: Vec<FailureRecord>,
    pub quantum_seconds: f64,
    pub classical_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_hash: String,
    pub table_version: u32,
    pub code_version: String,
    pub workers: usize,
    pub wall_seconds: f64,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    pub fn n_failures(&self) -> usize {
        self.records.iter().map(|r| r.failures.len()).sum()
    }
}

/// Cartesian product of the axes, `p` outermost and `j` innermost.
pub fn parameter_points(config: &SweepConfig) -> Vec<ParamPoint> {
    let a = &config.axes;
    let mut out = Vec::with_capacity(a.p.len() * a.k0.len() * a.k1.len() * a.gamma.len() * a.j.len());
    for &p in &a.p {
        for &k0 in &a.k0 {
            for &k1 in &a.k1 {
                for &gamma in &a.gamma {
                    for &j in &a.j {
                        out.push(ParamPoint { p, k0, k1, gamma, j });
                    }
                }
            }
        }
    }
    out
}

/// Eigenvalues of the dissipative Floquet operator in one sector.
pub fn quantum_spectrum(point: &ParamPoint, sector: Sector) -> Result<ComplexSpectrum> {
    let params = ModelParams::new(point.p, point.k0, point.k1, point.gamma, point.j)?;
    let d = dissipative_floquet(&params)?;
    match sector {
        Sector::Full => spectrum(d.matrix().as_ref(), Sector::Full),
        _ => {
            let blocks = parity_sectors(&d)?;
            let block = blocks.sector(sector).ok_or(Error::InvalidParameter("sector".into()))?;
            spectrum(block.matrix.as_ref(), sector)
        }
    }
}

/// Ratio statistics of an already computed spectrum.
pub fn spectrum_statistics(spec: &ComplexSpectrum, epsilon: f64) -> Result<QuantumRecord> {
    let (kept, filtered_fraction) = precision_filter(spec, epsilon)?;
    let set = complex_spacing_ratios(&kept.eigenphases, NeighborSearch::Exhaustive)?;
    let stats = ratio_statistics(&set.samples)?;
    Ok(QuantumRecord {
        sector: spec.sector,
        n_eigs: kept.len(),
        n_filtered: kept.n_filtered,
        filtered_fraction,
        mean_r: stats.mean_r,
        mean_neg_cos: stats.mean_neg_cos,
        r_c: stats.r_c,
        theta_c: stats.theta_c,
        branch_cut_count: kept.branch_cut_count,
        merged: set.merged,
    })
}

/// Full quantum pipeline for one parameter point.
pub fn quantum_point(point: &ParamPoint, opts: &QuantumOptions) -> Result<QuantumRecord> {
    let spec = quantum_spectrum(point, opts.sector)?;
    spectrum_statistics(&spec, opts.epsilon)
}

/// Chaotic fraction and mean Lyapunov dimension on a lattice grid.
pub fn classical_point(top: &TopParams, grid: &[PhasePoint], opts: &ClassicalOptions) -> Result<ClassicalRecord> {
    let r = chaotic_fraction(top, grid, &opts.lyapunov())?;
    Ok(ClassicalRecord { n_points: r.n_points, f_c: r.f_c, mean_d_lyapunov: r.mean_d_lyapunov })
}

/// Evaluates every parameter point. Failures at a point are recorded and
/// the sweep goes on; only configuration errors abort.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let workers = config.effective_workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let points = parameter_points(config);
    let grid = if config.classical.run { initial_condition_grid(config.classical.n_ic)? } else { Vec::new() };
    log::info!("sweep over {} points on {workers} workers", points.len());

    let records = pool.install(|| {
        // classical metrics do not depend on j
        let mut classical: BTreeMap<[u64; 4], (Result<ClassicalRecord>, f64)> = BTreeMap::new();
        if config.classical.run {
            let mut unique: Vec<ParamPoint> = Vec::new();
            for pt in &points {
                if !unique.iter().any(|u| u.classical_key() == pt.classical_key()) {
                    unique.push(*pt);
                }
            }
            let results: Vec<_> = unique
                .par_iter()
                .map(|pt| {
                    let t = Instant::now();
                    let r = classical_point(&pt.top(), &grid, &config.classical);
                    (pt.classical_key(), (r, t.elapsed().as_secs_f64()))
                })
                .collect();
            classical.extend(results);
        }

        points
            .par_iter()
            .enumerate()
            .map(|(index, pt)| {
                let mut failures = Vec::new();
                let t = Instant::now();
                let quantum = if config.quantum.run {
                    match quantum_point(pt, &config.quantum) {
                        Ok(q) => Some(q),
                        Err(e) => {
                            log::warn!("quantum stage failed at {pt:?}: {e}");
                            failures.push(FailureRecord::new("quantum", &e));
                            None
                        }
                    }
                } else {
                    None
                };
                let quantum_seconds = t.elapsed().as_secs_f64();
                let (classical, classical_seconds) = match classical.get(&pt.classical_key()) {
                    Some((Ok(c), secs)) => (Some(c.clone()), *secs),
                    Some((Err(e), secs)) => {
                        failures.push(FailureRecord::new("classical", e));
                        (None, *secs)
                    }
                    None => (None, 0.0),
                };
                SweepRecord { index, point: *pt, quantum, classical, failures, quantum_seconds, classical_seconds }
            })
            .collect::<Vec<_>>()
    });

    Ok(SweepResult {
        config_hash: config.hash()?,
        table_version: crate::stats::constants::TABLE_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        workers,
        wall_seconds: start.elapsed().as_secs_f64(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        let mut c = SweepConfig::default();
        c.axes.p = vec![2.0];
        c.axes.k0 = vec![10.0];
        c.axes.k1 = vec![0.5, 8.0];
        c.axes.gamma = vec![0.1];
        c.axes.j = vec![4.0, 5.0];
        c.classical.n_ic = 12;
        c.classical.n_periods = 200;
        c.classical.transient = 50;
        c
    }

    #[test]
    fn product_order() {
        let pts = parameter_points(&small_config());
        assert_eq!(pts.len(), 4);
        assert_eq!((pts[0].k1, pts[0].j), (0.5, 4.0));
        assert_eq!((pts[1].k1, pts[1].j), (0.5, 5.0));
        assert_eq!((pts[2].k1, pts[2].j), (8.0, 4.0));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut c = small_config();
        let a = run_sweep(&c).unwrap();
        c.workers = 3;
        let b = run_sweep(&c).unwrap();
        assert_eq!(a.records.len(), 4);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.point, y.point);
            assert_eq!(x.quantum, y.quantum);
            assert_eq!(x.classical, y.classical);
        }
        // j does not enter the classical metrics
        assert_eq!(a.records[0].classical, a.records[1].classical);
        assert_eq!(a.n_failures(), 0);
    }

    #[test]
    fn failures_are_recorded() {
        let mut c = small_config();
        c.axes.j = vec![0.5];
        c.classical.run = false;
        // a two-level spectrum in one sector is too short for ratios
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.records.len(), 2);
        for rec in &r.records {
            assert!(rec.quantum.is_none());
            assert_eq!(rec.failures[0].stage, "quantum");
            assert_eq!(rec.failures[0].kind, "too_few_points");
        }
    }

    #[test]
    fn sector_sizes() {
        let pt = ParamPoint { p: 2.0, k0: 10.0, k1: 8.0, gamma: 0.1, j: 3.0 };
        assert_eq!(quantum_spectrum(&pt, Sector::Positive).unwrap().len(), 25);
        assert_eq!(quantum_spectrum(&pt, Sector::Negative).unwrap().len(), 24);
        assert_eq!(quantum_spectrum(&pt, Sector::Full).unwrap().len(), 49);
    }
}
