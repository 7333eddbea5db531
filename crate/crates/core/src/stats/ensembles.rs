use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{complex_spacing_ratios, ratio_statistics, NeighborSearch, RatioStatistics};
use crate::{Error, Result};

/// Ratios are averaged over eigenvalues inside this fraction of the
/// spectral radius `√n`; edge points see a one-sided neighbourhood.
pub const GINIBRE_BULK_FRACTION: f64 = 0.9;

const MIN_SIZE: usize = 16;

fn check_size(n: usize) -> Result<()> {
    if n < MIN_SIZE {
        return Err(Error::TooFewPoints { needed: MIN_SIZE, got: n });
    }
    Ok(())
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha8Rng) -> Mat<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    Mat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    })
}

/// Eigenvalues of an `n × n` matrix with i.i.d. unit-variance complex
/// Gaussian entries.
pub fn sample_ginibre_spectrum(n: usize, seed: u64) -> Result<Vec<Complex64>> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gaussian_matrix(n, &mut rng).eigenvalues().map_err(|_| Error::Eigensolver)
}

/// Ratio statistics pooled over Ginibre spectra of size `n`, one per
/// seed. Neighbours are searched in the full spectrum; only points with
/// `|z| < bulk_fraction · √n` enter the averages.
pub fn ginibre_ratio_statistics(n: usize, seeds: &[u64], bulk_fraction: f64) -> Result<RatioStatistics> {
    if !(bulk_fraction > 0.0) {
        return Err(Error::InvalidParameter(format!("bulk fraction must be positive, got {bulk_fraction}")));
    }
    let cutoff = bulk_fraction * (n as f64).sqrt();
    let mut pooled = Vec::new();
    for &seed in seeds {
        let set = complex_spacing_ratios(&sample_ginibre_spectrum(n, seed)?, NeighborSearch::Exhaustive)?;
        pooled.extend(set.points.iter().zip(&set.samples).filter(|(z, _)| z.norm() < cutoff).map(|(_, s)| *s));
    }
    ratio_statistics(&pooled)
}

/// `n` i.i.d. uniform points in the unit square.
pub fn sample_poisson2d(n: usize, seed: u64) -> Result<Vec<Complex64>> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| Complex64::new(rng.random(), rng.random())).collect())
}

/// `n` i.i.d. uniform phases on `[-π, π)`.
pub fn sample_uniform_phases(n: usize, seed: u64) -> Result<Vec<f64>> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect())
}

/// Eigenphases of `U Uᵀ` for Haar-random `U`.
pub fn sample_coe_phases(n: usize, seed: u64) -> Result<Vec<f64>> {
    check_size(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = gaussian_matrix(n, &mut rng);
    let qr = z.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    // fix the column phases so Q is Haar distributed
    let u = Mat::from_fn(n, n, |i, k| {
        let d = r[(k, k)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        q[(i, k)] * phase
    });
    let coe = &u * u.transpose();
    let eig = coe.eigenvalues().map_err(|_| Error::Eigensolver)?;
    Ok(eig.iter().map(|z| z.im.atan2(z.re)).collect())
}
