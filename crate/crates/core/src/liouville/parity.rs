//! Weak parity symmetry: conjugation by `Π = diag((-1)^(m+j))` commutes
//! with the propagator, and `Π |a⟩⟨b| Π = (-1)^(a-b) |a⟩⟨b|`. Sorting the
//! Liouville basis by that sign block-diagonalizes every symmetric
//! superoperator.

use faer::Mat;
use num_complex::Complex64;

use super::Superoperator;
use super::Sector;
use crate::spin::Spin;
use crate::{Error, Result};

/// Largest tolerated Frobenius norm of the entries coupling the two sectors.
pub const PARITY_LEAK_TOL: f64 = 1e-12;

/// `(positive, negative)` sector dimensions without building anything.
pub fn parity_block_dims(spin: Spin) -> (usize, usize) {
    let n = spin.liouville_dim();
    let positive = (n + spin.dim() % 2) / 2;
    (positive, n - positive)
}

/// Liouville indices belonging to a parity sector, ascending.
pub fn sector_indices(spin: Spin, sector: Sector) -> Vec<usize> {
    let d = spin.dim();
    (0..spin.liouville_dim())
        .filter(|&i| {
            let even = (i % d + i / d) % 2 == 0;
            match sector {
                Sector::Positive => even,
                Sector::Negative => !even,
                Sector::Full => true,
            }
        })
        .collect()
}

/// A diagonal block of a superoperator in a chosen parity sector.
#[derive(Clone, Debug)]
pub struct SectorMatrix {
    pub sector: Sector,
    /// Liouville indices of the rows/columns kept, ascending.
    pub indices: Vec<usize>,
    pub matrix: Mat<Complex64>,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }
}

#[derive(Clone, Debug)]
pub struct ParityBlocks {
    pub positive: SectorMatrix,
    pub negative: SectorMatrix,
    /// Frobenius norm of the discarded off-block entries.
    pub off_block_norm: f64,
}

impl ParityBlocks {
    pub fn sector(&self, sector: Sector) -> Option<&SectorMatrix> {
        match sector {
            Sector::Positive => Some(&self.positive),
            Sector::Negative => Some(&self.negative),
            Sector::Full => None,
        }
    }
}

fn extract(s: &Superoperator, rows: &[usize], cols: &[usize]) -> Mat<Complex64> {
    let m = s.matrix();
    Mat::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

fn off_block_norm(s: &Superoperator, pos: &[usize], neg: &[usize]) -> f64 {
    let m = s.matrix();
    let mut sum = 0.0;
    for &c in pos {
        for &r in neg {
            sum += m[(r, c)].norm_sqr();
        }
    }
    for &c in neg {
        for &r in pos {
            sum += m[(r, c)].norm_sqr();
        }
    }
    sum.sqrt()
}

/// Splits `s` into its positive- and negative-parity diagonal blocks.
/// Fails if the blocks it drops carry more than [`PARITY_LEAK_TOL`].
pub fn parity_sectors(s: &Superoperator) -> Result<ParityBlocks> {
    let spin = s.spin();
    let pos = sector_indices(spin, Sector::Positive);
    let neg = sector_indices(spin, Sector::Negative);
    let leak = off_block_norm(s, &pos, &neg);
    if !(leak < PARITY_LEAK_TOL) {
        return Err(Error::ParityLeak(leak));
    }
    Ok(ParityBlocks {
        positive: SectorMatrix { sector: Sector::Positive, matrix: extract(s, &pos, &pos), indices: pos },
        negative: SectorMatrix { sector: Sector::Negative, matrix: extract(s, &neg, &neg), indices: neg },
        off_block_norm: leak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::{commutator_superop, dissipative_floquet, spectrum, ModelParams};
    use crate::spin::build_jx;

    #[test]
    fn block_dimensions() {
        let ten = Spin::new(10.0).unwrap();
        assert_eq!(parity_block_dims(ten), (221, 220));
        let eighty = Spin::new(80.0).unwrap();
        assert_eq!(parity_block_dims(eighty).0, 12961);
        // direct count for a half-integer spin
        let s = Spin::new(2.5).unwrap();
        assert_eq!(parity_block_dims(s), (18, 18));
        for j in [0.5, 1.0, 3.5, 10.0] {
            let s = Spin::new(j).unwrap();
            let (p, n) = parity_block_dims(s);
            assert_eq!(sector_indices(s, Sector::Positive).len(), p);
            assert_eq!(sector_indices(s, Sector::Negative).len(), n);
        }
    }

    #[test]
    fn floquet_operator_is_block_diagonal() {
        let par = ModelParams::new(2.0, 10.0, 8.0, 0.1, 10.0).unwrap();
        let d = dissipative_floquet(&par).unwrap();
        let blocks = parity_sectors(&d).unwrap();
        assert_eq!(blocks.positive.dim(), 221);
        assert_eq!(blocks.negative.dim(), 220);
        assert!(blocks.off_block_norm < PARITY_LEAK_TOL);
    }

    #[test]
    fn symmetry_breaking_operator_is_rejected() {
        // [J_x, .] flips parity of m - m'
        let s = Spin::new(2.0).unwrap();
        let l = commutator_superop(&build_jx(s));
        assert!(matches!(parity_sectors(&l), Err(Error::ParityLeak(_))));
    }

    #[test]
    fn block_spectra_reassemble_full_spectrum() {
        let par = ModelParams::new(2.0, 10.0, 8.0, 0.2, 4.0).unwrap();
        let d = dissipative_floquet(&par).unwrap();
        let blocks = parity_sectors(&d).unwrap();
        let full = spectrum(d.matrix().as_ref(), Sector::Full).unwrap();
        let mut joined = spectrum(blocks.positive.matrix.as_ref(), Sector::Positive).unwrap().eigenvalues;
        joined.extend(spectrum(blocks.negative.matrix.as_ref(), Sector::Negative).unwrap().eigenvalues);
        assert_eq!(joined.len(), full.eigenvalues.len());
        // greedy nearest matching
        let mut pool = full.eigenvalues.clone();
        for z in joined {
            let (k, dist) = pool
                .iter()
                .enumerate()
                .map(|(k, w)| (k, (w - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < 1e-9, "{dist}");
            pool.swap_remove(k);
        }
    }
}
