//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3, 5, 7, 9, 13 and the matching backward-error
//! thresholds for double precision).

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use num_complex::Complex64;

use super::Superoperator;
use crate::{Error, Result};

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm_one(a: MatRef<'_, Complex64>) -> f64 {
    (0..a.ncols()).map(|k| a.col(k).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `sum_k c_k * terms[k]` with an optional identity multiple.
fn combine(n: usize, id_coeff: f64, terms: &[(f64, &Mat<Complex64>)]) -> Mat<Complex64> {
    Mat::from_fn(n, n, |i, k| {
        let mut z = if i == k { Complex64::new(id_coeff, 0.0) } else { Complex64::new(0.0, 0.0) };
        for &(c, m) in terms {
            z += m[(i, k)] * c;
        }
        z
    })
}

/// Returns `(U, V)` with `exp(A) ~ (V - U)^{-1} (V + U)`.
fn pade_low(a: &Mat<Complex64>, a2: &Mat<Complex64>, b: &[f64]) -> (Mat<Complex64>, Mat<Complex64>) {
    let n = a.nrows();
    let m = b.len() - 1;
    // even powers A^2, A^4, ...
    let mut powers = vec![a2.clone()];
    while 2 * (powers.len() + 1) < m {
        let next = &powers[powers.len() - 1] * a2;
        powers.push(next);
    }
    let odd_terms: Vec<(f64, &Mat<Complex64>)> = powers.iter().enumerate().map(|(i, p)| (b[2 * i + 3], p)).collect();
    let inner = combine(n, b[1], &odd_terms);
    let u = a * &inner;
    let even_terms: Vec<(f64, &Mat<Complex64>)> = powers.iter().enumerate().map(|(i, p)| (b[2 * i + 2], p)).collect();
    let v = combine(n, b[0], &even_terms);
    (u, v)
}

fn pade_13(a: &Mat<Complex64>) -> (Mat<Complex64>, Mat<Complex64>) {
    let b = &PADE_13;
    let n = a.nrows();
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let w1 = combine(n, 0.0, &[(b[13], &a6), (b[11], &a4), (b[9], &a2)]);
    let w2 = combine(n, b[1], &[(b[7], &a6), (b[5], &a4), (b[3], &a2)]);
    let inner = &(&a6 * &w1) + &w2;
    let u = a * &inner;
    let z1 = combine(n, 0.0, &[(b[12], &a6), (b[10], &a4), (b[8], &a2)]);
    let z2 = combine(n, b[0], &[(b[6], &a6), (b[4], &a4), (b[2], &a2)]);
    let v = &(&a6 * &z1) + &z2;
    (u, v)
}

fn solve_pade(u: Mat<Complex64>, v: Mat<Complex64>) -> Mat<Complex64> {
    let p = &v + &u;
    let q = &v - &u;
    q.partial_piv_lu().solve(&p)
}

/// `exp(a)` for a dense complex square matrix.
pub fn matrix_exponential(a: MatRef<'_, Complex64>) -> Result<Mat<Complex64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if a.col_iter().any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::NonFinite("matrix exponential input"));
    }

    let a = a.to_owned();
    let norm = norm_one(a.as_ref());
    for &(degree, theta) in &THETA[..4] {
        if norm <= theta {
            let a2 = &a * &a;
            let coeffs: &[f64] = match degree {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let (u, v) = pade_low(&a, &a2, coeffs);
            return finish(solve_pade(u, v));
        }
    }

    let theta13 = THETA[4].1;
    let squarings = if norm > theta13 { (norm / theta13).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    let scaled = Mat::from_fn(n, n, |i, k| a[(i, k)] * scale);
    let (u, v) = pade_13(&scaled);
    let mut result = solve_pade(u, v);
    for _ in 0..squarings {
        result = &result * &result;
    }
    finish(result)
}

fn finish(m: Mat<Complex64>) -> Result<Mat<Complex64>> {
    if m.col_iter().any(|c| c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::NonFinite("matrix exponential"));
    }
    Ok(m)
}

impl Superoperator {
    pub fn exp(&self) -> Result<Superoperator> {
        Superoperator::from_matrix(self.spin(), matrix_exponential(self.matrix().as_ref())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &Mat<Complex64>, b: &Mat<Complex64>) -> f64 {
        (a - b).norm_max()
    }

    #[test]
    fn zero_gives_identity() {
        for n in [1, 5, 40] {
            let e = matrix_exponential(Mat::<Complex64>::zeros(n, n).as_ref()).unwrap();
            assert_eq!(max_diff(&e, &Mat::identity(n, n)), 0.0);
        }
    }

    #[test]
    fn diagonal_matches_scalar_exp() {
        let diag = [
            Complex64::new(0.001, 0.0),
            Complex64::new(-3.0, 2.0),
            Complex64::new(0.5, -7.0),
            Complex64::new(-20.0, 0.1),
            Complex64::new(4.0, 40.0),
        ];
        let n = diag.len();
        let m = Mat::from_fn(n, n, |i, k| if i == k { diag[i] } else { Complex64::new(0.0, 0.0) });
        let e = matrix_exponential(m.as_ref()).unwrap();
        for i in 0..n {
            for k in 0..n {
                let expected = if i == k { diag[i].exp() } else { Complex64::new(0.0, 0.0) };
                assert!((e[(i, k)] - expected).norm() <= 1e-13 * expected.norm().max(1.0), "{i},{k}");
            }
        }
    }

    #[test]
    fn every_pade_degree_is_accurate() {
        // scalar multiples of a fixed matrix hit each norm band
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 6;
        let base = Mat::from_fn(n, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let base_norm = norm_one(base.as_ref());
        for target in [0.01, 0.2, 0.9, 2.0, 5.0, 40.0] {
            let s = target / base_norm;
            let a = Mat::from_fn(n, n, |i, k| base[(i, k)] * s);
            let e = matrix_exponential(a.as_ref()).unwrap();
            // exp(A) exp(-A) = I
            let neg = Mat::from_fn(n, n, |i, k| -a[(i, k)]);
            let einv = matrix_exponential(neg.as_ref()).unwrap();
            let prod = &e * &einv;
            assert!(max_diff(&prod, &Mat::identity(n, n)) < 1e-12 * e.norm_max().max(1.0) * einv.norm_max().max(1.0));
        }
    }

    #[test]
    fn agrees_with_spectral_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 50;
        let m = Mat::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 0.4
        });
        let eig = m.eigen().unwrap();
        let v = eig.U().to_owned();
        let s = eig.S();
        let lambda: Vec<Complex64> = s.column_vector().iter().copied().collect();
        let vexp = Mat::from_fn(n, n, |i, k| v[(i, k)] * lambda[k].exp());
        let vinv = v.partial_piv_lu().solve(Mat::<Complex64>::identity(n, n));
        let oracle = &vexp * &vinv;
        let e = matrix_exponential(m.as_ref()).unwrap();
        assert!(max_diff(&e, &oracle) < 1e-9, "{}", max_diff(&e, &oracle));
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = Mat::<Complex64>::zeros(3, 3);
        m[(1, 2)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(matrix_exponential(m.as_ref()), Err(Error::NonFinite(_))));
        let rect = Mat::<Complex64>::zeros(2, 3);
        assert!(matrix_exponential(rect.as_ref()).is_err());
    }
}
