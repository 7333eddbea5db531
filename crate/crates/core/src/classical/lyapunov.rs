use serde::{Deserialize, Serialize};

use super::maps::{step_with_jacobian, Mat3, DEFAULT_STEPS};
use super::{BlochVector, MapVariant};
use crate::liouville::TopParams;
use crate::{Error, Result};

/// Exponents at or below this (per period) count as non-chaotic. Regular
/// orbits of the undamped map show `h1 ≈ ln(n)/n` from linear shear
/// growth, about `2.5e-3` at 1000 periods, so the cut sits above that.
pub const DEFAULT_H_TOL: f64 = 1e-2;
pub const DEFAULT_PERIODS: usize = 1000;
pub const DEFAULT_TRANSIENT: usize = 100;

const COLLAPSE: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    /// Total periods iterated, transient included.
    pub n_periods: usize,
    pub transient: usize,
    pub steps: usize,
    pub variant: MapVariant,
    pub h_tol: f64,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        LyapunovOptions {
            n_periods: DEFAULT_PERIODS,
            transient: DEFAULT_TRANSIENT,
            steps: DEFAULT_STEPS,
            variant: MapVariant::Coupled,
            h_tol: DEFAULT_H_TOL,
        }
    }
}

impl LyapunovOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_periods < 100 {
            return Err(Error::InvalidParameter(format!("need at least 100 periods, got {}", self.n_periods)));
        }
        if self.transient >= self.n_periods {
            return Err(Error::InvalidParameter("transient must be shorter than the run".into()));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("flow needs at least one step".into()));
        }
        if !(self.h_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("h_tol must be non-negative, got {}", self.h_tol)));
        }
        Ok(())
    }
}

/// Exponents in units of inverse periods, `h1 ≥ h2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    pub h1: f64,
    pub h2: f64,
    pub n_periods: usize,
    pub transient: usize,
    /// Final state of the trajectory.
    pub end: BlochVector,
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn apply(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

fn axpy(v: &mut [f64; 3], a: f64, x: &[f64; 3]) {
    for i in 0..3 {
        v[i] += a * x[i];
    }
}

fn scale(v: &mut [f64; 3], a: f64) {
    for x in v.iter_mut() {
        *x *= a;
    }
}

/// Orthonormal basis of the tangent plane at `x`.
fn tangent_basis(x: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = if x[0].abs() <= x[1].abs() && x[0].abs() <= x[2].abs() {
        [1.0, 0.0, 0.0]
    } else if x[1].abs() <= x[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let mut e1 = axis;
    axpy(&mut e1, -dot(&axis, x), x);
    let len = dot(&e1, &e1).sqrt();
    scale(&mut e1, 1.0 / len);
    (e1, cross(x, &e1))
}

/// Tangent-space QR method: two tangent vectors follow the linearized map,
/// are projected onto the sphere's tangent plane and re-orthonormalized
/// every period. Log stretch factors are averaged after the transient.
pub fn lyapunov_spectrum(x0: BlochVector, par: &TopParams, opts: &LyapunovOptions) -> Result<LyapunovSpectrum> {
    opts.validate()?;
    let mut x = BlochVector::normalized(x0.jx, x0.jy, x0.jz)?;
    let (mut v1, mut v2) = tangent_basis(&x.to_array());
    let (mut s1, mut s2) = (0.0, 0.0);
    for period in 0..opts.n_periods {
        let (next, jac) = step_with_jacobian(opts.variant, x, par, opts.steps)?;
        x = next;
        let n = x.to_array();
        v1 = apply(&jac, &v1);
        v2 = apply(&jac, &v2);
        let (c1, c2) = (dot(&v1, &n), dot(&v2, &n));
        axpy(&mut v1, -c1, &n);
        axpy(&mut v2, -c2, &n);
        let n1 = dot(&v1, &v1).sqrt();
        if !(n1 > COLLAPSE) || !n1.is_finite() {
            return Err(Error::TangentCollapse(period));
        }
        scale(&mut v1, 1.0 / n1);
        let c12 = dot(&v2, &v1);
        axpy(&mut v2, -c12, &v1);
        let n2 = dot(&v2, &v2).sqrt();
        if !(n2 > COLLAPSE) || !n2.is_finite() {
            return Err(Error::TangentCollapse(period));
        }
        scale(&mut v2, 1.0 / n2);
        if period >= opts.transient {
            s1 += n1.ln();
            s2 += n2.ln();
        }
    }
    let t = (opts.n_periods - opts.transient) as f64;
    let (a, b) = (s1 / t, s2 / t);
    Ok(LyapunovSpectrum { h1: a.max(b), h2: a.min(b), n_periods: opts.n_periods, transient: opts.transient, end: x })
}

/// Time-averaged `ln |det|` of the Jacobian restricted to the tangent
/// planes, computed from the cross product of mapped basis vectors.
pub fn mean_log_area_factor(x0: BlochVector, par: &TopParams, opts: &LyapunovOptions) -> Result<f64> {
    opts.validate()?;
    let mut x = BlochVector::normalized(x0.jx, x0.jy, x0.jz)?;
    let mut sum = 0.0;
    for period in 0..opts.n_periods {
        let (e1, e2) = tangent_basis(&x.to_array());
        let (next, jac) = step_with_jacobian(opts.variant, x, par, opts.steps)?;
        x = next;
        let area = dot(&cross(&apply(&jac, &e1), &apply(&jac, &e2)), &x.to_array()).abs();
        if period >= opts.transient {
            sum += area.ln();
        }
    }
    Ok(sum / (opts.n_periods - opts.transient) as f64)
}

/// `1` if the largest exponent exceeds `h_tol`, else `0`.
pub fn classify(x0: BlochVector, par: &TopParams, opts: &LyapunovOptions) -> Result<u8> {
    let spec = lyapunov_spectrum(x0, par, opts)?;
    Ok(u8::from(spec.h1 > opts.h_tol))
}

/// Kaplan–Yorke dimension of a two-exponent spectrum, with `|h| < h_tol`
/// treated as zero.
pub fn lyapunov_dimension(spec: &LyapunovSpectrum, h_tol: f64) -> f64 {
    let clip = |h: f64| if h.abs() < h_tol { 0.0 } else { h };
    let (h1, h2) = (clip(spec.h1), clip(spec.h2));
    if h1 < 0.0 {
        0.0
    } else if h1 + h2 >= 0.0 {
        2.0
    } else {
        1.0 + h1 / h2.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn par(p: f64, k0: f64, k1: f64, gamma: f64) -> TopParams {
        TopParams { p, k0, k1, gamma }
    }

    fn spec(h1: f64, h2: f64) -> LyapunovSpectrum {
        LyapunovSpectrum { h1, h2, n_periods: 1000, transient: 100, end: BlochVector::SOUTH }
    }

    fn start() -> BlochVector {
        BlochVector::normalized(0.3, 0.1, -0.9).unwrap()
    }

    #[test]
    fn dimension_cases() {
        assert_eq!(lyapunov_dimension(&spec(-0.5, -1.0), 1e-3), 0.0);
        assert_eq!(lyapunov_dimension(&spec(0.0, -0.3), 1e-3), 1.0);
        assert_eq!(lyapunov_dimension(&spec(5e-4, -0.3), 1e-3), 1.0);
        assert_eq!(lyapunov_dimension(&spec(0.5, -1.0), 1e-3), 1.5);
        assert_eq!(lyapunov_dimension(&spec(0.5, 0.1), 1e-3), 2.0);
    }

    #[test]
    fn point_attractor_contracts() {
        let s = lyapunov_spectrum(start(), &par(2.0, 10.0, 0.0, 0.4), &LyapunovOptions::default()).unwrap();
        assert!(s.h1 < 0.0, "{s:?}");
        assert_eq!(lyapunov_dimension(&s, DEFAULT_H_TOL), 0.0);
    }

    #[test]
    fn strong_kick_is_chaotic() {
        let opts = LyapunovOptions::default();
        let s = lyapunov_spectrum(BlochVector::SOUTH, &par(2.0, 10.0, 8.0, 0.1), &opts).unwrap();
        assert!(s.h1 > 0.1, "{s:?}");
        assert_eq!(classify(start(), &par(2.0, 10.0, 8.0, 0.1), &opts).unwrap(), 1);
        assert_eq!(classify(start(), &par(2.0, 10.0, 0.0, 0.1), &opts).unwrap(), 0);
        let iso = LyapunovOptions { variant: MapVariant::Isolated, ..opts };
        assert!(lyapunov_spectrum(start(), &par(2.0, 0.0, 8.0, 0.0), &iso).unwrap().h1 > 0.1);
    }

    #[test]
    fn near_integrable_orbit_has_zero_exponent() {
        let opts = LyapunovOptions { variant: MapVariant::Isolated, ..Default::default() };
        let s = lyapunov_spectrum(start(), &par(2.0, 10.0, 0.001, 0.0), &opts).unwrap();
        assert!(s.h1.abs() < 5e-3, "{s:?}");
        // area preservation
        assert!((s.h1 + s.h2).abs() < 1e-10, "{s:?}");
    }

    #[test]
    fn threshold_sensitivity() {
        let regular = par(2.0, 10.0, 0.001, 0.0);
        let chaotic = par(2.0, 10.0, 8.0, 0.1);
        for h_tol in [5e-3, 1e-2, 2e-2, 5e-2] {
            let iso = LyapunovOptions { variant: MapVariant::Isolated, h_tol, ..Default::default() };
            assert_eq!(classify(start(), &regular, &iso).unwrap(), 0, "{h_tol}");
            let opts = LyapunovOptions { h_tol, ..Default::default() };
            assert_eq!(classify(start(), &chaotic, &opts).unwrap(), 1, "{h_tol}");
            assert_eq!(classify(start(), &par(2.0, 10.0, 0.0, 0.1), &opts).unwrap(), 0, "{h_tol}");
        }
        let s = lyapunov_spectrum(start(), &regular, &LyapunovOptions { variant: MapVariant::Isolated, ..Default::default() }).unwrap();
        assert!(s.h1 > 1e-3 && s.h1 < DEFAULT_H_TOL, "{s:?}");
    }

    #[test]
    fn sum_rule() {
        for (variant, gamma) in [(MapVariant::Coupled, 0.1), (MapVariant::Decoupled, 0.1), (MapVariant::Coupled, 0.4)] {
            let opts = LyapunovOptions { variant, ..Default::default() };
            let pr = par(2.0, 10.0, 8.0, gamma);
            let s = lyapunov_spectrum(start(), &pr, &opts).unwrap();
            let area = mean_log_area_factor(start(), &pr, &opts).unwrap();
            assert!((s.h1 + s.h2 - area).abs() < 2e-3, "{variant}: {} vs {area}", s.h1 + s.h2);
        }
    }

    #[test]
    fn damped_attractors_contract_on_average() {
        // the surface divergence of the damping field is 2Γ J_z, so short
        // runs fluctuate; long averages settle at or below zero
        for (variant, gamma) in [(MapVariant::Coupled, 0.1), (MapVariant::Decoupled, 0.1), (MapVariant::Coupled, 0.4)] {
            let opts = LyapunovOptions { variant, n_periods: 30_000, transient: 1000, ..Default::default() };
            let s = lyapunov_spectrum(start(), &par(2.0, 10.0, 8.0, gamma), &opts).unwrap();
            assert!(s.h1 + s.h2 <= 1e-3, "{variant} {gamma}: {s:?}");
        }
    }

    #[test]
    fn deterministic() {
        let opts = LyapunovOptions::default();
        let a = lyapunov_spectrum(start(), &par(2.0, 10.0, 8.0, 0.1), &opts).unwrap();
        let b = lyapunov_spectrum(start(), &par(2.0, 10.0, 8.0, 0.1), &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn options_are_validated() {
        let bad = LyapunovOptions { n_periods: 50, ..Default::default() };
        assert!(lyapunov_spectrum(start(), &par(2.0, 1.0, 1.0, 0.1), &bad).is_err());
        let bad = LyapunovOptions { transient: 1000, ..Default::default() };
        assert!(lyapunov_spectrum(start(), &par(2.0, 1.0, 1.0, 0.1), &bad).is_err());
    }
}
