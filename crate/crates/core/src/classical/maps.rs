use super::{BlochVector, MapVariant, PhasePoint};
use crate::liouville::TopParams;
use crate::{Error, Result};

/// RK4 steps per period for the damped flow.
pub const DEFAULT_STEPS: usize = 100;

/// Row-major 3×3 matrix.
pub type Mat3 = [[f64; 3]; 3];

fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            c[i][k] = (0..3).map(|l| a[i][l] * b[l][k]).sum();
        }
    }
    c
}

fn check(x: BlochVector) -> Result<BlochVector> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite("classical state"))
    }
}

fn rhs(j: &[f64; 3], par: &TopParams) -> [f64; 3] {
    let w = par.p + par.k0 * j[2];
    let g = par.gamma;
    [-w * j[1] + g * j[0] * j[2], w * j[0] + g * j[1] * j[2], -g * (j[0] * j[0] + j[1] * j[1])]
}

fn rhs_jacobian(j: &[f64; 3], par: &TopParams) -> Mat3 {
    let w = par.p + par.k0 * j[2];
    let g = par.gamma;
    [
        [g * j[2], -w, -par.k0 * j[1] + g * j[0]],
        [w, g * j[2], par.k0 * j[0] + g * j[1]],
        [-2.0 * g * j[0], -2.0 * g * j[1], 0.0],
    ]
}

/// State plus the 3×3 variational matrix, flattened.
type Extended = [f64; 12];

fn extended_rhs(y: &Extended, par: &TopParams) -> Extended {
    let j = [y[0], y[1], y[2]];
    let f = rhs(&j, par);
    let a = rhs_jacobian(&j, par);
    let mut out = [0.0; 12];
    out[..3].copy_from_slice(&f);
    for i in 0..3 {
        for k in 0..3 {
            out[3 + 3 * i + k] = (0..3).map(|l| a[i][l] * y[3 + 3 * l + k]).sum();
        }
    }
    out
}

fn rk4<const N: usize>(y: &mut [f64; N], h: f64, f: impl Fn(&[f64; N]) -> [f64; N]) {
    let shifted = |base: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *base;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += c * ki;
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&shifted(y, &k1, 0.5 * h));
    let k3 = f(&shifted(y, &k2, 0.5 * h));
    let k4 = f(&shifted(y, &k3, h));
    for i in 0..N {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Rotation about z by `p + k0 jz`, the exact undamped flow.
fn precession(x: BlochVector, p: f64, k0: f64) -> (BlochVector, Mat3) {
    let theta = p + k0 * x.jz;
    let (s, c) = theta.sin_cos();
    let out = BlochVector::new(c * x.jx - s * x.jy, s * x.jx + c * x.jy, x.jz);
    let jac = [[c, -s, -k0 * out.jy], [s, c, k0 * out.jx], [0.0, 0.0, 1.0]];
    (out, jac)
}

fn renormalize(x: BlochVector) -> Result<BlochVector> {
    BlochVector::normalized(x.jx, x.jy, x.jz)
}

/// Damped flow over one period with `steps` RK4 steps, renormalized to
/// the sphere at the end. The undamped flow is a rigid rotation and is
/// applied exactly.
pub fn flow_period_with(x: BlochVector, par: &TopParams, steps: usize) -> Result<BlochVector> {
    check(x)?;
    if par.gamma == 0.0 {
        return Ok(precession(x, par.p, par.k0).0);
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("flow needs at least one step".into()));
    }
    let mut y = x.to_array();
    let h = 1.0 / steps as f64;
    for _ in 0..steps {
        rk4(&mut y, h, |j| rhs(j, par));
    }
    renormalize(check(BlochVector::from_array(y))?)
}

pub fn flow_period(x: BlochVector, par: &TopParams) -> Result<BlochVector> {
    flow_period_with(x, par, DEFAULT_STEPS)
}

fn flow_with_jacobian(x: BlochVector, par: &TopParams, steps: usize) -> Result<(BlochVector, Mat3)> {
    check(x)?;
    if par.gamma == 0.0 {
        return Ok(precession(x, par.p, par.k0));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("flow needs at least one step".into()));
    }
    let mut y = [0.0; 12];
    y[..3].copy_from_slice(&x.to_array());
    for i in 0..3 {
        y[3 + 4 * i] = 1.0;
    }
    let h = 1.0 / steps as f64;
    for _ in 0..steps {
        rk4(&mut y, h, |e| extended_rhs(e, par));
    }
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            m[i][k] = y[3 + 3 * i + k];
        }
    }
    let out = renormalize(check(BlochVector::new(y[0], y[1], y[2]))?)?;
    Ok((out, m))
}

/// Rotation about y by `k1 jy`.
pub fn kick_map(x: BlochVector, k1: f64) -> BlochVector {
    let (s, c) = (k1 * x.jy).sin_cos();
    BlochVector::new(c * x.jx + s * x.jz, x.jy, -s * x.jx + c * x.jz)
}

fn kick_with_jacobian(x: BlochVector, k1: f64) -> (BlochVector, Mat3) {
    let (s, c) = (k1 * x.jy).sin_cos();
    let out = kick_map(x, k1);
    let jac = [[c, k1 * out.jz, s], [0.0, 1.0, 0.0], [-s, -k1 * out.jx, c]];
    (out, jac)
}

/// Kick after one period of damped flow.
pub fn stroboscopic_map(x: BlochVector, par: &TopParams) -> Result<BlochVector> {
    Ok(kick_map(flow_period(x, par)?, par.k1))
}

/// Undamped one-period map: precession, torsion, kick.
pub fn isolated_map(x: BlochVector, p: f64, k0: f64, k1: f64) -> BlochVector {
    kick_map(precession(x, p, k0).0, k1)
}

/// Closed-form pure damping over one period.
pub fn dissipation_map(x: BlochVector, gamma: f64) -> BlochVector {
    let (s, c) = (gamma.sinh(), gamma.cosh());
    let den = c - s * x.jz;
    BlochVector::new(x.jx / den, x.jy / den, (c * x.jz - s) / den)
}

fn dissipation_with_jacobian(x: BlochVector, gamma: f64) -> (BlochVector, Mat3) {
    let (s, c) = (gamma.sinh(), gamma.cosh());
    let den = c - s * x.jz;
    let d2 = den * den;
    let jac = [[1.0 / den, 0.0, x.jx * s / d2], [0.0, 1.0 / den, x.jy * s / d2], [0.0, 0.0, 1.0 / d2]];
    (dissipation_map(x, gamma), jac)
}

/// Undamped period followed by the closed-form damping step.
pub fn decoupled_map(x: BlochVector, par: &TopParams) -> Result<BlochVector> {
    check(x)?;
    Ok(dissipation_map(isolated_map(x, par.p, par.k0, par.k1), par.gamma))
}

/// One period of the chosen map.
pub fn step(variant: MapVariant, x: BlochVector, par: &TopParams, steps: usize) -> Result<BlochVector> {
    let out = match variant {
        MapVariant::Coupled => kick_map(flow_period_with(x, par, steps)?, par.k1),
        MapVariant::Decoupled => decoupled_map(x, par)?,
        MapVariant::Isolated => isolated_map(check(x)?, par.p, par.k0, par.k1),
    };
    check(out)
}

/// One period together with its 3×3 Jacobian in ambient coordinates.
pub fn step_with_jacobian(
    variant: MapVariant,
    x: BlochVector,
    par: &TopParams,
    steps: usize,
) -> Result<(BlochVector, Mat3)> {
    let (mid, first) = match variant {
        MapVariant::Coupled => flow_with_jacobian(x, par, steps)?,
        MapVariant::Decoupled | MapVariant::Isolated => precession(check(x)?, par.p, par.k0),
    };
    let (kicked, kj) = kick_with_jacobian(mid, par.k1);
    let mut jac = mat_mul(&kj, &first);
    let mut out = kicked;
    if variant == MapVariant::Decoupled {
        let (damped, dj) = dissipation_with_jacobian(kicked, par.gamma);
        jac = mat_mul(&dj, &jac);
        out = damped;
    }
    Ok((check(out)?, jac))
}

/// `n_periods` iterates after skipping `skip`, starting from `x0`.
pub fn trajectory(
    x0: BlochVector,
    par: &TopParams,
    variant: MapVariant,
    n_periods: usize,
    skip: usize,
) -> Result<Vec<BlochVector>> {
    let mut x = x0;
    for _ in 0..skip {
        x = step(variant, x, par, DEFAULT_STEPS)?;
    }
    let mut out = Vec::with_capacity(n_periods);
    for _ in 0..n_periods {
        x = step(variant, x, par, DEFAULT_STEPS)?;
        out.push(x);
    }
    Ok(out)
}

/// Stereographic-type chart onto the disk of radius 2; the south pole is
/// the origin. The north pole maps to the boundary point `(2, 0)`.
pub fn to_plane(x: BlochVector) -> PhasePoint {
    let rho2 = x.jx * x.jx + x.jy * x.jy;
    if rho2 == 0.0 {
        return if x.jz < 0.0 { PhasePoint::new(0.0, 0.0) } else { PhasePoint::new(2.0, 0.0) };
    }
    let f = (2.0 * (1.0 + x.jz) / rho2).sqrt();
    PhasePoint::new(x.jx * f, -x.jy * f)
}

pub fn to_sphere(pp: PhasePoint) -> Result<BlochVector> {
    let r2 = pp.radius_sq();
    if !r2.is_finite() {
        return Err(Error::NonFinite("phase point"));
    }
    if r2 > 4.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("phase point outside the disk: q² + p² = {r2}")));
    }
    let f = (1.0 - r2 / 4.0).max(0.0).sqrt();
    Ok(BlochVector::new(pp.q * f, -pp.p * f, r2 / 2.0 - 1.0))
}
