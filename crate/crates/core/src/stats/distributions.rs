use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::{Error, Result};

fn check_s(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::InvalidParameter(format!("spacing must be non-negative, got {s}")));
    }
    Ok(())
}

/// `(π/2) s exp(-π s² / 4)`.
pub fn poisson2d_pdf(s: f64) -> Result<f64> {
    check_s(s)?;
    Ok(0.5 * PI * s * (-0.25 * PI * s * s).exp())
}

/// Poisson(x) probabilities for `0..=kmax`, computed in log space.
fn poisson_pmf(x: f64, kmax: usize) -> Vec<f64> {
    let ln_x = x.ln();
    let mut ln_fact = 0.0;
    (0..=kmax)
        .map(|k| {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            if x == 0.0 {
                if k == 0 { 1.0 } else { 0.0 }
            } else {
                (k as f64 * ln_x - x - ln_fact).exp()
            }
        })
        .collect()
}

fn default_order(x: f64) -> usize {
    (x + 10.0 * x.sqrt() + 20.0).ceil() as usize
}

/// Nearest-neighbour spacing density of the GinUE,
/// `P(s) = Π_k Γ(1+k, s²)/k! · Σ_j 2 s^{2j+1} e^{-s²} / Γ(1+j, s²)`,
/// truncated at `order` terms.
pub fn ginue_pdf_truncated(s: f64, order: usize) -> Result<f64> {
    check_s(s)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let x = s * s;
    // enough pmf terms that the tail beyond them is negligible
    let kmax = order.max(default_order(x)) + 60;
    let pmf = poisson_pmf(x, kmax);
    // tail[k] = P(N > k), summed from the top for accuracy
    let mut tail = vec![0.0; kmax + 1];
    for k in (0..kmax).rev() {
        tail[k] = tail[k + 1] + pmf[k + 1];
    }
    let mut head = 0.0;
    let mut ln_prod = 0.0;
    let mut sum = 0.0;
    for k in 0..=order {
        head += pmf[k];
        if k == 0 {
            continue;
        }
        // Γ(1+k, x)/k! = P(N ≤ k)
        let q = if tail[k] < 0.5 { 1.0 - tail[k] } else { head };
        ln_prod += if tail[k] < 0.5 { (-tail[k]).ln_1p() } else { head.ln() };
        sum += 2.0 * s * pmf[k] / q;
    }
    Ok(ln_prod.exp() * sum)
}

/// GinUE spacing density with adaptive truncation.
pub fn ginue_pdf(s: f64) -> Result<f64> {
    check_s(s)?;
    ginue_pdf_truncated(s, default_order(s * s))
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub(crate) fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // split first so the adaptive step sees the peak
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson(&f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Upper integration limit; the density is below 1e-300 past this.
const S_MAX: f64 = 8.0;

/// `s̄ = ∫ s P(s) ds` for the unscaled density.
pub fn ginue_mean_spacing() -> f64 {
    static MEAN: OnceLock<f64> = OnceLock::new();
    *MEAN.get_or_init(|| integrate(|s| s * ginue_pdf(s).unwrap_or(0.0), 0.0, S_MAX, 1e-12))
}

/// `s̄ P(s̄ s)`, normalized to unit mean.
pub fn ginue_pdf_rescaled(s: f64) -> Result<f64> {
    check_s(s)?;
    let mean = ginue_mean_spacing();
    Ok(mean * ginue_pdf(mean * s)?)
}
