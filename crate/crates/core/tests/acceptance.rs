//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line to stderr
//! (outside the test-output capture) and then asserts.

use std::io::Write;
use std::time::Instant;

use kicktop::classical::{
    chaotic_fraction, decoupled_map, default_epsilons, hausdorff_dimension, initial_condition_grid,
    lyapunov_dimension, lyapunov_spectrum, step, stroboscopic_map, to_plane, to_sphere, trajectory, BlochVector,
    LyapunovOptions, MapVariant, PhasePoint, DEFAULT_STEPS,
};
use kicktop::harness::{quantum_point, quantum_spectrum, ParamPoint, QuantumOptions};
use kicktop::liouville::{
    dissipative_floquet, isolated_eigenphases, parity_block_dims, parity_sectors, precision_filter, spectrum,
    ModelParams, Sector, TopParams, DEFAULT_EPSILON,
};
use kicktop::spin::Spin;
use kicktop::stats::constants::{MEAN_R_GINUE, MEAN_R_POISSON_2D, NEG_COS_GINUE, NEG_COS_POISSON_2D};
use kicktop::stats::{
    complex_spacing_ratios, ginibre_ratio_statistics, ginue_pdf, normalized_real_ratio, ratio_statistics,
    real_spacing_ratios, sample_poisson2d, NeighborSearch, GINIBRE_BULK_FRACTION,
};
use kicktop::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, ok: bool, detail: String, start: Instant) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!("{verdict} criterion {id:>2}: {detail} [{:.1}s]\n", start.elapsed().as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {id} failed: {detail}");
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn top(p: f64, k0: f64, k1: f64, gamma: f64) -> TopParams {
    TopParams { p, k0, k1, gamma }
}

fn point(p: f64, k0: f64, k1: f64, gamma: f64, j: f64) -> ParamPoint {
    ParamPoint { p, k0, k1, gamma, j }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn criterion_01_ginue_oracle() {
    let t = Instant::now();
    let s = ginibre_ratio_statistics(2000, &[0, 1, 2, 3, 4], GINIBRE_BULK_FRACTION).unwrap();
    let ok = within(s.mean_r, MEAN_R_GINUE, 0.01) && within(s.mean_neg_cos, NEG_COS_GINUE, 0.01);
    report(1, ok, format!("GinUE n=2000, 5 seeds: <r> = {:.4}, -<cos> = {:.4}", s.mean_r, s.mean_neg_cos), t);
}

#[test]
fn criterion_02_poisson2d_oracle() {
    let t = Instant::now();
    let pts = sample_poisson2d(10_000, 0).unwrap();
    let set = complex_spacing_ratios(&pts, NeighborSearch::Grid).unwrap();
    let s = ratio_statistics(&set.samples).unwrap();
    let ok = within(s.mean_r, MEAN_R_POISSON_2D, 0.01) && within(s.mean_neg_cos, NEG_COS_POISSON_2D, 0.01);
    report(2, ok, format!("2D Poisson n=1e4: <r> = {:.4}, -<cos> = {:.4}", s.mean_r, s.mean_neg_cos), t);
}

#[test]
fn criterion_03_ginue_pdf() {
    let t = Instant::now();
    let mean = simpson(|s| s * ginue_pdf(s).unwrap(), 0.0, 8.0, 8000);
    let xs: Vec<f64> = (0..=20).map(|i| 1e-3 * 10f64.powf(i as f64 / 20.0)).collect();
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = xs.iter().map(|&x| ginue_pdf(x).unwrap().ln()).collect();
    let k = slope(&lx, &ly);
    let ok = within(mean, 1.1429, 0.001) && within(k, 3.0, 0.05);
    report(3, ok, format!("mean spacing {mean:.5}, small-s slope {k:.4}"), t);
}

#[test]
fn criterion_04_parity_structure() {
    let t = Instant::now();
    let ten = Spin::new(10.0).unwrap();
    let d = dissipative_floquet(&ModelParams::new(2.0, 10.0, 8.0, 0.1, 10.0).unwrap()).unwrap();
    let blocks = parity_sectors(&d).unwrap();
    let (pos80, _) = parity_block_dims(Spin::new(80.0).unwrap());
    let ok = parity_block_dims(ten) == (221, 220)
        && blocks.positive.dim() == 221
        && blocks.negative.dim() == 220
        && blocks.off_block_norm < 1e-12
        && pos80 == 12961;
    report(
        4,
        ok,
        format!(
            "j=10 blocks {}/{}, off-block {:.1e}; j=80 positive dim {pos80}",
            blocks.positive.dim(),
            blocks.negative.dim(),
            blocks.off_block_norm
        ),
        t,
    );
}

#[test]
fn criterion_05_channel_sanity() {
    let t = Instant::now();
    let d = dissipative_floquet(&ModelParams::new(2.0, 10.0, 8.0, 0.1, 10.0).unwrap()).unwrap();
    let full = spectrum(d.matrix().as_ref(), Sector::Full).unwrap();
    let radius = full.spectral_radius();
    let ones = full.count_near_one(1e-10);
    // every eigenvalue pairs with a distinct conjugate
    let mut unused: Vec<Complex64> = full.eigenvalues.clone();
    let mut worst: f64 = 0.0;
    for z in &full.eigenvalues {
        let (i, dist) = unused
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - z.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        worst = worst.max(dist);
        unused.swap_remove(i);
    }
    let ok = radius <= 1.0 + 1e-10 && ones == 1 && worst <= 1e-9;
    report(5, ok, format!("max|λ| - 1 = {:.1e}, #(λ=1) = {ones}, conjugation mismatch {worst:.1e}", radius - 1.0), t);
}

#[test]
fn criterion_06_dissipative_correspondence() {
    let t = Instant::now();
    let opts = QuantumOptions::default();
    let weak = quantum_point(&point(2.0, 10.0, 1e-3, 0.1, 30.0), &opts).unwrap();
    let strong = quantum_point(&point(2.0, 10.0, 8.0, 0.1, 30.0), &opts).unwrap();
    let ok = within(weak.mean_r, MEAN_R_POISSON_2D, 0.03)
        && within(weak.mean_neg_cos, NEG_COS_POISSON_2D, 0.03)
        && within(strong.mean_r, MEAN_R_GINUE, 0.03)
        && within(strong.mean_neg_cos, NEG_COS_GINUE, 0.03);
    report(
        6,
        ok,
        format!(
            "j=30 k1=1e-3: <r> = {:.4}, -<cos> = {:.4}; k1=8: <r> = {:.4}, -<cos> = {:.4}",
            weak.mean_r, weak.mean_neg_cos, strong.mean_r, strong.mean_neg_cos
        ),
        t,
    );
}

#[test]
fn criterion_07_breakdown_signature() {
    let t = Instant::now();
    let grid = initial_condition_grid(1245).unwrap();
    let f = chaotic_fraction(&top(2.0, 10.0, 1.0, 0.4), &grid, &LyapunovOptions::default()).unwrap();
    let q = quantum_point(&point(2.0, 10.0, 1.0, 0.4, 30.0), &QuantumOptions::default()).unwrap();
    let ok = (0.0..=0.1).contains(&f.f_c) && (0.70..=0.75).contains(&q.mean_r);
    report(7, ok, format!("Γ=0.4 k1=1: f_c = {:.4} ({} points), j=30 <r> = {:.4}", f.f_c, f.n_points, q.mean_r), t);
}

#[test]
fn criterion_08_classical_transitions() {
    let t = Instant::now();
    let grid = initial_condition_grid(1245).unwrap();
    let opts = LyapunovOptions::default();
    let weak = chaotic_fraction(&top(2.0, 0.0, 0.5, 0.1), &grid, &opts).unwrap().f_c;
    let strong = chaotic_fraction(&top(2.0, 0.0, 8.0, 0.1), &grid, &opts).unwrap().f_c;

    let iso_grid = initial_condition_grid(1250).unwrap();
    let iso = LyapunovOptions { variant: MapVariant::Isolated, ..opts };
    let k1s: Vec<f64> = (0..=8).map(|i| 1.0 + 0.25 * i as f64).collect();
    let mu: Vec<f64> =
        k1s.iter().map(|&k1| chaotic_fraction(&top(2.0, 0.0, k1, 0.0), &iso_grid, &iso).unwrap().f_c).collect();
    let crossing = (1..mu.len()).find(|&i| mu[i - 1] < 0.5 && mu[i] >= 0.5).map(|i| {
        let (a, b) = (mu[i - 1], mu[i]);
        k1s[i - 1] + (0.5 - a) / (b - a) * (k1s[i] - k1s[i - 1])
    });
    let ok = weak <= 0.05 && strong >= 0.95 && crossing.is_some_and(|c| (1.5..=2.5).contains(&c));
    let mu_txt: Vec<String> = mu.iter().map(|m| format!("{m:.2}")).collect();
    report(
        8,
        ok,
        format!(
            "Γ=0.1 k0=0: f_c(0.5) = {weak:.4}, f_c(8) = {strong:.4}; isolated μ_c over k1=1..3 [{}], crossing {crossing:?}",
            mu_txt.join(", ")
        ),
        t,
    );
}

#[test]
fn criterion_09_dimensions() {
    let t = Instant::now();
    let opts = LyapunovOptions::default();
    let x0 = to_sphere(PhasePoint::new(0.3, 0.2)).unwrap();
    let point_spec = lyapunov_spectrum(x0, &top(2.0, 10.0, 0.0, 0.4), &opts).unwrap();
    let d_point = lyapunov_dimension(&point_spec, opts.h_tol);
    let chaotic = top(2.0, 10.0, 8.0, 0.1);
    let spec = lyapunov_spectrum(x0, &chaotic, &opts).unwrap();
    let d_l = lyapunov_dimension(&spec, opts.h_tol);
    let traj = trajectory(x0, &chaotic, MapVariant::Coupled, 1_000_000, 1000).unwrap();
    let pts: Vec<PhasePoint> = traj.iter().map(|x| to_plane(*x)).collect();
    let fit = hausdorff_dimension(&pts, &default_epsilons()).unwrap();
    let ok = d_point == 0.0 && (1.7..=2.0).contains(&d_l) && within(fit.dimension, d_l, 0.15);
    report(
        9,
        ok,
        format!(
            "point attractor D_L = {d_point}; chaotic D_L = {d_l:.4}, D_H = {:.4} (fit residual {:.1e})",
            fit.dimension, fit.residual
        ),
        t,
    );
}

#[test]
fn criterion_10_map_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let starts: Vec<BlochVector> = (0..10)
        .map(|_| {
            let z: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            BlochVector::new(s * phi.cos(), s * phi.sin(), z)
        })
        .collect();
    let gammas = [0.0125, 0.025, 0.05, 0.1];
    let errors: Vec<f64> = gammas
        .iter()
        .map(|&g| {
            let par = top(2.0, 10.0, 8.0, g);
            starts
                .iter()
                .map(|x| stroboscopic_map(*x, &par).unwrap().distance(&decoupled_map(*x, &par).unwrap()))
                .fold(0.0, f64::max)
        })
        .collect();
    let lg: Vec<f64> = gammas.iter().map(|g| g.ln()).collect();
    let le: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let k = slope(&lg, &le);

    let undamped = top(2.0, 10.0, 8.0, 0.0);
    let mut gap: f64 = 0.0;
    for x0 in &starts {
        let (mut a, mut b) = (*x0, *x0);
        for _ in 0..100 {
            a = step(MapVariant::Coupled, a, &undamped, DEFAULT_STEPS).unwrap();
            b = step(MapVariant::Decoupled, b, &undamped, DEFAULT_STEPS).unwrap();
            gap = gap.max(a.distance(&b));
        }
    }
    let ok = within(k, 2.0, 0.3) && gap <= 1e-8;
    let err_txt: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    report(
        10,
        ok,
        format!("discrepancy [{}] over Γ = {gammas:?}, log-log slope {k:.3}; Γ=0 gap over 100 periods {gap:.1e}", err_txt.join(", ")),
        t,
    );
}

#[test]
fn criterion_11_isolated_correspondence() {
    let t = Instant::now();
    let spin = Spin::new(512.0).unwrap();
    let r_c = |k1: f64| {
        let mut ratios = Vec::new();
        for sector in [Sector::Positive, Sector::Negative] {
            let phases = isolated_eigenphases(spin, 2.0, 10.0, k1, sector).unwrap();
            ratios.extend(real_spacing_ratios(&phases).unwrap());
        }
        normalized_real_ratio(ratios.iter().sum::<f64>() / ratios.len() as f64)
    };
    let (rc_weak, rc_strong) = (r_c(1e-3), r_c(8.0));
    let grid = initial_condition_grid(1250).unwrap();
    let iso = LyapunovOptions { variant: MapVariant::Isolated, ..Default::default() };
    let mu_weak = chaotic_fraction(&top(2.0, 10.0, 1e-3, 0.0), &grid, &iso).unwrap().f_c;
    let mu_strong = chaotic_fraction(&top(2.0, 10.0, 8.0, 0.0), &grid, &iso).unwrap().f_c;
    let ok = within(rc_weak, 0.0, 0.1)
        && within(rc_strong, 1.0, 0.1)
        && within(mu_weak, 0.0, 0.1)
        && within(mu_strong, 1.0, 0.1);
    report(
        11,
        ok,
        format!("j=512: r_c(1e-3) = {rc_weak:.4}, r_c(8) = {rc_strong:.4}; μ_c(1e-3) = {mu_weak:.4}, μ_c(8) = {mu_strong:.4}"),
        t,
    );
}

#[test]
fn criterion_12_precision_filter() {
    let t = Instant::now();
    let fraction = |gamma: f64, j: f64| {
        let spec = quantum_spectrum(&point(2.0, 10.0, 8.0, gamma, j), Sector::Positive).unwrap();
        precision_filter(&spec, DEFAULT_EPSILON).unwrap().1
    };
    let mut low = Vec::new();
    for j in [10.0, 20.0, 30.0] {
        for gamma in [0.05, 0.1] {
            low.push(fraction(gamma, j));
        }
    }
    let gammas = [0.4, 0.6, 0.8, 1.0, 1.5, 2.0];
    let high: Vec<f64> = gammas.iter().map(|&g| fraction(g, 30.0)).collect();
    let monotone = high.windows(2).all(|w| w[1] >= w[0]) && high[high.len() - 1] > high[0];
    let ok = low.iter().all(|&f| f == 0.0) && monotone;
    let txt: Vec<String> = high.iter().map(|f| format!("{f:.4}")).collect();
    report(
        12,
        ok,
        format!("max N_ε/N for Γ ≤ 0.1, j ≤ 30: {:.4}; j=30 over Γ = {gammas:?}: [{}]", low.iter().cloned().fold(0.0, f64::max), txt.join(", ")),
        t,
    );
}
