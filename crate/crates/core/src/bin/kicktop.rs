use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kicktop::classical::{
    bifurcation_scan, chaotic_fraction, initial_condition_grid, lyapunov_dimension, lyapunov_spectrum,
    poincare_section, to_sphere, BlochVector, LyapunovOptions, MapVariant, PhasePoint, DEFAULT_GRID_POINTS,
    DEFAULT_H_TOL, DEFAULT_PERIODS, DEFAULT_TRANSIENT,
};
use kicktop::harness::{
    csv_reader, quantum_spectrum, run_sweep, spectrum_statistics, write_bifurcation_csv,
    write_point_metrics_csv, write_spectrum_csv, write_sweep_outputs, write_trajectories_csv, ParamPoint,
    Provenance, SweepConfig, WORKERS_ENV,
};
use kicktop::liouville::{precision_filter, ComplexSpectrum, Sector, TopParams, DEFAULT_EPSILON};
use kicktop::stats::{
    ginibre_ratio_statistics, normalized_real_ratio, ratio_statistics, real_spacing_ratios, sample_coe_phases,
    sample_poisson2d, sample_uniform_phases, complex_spacing_ratios, NeighborSearch, GINIBRE_BULK_FRACTION,
};
use kicktop::{Complex64, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "kicktop", version, about = "Spectra and attractors of the damped kicked top")]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of the dissipative Floquet operator at one point, as CSV.
    QuantumSpectrum {
        #[command(flatten)]
        top: TopArgs,
        #[arg(long, default_value_t = 10.0)]
        j: f64,
        #[arg(long, default_value = "positive")]
        sector: Sector,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Complex spacing-ratio statistics of a spectrum file or parameter point.
    RatioStats {
        /// Spectrum CSV written by `quantum-spectrum`.
        #[arg(long, conflicts_with = "j")]
        input: Option<PathBuf>,
        #[command(flatten)]
        top: TopArgs,
        #[arg(long)]
        j: Option<f64>,
        #[arg(long, default_value = "positive")]
        sector: Sector,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Chaotic fraction and mean Lyapunov dimension over the lattice grid.
    ClassicalMetrics {
        #[command(flatten)]
        top: TopArgs,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        n_ic: usize,
        #[command(flatten)]
        lyap: LyapArgs,
        /// Per-initial-condition table.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Lyapunov spectrum of one trajectory.
    Lyapunov {
        #[command(flatten)]
        top: TopArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        q0: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        p0: f64,
        #[command(flatten)]
        lyap: LyapArgs,
    },
    /// Late-time J_y samples of the coupled map over a range of damping.
    Bifurcation {
        #[command(flatten)]
        top: TopArgs,
        #[arg(long, default_value_t = 0.0)]
        gamma_min: f64,
        #[arg(long, default_value_t = 1.0)]
        gamma_max: f64,
        #[arg(long, default_value_t = 101)]
        gamma_steps: usize,
        #[arg(long, default_value_t = 1000)]
        n_periods: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Stroboscopic (Q, P) sections from lattice initial conditions.
    Poincare {
        #[command(flatten)]
        top: TopArgs,
        #[arg(long, default_value = "coupled")]
        variant: MapVariant,
        #[arg(long, default_value_t = 300)]
        n_ic: usize,
        #[arg(long, default_value_t = 1000)]
        n_periods: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Ratio statistics of random reference ensembles.
    Oracle {
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds pooled, starting at `seed`.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
    /// Run a sweep described by a TOML file.
    Sweep {
        #[arg(long, short)]
        config: PathBuf,
        /// Overrides `output.directory`.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Overrides `allow_large_j`.
        #[arg(long)]
        allow_large_j: bool,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct TopArgs {
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    k0: f64,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    k1: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
}

impl TopArgs {
    fn params(&self) -> Result<TopParams> {
        TopParams::new(self.p, self.k0, self.k1, self.gamma)
    }
}

#[derive(Args, Debug, Clone, Copy)]
struct LyapArgs {
    #[arg(long, default_value_t = DEFAULT_PERIODS)]
    n_periods: usize,
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    #[arg(long, default_value_t = DEFAULT_H_TOL)]
    h_tol: f64,
    #[arg(long, default_value = "coupled")]
    variant: MapVariant,
}

impl LyapArgs {
    fn options(&self) -> LyapunovOptions {
        LyapunovOptions {
            n_periods: self.n_periods,
            transient: self.transient,
            h_tol: self.h_tol,
            variant: self.variant,
            ..Default::default()
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Ensemble {
    /// Complex Ginibre matrices.
    Ginue,
    /// Uniform points in the unit square.
    Poisson2d,
    /// Uniform phases on the circle.
    Poisson,
    /// Eigenphases of `U U^T` for Haar `U`.
    Coe,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn print_json(value: serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value)?;
    writeln!(out)?;
    Ok(())
}

fn read_spectrum(path: &PathBuf) -> Result<ComplexSpectrum> {
    let mut rdr = csv_reader(File::open(path)?);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::InvalidParameter(format!("missing column {name}")))
    };
    let (re, im, sec) = (col("re_lambda")?, col("im_lambda")?, col("sector")?);
    let mut eigenvalues = Vec::new();
    let mut sector = Sector::Full;
    for row in rdr.records() {
        let row = row?;
        let parse = |i: usize| {
            row[i].trim().parse::<f64>().map_err(|e| Error::InvalidParameter(format!("bad number `{}`: {e}", &row[i])))
        };
        eigenvalues.push(Complex64::new(parse(re)?, parse(im)?));
        sector = row[sec].parse()?;
    }
    Ok(ComplexSpectrum::from_eigenvalues(eigenvalues, sector))
}

fn oracle(ensemble: Ensemble, n: usize, seed: u64, seeds: u64) -> Result<serde_json::Value> {
    let seed_list: Vec<u64> = (seed..seed + seeds.max(1)).collect();
    let name = format!("{ensemble:?}").to_lowercase();
    match ensemble {
        Ensemble::Ginue => {
            let s = ginibre_ratio_statistics(n, &seed_list, GINIBRE_BULK_FRACTION)?;
            Ok(json!({ "ensemble": name, "n": n, "seeds": seed_list, "mean_r": s.mean_r, "neg_mean_cos": s.mean_neg_cos,
                       "R_c": s.r_c, "Theta_c": s.theta_c, "n_samples": s.n_samples }))
        }
        Ensemble::Poisson2d => {
            let mut pooled = Vec::new();
            for &sd in &seed_list {
                pooled.extend(complex_spacing_ratios(&sample_poisson2d(n, sd)?, NeighborSearch::Grid)?.samples);
            }
            let s = ratio_statistics(&pooled)?;
            Ok(json!({ "ensemble": name, "n": n, "seeds": seed_list, "mean_r": s.mean_r, "neg_mean_cos": s.mean_neg_cos,
                       "R_c": s.r_c, "Theta_c": s.theta_c, "n_samples": s.n_samples }))
        }
        Ensemble::Poisson | Ensemble::Coe => {
            let mut ratios = Vec::new();
            for &sd in &seed_list {
                let phases =
                    if matches!(ensemble, Ensemble::Poisson) { sample_uniform_phases(n, sd)? } else { sample_coe_phases(n, sd)? };
                ratios.extend(real_spacing_ratios(&phases)?);
            }
            let mean_r = ratios.iter().sum::<f64>() / ratios.len() as f64;
            Ok(json!({ "ensemble": name, "n": n, "seeds": seed_list, "mean_r": mean_r,
                       "r_c": normalized_real_ratio(mean_r), "n_samples": ratios.len() }))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::InvalidParameter("workers must be at least 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            log::debug!("global pool already set: {e}");
        }
    }
    match cli.command {
        Command::QuantumSpectrum { top, j, sector, epsilon, output } => {
            let pt = ParamPoint { p: top.p, k0: top.k0, k1: top.k1, gamma: top.gamma, j };
            let spec = quantum_spectrum(&pt, sector)?;
            let (kept, fraction) = precision_filter(&spec, epsilon)?;
            log::info!("{} eigenvalues kept, filtered fraction {fraction}", kept.len());
            let prov = Provenance::for_inputs(&format!("quantum-spectrum {pt:?} {sector} {epsilon:e}"));
            write_spectrum_csv(sink(&output)?, &kept, &prov)
        }
        Command::RatioStats { input, top, j, sector, epsilon } => {
            let spec = match (input, j) {
                (Some(path), _) => read_spectrum(&path)?,
                (None, Some(j)) => {
                    quantum_spectrum(&ParamPoint { p: top.p, k0: top.k0, k1: top.k1, gamma: top.gamma, j }, sector)?
                }
                (None, None) => return Err(Error::InvalidParameter("give --input or --j".into())),
            };
            let q = spectrum_statistics(&spec, epsilon)?;
            print_json(serde_json::to_value(q)?)
        }
        Command::ClassicalMetrics { top, n_ic, lyap, output } => {
            let par = top.params()?;
            let grid = initial_condition_grid(n_ic)?;
            let r = chaotic_fraction(&par, &grid, &lyap.options())?;
            if output.is_some() {
                let prov = Provenance::for_inputs(&format!("classical-metrics {par:?} {n_ic} {lyap:?}"));
                write_point_metrics_csv(sink(&output)?, &r.points, &prov)?;
            }
            print_json(json!({ "params": par, "n_points": r.n_points, "f_c": r.f_c, "mean_d_lyapunov": r.mean_d_lyapunov }))
        }
        Command::Lyapunov { top, q0, p0, lyap } => {
            let par = top.params()?;
            let opts = lyap.options();
            let x0 = to_sphere(PhasePoint::new(q0, p0))?;
            let s = lyapunov_spectrum(x0, &par, &opts)?;
            print_json(json!({
                "params": par, "q0": q0, "p0": p0, "h1": s.h1, "h2": s.h2,
                "upsilon": u8::from(s.h1 > opts.h_tol), "d_lyapunov": lyapunov_dimension(&s, opts.h_tol),
            }))
        }
        Command::Bifurcation { top, gamma_min, gamma_max, gamma_steps, n_periods, output } => {
            if gamma_steps == 0 || !(gamma_max >= gamma_min) {
                return Err(Error::InvalidParameter("need gamma_steps ≥ 1 and gamma_max ≥ gamma_min".into()));
            }
            let step = if gamma_steps > 1 { (gamma_max - gamma_min) / (gamma_steps - 1) as f64 } else { 0.0 };
            let gammas: Vec<f64> = (0..gamma_steps).map(|i| gamma_min + step * i as f64).collect();
            let slices = bifurcation_scan(&top.params()?, &gammas, BlochVector::SOUTH, n_periods)?;
            let prov = Provenance::for_inputs(&format!("bifurcation {top:?} {gammas:?} {n_periods}"));
            write_bifurcation_csv(sink(&output)?, &slices, &prov)
        }
        Command::Poincare { top, variant, n_ic, n_periods, output } => {
            let par = top.params()?;
            let grid = initial_condition_grid(n_ic)?;
            let sections = poincare_section(&grid, &par, variant, n_periods)?;
            let prov = Provenance::for_inputs(&format!("poincare {par:?} {variant} {n_ic} {n_periods}"));
            write_trajectories_csv(sink(&output)?, &sections, &prov)
        }
        Command::Oracle { ensemble, n, seed, seeds } => print_json(oracle(ensemble, n, seed, seeds)?),
        Command::Sweep { config, output, allow_large_j } => {
            let mut cfg = SweepConfig::load(&config)?;
            if let Some(dir) = output {
                cfg.output.directory = dir;
            }
            if let Some(w) = cli.workers {
                cfg.workers = w;
            }
            cfg.allow_large_j |= allow_large_j;
            cfg.validate()?;
            let result = run_sweep(&cfg)?;
            for path in write_sweep_outputs(&cfg, &result)? {
                println!("{}", path.display());
            }
            if result.n_failures() > 0 {
                log::warn!("{} point failures recorded", result.n_failures());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
