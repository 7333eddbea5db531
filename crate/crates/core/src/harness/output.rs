use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{OutputFormat, SweepConfig};
use super::sweep::{SweepRecord, SweepResult};
use crate::classical::{BifurcationSlice, BlochVector, PhasePoint, PointMetrics};
use crate::liouville::ComplexSpectrum;
use crate::stats::constants::TABLE_VERSION;
use crate::Result;

/// Header lines written at the top of every CSV, each prefixed by `#`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub table_version: u32,
    pub code_version: String,
}

impl Provenance {
    pub fn new(config_hash: impl Into<String>) -> Self {
        Provenance {
            config_hash: config_hash.into(),
            table_version: TABLE_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Provenance for one-off commands, hashed over a description of the
    /// inputs instead of a sweep file.
    pub fn for_inputs(description: &str) -> Self {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(description.as_bytes());
        Provenance::new(digest.iter().map(|b| format!("{b:02x}")).collect::<String>())
    }

    fn write_header(&self, w: &mut dyn Write) -> std::io::Result<()> {
        writeln!(w, "# config_hash: {}", self.config_hash)?;
        writeln!(w, "# table_version: {}", self.table_version)?;
        writeln!(w, "# code_version: {}", self.code_version)
    }
}

/// Full-precision decimal form of a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_writer<W: Write>(mut w: W, prov: &Provenance) -> Result<csv::Writer<W>> {
    prov.write_header(&mut w)?;
    Ok(csv::Writer::from_writer(w))
}

/// Reader that skips the provenance lines.
pub fn csv_reader<R: std::io::Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r)
}

pub fn write_spectrum_csv<W: Write>(w: W, spec: &ComplexSpectrum, prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["re_lambda", "im_lambda", "re_phi", "im_phi", "sector"])?;
    let sector = spec.sector.to_string();
    for (z, phi) in spec.eigenvalues.iter().zip(&spec.eigenphases) {
        out.write_record([fmt_f64(z.re), fmt_f64(z.im), fmt_f64(phi.re), fmt_f64(phi.im), sector.clone()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_statistics_csv<W: Write>(w: W, records: &[SweepRecord], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record([
        "p", "k0", "k1", "gamma", "j", "sector", "n_eigs", "n_filtered", "mean_r", "neg_mean_cos", "R_c", "Theta_c",
    ])?;
    for rec in records {
        let Some(q) = &rec.quantum else { continue };
        let pt = rec.point;
        out.write_record([
            fmt_f64(pt.p),
            fmt_f64(pt.k0),
            fmt_f64(pt.k1),
            fmt_f64(pt.gamma),
            fmt_f64(pt.j),
            q.sector.to_string(),
            q.n_eigs.to_string(),
            q.n_filtered.to_string(),
            fmt_f64(q.mean_r),
            fmt_f64(q.mean_neg_cos),
            fmt_opt(q.r_c),
            fmt_opt(q.theta_c),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_metrics_csv<W: Write>(w: W, records: &[SweepRecord], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["p", "k0", "k1", "gamma", "n_points", "f_c", "mean_d_lyapunov"])?;
    let mut seen = Vec::new();
    for rec in records {
        let Some(c) = &rec.classical else { continue };
        let pt = rec.point;
        let key = [pt.p, pt.k0, pt.k1, pt.gamma].map(f64::to_bits);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        out.write_record([
            fmt_f64(pt.p),
            fmt_f64(pt.k0),
            fmt_f64(pt.k1),
            fmt_f64(pt.gamma),
            c.n_points.to_string(),
            fmt_f64(c.f_c),
            fmt_f64(c.mean_d_lyapunov),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_failures_csv<W: Write>(w: W, records: &[SweepRecord], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["index", "p", "k0", "k1", "gamma", "j", "stage", "kind", "message"])?;
    for rec in records {
        let pt = rec.point;
        for f in &rec.failures {
            out.write_record([
                rec.index.to_string(),
                fmt_f64(pt.p),
                fmt_f64(pt.k0),
                fmt_f64(pt.k1),
                fmt_f64(pt.gamma),
                fmt_f64(pt.j),
                f.stage.clone(),
                f.kind.clone(),
                f.message.clone(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Per-initial-condition classical metrics.
pub fn write_point_metrics_csv<W: Write>(w: W, points: &[PointMetrics], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["ic_index", "q0", "p0", "h1", "h2", "upsilon", "d_lyapunov"])?;
    for m in points {
        out.write_record([
            m.ic_index.to_string(),
            fmt_f64(m.q0),
            fmt_f64(m.p0),
            fmt_f64(m.h1),
            fmt_f64(m.h2),
            m.upsilon.to_string(),
            fmt_f64(m.d_lyapunov),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Stroboscopic records, one row per (trajectory, period).
pub fn write_trajectories_csv<W: Write>(w: W, sections: &[Vec<PhasePoint>], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["ic_index", "period", "q", "p"])?;
    for (i, traj) in sections.iter().enumerate() {
        for (n, pp) in traj.iter().enumerate() {
            out.write_record([i.to_string(), (n + 1).to_string(), fmt_f64(pp.q), fmt_f64(pp.p)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Bloch-vector trajectory, one row per period.
pub fn write_bloch_csv<W: Write>(w: W, traj: &[BlochVector], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["period", "jx", "jy", "jz"])?;
    for (n, x) in traj.iter().enumerate() {
        out.write_record([n.to_string(), fmt_f64(x.jx), fmt_f64(x.jy), fmt_f64(x.jz)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_bifurcation_csv<W: Write>(w: W, slices: &[BifurcationSlice], prov: &Provenance) -> Result<()> {
    let mut out = csv_writer(w, prov)?;
    out.write_record(["gamma", "sample", "jy", "conservative"])?;
    for s in slices {
        for (i, jy) in s.jy.iter().enumerate() {
            out.write_record([fmt_f64(s.gamma), i.to_string(), fmt_f64(*jy), s.conservative.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    provenance: Provenance,
    config: &'a SweepConfig,
    n_points: usize,
    n_failures: usize,
    workers: usize,
    wall_seconds: f64,
    records: &'a [SweepRecord],
}

/// Writes the sweep tables and `summary.json` into the configured
/// directory; returns the paths written.
pub fn write_sweep_outputs(config: &SweepConfig, result: &SweepResult) -> Result<Vec<PathBuf>> {
    let dir = &config.output.directory;
    std::fs::create_dir_all(dir)?;
    let prov = Provenance::new(result.config_hash.clone());
    let mut written = Vec::new();
    if config.output.format == OutputFormat::Csv {
        type Writer = fn(BufWriter<File>, &[SweepRecord], &Provenance) -> Result<()>;
        let tables: [(&str, Writer); 3] = [
            ("statistics.csv", write_statistics_csv),
            ("metrics.csv", write_metrics_csv),
            ("failures.csv", write_failures_csv),
        ];
        for (name, write) in tables {
            let path = dir.join(name);
            write(BufWriter::new(File::create(&path)?), &result.records, &prov)?;
            written.push(path);
        }
    }
    let path = dir.join("summary.json");
    write_summary(&path, config, result, prov)?;
    written.push(path);
    Ok(written)
}

fn write_summary(path: &Path, config: &SweepConfig, result: &SweepResult, provenance: Provenance) -> Result<()> {
    let summary = Summary {
        provenance,
        config,
        n_points: result.records.len(),
        n_failures: result.n_failures(),
        workers: result.workers,
        wall_seconds: result.wall_seconds,
        records: &result.records,
    };
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, &summary)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Complex64;
    use crate::liouville::Sector;

    #[test]
    fn spectrum_rows_round_trip() {
        let eig = vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.1 / 3.0), Complex64::new(0.3, 0.1 / 3.0)];
        let spec = ComplexSpectrum::from_eigenvalues(eig, Sector::Positive);
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &spec, &Provenance::new("abc")).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# config_hash: abc\n# table_version: 1\n"));
        let mut rdr = csv_reader(buf.as_slice());
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        for (row, z) in rows.iter().zip(&spec.eigenvalues) {
            assert_eq!(row[0].parse::<f64>().unwrap(), z.re);
            assert_eq!(row[1].parse::<f64>().unwrap(), z.im);
            assert_eq!(&row[4], "positive");
        }
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(2.0 / 3.0).parse::<f64>().unwrap(), 2.0 / 3.0);
    }
}
