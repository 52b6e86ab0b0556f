//! Report files: `records.csv`, `summary.csv`, `profile_<solver>.csv` and
//! `profiles.svg`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::runner::{write_records_csv, BenchmarkRecord};
use crate::stats::{performance_profile, summarize, ProfileCurve, SolverSummary};
use crate::BenchError;

#[derive(Serialize)]
struct SummaryRow<'a> {
    solver: &'a str,
    problems: usize,
    failures: usize,
    gmean_iters: f64,
    gmean_fevals: f64,
    gmean_gevals: f64,
}

pub fn write_summary_csv<W: io::Write>(summary: &[SolverSummary], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for s in summary {
        w.serialize(SummaryRow {
            solver: &s.solver,
            problems: s.problems,
            failures: s.failures,
            gmean_iters: s.gmean_iters,
            gmean_fevals: s.gmean_fevals,
            gmean_gevals: s.gmean_gevals,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile_csv<W: io::Write>(curve: &ProfileCurve, mut out: W) -> io::Result<()> {
    writeln!(out, "t,fraction")?;
    for (t, frac) in &curve.points {
        writeln!(out, "{t},{frac}")?;
    }
    Ok(())
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Step plot of the profiles on a logarithmic iteration axis.
pub fn profiles_svg(curves: &[ProfileCurve]) -> String {
    let (w, h) = (640.0, 400.0);
    let (left, right, top, bottom) = (60.0, 150.0, 20.0, 50.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let t_max = curves
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(1)
        .max(2) as f64;
    let x = |t: f64| left + pw * t.max(1.0).ln() / t_max.ln();
    let y = |f: f64| top + ph * (1.0 - f);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{f:.2}</text>"#,
            left - 6.0,
            y(f) + 4.0
        );
    }
    let mut decade = 1.0;
    while decade <= t_max {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{decade}</text>"#,
            x(decade),
            top + ph + 18.0
        );
        decade *= 10.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">iterations</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">fraction solved</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );
    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        let mut prev: Option<f64> = None;
        for &(t, f) in &c.points {
            let (px, py) = (x(t as f64), y(f));
            match prev {
                None => {
                    let _ = write!(path, "M{px:.2},{py:.2}");
                }
                Some(prev_y) => {
                    let _ = write!(path, " L{px:.2},{prev_y:.2} L{px:.2},{py:.2}");
                }
            }
            prev = Some(py);
        }
        let _ = writeln!(
            s,
            r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="2"/>"#
        );
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, c.solver);
    }
    s.push_str("</svg>\n");
    s
}

fn create(path: &Path) -> Result<fs::File, BenchError> {
    fs::File::create(path).map_err(|source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> BenchError + '_ {
    move |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write all report files into `out_dir` (created if missing) and return
/// their paths.
pub fn emit_reports(records: &[BenchmarkRecord], iter_grid: &[usize], out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let summary = summarize(records)?;
    let curves = performance_profile(records, iter_grid)?;
    let mut written = Vec::new();

    let path = out_dir.join("records.csv");
    write_records_csv(records, create(&path)?).map_err(csv_err(&path))?;
    written.push(path);

    let path = out_dir.join("summary.csv");
    write_summary_csv(&summary, create(&path)?).map_err(csv_err(&path))?;
    written.push(path);

    for c in &curves {
        let path = out_dir.join(format!("profile_{}.csv", c.solver));
        write_profile_csv(c, create(&path)?).map_err(io_err(&path))?;
        written.push(path);
    }

    let path = out_dir.join("profiles.svg");
    fs::write(&path, profiles_svg(&curves)).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
