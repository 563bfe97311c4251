//! CSV rows, JSON summaries and SVG plots of the lab reports.

use super::{loglog_svg, CrosscheckReport, InterpolationReport, ProbeReport, Series, StabilityReport, UniformReport};
use crate::fit::loglog_fit;
use crate::io::{write_csv_file, write_json};
use crate::Result;
use std::path::{Path, PathBuf};

fn path(dir: &Path, name: &str, ext: &str) -> PathBuf {
    dir.join(format!("{name}.{ext}"))
}

fn write_svg(dir: &Path, name: &str, svg: String) -> Result<PathBuf> {
    let p = path(dir, name, "svg");
    std::fs::write(&p, svg)?;
    Ok(p)
}

const DIST: &str = "‖A-B‖ in C^{0,1}";

/// `name.csv`, `name.json`, `name.svg`.
pub fn write_stability(dir: &Path, name: &str, rep: &StabilityReport) -> Result<Vec<PathBuf>> {
    write_csv_file(
        path(dir, name, "csv"),
        &["delta", "distance", "diff", "ratio"],
        rep.rows.iter().map(|r| vec![r.delta, r.distance, r.diff, r.ratio]),
    )?;
    write_json(path(dir, name, "json"), rep)?;
    let series = Series {
        name: format!("alpha = {}", rep.alpha),
        points: rep.rows.iter().map(|r| (r.distance, r.diff)).collect(),
        fit: rep.fit,
    };
    let ylabel = format!("‖u_A - u_B‖ in H^{}", rep.alpha + 1.0);
    let svg = write_svg(dir, name, loglog_svg("Lipschitz sweep", DIST, &ylabel, &[series]))?;
    Ok(vec![path(dir, name, "csv"), path(dir, name, "json"), svg])
}

pub fn write_uniform(
    dir: &Path,
    name: &str,
    rep: &UniformReport,
    interp: &InterpolationReport,
) -> Result<Vec<PathBuf>> {
    write_csv_file(
        path(dir, name, "csv"),
        &["delta", "distance", "diff"],
        rep.rows.iter().map(|r| vec![r.delta, r.distance, r.diff]),
    )?;
    let iname = format!("{name}_interpolation");
    let mut header = vec!["delta".to_string()];
    header.extend(interp.rows.iter().map(|r| format!("kappa_{}", r.kappa)));
    header.push("gap".into());
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv_file(
        path(dir, &iname, "csv"),
        &h,
        interp.deltas.iter().enumerate().map(|(i, &d)| {
            let mut row = vec![d];
            row.extend(interp.rows.iter().map(|r| r.diffs[i]));
            row.push(interp.gap_diffs[i]);
            row
        }),
    )?;
    write_json(path(dir, name, "json"), &serde_json::json!({ "uniform": rep, "interpolation": interp }))?;
    let pts: Vec<(f64, f64)> = rep.rows.iter().filter(|r| r.distance > 0.0).map(|r| (r.distance, r.diff)).collect();
    let svg = write_svg(
        dir,
        name,
        loglog_svg(
            "Uniform sweep",
            DIST,
            &format!("‖u_A - u_B‖ in H^{}", rep.alpha + 1.0),
            &[Series { name: format!("g in H^{}", rep.alpha), points: pts, fit: None }],
        ),
    )?;
    let mut series: Vec<Series> = interp
        .rows
        .iter()
        .map(|r| Series {
            name: format!("H^(3-{}) of g_s", r.kappa),
            points: interp.deltas.iter().copied().zip(r.diffs.iter().copied()).collect(),
            fit: loglog_fit(&interp.deltas, &r.diffs),
        })
        .collect();
    series.push(Series {
        name: "rough data".into(),
        points: interp.deltas.iter().copied().zip(interp.gap_diffs.iter().copied()).collect(),
        fit: loglog_fit(&interp.deltas, &interp.gap_diffs),
    });
    let isvg = write_svg(dir, &iname, loglog_svg("Interpolation probe", DIST, "difference norm", &series))?;
    Ok(vec![path(dir, name, "csv"), path(dir, &iname, "csv"), path(dir, name, "json"), svg, isvg])
}

pub fn write_probes(dir: &Path, name: &str, rep: &ProbeReport) -> Result<Vec<PathBuf>> {
    let mut w = csv::Writer::from_path(path(dir, name, "csv")).map_err(|e| crate::Error::Parse(e.to_string()))?;
    let err = |e: csv::Error| crate::Error::Parse(e.to_string());
    w.write_record(["kind", "k", "lambda", "delta", "distance", "value"]).map_err(err)?;
    for r in &rep.rows {
        for m in &r.measurements {
            w.write_record([
                r.kind.name().to_string(),
                m.k.to_string(),
                format!("{:e}", m.lambda),
                format!("{:e}", m.delta),
                format!("{:e}", m.distance),
                format!("{:e}", m.value),
            ])
            .map_err(err)?;
        }
    }
    w.flush()?;
    write_json(path(dir, name, "json"), rep)?;
    let mut out = vec![path(dir, name, "csv"), path(dir, name, "json")];
    for r in &rep.rows {
        let mut ks: Vec<u32> = r.measurements.iter().map(|m| m.k).collect();
        ks.dedup();
        let series: Vec<Series> = ks
            .iter()
            .map(|&k| {
                let pts: Vec<(f64, f64)> = r
                    .measurements
                    .iter()
                    .filter(|m| m.k == k && m.distance > 0.0)
                    .map(|m| (m.distance, m.value))
                    .collect();
                let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
                Series { name: format!("k = {k}"), points: pts, fit: loglog_fit(&xs, &ys) }
            })
            .collect();
        let title = format!("{} (λ exponent {:.2})", r.kind.name(), r.lambda_exponent);
        out.push(write_svg(
            dir,
            &format!("{name}_{}", r.kind.name()),
            loglog_svg(&title, DIST, "relative difference", &series),
        )?);
    }
    Ok(out)
}

pub fn write_crosscheck(dir: &Path, name: &str, reps: &[CrosscheckReport]) -> Result<Vec<PathBuf>> {
    write_csv_file(
        path(dir, name, "csv"),
        &["distance", "direct", "driven", "agreement", "source_bound", "data_bound"],
        reps.iter().map(|r| vec![r.distance, r.direct, r.driven, r.agreement, r.source_bound, r.data_bound]),
    )?;
    write_json(path(dir, name, "json"), &reps)?;
    let pts = |f: fn(&CrosscheckReport) -> f64| reps.iter().map(|r| (r.distance, f(r))).collect::<Vec<_>>();
    let series = [
        Series { name: "solver difference".into(), points: pts(|r| r.direct), fit: None },
        Series { name: "driven problem".into(), points: pts(|r| r.driven), fit: None },
        Series { name: "source bound".into(), points: pts(|r| r.source_bound), fit: None },
    ];
    let svg = write_svg(dir, name, loglog_svg("Driven-problem cross-check", DIST, "norm of v(t)", &series))?;
    Ok(vec![path(dir, name, "csv"), path(dir, name, "json"), svg])
}
