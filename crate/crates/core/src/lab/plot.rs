//! Minimal SVG log–log plots.

use crate::fit::LogLogFit;
use std::fmt::Write;

/// Points of one curve, with an optional fitted power law drawn as a line.
#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub fit: Option<LogLogFit>,
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const PAD_L: f64 = 80.0;
const PAD_R: f64 = 170.0;
const PAD_T: f64 = 40.0;
const PAD_B: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Decade-aligned `log10` range covering `vals`.
fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| *v > 0.0 && v.is_finite())
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

/// Log–log plot of positive points; non-positive values are dropped.
pub fn loglog_svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let pw = W - PAD_L - PAD_R;
    let ph = H - PAD_T - PAD_B;
    let sx = |x: f64| PAD_L + (x.log10() - x0) / (x1 - x0) * pw;
    let sy = |y: f64| PAD_T + (y1 - y.log10()) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        PAD_L + pw / 2.0,
        esc(title)
    );
    let _ = writeln!(s, r##"<rect x="{PAD_L}" y="{PAD_T}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for d in (x0 as i64)..=(x1 as i64) {
        let x = PAD_L + (d as f64 - x0) / (x1 - x0) * pw;
        let _ = writeln!(s, r##"<line x1="{x:.1}" y1="{PAD_T}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/>"##, PAD_T + ph);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">1e{d}</text>"#, PAD_T + ph + 18.0);
    }
    for d in (y0 as i64)..=(y1 as i64) {
        let y = PAD_T + (y1 - d as f64) / (y1 - y0) * ph;
        let _ = writeln!(s, r##"<line x1="{PAD_L}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, PAD_L + pw);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">1e{d}</text>"#, PAD_L - 6.0, y + 4.0);
    }
    let _ =
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, PAD_L + pw / 2.0, H - 14.0, esc(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        PAD_T + ph / 2.0,
        PAD_T + ph / 2.0,
        esc(ylabel)
    );
    for (i, ser) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = ser.points.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
        for &(x, y) in &pts {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{c}"/>"#, sx(x), sy(y));
        }
        let mut label = esc(&ser.name);
        if let (Some(f), Some(lo), Some(hi)) =
            (ser.fit, pts.iter().map(|p| p.0).reduce(f64::min), pts.iter().map(|p| p.0).reduce(f64::max))
        {
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{c}" stroke-dasharray="5,3"/>"#,
                sx(lo),
                sy(f.predict(lo)),
                sx(hi),
                sy(f.predict(hi))
            );
            let _ = write!(label, " (slope {:.3})", f.slope);
        }
        let ly = PAD_T + 14.0 + 18.0 * i as f64;
        let lx = PAD_L + pw + 12.0;
        let _ = writeln!(s, r#"<circle cx="{lx}" cy="{}" r="3.5" fill="{c}"/>"#, ly - 4.0);
        let _ = writeln!(s, r#"<text x="{}" y="{ly}">{label}</text>"#, lx + 8.0);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::loglog_fit;

    #[test]
    fn renders_points_and_fit() {
        let xs = [1e-3, 1e-2, 1e-1];
        let ys = [2e-3, 2e-2, 2e-1];
        let fit = loglog_fit(&xs, &ys);
        let svg = loglog_svg(
            "a < b",
            "x",
            "y",
            &[Series { name: "s".into(), points: xs.into_iter().zip(ys).collect(), fit }],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 4);
        assert!(svg.contains("a &lt; b") && svg.contains("slope 1.000"));
    }
}
