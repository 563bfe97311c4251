//! Browser demo: an FBI heatmap of a wave packet, Hamilton-flow rays of one
//! band, and a constant-coefficient solve against d'Alembert.
//!
//! Each operation is a plain function returning `Result<_, String>`; the
//! `#[wasm_bindgen]` wrappers only translate errors. Arrays are flat `f64`
//! buffers whose layout is given per function.

use roughwave::dyadic::build_band_ops;
use roughwave::fbi::{fbi_forward, packet_field, PhaseGrid, Window};
use roughwave::field::{dalembert_velocity, make_metric_family, Grid, MetricSpec};
use roughwave::hamflow::trajectory;
use roughwave::solver::{solve, SolveConfig};
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn metric_spec(amplitude: f64, knots: usize) -> MetricSpec {
    if amplitude == 0.0 {
        MetricSpec::Constant { c2: 1.0 }
    } else {
        MetricSpec::RoughSpline { amplitude, knots }
    }
}

/// `|Tf|` for a packet centred at `(x0, xi0)` on `N = 512` samples, with
/// `λ = 2^k`. Layout: `[n_x, n_xi, x_0.., xi_0.., |Tf|(x_i, ξ_j) row by row in ξ]`.
pub fn heatmap(k: u32, x0: f64, xi0: f64) -> Result<Vec<f64>, String> {
    if !(3..=7).contains(&k) {
        return Err(format!("band {k} outside 3..=7"));
    }
    let grid = Grid::torus(512).map_err(err)?;
    let lambda = 2f64.powi(k as i32);
    let f = packet_field(&Window::new(xi0.abs().max(1.0)), &grid, x0, xi0);
    let pg = PhaseGrid::resolved(lambda, grid.length, lambda / 4.0, 2.0 * lambda).map_err(err)?;
    let tf = fbi_forward(&Window::new(lambda), &f, &pg).map_err(err)?;
    let (nx, nxi) = (pg.n_x, pg.n_xi());
    let mut out = Vec::with_capacity(2 + nx + nxi + nx * nxi);
    out.push(nx as f64);
    out.push(nxi as f64);
    out.extend((0..nx).map(|i| pg.x(i)));
    out.extend_from_slice(&pg.xi);
    out.extend(tf.values.iter().map(|z| z.norm()));
    Ok(out)
}

/// Rays of the band-`k` flow from `count` equispaced starting points with
/// frequency `2^k` on a rough metric. Layout: `[rays, samples+1, (t, x, ξ)...]`
/// ray after ray.
pub fn rays(
    amplitude: f64,
    knots: usize,
    seed: u64,
    k: u32,
    t: f64,
    count: usize,
    samples: usize,
) -> Result<Vec<f64>, String> {
    let m = make_metric_family(&metric_spec(amplitude, knots), Grid::torus(512).map_err(err)?, seed).map_err(err)?;
    let ops = build_band_ops(&m, k).map_err(err)?;
    let xi0 = 2f64.powi(k as i32);
    let mut out = vec![count as f64, (samples + 1) as f64];
    for r in 0..count {
        let x0 = m.grid().length * r as f64 / count as f64;
        for s in trajectory(&ops, 1.0, x0, xi0, t, samples).map_err(err)? {
            out.extend([s.t, s.x, s.xi]);
        }
    }
    Ok(out)
}

/// Solves `u_tt = c2 u_xx`, `u_t(0) = g` for a packet `g` at frequency `xi0`
/// on `N = 256` and compares against d'Alembert. Layout: `[max error, x.., u.., exact..]`.
pub fn compare_dalembert(c2: f64, xi0: f64, t: f64) -> Result<Vec<f64>, String> {
    let grid = Grid::torus(256).map_err(err)?;
    let m = make_metric_family(&MetricSpec::Constant { c2 }, grid, 0).map_err(err)?;
    let g = packet_field(&Window::new(xi0.max(1.0)), &grid, std::f64::consts::PI, xi0)
        .map(|z| roughwave::C64::new(z.re, 0.0));
    let cfg = SolveConfig { steps: 16, ..Default::default() };
    let u = solve(&m, &g, t, &cfg).map_err(err)?.u;
    let exact = dalembert_velocity(c2, &g, t).map_err(err)?;
    let error = u.sub(&exact).map_err(err)?.max_abs() / g.max_abs();
    let mut out = vec![error];
    out.extend(grid.points());
    out.extend(u.re());
    out.extend(exact.re());
    Ok(out)
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fbiHeatmap)]
pub fn fbi_heatmap(k: u32, x0: f64, xi0: f64) -> Result<Vec<f64>, JsError> {
    js(heatmap(k, x0, xi0))
}

#[wasm_bindgen(js_name = flowRays)]
pub fn flow_rays(
    amplitude: f64,
    knots: usize,
    seed: u64,
    k: u32,
    t: f64,
    count: usize,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    js(rays(amplitude, knots, seed, k, t, count, samples))
}

#[wasm_bindgen(js_name = solveVsDalembert)]
pub fn solve_vs_dalembert(c2: f64, xi0: f64, t: f64) -> Result<Vec<f64>, JsError> {
    js(compare_dalembert(c2, xi0, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_peaks_at_the_packet() {
        let out = heatmap(5, 2.0, 32.0).unwrap();
        let (nx, nxi) = (out[0] as usize, out[1] as usize);
        let (xs, xis, vals) = (&out[2..2 + nx], &out[2 + nx..2 + nx + nxi], &out[2 + nx + nxi..]);
        assert_eq!(vals.len(), nx * nxi);
        let best = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        assert!((xs[best % nx] - 2.0).abs() < 0.2, "{}", xs[best % nx]);
        assert!((xis[best / nx] - 32.0).abs() < 4.0, "{}", xis[best / nx]);
    }

    #[test]
    fn constant_rays_are_straight() {
        let out = rays(0.0, 8, 1, 5, 1.0, 3, 4).unwrap();
        assert_eq!(out[..2], [3.0, 5.0]);
        let last = &out[2 + 3 * 4..2 + 3 * 5];
        assert!((last[0] - 1.0).abs() < 1e-12);
        assert!((last[1] - 1.0).abs() < 1e-6, "{last:?}");
        assert!((last[2] - 32.0).abs() < 1e-6);
    }

    #[test]
    fn dalembert_agreement() {
        let out = compare_dalembert(1.0, 16.0, 0.5).unwrap();
        assert!(out[0] < 1e-3, "{}", out[0]);
        assert_eq!(out.len(), 1 + 3 * 256);
    }

    #[test]
    fn bad_band_is_an_error() {
        assert!(heatmap(12, 0.0, 1.0).is_err());
    }
}
