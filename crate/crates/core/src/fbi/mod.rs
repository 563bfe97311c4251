//! Wave packet (FBI) transform on the torus.
//!
//! Packets are the periodisations of `g_λ(y; x, ξ) = λ^{1/4} e^{iξ(y-x)} g(λ^{1/2}(y-x))`.
//! Because `ĝ` has compact support each packet has about `2λ^{1/2}` Fourier
//! modes, and `T`, `T*` are evaluated exactly through those modes:
//! `T f(x, ξ) = (λ^{-1/4}/L) Σ_η f̂(η) ĝ(λ^{-1/2}(η-ξ)) e^{iηx}`.

mod correction;
mod grid;
mod window;

pub use correction::{correction_packet, fbi_adjoint_correction, fbi_adjoint_generator};
pub use grid::{coarse_h_xi, fine_h_xi, h_xi_for, PhaseGrid, PhaseSpaceField};
pub use window::{ghat, ghat3, ghat_deriv, ghat_fast, spatial, window_constant, Window};

use crate::field::{fft_in_place, ifft_in_place, Grid, SampledField};
use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// Modes `m` with `|2πm/L - ξ| < r`, clipped to the grid.
pub(crate) fn window_modes(grid: &Grid, xi: f64, r: f64) -> std::ops::RangeInclusive<i64> {
    let k1 = 2.0 * PI / grid.length;
    let half = (grid.n / 2) as i64;
    let lo = (((xi - r) / k1).floor() as i64 + 1).max(-half);
    let hi = (((xi + r) / k1).ceil() as i64 - 1).min(half - 1);
    lo..=hi
}

fn check(window: &Window, pg: &PhaseGrid, grid: &Grid) -> Result<()> {
    if (window.lambda - pg.lambda).abs() > 1e-12 * pg.lambda {
        return Err(Error::InvalidArgument(format!(
            "window lambda {} vs phase grid lambda {}",
            window.lambda, pg.lambda
        )));
    }
    if (pg.length - grid.length).abs() > 1e-12 * grid.length {
        return Err(Error::GridMismatch("phase grid and field have different periods".into()));
    }
    Ok(())
}

/// `T_λ f` on the nodes of `pg`.
pub fn fbi_forward(window: &Window, f: &SampledField, pg: &PhaseGrid) -> Result<PhaseSpaceField> {
    let grid = *f.grid();
    check(window, pg, &grid)?;
    let spec = f.spectrum();
    let r = window.radius();
    let k1 = 2.0 * PI / grid.length;
    let scale = pg.lambda.powf(-0.25) / grid.length;
    let nx = pg.n_x as i64;
    let mut out = PhaseSpaceField::zeros(pg.clone());
    let mut buf = vec![C64::new(0.0, 0.0); pg.n_x];
    for (j, &xi) in pg.xi.iter().enumerate() {
        buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        let mut any = false;
        for m in window_modes(&grid, xi, r) {
            let c = spec[grid.slot(m).unwrap()];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            buf[m.rem_euclid(nx) as usize] += c * ghat_fast((m as f64 * k1 - xi) / r);
            any = true;
        }
        if !any {
            continue;
        }
        ifft_in_place(&mut buf);
        let col = &mut out.values[j * pg.n_x..(j + 1) * pg.n_x];
        for (o, b) in col.iter_mut().zip(&buf) {
            *o = b * scale;
        }
    }
    Ok(out)
}

/// `T*_λ F = Σ h_x h_ξ F(x_i, ξ_j) g_λ(·; x_i, ξ_j)` on `grid`.
pub fn fbi_adjoint(window: &Window, big_f: &PhaseSpaceField, grid: &Grid) -> Result<SampledField> {
    let pg = &big_f.grid;
    check(window, pg, grid)?;
    let r = window.radius();
    let k1 = 2.0 * PI / grid.length;
    let scale = pg.lambda.powf(-0.25) * pg.weight();
    let nx = pg.n_x as i64;
    let mut spec = vec![C64::new(0.0, 0.0); grid.n];
    let mut buf = vec![C64::new(0.0, 0.0); pg.n_x];
    for (j, &xi) in pg.xi.iter().enumerate() {
        let col = big_f.column(j);
        if col.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        buf.copy_from_slice(col);
        fft_in_place(&mut buf);
        for m in window_modes(grid, xi, r) {
            let w = ghat_fast((m as f64 * k1 - xi) / r) * scale;
            spec[grid.slot(m).unwrap()] += buf[m.rem_euclid(nx) as usize] * w;
        }
    }
    SampledField::from_spectrum(*grid, spec)
}

/// `T_λ f(x, ξ)` at an arbitrary point.
pub fn fbi_eval_offgrid(window: &Window, f: &SampledField, x: f64, xi: f64) -> C64 {
    let grid = f.grid();
    let spec = f.spectrum();
    let r = window.radius();
    let k1 = 2.0 * PI / grid.length;
    let mut acc = C64::new(0.0, 0.0);
    for m in window_modes(grid, xi, r) {
        let eta = m as f64 * k1;
        acc += spec[grid.slot(m).unwrap()] * C64::from_polar(ghat_fast((eta - xi) / r), eta * x);
    }
    acc * (window.lambda.powf(-0.25) / grid.length)
}

/// The periodised packet `Σ_n g_λ(y + nL; x, ξ)` evaluated via its modes.
pub fn packet_eval(window: &Window, grid: &Grid, x: f64, xi: f64, y: f64) -> C64 {
    let k1 = 2.0 * PI / grid.length;
    let mut acc = C64::new(0.0, 0.0);
    let r = window.radius();
    let lo = ((xi - r) / k1).floor() as i64 + 1;
    let hi = ((xi + r) / k1).ceil() as i64 - 1;
    for m in lo..=hi {
        let eta = m as f64 * k1;
        acc += window.packet_hat(eta, x, xi) * C64::from_polar(1.0, eta * y);
    }
    acc / grid.length
}

/// Spectrum of one periodised packet on `grid`.
pub fn packet_field(window: &Window, grid: &Grid, x: f64, xi: f64) -> SampledField {
    let k1 = 2.0 * PI / grid.length;
    let mut spec = vec![C64::new(0.0, 0.0); grid.n];
    for m in window_modes(grid, xi, window.radius()) {
        spec[grid.slot(m).unwrap()] = window.packet_hat(m as f64 * k1, x, xi);
    }
    SampledField::from_spectrum(*grid, spec).unwrap()
}
