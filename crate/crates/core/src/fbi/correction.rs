use super::{ghat3, packet_field, window_modes, PhaseSpaceField, Window};
use crate::dyadic::{apply_p, BandOperatorSet};
use crate::field::{fft_in_place, Grid, SampledField};
use crate::{Result, C64};
use std::f64::consts::PI;

/// `(P_y + L_{x,ξ}) g_λ(·; x, ξ)` for the band symbol `p = ±s_k(x)|ξ|`,
/// with `L = ∂_ξp·D_x - ∂_xp·D_ξ`. Bounded uniformly in `λ` after dividing
/// by the packet norm.
pub fn correction_packet(ops: &BandOperatorSet, sign: f64, x: f64, xi: f64) -> Result<SampledField> {
    let grid = *ops.grid();
    let w = Window::new(ops.lambda);
    let pk = packet_field(&w, &grid, x, xi);
    let py = apply_p(ops, sign, &pk)?;
    let (s, ds, _) = ops.s_poly.eval3_re(x);
    let a = sign * s * xi.signum();
    let b = sign * ds * xi.abs();
    let r = w.radius();
    let k1 = 2.0 * PI / grid.length;
    let amp = ops.lambda.powf(-0.25);
    let mut spec = py.spectrum().to_vec();
    for m in window_modes(&grid, xi, r) {
        let eta = m as f64 * k1;
        let (g0, g1, _) = ghat3((eta - xi) / r);
        let l = C64::new(-a * eta * g0, -b * g1 / r);
        spec[grid.slot(m).unwrap()] += l * C64::from_polar(amp, -eta * x);
    }
    SampledField::from_spectrum(grid, spec)
}

/// `Σ h_x h_ξ F(x_i, ξ_j) (P_y + L) g_λ(·; x_i, ξ_j)`.
pub fn fbi_adjoint_correction(
    ops: &BandOperatorSet,
    sign: f64,
    big_f: &PhaseSpaceField,
    grid: &Grid,
) -> Result<SampledField> {
    let w = Window::new(ops.lambda);
    let base = super::fbi_adjoint(&w, big_f, grid)?;
    let py = apply_p(ops, sign, &base)?;
    py.add(&fbi_adjoint_generator(ops, sign, big_f, grid)?)
}

/// `Σ h_x h_ξ F(x_i, ξ_j) L g_λ(·; x_i, ξ_j)`, the time derivative `D_t` of
/// the transported field at `t = 0`.
pub fn fbi_adjoint_generator(
    ops: &BandOperatorSet,
    sign: f64,
    big_f: &PhaseSpaceField,
    grid: &Grid,
) -> Result<SampledField> {
    let pg = &big_f.grid;
    let nx = pg.n_x as i64;
    let r = ops.lambda.sqrt();
    let k1 = 2.0 * PI / grid.length;
    let scale = ops.lambda.powf(-0.25) * pg.weight();
    let coef: Vec<(f64, f64)> = (0..pg.n_x)
        .map(|i| {
            let (s, ds, _) = ops.s_poly.eval3_re(pg.x(i));
            (s, ds)
        })
        .collect();
    let mut spec = vec![C64::new(0.0, 0.0); grid.n];
    let mut fa = vec![C64::new(0.0, 0.0); pg.n_x];
    let mut fb = vec![C64::new(0.0, 0.0); pg.n_x];
    for (j, &xi) in pg.xi.iter().enumerate() {
        let col = big_f.column(j);
        if col.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        for i in 0..pg.n_x {
            fa[i] = col[i] * coef[i].0;
            fb[i] = col[i] * coef[i].1;
        }
        fft_in_place(&mut fa);
        fft_in_place(&mut fb);
        for m in window_modes(grid, xi, r) {
            let eta = m as f64 * k1;
            let (g0, g1, _) = ghat3((eta - xi) / r);
            let slot = m.rem_euclid(nx) as usize;
            let v = fa[slot] * (-sign * xi.signum() * eta * g0) + fb[slot] * C64::new(0.0, -sign * xi.abs() * g1 / r);
            spec[grid.slot(m).unwrap()] += v * scale;
        }
    }
    SampledField::from_spectrum(*grid, spec)
}
