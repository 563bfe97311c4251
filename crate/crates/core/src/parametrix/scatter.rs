//! Sums of moved packets and their `L`, `L²` images, accumulated in Fourier.
//!
//! With `Θ = λ^{-1/2}(η - Ξ)`, `G = ĝ(Θ)` and the common factor
//! `λ^{-1/4} e^{-iηX}`, a packet at `(X, Ξ)` for `p = σ s(x)|ξ|` has
//!
//! * `g_λ      → G`
//! * `L g_λ    → -aηG - i b λ^{-1/2} G'`, `a = σ s ε`, `b = σ s'|Ξ|`
//! * `L² g_λ   → s²η²G + i s s' ηG - s s'' Ξ λ^{-1/2}G' + 2i s s' Ξη λ^{-1/2}G'
//!               + s'^2 Ξ λ^{-1/2}G' - s'^2 Ξ² λ^{-1}G''`
//!
//! where `ε = sgn Ξ` and `s, s', s''` are taken at `X`.

use crate::fbi::{ghat3, PhaseSpaceField};
use crate::field::Grid;
use crate::hamflow::FlowMap;
use crate::C64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outputs {
    pub u: bool,
    pub lu: bool,
    pub llu: bool,
}

impl Outputs {
    pub const U: Outputs = Outputs { u: true, lu: false, llu: false };
    pub const ALL: Outputs = Outputs { u: true, lu: true, llu: true };
}

/// Accumulated spectra (FFT order) of `u`, `D_t u` and `D_t² u`.
#[derive(Clone, Debug)]
pub struct ScatterSpectra {
    pub u: Vec<C64>,
    pub lu: Vec<C64>,
    pub llu: Vec<C64>,
}

impl ScatterSpectra {
    pub fn zeros(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        ScatterSpectra { u: z.clone(), lu: z.clone(), llu: z }
    }

    pub fn clear(&mut self) {
        for v in [&mut self.u, &mut self.lu, &mut self.llu] {
            v.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
    }
}

/// Adds `Σ_n w Th(n) {g, Lg, L²g}_λ(·; χ_{t_m,0}(n))` into `acc`, scaled by `weight`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn scatter_into(
    grid: &Grid,
    sign: f64,
    flow: &FlowMap,
    m: usize,
    th: &PhaseSpaceField,
    prune: f64,
    outs: Outputs,
    weight: C64,
    acc: &mut ScatterSpectra,
) {
    let pg = &th.grid;
    let vmax = th.max_abs();
    if vmax == 0.0 {
        return;
    }
    let cut = prune * vmax;
    let lambda = pg.lambda;
    let r = lambda.sqrt();
    let ir = 1.0 / r;
    let k1 = 2.0 * PI / grid.length;
    let half = (grid.n / 2) as i64;
    let n = grid.n as i64;
    let base_scale = weight * (pg.weight() * lambda.powf(-0.25));
    for (j, &xi0) in pg.xi.iter().enumerate() {
        let col = th.column(j);
        let eps = xi0.signum();
        for (i, &v) in col.iter().enumerate() {
            if v.norm() <= cut {
                continue;
            }
            let f = flow.get(m, i, eps);
            let big_xi = xi0 * f.rho;
            let lo = (((big_xi - r) / k1).floor() as i64 + 1).max(-half);
            let hi = (((big_xi + r) / k1).ceil() as i64 - 1).min(half - 1);
            if lo > hi {
                continue;
            }
            let base = v * base_scale;
            let mut e = C64::from_polar(1.0, -(lo as f64) * k1 * f.x);
            let de = C64::from_polar(1.0, -k1 * f.x);
            let (s, ds, dds) = (f.s, f.ds, f.dds);
            let a = sign * s * eps;
            let b = sign * ds * big_xi.abs();
            for mode in lo..=hi {
                let eta = mode as f64 * k1;
                let (g0, g1, g2) = ghat3((eta - big_xi) * ir);
                let slot = mode.rem_euclid(n) as usize;
                let c = base * e;
                if outs.u {
                    acc.u[slot] += c * g0;
                }
                if outs.lu {
                    acc.lu[slot] += c * C64::new(-a * eta * g0, -b * g1 * ir);
                }
                if outs.llu {
                    let re = s * s * eta * eta * g0 - s * dds * big_xi * ir * g1 + ds * ds * big_xi * ir * g1
                        - ds * ds * big_xi * big_xi * ir * ir * g2;
                    let im = s * ds * eta * g0 + 2.0 * s * ds * big_xi * eta * ir * g1;
                    acc.llu[slot] += c * C64::new(re, im);
                }
                e *= de;
            }
        }
    }
}
