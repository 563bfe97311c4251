use super::{Grid, SampledField};
use crate::C64;
use std::f64::consts::PI;

/// A trigonometric polynomial `Σ_{|m|≤M} c_m e^{i k_m x}` with `k_m = 2πm/L`,
/// used for fast off-grid evaluation of band-limited coefficients.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    /// Coefficients for modes `-M..=M`, already divided by `L`.
    coef: Vec<C64>,
    m: usize,
    k1: f64,
}

impl TrigPoly {
    /// Keeps the modes `|m| ≤ max_mode` of `f`.
    pub fn from_field(f: &SampledField, max_mode: usize) -> Self {
        let g: &Grid = f.grid();
        let m = max_mode.min(g.n / 2 - 1);
        let spec = f.spectrum();
        let coef = (-(m as i64)..=m as i64).map(|k| spec[g.slot(k).unwrap()] / g.length).collect();
        TrigPoly { coef, m, k1: 2.0 * PI / g.length }
    }

    pub fn max_mode(&self) -> usize {
        self.m
    }

    /// Value and first two derivatives at `x`.
    pub fn eval3(&self, x: f64) -> (C64, C64, C64) {
        let e1 = C64::from_polar(1.0, self.k1 * x);
        let mut e = C64::from_polar(1.0, -(self.m as f64) * self.k1 * x);
        let (mut v, mut d1, mut d2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for (j, &c) in self.coef.iter().enumerate() {
            let k = (j as f64 - self.m as f64) * self.k1;
            let t = c * e;
            v += t;
            d1 += t * C64::new(0.0, k);
            d2 -= t * (k * k);
            e *= e1;
        }
        (v, d1, d2)
    }

    /// Real parts of value and first two derivatives.
    pub fn eval3_re(&self, x: f64) -> (f64, f64, f64) {
        let (a, b, c) = self.eval3(x);
        (a.re, b.re, c.re)
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.eval3(x).0
    }
}
