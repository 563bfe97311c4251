use super::SampledField;
use serde::{Deserialize, Serialize};

/// `(1/L Σ (1+ξ²)^α |f̂(ξ)|²)^{1/2}`, consistent with Parseval so that
/// `α = 0` gives the L² norm.
pub fn sobolev_norm(f: &SampledField, alpha: f64) -> f64 {
    let g = f.grid();
    let s: f64 = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let xi = g.freq(i);
            (1.0 + xi * xi).powf(alpha) * z.norm_sqr()
        })
        .sum();
    (s / g.length).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolderOrder {
    /// `C^{0,1}`: sup norm plus Lipschitz constant.
    Lip,
    /// `C^{1,1}`: additionally the Lipschitz constant of the derivative.
    C11,
}

/// Hölder norm from centred periodic differences of the samples.
pub fn holder_norm(f: &SampledField, order: HolderOrder) -> f64 {
    let v = f.values();
    let n = v.len();
    let h = f.grid().h();
    let mut sup = 0.0f64;
    let mut d1 = 0.0f64;
    let mut d2 = 0.0f64;
    for i in 0..n {
        let l = v[(i + n - 1) % n];
        let r = v[(i + 1) % n];
        sup = sup.max(v[i].norm());
        d1 = d1.max(((r - l) / (2.0 * h)).norm());
        d2 = d2.max(((r - v[i] * 2.0 + l) / (h * h)).norm());
    }
    match order {
        HolderOrder::Lip => sup + d1,
        HolderOrder::C11 => sup + d1 + d2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::C64;
    use std::f64::consts::PI;

    #[test]
    fn sobolev_of_single_mode() {
        let g = Grid::torus(64).unwrap();
        let f = SampledField::from_fn(g, |x| C64::from_polar(1.0, 3.0 * x));
        assert!((sobolev_norm(&f, 0.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert!((sobolev_norm(&f, 1.0) - (20.0 * PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn holder_of_sine_metric() {
        let g = Grid::torus(1024).unwrap();
        let a = SampledField::from_real_fn(g, |x| 1.0 + 0.6 * x.sin());
        let n = holder_norm(&a, HolderOrder::C11);
        assert!((n - 2.8).abs() < 1e-4, "{n}");
        assert!((a.min_re() - 0.4).abs() < 1e-5);
    }
}
