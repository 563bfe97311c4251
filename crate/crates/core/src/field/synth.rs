//! Seeded random test data.

use super::{Grid, SampledField};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Real field with independent uniform coefficients on `lo ≤ |ξ| ≤ hi`.
pub fn random_band_limited(grid: Grid, lo: f64, hi: f64, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fill(grid, lo, hi, |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Real field with `|ĝ(ξ)| = (1+ξ²)^{-s/2-1/4-ε/2}` and random phases on
/// `1 ≤ |ξ| ≤ max_freq`, so that (without the cutoff) `g ∈ H^{s+ε'}` exactly
/// for `ε' < ε`. Normalised to unit `H^s` norm.
pub fn sobolev_data(grid: Grid, s: f64, eps: f64, max_freq: f64, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = fill(grid, 1.0, max_freq, |xi| {
        C64::from_polar((1.0 + xi * xi).powf(-0.5 * s - 0.25 - 0.5 * eps), rng.gen_range(0.0..2.0 * PI))
    });
    let n = super::sobolev_norm(&f, s);
    if n > 0.0 {
        f.scale(C64::new(1.0 / n, 0.0))
    } else {
        f
    }
}

fn fill(grid: Grid, lo: f64, hi: f64, mut coef: impl FnMut(f64) -> C64) -> SampledField {
    let k1 = 2.0 * PI / grid.length;
    let mut spec = vec![C64::new(0.0, 0.0); grid.n];
    // Scaled by L so that a unit coefficient is a unit-amplitude mode.
    let amp = grid.length;
    for m in 1..(grid.n / 2) as i64 {
        let xi = m as f64 * k1;
        if xi < lo || xi > hi {
            continue;
        }
        let c = coef(xi) * amp;
        spec[grid.slot(m).unwrap()] = c;
        spec[grid.slot(-m).unwrap()] = c.conj();
    }
    SampledField::from_spectrum(grid, spec).expect("grid size")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::sobolev_norm;

    #[test]
    fn real_and_deterministic() {
        let grid = Grid::torus(128).unwrap();
        let a = random_band_limited(grid, 4.0, 20.0, 9);
        let b = random_band_limited(grid, 4.0, 20.0, 9);
        assert!(a.max_imag() < 1e-14);
        assert_eq!(a.values(), b.values());
        assert_eq!(a.bandwidth(1e-12), 20);
    }

    #[test]
    fn sobolev_envelope() {
        let grid = Grid::torus(4096).unwrap();
        let g = sobolev_data(grid, 1.0, 0.1, 2000.0, 1);
        assert!((sobolev_norm(&g, 1.0) - 1.0).abs() < 1e-12);
        // Partial sums of the H^{1.3} norm keep growing, those of H^1 settle.
        let tail = |s: f64, lo: f64| {
            let h = g.multiplier(|xi| C64::new(if xi.abs() >= lo { 1.0 } else { 0.0 }, 0.0));
            sobolev_norm(&h, s)
        };
        assert!(tail(1.0, 500.0) < 0.45);
        assert!(tail(1.3, 500.0) / sobolev_norm(&g, 1.3) > 0.5);
    }
}
