//! Periodic grids, sampled fields and their spectra.
//!
//! Fourier convention: `f̂(ξ) = h Σ_n f_n e^{-iξ x_n}` so that
//! `f_n = (1/L) Σ_ξ f̂(ξ) e^{iξ x_n}` and `h Σ|f_n|² = (1/L) Σ|f̂(ξ)|²`.
//! Spectra are stored in FFT order: index `m < N/2` is mode `m`, the rest
//! are the negative modes `m - N`.

mod metric;
mod norms;
mod reference;
mod synth;
mod trig;

pub use metric::{make_metric_family, validate_metric, Metric, MetricInfo, MetricSpec, RoughSpline};
pub use norms::{holder_norm, sobolev_norm, HolderOrder};
pub use reference::{dalembert_reference, dalembert_velocity};
pub use synth::{random_band_limited, sobolev_data};
pub use trig::TrigPoly;

use crate::{Error, Result, C64};
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Uniform periodic grid on `[0, L)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidArgument(format!("length {length}")));
        }
        Ok(Grid { n, length })
    }

    /// The standard `2π`-periodic grid.
    pub fn torus(n: usize) -> Result<Self> {
        Grid::new(n, 2.0 * PI)
    }

    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Integer mode number of spectral slot `idx`.
    pub fn mode(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Spectral slot of mode `m`, if representable.
    pub fn slot(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m >= -half && m < half {
            Some(m.rem_euclid(self.n as i64) as usize)
        } else {
            None
        }
    }

    /// Wavenumber of slot `idx`.
    pub fn freq(&self, idx: usize) -> f64 {
        2.0 * PI * self.mode(idx) as f64 / self.length
    }

    pub fn is_torus(&self) -> bool {
        (self.length - 2.0 * PI).abs() < 1e-12
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n || (self.length - other.length).abs() > 1e-12 * self.length {
            return Err(Error::GridMismatch(format!(
                "(N={}, L={}) vs (N={}, L={})",
                self.n, self.length, other.n, other.length
            )));
        }
        Ok(())
    }
}

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<PlanCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Unnormalised in-place forward DFT, `Σ_n v_n e^{-2πi mn/N}`.
pub fn fft_in_place(v: &mut [C64]) {
    plan(v.len(), false).process(v);
}

/// Unnormalised in-place inverse DFT, `Σ_m v_m e^{+2πi mn/N}`.
pub fn ifft_in_place(v: &mut [C64]) {
    plan(v.len(), true).process(v);
}

/// Complex samples on a [`Grid`] with a lazily cached spectrum.
#[derive(Clone, Debug)]
pub struct SampledField {
    grid: Grid,
    values: Vec<C64>,
    spectrum: OnceLock<Vec<C64>>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} samples for N={}", values.len(), grid.n)));
        }
        Ok(SampledField { grid, values, spectrum: OnceLock::new() })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledField { grid, values: vec![C64::new(0.0, 0.0); grid.n], spectrum: OnceLock::new() }
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        SampledField::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n).map(|i| f(grid.x(i))).collect();
        SampledField { grid, values, spectrum: OnceLock::new() }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        SampledField::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    /// Builds the field whose spectrum (FFT order, `f̂` scaling) is `spec`.
    pub fn from_spectrum(grid: Grid, spec: Vec<C64>) -> Result<Self> {
        if spec.len() != grid.n {
            return Err(Error::GridMismatch(format!("{} modes for N={}", spec.len(), grid.n)));
        }
        let mut v = spec.clone();
        ifft_in_place(&mut v);
        let s = 1.0 / grid.length;
        v.iter_mut().for_each(|z| *z *= s);
        let cell = OnceLock::new();
        let _ = cell.set(spec);
        Ok(SampledField { grid, values: v, spectrum: cell })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.im).collect()
    }

    pub fn spectrum(&self) -> &[C64] {
        self.spectrum.get_or_init(|| {
            let mut v = self.values.clone();
            fft_in_place(&mut v);
            let h = self.grid.h();
            v.iter_mut().for_each(|z| *z *= h);
            v
        })
    }

    /// Applies the Fourier multiplier `m(ξ)` (wavenumber argument).
    pub fn multiplier(&self, m: impl Fn(f64) -> C64) -> SampledField {
        let spec: Vec<C64> = self.spectrum().iter().enumerate().map(|(i, &c)| c * m(self.grid.freq(i))).collect();
        SampledField::from_spectrum(self.grid, spec).expect("same grid")
    }

    pub fn real_multiplier(&self, m: impl Fn(f64) -> f64) -> SampledField {
        self.multiplier(|xi| C64::new(m(xi), 0.0))
    }

    /// `∂_x^k` applied spectrally.
    pub fn derivative(&self, k: u32) -> SampledField {
        self.multiplier(|xi| C64::new(0.0, xi).powu(k))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// `(∫|f|²)^{1/2}` by the rectangle rule (exact for trigonometric polynomials).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.h() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `∫ f conj(g)`.
    pub fn inner(&self, other: &SampledField) -> C64 {
        let h = self.grid.h();
        self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum::<C64>() * h
    }

    pub fn min_re(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, z| m.min(z.re))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> SampledField {
        SampledField::new(self.grid, self.values.iter().map(|&z| f(z)).collect()).unwrap()
    }

    pub fn scale(&self, s: C64) -> SampledField {
        self.map(|z| z * s)
    }

    pub fn add(&self, other: &SampledField) -> Result<SampledField> {
        self.grid.check_same(&other.grid)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        SampledField::new(self.grid, v)
    }

    pub fn sub(&self, other: &SampledField) -> Result<SampledField> {
        self.grid.check_same(&other.grid)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        SampledField::new(self.grid, v)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: C64, other: &SampledField) -> Result<SampledField> {
        self.grid.check_same(&other.grid)?;
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect();
        SampledField::new(self.grid, v)
    }

    /// Pointwise product of the trigonometric interpolants, computed on a
    /// doubled grid and projected back onto the grid's modes.
    pub fn product(&self, other: &SampledField) -> Result<SampledField> {
        self.grid.check_same(&other.grid)?;
        let n = self.grid.n;
        let pad = |f: &SampledField| {
            let mut big = vec![C64::new(0.0, 0.0); 2 * n];
            for (i, &c) in f.spectrum().iter().enumerate() {
                let m = self.grid.mode(i);
                big[m.rem_euclid(2 * n as i64) as usize] = c;
            }
            ifft_in_place(&mut big);
            big
        };
        let a = pad(self);
        let b = pad(other);
        let mut prod: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        fft_in_place(&mut prod);
        let s = 1.0 / (self.grid.length * 2.0 * n as f64);
        let spec = (0..n).map(|i| prod[self.grid.mode(i).rem_euclid(2 * n as i64) as usize] * s).collect();
        SampledField::from_spectrum(self.grid, spec)
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, x: f64) -> C64 {
        let spec = self.spectrum();
        let mut acc = C64::new(0.0, 0.0);
        for (i, &c) in spec.iter().enumerate() {
            acc += c * C64::from_polar(1.0, self.grid.freq(i) * x);
        }
        acc / self.grid.length
    }

    /// Spectral interpolation onto a finer (or coarser) grid of the same length.
    pub fn resample(&self, n: usize) -> Result<SampledField> {
        let g = Grid::new(n, self.grid.length)?;
        let mut spec = vec![C64::new(0.0, 0.0); n];
        for (i, &c) in self.spectrum().iter().enumerate() {
            if let Some(j) = g.slot(self.grid.mode(i)) {
                spec[j] = c;
            }
        }
        SampledField::from_spectrum(g, spec)
    }

    /// Largest |mode| carrying a coefficient above `tol * max|f̂|`.
    pub fn bandwidth(&self, tol: f64) -> i64 {
        let spec = self.spectrum();
        let mx = spec.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let mut bw = 0;
        for (i, z) in spec.iter().enumerate() {
            if z.norm() > tol * mx {
                bw = bw.max(self.grid.mode(i).abs());
            }
        }
        bw
    }
}

/// Forward transform, `f̂` in FFT order.
pub fn fourier_forward(f: &SampledField) -> Vec<C64> {
    f.spectrum().to_vec()
}

/// Inverse transform of a spectrum in FFT order.
pub fn fourier_inverse(grid: Grid, spec: &[C64]) -> Result<SampledField> {
    SampledField::from_spectrum(grid, spec.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_and_roundtrip() {
        let g = Grid::torus(64).unwrap();
        let f = SampledField::from_fn(g, |x| C64::new((3.0 * x).cos(), (x).sin().powi(3)));
        let spec = fourier_forward(&f);
        let back = fourier_inverse(g, &spec).unwrap();
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-14);
        }
        let lhs = f.l2_norm().powi(2);
        let rhs: f64 = spec.iter().map(|z| z.norm_sqr()).sum::<f64>() / g.length;
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }

    #[test]
    fn single_mode_spectrum() {
        let g = Grid::torus(32).unwrap();
        let f = SampledField::from_fn(g, |x| C64::from_polar(1.0, 5.0 * x));
        let spec = f.spectrum();
        assert!((spec[5] - C64::new(2.0 * PI, 0.0)).norm() < 1e-12);
        assert!(spec.iter().enumerate().filter(|(i, _)| *i != 5).all(|(_, z)| z.norm() < 1e-12));
    }

    #[test]
    fn product_matches_pointwise_for_low_modes() {
        let g = Grid::torus(64).unwrap();
        let a = SampledField::from_real_fn(g, |x| 1.0 + 0.3 * (2.0 * x).sin());
        let b = SampledField::from_real_fn(g, |x| (5.0 * x).cos());
        let p = a.product(&b).unwrap();
        for i in 0..g.n {
            let x = g.x(i);
            let want = (1.0 + 0.3 * (2.0 * x).sin()) * (5.0 * x).cos();
            assert!((p.values()[i].re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn eval_off_grid_and_resample() {
        let g = Grid::torus(32).unwrap();
        let f = SampledField::from_real_fn(g, |x| (3.0 * x).sin() + 0.5 * (7.0 * x).cos());
        let x: f64 = 0.123;
        let want = (3.0 * x).sin() + 0.5 * (7.0 * x).cos();
        assert!((f.eval(x).re - want).abs() < 1e-13);
        let fine = f.resample(128).unwrap();
        let i = 37;
        let xi = fine.grid().x(i);
        assert!((fine.values()[i].re - ((3.0 * xi).sin() + 0.5 * (7.0 * xi).cos())).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_grid() {
        assert!(Grid::torus(100).is_err());
        assert!(Grid::torus(4).is_err());
    }
}
