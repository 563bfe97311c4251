//! Littlewood-Paley bands, coefficient truncations and the band symbols
//! `P^± = ±s_k|D|`, `Q^± = ±r_k|D|^{-1}`, `R = PQ - I`.

use crate::field::{Grid, Metric, SampledField, TrigPoly};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Smooth cutoff, 1 on `|ξ| ≤ 1/2`, 0 on `|ξ| ≥ 1`.
pub fn chi(xi: f64) -> f64 {
    let t = xi.abs();
    if t <= 0.5 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let psi = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = psi(1.0 - t);
    let b = psi(t - 0.5);
    a / (a + b)
}

/// Dyadic partition `β_0 = χ`, `β_k = χ(2^{-k}·) - χ(2^{1-k}·)`, with the
/// last band absorbing everything above it so the sum is exactly one on
/// every grid frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandPartition {
    pub top: u32,
}

impl BandPartition {
    /// Partition whose top band reaches the Nyquist frequency of `grid`.
    pub fn for_grid(grid: &Grid) -> Self {
        BandPartition { top: grid.n.trailing_zeros().saturating_sub(2).max(1) }
    }

    pub fn new(top: u32) -> Self {
        BandPartition { top: top.max(1) }
    }

    pub fn beta(&self, k: u32, xi: f64) -> f64 {
        if k > self.top {
            return 0.0;
        }
        if k == 0 {
            return chi(xi);
        }
        let lo = chi(xi * 2f64.powi(1 - k as i32));
        if k == self.top {
            1.0 - lo
        } else {
            chi(xi * 2f64.powi(-(k as i32))) - lo
        }
    }

    /// Sum of the bands `lo..=hi`, evaluated without cancellation.
    pub fn beta_range(&self, lo: u32, hi: u32, xi: f64) -> f64 {
        if lo > hi || lo > self.top {
            return 0.0;
        }
        let upper = if hi >= self.top { 1.0 } else { chi(xi * 2f64.powi(-(hi as i32))) };
        let lower = if lo == 0 { 0.0 } else { chi(xi * 2f64.powi(1 - lo as i32)) };
        upper - lower
    }

    /// Wide cutoff `β̃_k = Σ_{|j-k|≤3} β_j`.
    pub fn wide(&self, k: u32, xi: f64) -> f64 {
        self.beta_range(k.saturating_sub(3), k + 3, xi)
    }

    /// Open support `(lo, hi)` of `β_k` in `|ξ|`.
    pub fn support(&self, k: u32) -> (f64, f64) {
        match k {
            0 => (0.0, 1.0),
            k if k >= self.top => (2f64.powi(k as i32 - 2), f64::INFINITY),
            k => (2f64.powi(k as i32 - 2), 2f64.powi(k as i32)),
        }
    }
}

/// `β_k(D) f`.
pub fn apply_band(part: &BandPartition, f: &SampledField, k: u32) -> SampledField {
    f.real_multiplier(|xi| part.beta(k, xi))
}

/// `Σ_{k=lo}^{hi} β_k(D) f`.
pub fn apply_band_range(part: &BandPartition, f: &SampledField, lo: u32, hi: u32) -> SampledField {
    f.real_multiplier(|xi| part.beta_range(lo, hi, xi))
}

/// `χ(2^{-k/2} D) a`.
pub fn truncate_coefficient(a: &SampledField, k: u32) -> SampledField {
    let s = 2f64.powf(-(k as f64) / 2.0);
    a.real_multiplier(|xi| chi(s * xi))
}

/// Per-band data: truncated coefficient and the symbols `s_k`, `r_k`.
#[derive(Clone, Debug)]
pub struct BandOperatorSet {
    pub k: u32,
    pub lambda: f64,
    pub a_k: SampledField,
    pub s_k: SampledField,
    pub r_k: SampledField,
    pub s_poly: TrigPoly,
    pub r_poly: TrigPoly,
}

/// Summary statistics of one band, serialised as band diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandDiagnostics {
    pub k: u32,
    pub lambda: f64,
    pub min_s: f64,
    pub max_s: f64,
    pub min_r: f64,
    pub max_r: f64,
    pub truncation_error: f64,
    pub max_d3_a_k: f64,
    pub max_mode: usize,
}

/// Builds `a_k`, `s_k = χ(2^{-k/2}D)√a_k` and `r_k = χ(2^{-k/2}D)(1/s_k)`.
pub fn build_band_ops(metric: &Metric, k: u32) -> Result<BandOperatorSet> {
    let a_k = truncate_coefficient(&metric.field, k);
    if a_k.min_re() <= 0.0 {
        return Err(Error::BandInvalid(format!("a_{k} is not positive")));
    }
    let sqrt = a_k.map(|z| C64::new(z.re.sqrt(), 0.0));
    let s_k = truncate_coefficient(&sqrt, k).map(|z| C64::new(z.re, 0.0));
    if s_k.min_re() <= 0.0 {
        return Err(Error::BandInvalid(format!("s_{k} is not positive")));
    }
    let inv = s_k.map(|z| C64::new(1.0 / z.re, 0.0));
    let r_k = truncate_coefficient(&inv, k).map(|z| C64::new(z.re, 0.0));
    if r_k.min_re() <= 0.0 {
        return Err(Error::BandInvalid(format!("r_{k} is not positive")));
    }
    let max_mode = 2f64.powf(k as f64 / 2.0).ceil() as usize;
    let s_poly = TrigPoly::from_field(&s_k, max_mode);
    let r_poly = TrigPoly::from_field(&r_k, max_mode);
    Ok(BandOperatorSet { k, lambda: 2f64.powi(k as i32), a_k, s_k, r_k, s_poly, r_poly })
}

impl BandOperatorSet {
    pub fn grid(&self) -> &Grid {
        self.s_k.grid()
    }

    pub fn diagnostics(&self, metric: &Metric) -> BandDiagnostics {
        let diff = metric.field.sub(&self.a_k).unwrap();
        BandDiagnostics {
            k: self.k,
            lambda: self.lambda,
            min_s: self.s_k.min_re(),
            max_s: self.s_k.re().iter().cloned().fold(f64::MIN, f64::max),
            min_r: self.r_k.min_re(),
            max_r: self.r_k.re().iter().cloned().fold(f64::MIN, f64::max),
            truncation_error: diff.max_abs(),
            max_d3_a_k: self.a_k.derivative(3).max_abs(),
            max_mode: self.s_poly.max_mode(),
        }
    }
}

/// `±s_k(x)·(|D|f)(x)`.
pub fn apply_p(ops: &BandOperatorSet, sign: f64, f: &SampledField) -> Result<SampledField> {
    let d = f.real_multiplier(f64::abs);
    Ok(ops.s_k.product(&d)?.scale(C64::new(sign, 0.0)))
}

/// `±r_k(x)·(|D|^{-1}f)(x)`; `f` must have no zero mode.
pub fn apply_q(ops: &BandOperatorSet, sign: f64, f: &SampledField) -> Result<SampledField> {
    let spec = f.spectrum();
    let mx = spec.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if spec[0].norm() > 1e-12 * mx.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument("|D|^-1 applied to a field with a zero mode".into()));
    }
    let d = f.real_multiplier(|xi| if xi == 0.0 { 0.0 } else { 1.0 / xi.abs() });
    Ok(ops.r_k.product(&d)?.scale(C64::new(sign, 0.0)))
}

/// `R = P^± Q^± - I` (the same for both signs).
pub fn apply_r(ops: &BandOperatorSet, f: &SampledField) -> Result<SampledField> {
    let q = apply_q(ops, 1.0, f)?;
    apply_p(ops, 1.0, &q)?.sub(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_metric_family, MetricSpec};

    #[test]
    fn partition_is_exact_on_grid() {
        let g = Grid::torus(1024).unwrap();
        let p = BandPartition::for_grid(&g);
        assert_eq!(p.top, 8);
        for i in 0..g.n {
            let xi = g.freq(i);
            let s: f64 = (0..=p.top).map(|k| p.beta(k, xi)).sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!((p.beta_range(0, p.top, xi) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn band_supports() {
        let p = BandPartition::new(9);
        for k in 1..9 {
            let (lo, hi) = p.support(k);
            for m in 0..2048 {
                let xi = m as f64 * 0.5;
                if xi <= lo || xi >= hi {
                    assert_eq!(p.beta(k, xi), 0.0, "k={k} xi={xi}");
                }
            }
        }
    }

    #[test]
    fn constant_metric_symbols_are_exact() {
        let g = Grid::torus(256).unwrap();
        let m = make_metric_family(&MetricSpec::Constant { c2: 2.25 }, g, 0).unwrap();
        let ops = build_band_ops(&m, 6).unwrap();
        assert!((ops.s_k.min_re() - 1.5).abs() < 1e-14);
        let f = SampledField::from_fn(g, |x| C64::from_polar(1.0, 20.0 * x));
        let r = apply_r(&ops, &f).unwrap();
        assert!(r.max_abs() < 1e-13);
    }

    #[test]
    fn rough_truncation_rates() {
        let g = Grid::torus(1024).unwrap();
        let m = make_metric_family(&MetricSpec::RoughSpline { amplitude: 0.1, knots: 8 }, g, 7).unwrap();
        let d: Vec<BandDiagnostics> = (4..=9).map(|k| build_band_ops(&m, k).unwrap().diagnostics(&m)).collect();
        let fit = |f: &dyn Fn(&BandDiagnostics) -> f64| {
            let pts: Vec<(f64, f64)> = d.iter().map(|b| (b.k as f64, f(b).log2())).collect();
            let n = pts.len() as f64;
            let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
            let (mx, my) = (sx / n, sy / n);
            let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            num / den
        };
        let trunc = fit(&|b| b.truncation_error);
        let d3 = fit(&|b| b.max_d3_a_k);
        assert!((trunc + 1.0).abs() < 0.25, "truncation slope {trunc}");
        assert!((d3 - 0.5).abs() < 0.2, "third derivative slope {d3}");
    }

    #[test]
    fn q_rejects_zero_mode() {
        let g = Grid::torus(64).unwrap();
        let m = make_metric_family(&MetricSpec::Constant { c2: 1.0 }, g, 0).unwrap();
        let ops = build_band_ops(&m, 5).unwrap();
        let f = SampledField::from_real_fn(g, |x| 1.0 + x.cos());
        assert!(apply_q(&ops, 1.0, &f).is_err());
    }
}
