use super::{holder_norm, Grid, HolderOrder, SampledField};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generator parameters of a metric family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum MetricSpec {
    /// `a ≡ c2`, wave speed `√c2`.
    Constant { c2: f64 },
    /// `a = 1 + amplitude·sin(mode·x)`.
    SmoothTrig { amplitude: f64, mode: i64 },
    /// C¹ periodic piecewise quadratic with jumps of `a''` at `knots` jittered
    /// knots, normalised to `max|a - 1| = amplitude`.
    RoughSpline { amplitude: f64, knots: usize },
    /// Arbitrary samples.
    Sampled,
}

/// A real coefficient `a(x) ≥ 1/M` with `‖a‖_{C^{1,1}} ≤ M`.
#[derive(Clone, Debug)]
pub struct Metric {
    pub field: SampledField,
    pub m_bound: f64,
    pub spec: MetricSpec,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MetricInfo {
    pub min: f64,
    pub max: f64,
    pub lip: f64,
    pub c11: f64,
}

/// Checks realness, positivity `a ≥ 1/M` and `‖a‖_{C^{1,1}} ≤ M`.
pub fn validate_metric(a: &SampledField, m_bound: f64) -> Result<MetricInfo> {
    let mx = a.max_abs();
    if a.max_imag() > 1e-12 * mx.max(1.0) {
        return Err(Error::MetricInvalid("coefficient is not real".into()));
    }
    if !(m_bound.is_finite() && m_bound >= 1.0) {
        return Err(Error::MetricInvalid(format!("bound M = {m_bound} must be >= 1")));
    }
    let info = metric_info(a);
    if info.min < 1.0 / m_bound {
        return Err(Error::MetricInvalid(format!("min a = {:.6} < 1/M = {:.6}", info.min, 1.0 / m_bound)));
    }
    if info.c11 > m_bound * (1.0 + 1e-12) {
        return Err(Error::MetricInvalid(format!("C^(1,1) norm {:.6} > M = {m_bound:.6}", info.c11)));
    }
    Ok(info)
}

pub(crate) fn metric_info(a: &SampledField) -> MetricInfo {
    let v = a.re();
    MetricInfo {
        min: v.iter().cloned().fold(f64::INFINITY, f64::min),
        max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        lip: holder_norm(a, HolderOrder::Lip),
        c11: holder_norm(a, HolderOrder::C11),
    }
}

/// Smallest admissible bound for `a`.
pub fn tight_bound(a: &SampledField) -> f64 {
    let info = metric_info(a);
    (1.0 / info.min).max(info.c11).max(1.0)
}

impl Metric {
    /// Wraps samples, computing the tight bound when `m_bound` is `None`.
    pub fn from_samples(field: SampledField, m_bound: Option<f64>) -> Result<Metric> {
        let field = field.map(|z| crate::C64::new(z.re, 0.0));
        let m = m_bound.unwrap_or_else(|| tight_bound(&field));
        validate_metric(&field, m)?;
        Ok(Metric { field, m_bound: m, spec: MetricSpec::Sampled, seed: None })
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn info(&self) -> MetricInfo {
        metric_info(&self.field)
    }

    /// `a + δ·d` as a sampled metric with its own tight bound.
    pub fn perturbed(&self, direction: &SampledField, delta: f64) -> Result<Metric> {
        let f = self.field.axpy(crate::C64::new(delta, 0.0), direction)?;
        Metric::from_samples(f, None)
    }

    /// The constant value if `a` is constant to rounding.
    pub fn constant_value(&self) -> Option<f64> {
        let i = self.info();
        ((i.max - i.min).abs() <= 1e-14 * i.max).then_some(0.5 * (i.max + i.min))
    }
}

/// Builds a metric from a generator spec; `seed` drives the random families.
pub fn make_metric_family(spec: &MetricSpec, grid: Grid, seed: u64) -> Result<Metric> {
    let field = match *spec {
        MetricSpec::Constant { c2 } => {
            if !(c2 > 0.0) {
                return Err(Error::MetricInvalid(format!("constant {c2} must be positive")));
            }
            SampledField::from_real_fn(grid, |_| c2)
        }
        MetricSpec::SmoothTrig { amplitude, mode } => {
            let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length;
            SampledField::from_real_fn(grid, |x| 1.0 + amplitude * (k * x).sin())
        }
        MetricSpec::RoughSpline { amplitude, knots } => {
            let s = RoughSpline::random(grid.length, knots, seed)?;
            let (lo, hi) = s.range(grid);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            SampledField::from_real_fn(grid, |x| 1.0 + amplitude * (s.eval(x) - mid) / half)
        }
        MetricSpec::Sampled => return Err(Error::InvalidArgument("sampled metrics need explicit samples".into())),
    };
    let m = tight_bound(&field);
    validate_metric(&field, m)?;
    Ok(Metric { field, m_bound: m, spec: spec.clone(), seed: Some(seed) })
}

/// Periodic C¹ piecewise quadratic with piecewise constant second derivative.
#[derive(Clone, Debug)]
pub struct RoughSpline {
    length: f64,
    knots: Vec<f64>,
    /// Per piece: value, slope and (constant) second derivative at the left knot.
    pieces: Vec<(f64, f64, f64)>,
}

impl RoughSpline {
    pub fn random(length: f64, count: usize, seed: u64) -> Result<RoughSpline> {
        if count < 3 {
            return Err(Error::InvalidArgument("rough spline needs >= 3 knots".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = length / count as f64;
        let knots: Vec<f64> = (0..count).map(|j| (j as f64 + rng.gen_range(-0.3..0.3)) * w).collect();
        let knots: Vec<f64> = knots.iter().map(|&t| t - knots[0]).collect();
        let lens: Vec<f64> =
            (0..count).map(|j| if j + 1 < count { knots[j + 1] - knots[j] } else { length - knots[j] }).collect();
        let mut c: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.0..1.0)).collect();
        // ∫a'' = 0 so that a' is periodic.
        let mean = c.iter().zip(&lens).map(|(c, l)| c * l).sum::<f64>() / length;
        c.iter_mut().for_each(|v| *v -= mean);
        // a' on each piece: s_j + c_j (x - t_j); fix s_0 so that ∫a' = 0.
        let mut slopes = vec![0.0; count];
        let mut int_slope = 0.0;
        for j in 0..count {
            if j > 0 {
                slopes[j] = slopes[j - 1] + c[j - 1] * lens[j - 1];
            }
            int_slope += slopes[j] * lens[j] + 0.5 * c[j] * lens[j] * lens[j];
        }
        let shift = int_slope / length;
        slopes.iter_mut().for_each(|s| *s -= shift);
        let mut pieces = Vec::with_capacity(count);
        let mut v = 0.0;
        for j in 0..count {
            pieces.push((v, slopes[j], c[j]));
            v += slopes[j] * lens[j] + 0.5 * c[j] * lens[j] * lens[j];
        }
        Ok(RoughSpline { length, knots, pieces })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.rem_euclid(self.length);
        let j = match self.knots.binary_search_by(|t| t.partial_cmp(&x).unwrap()) {
            Ok(j) => j,
            Err(j) => j - 1,
        };
        let (v, s, c) = self.pieces[j];
        let d = x - self.knots[j];
        v + s * d + 0.5 * c * d * d
    }

    fn range(&self, grid: Grid) -> (f64, f64) {
        let fine = (grid.n * 4).max(4096);
        let h = self.length / fine as f64;
        (0..fine)
            .map(|i| self.eval(i as f64 * h))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}
