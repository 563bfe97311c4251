//! Stability experiments: Lipschitz and uniform sweeps over metric
//! perturbations, per-operator difference probes and a cross-check of
//! `u_A - u_B` against the driven problem it satisfies.

mod crosscheck;
pub mod output;
mod plot;
mod probes;
mod sweeps;

pub use crosscheck::{energy_stability_crosscheck, CrosscheckReport};
pub use plot::{loglog_svg, Series};
pub use probes::{
    operator_difference_probes, probe_input, uncovered, ProbeBound, ProbeConfig, ProbeKind, ProbeMeasurement,
    ProbeReport, ProbeRow, STATEMENTS,
};
pub use sweeps::{
    interpolation_probe, run_lipschitz_sweep, run_uniform_sweep, InterpolationConfig, InterpolationReport,
    InterpolationRow, StabilityReport, StabilityRow, UniformReport,
};

use crate::field::{
    holder_norm, make_metric_family, sobolev_data, Grid, HolderOrder, Metric, MetricSpec, RoughSpline, SampledField,
};
use crate::solver::SolveConfig;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Shape of the perturbation `d` in `B_δ = A + δ d`, normalised to `‖d‖_{C^{0,1}} = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum DirectionSpec {
    /// Mean-zero C¹ piecewise quadratic with `knots` random knots.
    Spline { knots: usize },
    /// `sin(mode·x + phase)`.
    Trig { mode: i64, phase: f64 },
    /// `d ≡ 1`, for constant-metric checks.
    Constant,
}

pub fn make_direction(spec: &DirectionSpec, grid: Grid, seed: u64) -> Result<SampledField> {
    let d = match *spec {
        DirectionSpec::Spline { knots } => {
            let s = RoughSpline::random(grid.length, knots, seed)?;
            let f = SampledField::from_real_fn(grid, |x| s.eval(x));
            let mean = f.values().iter().map(|z| z.re).sum::<f64>() / grid.n as f64;
            f.map(|z| C64::new(z.re - mean, 0.0))
        }
        DirectionSpec::Trig { mode, phase } => {
            let k = 2.0 * std::f64::consts::PI * mode as f64 / grid.length;
            SampledField::from_real_fn(grid, |x| (k * x + phase).sin())
        }
        DirectionSpec::Constant => SampledField::from_real_fn(grid, |_| 1.0),
    };
    let n = holder_norm(&d, HolderOrder::Lip);
    if !(n > 0.0) {
        return Err(Error::InvalidArgument("direction vanishes".into()));
    }
    Ok(d.scale(C64::new(1.0 / n, 0.0)))
}

/// Grid of an experiment; `length` defaults to `2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.length)
    }
}

/// JSON configuration shared by the `lab` subcommands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub metric: MetricSpec,
    pub direction: DirectionSpec,
    pub deltas: Vec<f64>,
    pub alpha: f64,
    pub t: f64,
    pub seed: u64,
    pub grid: GridConfig,
    /// Bands probed by `lab probes`.
    pub bands: Vec<u32>,
    /// Data are cut off above this fraction of the Nyquist frequency.
    pub data_cutoff: f64,
    /// Sobolev margin `ε` of synthesised data.
    pub data_eps: f64,
    pub solver: SolveConfig,
    /// Used by the uniform sweep.
    pub interpolation: InterpolationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            metric: MetricSpec::RoughSpline { amplitude: 0.1, knots: 8 },
            direction: DirectionSpec::Spline { knots: 6 },
            deltas: vec![1e-3, 1e-2 / 2.154_434_690_031_884, 2.154_434_690_031_884e-2, 1e-1],
            alpha: 0.0,
            t: 1.0,
            seed: 7,
            grid: GridConfig { n: 512, length: two_pi() },
            bands: vec![5, 6, 7],
            data_cutoff: 0.75,
            data_eps: 0.1,
            solver: SolveConfig { steps: 32, ..SolveConfig::default() },
            interpolation: InterpolationConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn base_metric(&self) -> Result<Metric> {
        make_metric_family(&self.metric, self.grid.grid()?, self.seed)
    }

    /// Highest data frequency.
    pub fn max_freq(&self) -> Result<f64> {
        let g = self.grid.grid()?;
        Ok(self.data_cutoff * (g.n / 2) as f64 * 2.0 * std::f64::consts::PI / g.length)
    }

    /// Seeded data with `g ∈ H^s` (and not much more), cut off at [`Self::max_freq`].
    pub fn data(&self, s: f64) -> Result<SampledField> {
        Ok(sobolev_data(self.grid.grid()?, s, self.data_eps, self.max_freq()?, self.seed.wrapping_add(2)))
    }

    /// Probe settings taken from this configuration.
    pub fn probe_config(&self) -> ProbeConfig {
        ProbeConfig {
            bands: self.bands.clone(),
            t: self.t,
            data_cutoff: self.data_cutoff,
            seed: self.seed,
            parametrix: self.solver.parametrix.clone(),
            volterra: self.solver.volterra.clone(),
            ..ProbeConfig::default()
        }
    }

    pub fn sweep(&self) -> Result<PerturbationSweep> {
        let a = self.base_metric()?;
        let d = make_direction(&self.direction, *a.grid(), self.seed.wrapping_add(1))?;
        PerturbationSweep::new(a, d, &self.deltas)
    }
}

/// `B_δ = A + δ d` over a list of amplitudes.
#[derive(Clone, Debug)]
pub struct PerturbationSweep {
    pub base: Metric,
    pub direction: SampledField,
    pub deltas: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// `‖A - B_δ‖_{C^{0,1}}`.
    pub distances: Vec<f64>,
}

impl PerturbationSweep {
    /// Sorts the amplitudes; every `B_δ` must be a valid metric and the
    /// distances must increase strictly.
    pub fn new(base: Metric, direction: SampledField, deltas: &[f64]) -> Result<PerturbationSweep> {
        let mut deltas = deltas.to_vec();
        if deltas.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::InvalidArgument("amplitudes must be finite and non-negative".into()));
        }
        deltas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        deltas.dedup();
        let mut metrics = Vec::with_capacity(deltas.len());
        let mut distances = Vec::with_capacity(deltas.len());
        for &d in &deltas {
            let b = base.perturbed(&direction, d)?;
            distances.push(holder_norm(&base.field.sub(&b.field)?, HolderOrder::Lip));
            metrics.push(b);
        }
        if distances.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("distances ‖A-B‖ are not increasing".into()));
        }
        Ok(PerturbationSweep { base, direction, deltas, metrics, distances })
    }
}

/// `n` amplitudes spaced evenly in `log δ` over `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

#[cfg(test)]
mod tests;
