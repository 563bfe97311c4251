//! Lipschitz and uniform sweeps of `‖u_A(t) - u_B(t)‖_{H^{α+1}}` against
//! `‖A - B‖_{C^{0,1}}`, and the constant-coefficient interpolation probe.

use super::PerturbationSweep;
use crate::field::{dalembert_velocity, sobolev_data, sobolev_norm, Grid, SampledField};
use crate::fit::{loglog_fit, ratio_drift, LogLogFit};
use crate::solver::{solve, SolveConfig};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const LIPSCHITZ_SLOPE: (f64, f64) = (0.85, 1.15);
pub const MAX_RATIO_DRIFT: f64 = 0.3;
/// Each difference may exceed the next larger one by this factor.
pub const MONOTONE_SLACK: f64 = 1.1;
/// `‖u_A - u_B‖/‖u_A‖` allowed at `A = B`.
pub const LIMIT_TOL: f64 = 1e-10;
pub const KAPPA_WINDOW: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub delta: f64,
    /// `‖A - B_δ‖_{C^{0,1}}`.
    pub distance: f64,
    /// `‖u_A(t) - u_B(t)‖_{H^{α+1}}`.
    pub diff: f64,
    /// `diff / (distance · ‖g‖_{H^{α+1}})`, zero at `δ = 0`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub alpha: f64,
    pub t: f64,
    /// Sobolev index `s` the data were synthesised for, `g ∈ H^s`.
    pub data_regularity: f64,
    pub data_norm: f64,
    pub rows: Vec<StabilityRow>,
    pub fit: Option<LogLogFit>,
    pub ratio_drift: f64,
    pub pass: bool,
}

fn annotate(delta: f64) -> impl Fn(Error) -> Error {
    move |e| Error::NotConverged(format!("solve at delta = {delta:e}: {e}"))
}

fn differences(
    sweep: &PerturbationSweep,
    g: &SampledField,
    alpha: f64,
    t: f64,
    cfg: &SolveConfig,
) -> Result<(f64, Vec<StabilityRow>)> {
    let ua = solve(&sweep.base, g, t, cfg).map_err(annotate(0.0))?.u;
    let gn = sobolev_norm(g, alpha + 1.0);
    let mut rows = Vec::with_capacity(sweep.deltas.len());
    for ((&delta, b), &distance) in sweep.deltas.iter().zip(&sweep.metrics).zip(&sweep.distances) {
        let ub = solve(b, g, t, cfg).map_err(annotate(delta))?.u;
        let diff = sobolev_norm(&ua.sub(&ub)?, alpha + 1.0);
        let ratio = if distance > 0.0 && gn > 0.0 { diff / (distance * gn) } else { 0.0 };
        rows.push(StabilityRow { delta, distance, diff, ratio });
    }
    Ok((sobolev_norm(&ua, alpha + 1.0), rows))
}

/// Slope of the rows with `δ > 0`, their ratio drift and the verdict.
fn lipschitz_verdict(rows: &[StabilityRow]) -> (Option<LogLogFit>, f64, bool) {
    let pos: Vec<&StabilityRow> = rows.iter().filter(|r| r.distance > 0.0).collect();
    let xs: Vec<f64> = pos.iter().map(|r| r.distance).collect();
    let ys: Vec<f64> = pos.iter().map(|r| r.diff).collect();
    let fit = loglog_fit(&xs, &ys);
    let drift = if pos.len() >= 2 { ratio_drift(&xs, &ys, 1.0) } else { f64::INFINITY };
    let pass = match fit {
        Some(f) => {
            f.points >= 4 && (LIPSCHITZ_SLOPE.0..=LIPSCHITZ_SLOPE.1).contains(&f.slope) && drift <= MAX_RATIO_DRIFT
        }
        None => false,
    };
    (fit, drift, pass)
}

/// Lipschitz sweep for `α ∈ [-1, 1]` and `g ∈ H^{α+1}`.
pub fn run_lipschitz_sweep(
    sweep: &PerturbationSweep,
    g: &SampledField,
    alpha: f64,
    t: f64,
    cfg: &SolveConfig,
) -> Result<StabilityReport> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [-1, 1]")));
    }
    lipschitz_unchecked(sweep, g, alpha, t, cfg)
}

fn lipschitz_unchecked(
    sweep: &PerturbationSweep,
    g: &SampledField,
    alpha: f64,
    t: f64,
    cfg: &SolveConfig,
) -> Result<StabilityReport> {
    let (_, rows) = differences(sweep, g, alpha, t, cfg)?;
    let (fit, ratio_drift, pass) = lipschitz_verdict(&rows);
    Ok(StabilityReport {
        alpha,
        t,
        data_regularity: alpha + 1.0,
        data_norm: sobolev_norm(g, alpha + 1.0),
        rows,
        fit,
        ratio_drift,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformReport {
    pub alpha: f64,
    pub t: f64,
    /// Rows sorted by `δ`, starting with `δ = 0`.
    pub rows: Vec<StabilityRow>,
    /// `‖u_A(t)‖_{H^{α+1}}`, the scale of the differences.
    pub solution_norm: f64,
    pub monotone: bool,
    /// Relative difference of the `δ = 0` row.
    pub limit: f64,
    /// Slope a Lipschitz fit would report on the same rows; data only.
    pub lipschitz_slope: Option<f64>,
    pub pass: bool,
}

/// Uniform sweep for `α ∈ [-1, 2)` and `g ∈ H^α`. A `δ = 0` row is added
/// when the sweep lacks one.
pub fn run_uniform_sweep(
    sweep: &PerturbationSweep,
    g: &SampledField,
    alpha: f64,
    t: f64,
    cfg: &SolveConfig,
) -> Result<UniformReport> {
    if !(-1.0..2.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [-1, 2)")));
    }
    let sweep = if sweep.deltas.first() == Some(&0.0) {
        sweep.clone()
    } else {
        let mut d = vec![0.0];
        d.extend_from_slice(&sweep.deltas);
        PerturbationSweep::new(sweep.base.clone(), sweep.direction.clone(), &d)?
    };
    let (solution_norm, rows) = differences(&sweep, g, alpha, t, cfg)?;
    let monotone = rows.windows(2).all(|w| w[0].diff <= MONOTONE_SLACK * w[1].diff);
    let limit = if solution_norm > 0.0 { rows[0].diff / solution_norm } else { rows[0].diff };
    let lipschitz_slope = lipschitz_verdict(&rows).0.map(|f| f.slope);
    let pass = monotone && limit <= LIMIT_TOL;
    Ok(UniformReport { alpha, t, rows, solution_norm, monotone, limit, lipschitz_slope, pass })
}

/// Constant-coefficient interpolation probe on a fine grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InterpolationConfig {
    pub n: usize,
    pub t: f64,
    /// Margin of the `H²` data.
    pub eps: f64,
    pub kappas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Regularity of the data used for the Lipschitz contrast.
    pub gap_alpha: f64,
    pub seed: u64,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        InterpolationConfig {
            n: 1 << 18,
            t: 1.0,
            eps: 0.02,
            kappas: vec![0.25, 0.5],
            deltas: super::log_spaced(1e-3, 1e-1, 5),
            gap_alpha: 1.5,
            seed: 11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationRow {
    pub kappa: f64,
    /// `‖(S_A - S_B)g_s‖_{H^{3-κ}}` per amplitude.
    pub diffs: Vec<f64>,
    pub exponent: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub deltas: Vec<f64>,
    pub rows: Vec<InterpolationRow>,
    /// `‖(S_A - S_B)g‖_{H^{α+1}}` for `g ∈ H^α`, `α = gap_alpha`.
    pub gap_diffs: Vec<f64>,
    pub gap_slope: f64,
    pub pass: bool,
}

/// `A = 1`, `B = 1 + δ`, so `‖A - B‖_{C^{0,1}} = δ` and both solutions are
/// Fourier multipliers of the data.
pub fn interpolation_probe(cfg: &InterpolationConfig) -> Result<InterpolationReport> {
    if cfg.deltas.len() < 4 {
        return Err(Error::InvalidArgument("interpolation probe needs >= 4 amplitudes".into()));
    }
    let grid = Grid::torus(cfg.n)?;
    let max_freq = (cfg.n / 2 - 1) as f64;
    let diff = |g: &SampledField, s: f64| -> Result<Vec<f64>> {
        let ua = dalembert_velocity(1.0, g, cfg.t)?;
        cfg.deltas.iter().map(|&d| Ok(sobolev_norm(&ua.sub(&dalembert_velocity(1.0 + d, g, cfg.t)?)?, s))).collect()
    };
    let slope = |ys: &[f64]| loglog_fit(&cfg.deltas, ys).map(|f| f.slope).unwrap_or(f64::NAN);
    let gs = sobolev_data(grid, 2.0, cfg.eps, max_freq, cfg.seed);
    let mut rows = Vec::with_capacity(cfg.kappas.len());
    for &kappa in &cfg.kappas {
        let diffs = diff(&gs, 3.0 - kappa)?;
        let exponent = slope(&diffs);
        rows.push(InterpolationRow { kappa, pass: (exponent - kappa).abs() <= KAPPA_WINDOW, diffs, exponent });
    }
    let gr = sobolev_data(grid, cfg.gap_alpha, 0.1, max_freq, cfg.seed.wrapping_add(1));
    let gap_diffs = diff(&gr, cfg.gap_alpha + 1.0)?;
    let gap_slope = slope(&gap_diffs);
    let pass = rows.iter().all(|r| r.pass);
    Ok(InterpolationReport { deltas: cfg.deltas.clone(), rows, gap_diffs, gap_slope, pass })
}
