//! Wave-packet parametrix `Ŝ(t)` for `D_t² - A`, `A = a(x)D_x²`.
//!
//! For each band `k ≥ k0` and sign `±` the data `h = (i/2)Q^± β_k g` is
//! transformed once, `Th = T_λ h`, and the packets are moved along the
//! bicharacteristic flow:
//!
//! `E^±_k(t)g = Σ_n w Th(n) g_λ(·; χ_{t,0}(n))`.
//!
//! Writing the evolution as a sum over moved packets makes `D_t E` and
//! `D_t² E` exact sums of `L g_λ` and `L² g_λ` over the same nodes, so the
//! remainder `T(t) = (D_t² - A)Ŝ(t)` is consistent with the discrete `Ŝ`.
//! Bands below `k0` use `t·g_low`.

mod ops;
mod residual;
mod scatter;

pub use ops::{EvolvedState, KNormEstimate, Prepared};
pub use residual::{ResidualRow, ResidualTable};
pub use scatter::{Outputs, ScatterSpectra};

use crate::dyadic::{build_band_ops, BandOperatorSet, BandPartition};
use crate::fbi::{h_xi_for, PhaseGrid};
use crate::field::{Grid, Metric};
use crate::hamflow::FlowMap;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How transported fields are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolutionRoute {
    /// Packets moved forward along the flow (default).
    Scatter,
    /// `T*[(T h)∘χ_{0,t}]`, evaluating the transform at back-traced nodes.
    Gather,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParametrixConfig {
    /// Lowest band carried by packets; lower modes use `t·g_low`.
    pub k0: u32,
    /// Top band; `None` reaches the grid's Nyquist frequency.
    pub top: Option<u32>,
    /// `N_x = 2^⌈log2(nx_factor·λ^{1/2})⌉`.
    pub nx_factor: f64,
    /// `h_ξ` is the largest power of two `≤ λ^{1/2}/h_xi_div`.
    pub h_xi_div: f64,
    /// Nodes with `|Th| ≤ prune·max|Th|` are skipped.
    pub prune: f64,
    pub neumann_tol: f64,
    pub neumann_max_iter: usize,
    /// Raise `k0` until the estimated `‖K‖` is at most this.
    pub k_norm_limit: f64,
    pub route: EvolutionRoute,
}

impl Default for ParametrixConfig {
    fn default() -> Self {
        ParametrixConfig {
            k0: 1,
            top: None,
            nx_factor: 4.0,
            h_xi_div: 6.0,
            prune: 1e-13,
            neumann_tol: 1e-12,
            neumann_max_iter: 200,
            k_norm_limit: 0.5,
            route: EvolutionRoute::Scatter,
        }
    }
}

/// One band: symbols, phase grid and flow maps for both signs.
#[derive(Clone, Debug)]
pub struct BandData {
    pub ops: BandOperatorSet,
    pub pgrid: PhaseGrid,
    /// Forward flow maps for `+` and `-` on the parametrix lag grid.
    pub flows: [FlowMap; 2],
}

/// The assembled parametrix for one metric and one set of time lags.
#[derive(Clone, Debug)]
pub struct Parametrix {
    pub metric: Metric,
    pub grid: Grid,
    pub part: BandPartition,
    pub cfg: ParametrixConfig,
    pub k0: u32,
    pub bands: Vec<BandData>,
    pub lags: Vec<f64>,
}

pub(crate) const SIGNS: [f64; 2] = [1.0, -1.0];

impl Parametrix {
    /// Builds bands `k0..=top` with flow maps at the given lags (which
    /// must include 0). `k0` is raised while the estimated `‖K‖` exceeds
    /// the configured limit.
    pub fn new(metric: &Metric, cfg: &ParametrixConfig, lags: &[f64]) -> Result<Parametrix> {
        let mut k0 = cfg.k0;
        loop {
            let p = Parametrix::with_k0(metric, cfg, lags, k0)?;
            if cfg.k_norm_limit <= 0.0 {
                return Ok(p);
            }
            let est = p.estimate_k_norm(6, 3, 17)?;
            if est.norm <= cfg.k_norm_limit {
                return Ok(p);
            }
            if k0 + 1 > p.part.top {
                return Err(Error::NotConverged(format!(
                    "||K|| estimate {:.3} exceeds {} for every k0",
                    est.norm, cfg.k_norm_limit
                )));
            }
            k0 += 1;
        }
    }

    /// Builds with a fixed `k0` and no `‖K‖` check.
    pub fn with_k0(metric: &Metric, cfg: &ParametrixConfig, lags: &[f64], k0: u32) -> Result<Parametrix> {
        let grid = *metric.grid();
        let part = match cfg.top {
            Some(t) => BandPartition::new(t),
            None => BandPartition::for_grid(&grid),
        };
        if k0 == 0 || k0 > part.top {
            return Err(Error::InvalidArgument(format!("k0 = {k0} outside 1..={}", part.top)));
        }
        let mut lags = lags.to_vec();
        if !lags.contains(&0.0) {
            lags.insert(0, 0.0);
        }
        let nyq = (grid.n / 2) as f64 * 2.0 * std::f64::consts::PI / grid.length;
        let mut bands = Vec::new();
        for k in k0..=part.top {
            let ops = build_band_ops(metric, k)?;
            let lambda = ops.lambda;
            let r = lambda.sqrt();
            let (lo, hi) = part.support(k);
            let hi = hi.min(nyq);
            let cover = [((lo - 2.0 * r).max(0.0), hi + 2.0 * r), (lambda / 8.0, 2.0 * lambda)];
            let h_xi = h_xi_for(lambda, cfg.h_xi_div);
            let pgrid = PhaseGrid::compact(lambda, grid.length, cfg.nx_factor, h_xi, &cover)?;
            let nodes: Vec<f64> = (0..pgrid.n_x).map(|i| pgrid.x(i)).collect();
            let flows = [FlowMap::build(&ops, 1.0, &nodes, &lags)?, FlowMap::build(&ops, -1.0, &nodes, &lags)?];
            bands.push(BandData { ops, pgrid, flows });
        }
        Ok(Parametrix { metric: metric.clone(), grid, part, cfg: cfg.clone(), k0, bands, lags })
    }

    pub fn band(&self, k: u32) -> Result<&BandData> {
        if k < self.k0 || k > self.part.top {
            return Err(Error::InvalidArgument(format!("band {k} not in {}..={}", self.k0, self.part.top)));
        }
        Ok(&self.bands[(k - self.k0) as usize])
    }

    /// Index of `t` in the lag grid.
    pub fn lag_index(&self, t: f64) -> Option<usize> {
        self.lags.iter().position(|&s| (s - t).abs() <= 1e-13 * (1.0 + t.abs()))
    }
}

#[cfg(test)]
mod tests;
