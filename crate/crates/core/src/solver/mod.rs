//! Volterra correction of the parametrix, the solution operator `S(t)` and
//! a pseudo-spectral leapfrog reference solver.

mod fd;
mod solve;
mod volterra;

pub use fd::{energy, fd_reference, FdConfig, FdResult, Leapfrog, CFL_LIMIT};
pub use solve::{solve, ParametrixKernel, Solution, SolveCertificate, SolveConfig, SolveSession};
pub use volterra::{
    volterra_picard, volterra_solve, KernelTerm, ScalarKernel, VolterraConfig, VolterraKernel, VolterraSolution,
    VolterraStats,
};

use crate::field::{Grid, SampledField};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform nodes `t_m = mT/N_t`, `m = 0..=N_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub horizon: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub const MIN_STEPS: usize = 16;

    pub fn new(horizon: f64, steps: usize) -> Result<TimeGrid> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::InvalidArgument(format!("time horizon {horizon}")));
        }
        if steps < Self::MIN_STEPS {
            return Err(Error::InvalidArgument(format!("N_t = {steps} < {}", Self::MIN_STEPS)));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        if m == self.steps {
            self.horizon
        } else {
            m as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|m| self.node(m)).collect()
    }

    /// Trapezoid weight of node `j` in `∫_0^{t_m}`, without the `Δt`.
    pub fn trapezoid_weight(m: usize, j: usize) -> f64 {
        if m == 0 {
            0.0
        } else if j == 0 || j == m {
            0.5
        } else {
            1.0
        }
    }
}

/// One field per node of a [`TimeGrid`], all on the same spatial grid.
#[derive(Clone, Debug)]
pub struct SpaceTimeField {
    pub times: TimeGrid,
    pub fields: Vec<SampledField>,
}

impl SpaceTimeField {
    pub fn new(times: TimeGrid, fields: Vec<SampledField>) -> Result<SpaceTimeField> {
        if fields.len() != times.steps + 1 {
            return Err(Error::InvalidArgument(format!("{} fields for {} time nodes", fields.len(), times.steps + 1)));
        }
        let grid = *fields[0].grid();
        for f in &fields[1..] {
            grid.check_same(f.grid())?;
        }
        Ok(SpaceTimeField { times, fields })
    }

    pub fn from_fn(times: TimeGrid, mut f: impl FnMut(f64) -> Result<SampledField>) -> Result<SpaceTimeField> {
        let fields = times.nodes().into_iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        SpaceTimeField::new(times, fields)
    }

    pub fn grid(&self) -> &Grid {
        self.fields[0].grid()
    }

    /// `max_m ‖F(t_m)‖_{L²}`.
    pub fn sup_l2(&self) -> f64 {
        self.fields.iter().map(|f| f.l2_norm()).fold(0.0, f64::max)
    }
}
