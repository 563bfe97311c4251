//! `S(t)g = Ŝ(t)g + ∫_0^t Ŝ(t-s) G(s) ds` with `G = V(T(·)g)`.

use super::volterra::{volterra_solve, KernelTerm, VolterraConfig, VolterraKernel, VolterraStats};
use super::{energy, SpaceTimeField, TimeGrid};
use crate::field::{Metric, SampledField};
use crate::parametrix::{Outputs, Parametrix, ParametrixConfig, Prepared, ScatterSpectra};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `T(τ) = (D_t² - A)Ŝ(τ)` as a Volterra kernel.
pub struct ParametrixKernel<'a> {
    pub pmx: &'a Parametrix,
}

impl ParametrixKernel<'_> {
    fn field(&self, spec: Vec<C64>) -> Result<SampledField> {
        SampledField::from_spectrum(self.pmx.grid, spec)
    }
}

impl VolterraKernel for ParametrixKernel<'_> {
    type Prepared = Prepared;

    fn prepare(&self, g: &SampledField) -> Result<Prepared> {
        self.pmx.prepare(g)
    }

    fn apply_sum(&self, terms: &[KernelTerm<'_, Prepared>]) -> Result<SampledField> {
        let grid = self.pmx.grid;
        let mut acc = ScatterSpectra::zeros(grid.n);
        let mut low = SampledField::zeros(grid);
        let outs = Outputs { u: true, lu: false, llu: true };
        for t in terms {
            self.pmx.scatter_prepared(t.data, t.lag, outs, C64::new(t.weight, 0.0), &mut acc)?;
            low = low.axpy(C64::new(t.weight * t.lag, 0.0), &t.data.low)?;
        }
        let u = self.field(acc.u)?.add(&low)?;
        self.field(acc.llu)?.sub(&self.pmx.apply_a(&u)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub parametrix: ParametrixConfig,
    /// `N_t` on `[0, |t|]`.
    pub steps: usize,
    pub volterra: VolterraConfig,
    /// Number of extra time nodes at which `u`, `u_t` and the energy are reported.
    pub energy_samples: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            parametrix: ParametrixConfig::default(),
            steps: 64,
            volterra: VolterraConfig::default(),
            energy_samples: 0,
        }
    }
}

/// Diagnostics attached to every solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveCertificate {
    pub k0: u32,
    pub k_norm: f64,
    pub neumann_iters: usize,
    /// `‖S(0)g‖/‖g‖`.
    pub initial_value: f64,
    /// `‖∂_t S(0)g - g‖/‖g‖`.
    pub initial_velocity: f64,
    /// `max_m ‖T(t_m)g‖/‖g‖`.
    pub residual_bound: f64,
    pub volterra: VolterraStats,
    /// `max |E(t)/E(0) - 1|` over the sampled times.
    pub energy_drift: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub t: f64,
    pub u: SampledField,
    pub dt_u: SampledField,
    /// `(t, E(t))` at the sampled times.
    pub energy: Vec<(f64, f64)>,
    pub samples: Vec<(f64, SampledField, SampledField)>,
    pub certificate: SolveCertificate,
}

/// A parametrix built once for a metric and time grid, reusable across data.
pub struct SolveSession {
    pub metric: Metric,
    pub times: TimeGrid,
    pub cfg: SolveConfig,
    pub pmx: Parametrix,
    pub k_norm: f64,
}

impl SolveSession {
    pub fn new(metric: &Metric, horizon: f64, cfg: &SolveConfig) -> Result<SolveSession> {
        let times = TimeGrid::new(horizon, cfg.steps)?;
        let pmx = Parametrix::new(metric, &cfg.parametrix, &times.nodes())?;
        let k_norm = pmx.estimate_k_norm(6, 3, 17)?.norm;
        Ok(SolveSession { metric: metric.clone(), times, cfg: cfg.clone(), pmx, k_norm })
    }

    /// `u(t_m)` and `∂_t u(t_m)` from the Duhamel sum.
    fn duhamel(
        &self,
        pg: &Prepared,
        gs: &SpaceTimeField,
        prepared: &[Option<Prepared>],
        m: usize,
    ) -> Result<(SampledField, SampledField)> {
        let grid = self.pmx.grid;
        let dt = self.times.dt();
        let outs = Outputs { u: true, lu: true, llu: false };
        let mut acc = ScatterSpectra::zeros(grid.n);
        let tm = self.times.node(m);
        self.pmx.scatter_prepared(pg, tm, outs, C64::new(1.0, 0.0), &mut acc)?;
        let mut low_u = pg.low.scale(C64::new(tm, 0.0));
        let mut low_v = pg.low.clone();
        for j in 0..=m {
            let w = dt * TimeGrid::trapezoid_weight(m, j);
            if w == 0.0 {
                continue;
            }
            // ∂_t Ŝ(0) = I, so the j = m term contributes ½Δt G_m to u_t only.
            if j == m {
                low_v = low_v.axpy(C64::new(w, 0.0), &gs.fields[m])?;
                continue;
            }
            let Some(p) = &prepared[j] else { continue };
            let lag = self.times.node(m - j);
            self.pmx.scatter_prepared(p, lag, outs, C64::new(w, 0.0), &mut acc)?;
            low_u = low_u.axpy(C64::new(w * lag, 0.0), &p.low)?;
            low_v = low_v.axpy(C64::new(w, 0.0), &p.low)?;
        }
        let u = SampledField::from_spectrum(grid, acc.u)?.add(&low_u)?;
        let v = SampledField::from_spectrum(grid, acc.lu)?.scale(I).add(&low_v)?;
        Ok((u, v))
    }

    /// `S(t)g` at the session horizon.
    pub fn solve(&self, g: &SampledField) -> Result<Solution> {
        self.metric.grid().check_same(g.grid())?;
        let gn = g.l2_norm();
        let kernel = ParametrixKernel { pmx: &self.pmx };
        let pg = self.pmx.prepare(g)?;
        let f = SpaceTimeField::from_fn(self.times, |t| {
            kernel.apply_sum(&[KernelTerm { lag: t, weight: 1.0, data: &pg }])
        })?;
        let residual_bound = if gn > 0.0 { f.sup_l2() / gn } else { 0.0 };
        let sol = volterra_solve(&kernel, &f, &self.cfg.volterra)?;
        let n = self.times.steps;
        let (u, dt_u) = self.duhamel(&pg, &sol.g, &sol.prepared, n)?;
        let (u0, v0) = self.duhamel(&pg, &sol.g, &sol.prepared, 0)?;
        let rel = |x: f64| if gn > 0.0 { x / gn } else { x };
        let mut samples = Vec::new();
        let mut energies = Vec::new();
        if self.cfg.energy_samples > 0 {
            let e0 = energy(&self.metric, &u0, &v0)?;
            energies.push((0.0, e0));
            for s in 1..=self.cfg.energy_samples {
                let m = ((s * n) as f64 / self.cfg.energy_samples as f64).round() as usize;
                let (um, vm) =
                    if m == n { (u.clone(), dt_u.clone()) } else { self.duhamel(&pg, &sol.g, &sol.prepared, m)? };
                let tm = self.times.node(m);
                energies.push((tm, energy(&self.metric, &um, &vm)?));
                samples.push((tm, um, vm));
            }
        }
        let energy_drift = if energies.len() > 1 && energies[0].1 > 0.0 {
            Some(energies.iter().map(|e| (e.1 / energies[0].1 - 1.0).abs()).fold(0.0, f64::max))
        } else {
            None
        };
        let certificate = SolveCertificate {
            k0: self.pmx.k0,
            k_norm: self.k_norm,
            neumann_iters: pg.neumann_iters,
            initial_value: rel(u0.l2_norm()),
            initial_velocity: rel(v0.sub(g)?.l2_norm()),
            residual_bound,
            volterra: sol.stats,
            energy_drift,
        };
        Ok(Solution { t: self.times.horizon, u, dt_u, energy: energies, samples, certificate })
    }
}

/// `S(t)g`. Negative times use `u(-t) = -u(t)`, `∂_t u(-t) = ∂_t u(t)`.
pub fn solve(metric: &Metric, g: &SampledField, t: f64, cfg: &SolveConfig) -> Result<Solution> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t}")));
    }
    if t == 0.0 {
        let certificate = SolveCertificate::default();
        return Ok(Solution {
            t,
            u: SampledField::zeros(*g.grid()),
            dt_u: g.clone(),
            energy: Vec::new(),
            samples: Vec::new(),
            certificate,
        });
    }
    let session = SolveSession::new(metric, t.abs(), cfg)?;
    let mut sol = session.solve(g)?;
    if t < 0.0 {
        sol.t = t;
        sol.u = sol.u.scale(C64::new(-1.0, 0.0));
        for s in &mut sol.samples {
            s.0 = -s.0;
            s.1 = s.1.scale(C64::new(-1.0, 0.0));
        }
        for e in &mut sol.energy {
            e.0 = -e.0;
        }
    }
    Ok(sol)
}
