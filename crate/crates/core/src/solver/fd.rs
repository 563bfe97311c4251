//! Leapfrog reference for `u_tt = a u_xx + f`, `u(0) = 0`, `u_t(0) = g`.
//!
//! `u_xx` is spectral and `a u_xx` uses the same dealiased product as the
//! parametrix, so both solvers discretise the same operator in space.
//! The time step is `cfl · h / √max a`; the scheme is second order in time
//! and [`fd_reference`] removes the leading error by Richardson extrapolation.

use crate::field::{Metric, SampledField};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest stable `cfl`: `Δt √max a · π/h ≤ 2`.
pub const CFL_LIMIT: f64 = 2.0 / PI;

/// One leapfrog trajectory, advanced step by step. A forcing term, when
/// present, is supplied by the caller at every step.
#[derive(Clone, Debug)]
pub struct Leapfrog {
    a: SampledField,
    pub dt: f64,
    pub step: usize,
    prev: SampledField,
    cur: SampledField,
}

impl Leapfrog {
    /// Starts from `u⁰ = 0`, `u¹ = Δt g + Δt²/2 f(0) + Δt³/6 a g_xx`.
    pub fn new(metric: &Metric, g: &SampledField, forcing0: Option<&SampledField>, dt: f64) -> Result<Leapfrog> {
        metric.grid().check_same(g.grid())?;
        let a = metric.field.clone();
        let mut lf = Leapfrog { a, dt, step: 1, prev: SampledField::zeros(*g.grid()), cur: g.scale(C64::new(dt, 0.0)) };
        let agxx = lf.operator(g)?;
        lf.cur = lf.cur.axpy(C64::new(dt.powi(3) / 6.0, 0.0), &agxx)?;
        if let Some(f) = forcing0 {
            lf.cur = lf.cur.axpy(C64::new(0.5 * dt * dt, 0.0), f)?;
        }
        Ok(lf)
    }

    /// Continues from given `u⁰`, `u¹`.
    pub fn from_state(metric: &Metric, prev: SampledField, cur: SampledField, dt: f64) -> Result<Leapfrog> {
        metric.grid().check_same(prev.grid())?;
        metric.grid().check_same(cur.grid())?;
        Ok(Leapfrog { a: metric.field.clone(), dt, step: 1, prev, cur })
    }

    /// `a u_xx`.
    pub fn operator(&self, u: &SampledField) -> Result<SampledField> {
        self.a.product(&u.real_multiplier(|xi| -xi * xi))
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn current(&self) -> &SampledField {
        &self.cur
    }

    pub fn previous(&self) -> &SampledField {
        &self.prev
    }

    /// Advances one step; `forcing` is `f` at the current time.
    pub fn advance(&mut self, forcing: Option<&SampledField>) -> Result<()> {
        let mut rhs = self.operator(&self.cur)?;
        if let Some(f) = forcing {
            rhs = rhs.add(f)?;
        }
        let next = self.cur.scale(C64::new(2.0, 0.0)).sub(&self.prev)?.axpy(C64::new(self.dt * self.dt, 0.0), &rhs)?;
        self.prev = std::mem::replace(&mut self.cur, next);
        self.step += 1;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FdConfig {
    pub cfl: f64,
    /// Combine runs at `Δt` and `Δt/2`.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig { cfl: 0.1, richardson: true }
    }
}

#[derive(Clone, Debug)]
pub struct FdResult {
    pub u: SampledField,
    pub steps: usize,
    pub dt: f64,
    /// `‖u_{Δt} - u_{Δt/2}‖ / ‖u_{Δt/2}‖` when extrapolated.
    pub refinement_change: Option<f64>,
}

fn run(
    metric: &Metric,
    g: &SampledField,
    forcing: &mut dyn FnMut(f64) -> Result<SampledField>,
    t: f64,
    steps: usize,
) -> Result<SampledField> {
    let dt = t / steps as f64;
    let f0 = forcing(0.0)?;
    let mut lf = Leapfrog::new(metric, g, Some(&f0), dt)?;
    while lf.step < steps {
        let f = forcing(lf.time())?;
        lf.advance(Some(&f))?;
    }
    Ok(lf.cur)
}

/// `u(t)` for `u_tt = a u_xx + f(t)`, `u(0) = 0`, `u_t(0) = g`. Pass
/// `None` for the homogeneous problem.
pub fn fd_reference(
    metric: &Metric,
    g: &SampledField,
    forcing: Option<&mut dyn FnMut(f64) -> Result<SampledField>>,
    t: f64,
    cfg: &FdConfig,
) -> Result<FdResult> {
    if !(cfg.cfl > 0.0) || cfg.cfl > CFL_LIMIT {
        return Err(Error::Cfl(cfg.cfl));
    }
    let grid = *g.grid();
    if t == 0.0 {
        return Ok(FdResult { u: SampledField::zeros(grid), steps: 0, dt: 0.0, refinement_change: None });
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative time {t}")));
    }
    let dt_max = cfg.cfl * grid.h() / metric.info().max.sqrt();
    let steps = (t / dt_max).ceil().max(2.0) as usize;
    let zero = SampledField::zeros(grid);
    let mut none = |_: f64| Ok(zero.clone());
    let forcing: &mut dyn FnMut(f64) -> Result<SampledField> = match forcing {
        Some(f) => f,
        None => &mut none,
    };
    let coarse = run(metric, g, forcing, t, steps)?;
    if !cfg.richardson {
        return Ok(FdResult { u: coarse, steps, dt: t / steps as f64, refinement_change: None });
    }
    let fine = run(metric, g, forcing, t, 2 * steps)?;
    let change = coarse.sub(&fine)?.l2_norm() / fine.l2_norm().max(f64::MIN_POSITIVE);
    let u = fine.scale(C64::new(4.0 / 3.0, 0.0)).axpy(C64::new(-1.0 / 3.0, 0.0), &coarse)?;
    Ok(FdResult { u, steps: 2 * steps, dt: t / (2 * steps) as f64, refinement_change: Some(change) })
}

/// `∫ (|u_t|²/a + |u_x|²) dx`, conserved by `u_tt = a u_xx`.
pub fn energy(metric: &Metric, u: &SampledField, u_t: &SampledField) -> Result<f64> {
    metric.grid().check_same(u.grid())?;
    let h = u.grid().h();
    let ux = u.derivative(1);
    let a = metric.field.values();
    let e: f64 =
        a.iter().zip(u_t.values()).zip(ux.values()).map(|((a, v), d)| v.norm_sqr() / a.re + d.norm_sqr()).sum();
    Ok(e * h)
}
