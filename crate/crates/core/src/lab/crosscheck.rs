//! `v = u_A - u_B` two ways: subtracting two solves, and integrating
//! `v_tt = a_A v_xx + (a_A - a_B) ∂_x²u_B`, `v(0) = v_t(0) = 0`, with
//! `u_B` advanced in lockstep by the leapfrog reference.

use crate::field::{holder_norm, sobolev_norm, HolderOrder, Metric, SampledField};
use crate::solver::{solve, FdConfig, Leapfrog, SolveConfig, CFL_LIMIT};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Largest relative disagreement between the two computations.
pub const AGREEMENT_TOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub alpha: f64,
    pub t: f64,
    /// `‖A - B‖_{C^{0,1}}`.
    pub distance: f64,
    /// `‖u_A(t) - u_B(t)‖_{H^{α+1}}` from two solves.
    pub direct: f64,
    /// `‖v(t)‖_{H^{α+1}}` from the driven problem.
    pub driven: f64,
    /// `‖(u_A - u_B) - v‖_{H^{α+1}} / ‖v‖_{H^{α+1}}`.
    pub agreement: f64,
    /// `‖A - B‖_{C^{0,1}} · sup_s ‖u_B(s)‖_{H^{α+2}}`, the source side of the energy estimate.
    pub source_bound: f64,
    /// `‖A - B‖_{C^{0,1}} · ‖g‖_{H^{α+1}}`.
    pub data_bound: f64,
    pub fd_steps: usize,
    pub fd_refinement_change: f64,
    pub pass: bool,
}

/// Driven leapfrog with `steps` steps; returns `v(t)` and `sup ‖u_B‖_{H^{α+2}}`.
fn driven(a: &Metric, b: &Metric, g: &SampledField, t: f64, steps: usize, alpha: f64) -> Result<(SampledField, f64)> {
    let dt = t / steps as f64;
    let diff = a.field.sub(&b.field)?;
    let source = |u: &SampledField| diff.product(&u.real_multiplier(|xi| -xi * xi));
    let grid = *g.grid();
    // v¹ = Δt³/6 ∂_t f(0) with ∂_t f(0) = (a_A - a_B) g_xx.
    let v1 = source(g)?.scale(C64::new(dt.powi(3) / 6.0, 0.0));
    let mut lv = Leapfrog::from_state(a, SampledField::zeros(grid), v1, dt)?;
    let mut lb = Leapfrog::new(b, g, None, dt)?;
    let mut sup = sobolev_norm(lb.current(), alpha + 2.0);
    while lb.step < steps {
        let f = source(lb.current())?;
        lv.advance(Some(&f))?;
        lb.advance(None)?;
        sup = sup.max(sobolev_norm(lb.current(), alpha + 2.0));
    }
    Ok((lv.current().clone(), sup))
}

pub fn energy_stability_crosscheck(
    a: &Metric,
    b: &Metric,
    g: &SampledField,
    alpha: f64,
    t: f64,
    solver: &SolveConfig,
    fd: &FdConfig,
) -> Result<CrosscheckReport> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [-1, 1]")));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time {t} must be positive")));
    }
    if !(fd.cfl > 0.0) || fd.cfl > CFL_LIMIT {
        return Err(Error::Cfl(fd.cfl));
    }
    a.grid().check_same(b.grid())?;
    let s = alpha + 1.0;
    let distance = holder_norm(&a.field.sub(&b.field)?, HolderOrder::Lip);
    let direct_v = solve(a, g, t, solver)?.u.sub(&solve(b, g, t, solver)?.u)?;

    let vmax = a.info().max.max(b.info().max);
    let steps = (t / (fd.cfl * g.grid().h() / vmax.sqrt())).ceil().max(2.0) as usize;
    let (coarse, sup_c) = driven(a, b, g, t, steps, alpha)?;
    let (fine, sup_f) = driven(a, b, g, t, 2 * steps, alpha)?;
    let vn = fine.l2_norm();
    let change = if vn > 0.0 { coarse.sub(&fine)?.l2_norm() / vn } else { 0.0 };
    let v = fine.scale(C64::new(4.0 / 3.0, 0.0)).axpy(C64::new(-1.0 / 3.0, 0.0), &coarse)?;

    let direct = sobolev_norm(&direct_v, s);
    let driven_n = sobolev_norm(&v, s);
    let gap = sobolev_norm(&direct_v.sub(&v)?, s);
    let agreement = if driven_n > 0.0 { gap / driven_n } else { gap };
    let pass = if driven_n > 0.0 { agreement <= AGREEMENT_TOL } else { direct <= 1e-12 * sobolev_norm(g, s) };
    Ok(CrosscheckReport {
        alpha,
        t,
        distance,
        direct,
        driven: driven_n,
        agreement,
        source_bound: distance * sup_c.max(sup_f),
        data_bound: distance * sobolev_norm(g, s),
        fd_steps: 2 * steps,
        fd_refinement_change: change,
        pass,
    })
}
