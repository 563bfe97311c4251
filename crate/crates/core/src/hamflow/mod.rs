//! Bicharacteristic flow of the band symbol `p = ±s_k(x)|ξ|`:
//! `ẋ = ±s_k(x) sgn ξ`, `ξ̇ = ∓s_k'(x)|ξ|`.
//!
//! In one dimension `|ξ| s_k(x)` is conserved and the flow is homogeneous
//! of degree one in `ξ`, so a whole phase grid needs one trajectory per
//! `x` node and direction.

mod deform;
mod rk;

pub use deform::{deformation_derivative, dp_dr, DeformationPath, DeformationReport};
pub use rk::integrate;

use crate::dyadic::BandOperatorSet;
use crate::field::TrigPoly;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Default local error tolerance.
pub const FLOW_TOL: f64 = 1e-10;

/// A point `χ_{t,s}(y, η)` of phase space at time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonState {
    pub t: f64,
    pub x: f64,
    pub xi: f64,
}

/// Generator of the flow: the symbol `sign·s(x)|ξ|` for one band.
#[derive(Clone, Debug)]
pub struct BandHamiltonian {
    pub s: TrigPoly,
    pub sign: f64,
    pub length: f64,
}

impl BandHamiltonian {
    pub fn new(ops: &BandOperatorSet, sign: f64) -> Self {
        BandHamiltonian { s: ops.s_poly.clone(), sign, length: ops.grid().length }
    }

    pub fn symbol(&self, x: f64, xi: f64) -> f64 {
        self.sign * self.s.eval(x).re * xi.abs()
    }

    pub fn rhs(&self, y: [f64; 2]) -> [f64; 2] {
        let (s, ds, _) = self.s.eval3_re(y[0]);
        [self.sign * s * y[1].signum(), -self.sign * ds * y[1].abs()]
    }
}

/// Integrates from `(y, η)` at time `s` to time `t` (either direction).
pub fn flow_integrate(ops: &BandOperatorSet, sign: f64, y: f64, eta: f64, s: f64, t: f64) -> Result<HamiltonState> {
    flow_with(&BandHamiltonian::new(ops, sign), y, eta, s, t, FLOW_TOL)
}

pub(crate) fn flow_with(h: &BandHamiltonian, y: f64, eta: f64, s: f64, t: f64, tol: f64) -> Result<HamiltonState> {
    if eta == 0.0 {
        return Err(Error::FlowFailed("flow undefined at xi = 0".into()));
    }
    let out = integrate(|z| h.rhs(z), [y, eta], &[t - s], tol)?;
    Ok(HamiltonState { t, x: out[0][0].rem_euclid(h.length), xi: out[0][1] })
}

/// Samples of the trajectory through `(y, η)` at `n + 1` equispaced times in `[0, t]`.
pub fn trajectory(ops: &BandOperatorSet, sign: f64, y: f64, eta: f64, t: f64, n: usize) -> Result<Vec<HamiltonState>> {
    let h = BandHamiltonian::new(ops, sign);
    let ts: Vec<f64> = (0..=n).map(|i| t * i as f64 / n.max(1) as f64).collect();
    let ys = integrate(|z| h.rhs(z), [y, eta], &ts, FLOW_TOL)?;
    Ok(ts.iter().zip(ys).map(|(&t, z)| HamiltonState { t, x: z[0].rem_euclid(h.length), xi: z[1] }).collect())
}

/// Distance between `χ_{t,s}∘χ_{s,r}(z)` and `χ_{t,r}(z)`, measured in
/// `x` (mod L) and in relative `ξ`.
pub fn flow_compose_check(ops: &BandOperatorSet, sign: f64, y: f64, eta: f64, r: f64, s: f64, t: f64) -> Result<f64> {
    let mid = flow_integrate(ops, sign, y, eta, r, s)?;
    let two = flow_integrate(ops, sign, mid.x, mid.xi, s, t)?;
    let one = flow_integrate(ops, sign, y, eta, r, t)?;
    Ok(periodic_dist(two.x, one.x, ops.grid().length).max((two.xi - one.xi).abs() / eta.abs()))
}

pub(crate) fn periodic_dist(a: f64, b: f64, l: f64) -> f64 {
    let d = (a - b).rem_euclid(l);
    d.min(l - d)
}

/// `|det Dχ_{t,0}(y, η) - 1|` from centred differences.
pub fn symplectic_check(ops: &BandOperatorSet, sign: f64, y: f64, eta: f64, t: f64) -> Result<f64> {
    let h = BandHamiltonian::new(ops, sign);
    let tol = 1e-13;
    let dy = 1e-4;
    let de = 1e-4 * eta.abs();
    let run = |y0: f64, e0: f64| -> Result<(f64, f64)> {
        let z = integrate(|z| h.rhs(z), [y0, e0], &[t], tol)?;
        Ok((z[0][0], z[0][1]))
    };
    let (xp, kp) = run(y + dy, eta)?;
    let (xm, km) = run(y - dy, eta)?;
    let (xq, kq) = run(y, eta + de)?;
    let (xr, kr) = run(y, eta - de)?;
    let j11 = (xp - xm) / (2.0 * dy);
    let j21 = (kp - km) / (2.0 * dy);
    let j12 = (xq - xr) / (2.0 * de);
    let j22 = (kq - kr) / (2.0 * de);
    Ok((j11 * j22 - j12 * j21 - 1.0).abs())
}

/// Flow of one band sampled on `x` nodes at the lags `times`, for both
/// signs of `ξ`. Entry `(m, i, ε)` holds `X = x(times[m])` (unwrapped),
/// `ρ = ξ(times[m])/ξ(0)` and `s, s', s''` at `X`.
#[derive(Clone, Debug)]
pub struct FlowMap {
    pub sign: f64,
    pub times: Vec<f64>,
    pub nodes: Vec<f64>,
    data: [Vec<FlowSample>; 2],
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FlowSample {
    pub x: f64,
    pub rho: f64,
    pub s: f64,
    pub ds: f64,
    pub dds: f64,
}

impl FlowMap {
    /// `times` must be sorted and non-negative.
    pub fn build(ops: &BandOperatorSet, sign: f64, nodes: &[f64], times: &[f64]) -> Result<FlowMap> {
        if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::InvalidArgument("flow map times must be sorted and non-negative".into()));
        }
        let h = BandHamiltonian::new(ops, sign);
        let mut data = [
            vec![FlowSample::default(); times.len() * nodes.len()],
            vec![FlowSample::default(); times.len() * nodes.len()],
        ];
        for (e, eps) in [1.0, -1.0].into_iter().enumerate() {
            for (i, &y) in nodes.iter().enumerate() {
                let traj = integrate(|z| h.rhs(z), [y, eps], times, FLOW_TOL)?;
                for (m, z) in traj.iter().enumerate() {
                    let (s, ds, dds) = h.s.eval3_re(z[0]);
                    data[e][m * nodes.len() + i] = FlowSample { x: z[0], rho: z[1] * eps, s, ds, dds };
                }
            }
        }
        Ok(FlowMap { sign, times: times.to_vec(), nodes: nodes.to_vec(), data })
    }

    /// Sample for lag index `m`, node `i` and `ξ` sign `eps`.
    #[inline]
    pub fn get(&self, m: usize, i: usize, eps: f64) -> &FlowSample {
        let e = if eps > 0.0 { 0 } else { 1 };
        &self.data[e][m * self.nodes.len() + i]
    }

    /// Largest `|ρ - 1|` over the map, a measure of frequency distortion.
    pub fn max_distortion(&self) -> f64 {
        self.data.iter().flatten().fold(0.0, |m, s| m.max((s.rho - 1.0).abs()))
    }
}

#[cfg(test)]
mod tests;
