use super::{integrate, BandHamiltonian, FLOW_TOL};
use crate::dyadic::{build_band_ops, truncate_coefficient};
use crate::field::{Metric, SampledField};
use crate::{Result, C64};
use serde::{Deserialize, Serialize};

/// Linear path `C_r = rA + (1-r)B` between two metrics.
#[derive(Clone, Debug)]
pub struct DeformationPath {
    pub a: Metric,
    pub b: Metric,
}

impl DeformationPath {
    pub fn new(a: Metric, b: Metric) -> Result<Self> {
        a.grid().check_same(b.grid())?;
        Ok(DeformationPath { a, b })
    }

    pub fn at(&self, r: f64) -> Result<Metric> {
        let f = self.a.field.scale(C64::new(r, 0.0)).axpy(C64::new(1.0 - r, 0.0), &self.b.field)?;
        Metric::from_samples(f, None)
    }
}

/// `∂_r s_{C_r} = χ(λ^{-1/2}D)[(A_k - B_k)/(2√C_{r,k})]`, the `r`-derivative of
/// the band symbol along the path (per unit `|ξ|`).
pub fn dp_dr(path: &DeformationPath, k: u32, r: f64) -> Result<SampledField> {
    let ak = truncate_coefficient(&path.a.field, k);
    let bk = truncate_coefficient(&path.b.field, k);
    let ck = ak.scale(C64::new(r, 0.0)).axpy(C64::new(1.0 - r, 0.0), &bk)?;
    let v = ak.sub(&bk)?;
    let q: Vec<C64> =
        v.values().iter().zip(ck.values()).map(|(d, c)| C64::new(d.re / (2.0 * c.re.sqrt()), 0.0)).collect();
    Ok(truncate_coefficient(&SampledField::new(*v.grid(), q)?, k).map(|z| C64::new(z.re, 0.0)))
}

/// `r`-derivative of the flow `χ^{C_r}_{t,0}(y, η)` and its Gronwall bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeformationReport {
    pub k: u32,
    pub sign: f64,
    pub y: f64,
    pub eta: f64,
    pub t: f64,
    pub r: f64,
    pub dx_dr: f64,
    pub dxi_dr: f64,
    /// Difference between the Richardson value and the finer central difference.
    pub richardson_error: f64,
    /// Bound on `|∂_r x| + |∂_r ξ|/|η|`.
    pub gronwall_bound: f64,
}

/// Central differences in `r` with Richardson extrapolation.
pub fn deformation_derivative(
    path: &DeformationPath,
    k: u32,
    sign: f64,
    y: f64,
    eta: f64,
    t: f64,
    r: f64,
) -> Result<DeformationReport> {
    let end = |rr: f64| -> Result<[f64; 2]> {
        let ops = build_band_ops(&path.at(rr)?, k)?;
        let h = BandHamiltonian::new(&ops, sign);
        Ok(integrate(|z| h.rhs(z), [y, eta], &[t], FLOW_TOL * 1e-2)?[0])
    };
    let h = 1e-3;
    let diff = |h: f64| -> Result<[f64; 2]> {
        let p = end(r + h)?;
        let m = end(r - h)?;
        Ok([(p[0] - m[0]) / (2.0 * h), (p[1] - m[1]) / (2.0 * h)])
    };
    let d1 = diff(h)?;
    let d2 = diff(h / 2.0)?;
    let dx = (4.0 * d2[0] - d1[0]) / 3.0;
    let dk = (4.0 * d2[1] - d1[1]) / 3.0;
    let richardson_error = (dx - d2[0]).abs().max((dk - d2[1]).abs() / eta.abs());

    let ops = build_band_ops(&path.at(r)?, k)?;
    let ds = dp_dr(path, k, r)?;
    let s = ops.s_k.re();
    let s1 = ops.s_k.derivative(1).re();
    let s2 = ops.s_k.derivative(2).re();
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let rho_max = sup(&s) / smin;
    let kk = 2.0 * sup(&s1) + rho_max * sup(&s2);
    let g = sup(&ds.re()) + rho_max * sup(&ds.derivative(1).re());
    let gronwall_bound = if kk > 0.0 { g * ((kk * t.abs()).exp() - 1.0) / kk } else { g * t.abs() };
    Ok(DeformationReport { k, sign, y, eta, t, r, dx_dr: dx, dxi_dr: dk, richardson_error, gronwall_bound })
}
