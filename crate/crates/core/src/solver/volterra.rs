//! `G(t) = F(t) + ∫_0^t T(t-s)G(s) ds` on a uniform grid.

use super::{SpaceTimeField, TimeGrid};
use crate::field::SampledField;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// One term `weight · T(lag) data` of a kernel sum.
pub struct KernelTerm<'a, P> {
    pub lag: f64,
    pub weight: f64,
    pub data: &'a P,
}

/// A time-translation invariant kernel `T(t, s) = T(t - s)`.
///
/// `prepare` does the per-input work once so that one input can be pushed
/// through many lags cheaply.
pub trait VolterraKernel {
    type Prepared;

    fn prepare(&self, g: &SampledField) -> Result<Self::Prepared>;

    /// `Σ weight · T(lag) data`; `terms` is never empty.
    fn apply_sum(&self, terms: &[KernelTerm<'_, Self::Prepared>]) -> Result<SampledField>;
}

/// `T(τ) = κ I`.
#[derive(Clone, Copy, Debug)]
pub struct ScalarKernel {
    pub kappa: f64,
}

impl VolterraKernel for ScalarKernel {
    type Prepared = SampledField;

    fn prepare(&self, g: &SampledField) -> Result<SampledField> {
        Ok(g.clone())
    }

    fn apply_sum(&self, terms: &[KernelTerm<'_, SampledField>]) -> Result<SampledField> {
        let mut acc = SampledField::zeros(*terms[0].data.grid());
        for t in terms {
            acc = acc.axpy(C64::new(self.kappa * t.weight, 0.0), t.data)?;
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VolterraConfig {
    /// Relative tolerance of the fixed-point sweeps for the diagonal term.
    pub diag_tol: f64,
    pub diag_max_sweeps: usize,
    /// The diagonal map `G ↦ ½Δt T(0)G` must contract at least this well.
    pub diag_max_factor: f64,
    /// Inputs with `‖G_j‖ ≤ skip_tol · max‖F‖` are dropped from later sums.
    pub skip_tol: f64,
}

impl Default for VolterraConfig {
    fn default() -> Self {
        VolterraConfig { diag_tol: 1e-12, diag_max_sweeps: 60, diag_max_factor: 0.5, skip_tol: 1e-14 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VolterraStats {
    /// Largest measured `‖½Δt T(0)G‖/‖G‖` over the steps.
    pub diag_factor: f64,
    pub max_sweeps: usize,
    pub skipped: usize,
    pub kernel_terms: usize,
    /// `max_m ‖G_m‖ / max_m ‖F_m‖`.
    pub gain: f64,
}

pub struct VolterraSolution<P> {
    pub g: SpaceTimeField,
    /// Prepared `G_m`, `None` where the input was negligible.
    pub prepared: Vec<Option<P>>,
    pub stats: VolterraStats,
}

/// Forward substitution with the trapezoid rule:
///
/// `G_m = F_m + Δt Σ_{j<m} w_j T(t_m - t_j) G_j + ½Δt T(0) G_m`,
///
/// with the implicit diagonal term resolved by fixed-point sweeps.
pub fn volterra_solve<K: VolterraKernel>(
    kernel: &K,
    f: &SpaceTimeField,
    cfg: &VolterraConfig,
) -> Result<VolterraSolution<K::Prepared>> {
    let times = f.times;
    let dt = times.dt();
    let fmax = f.sup_l2();
    let skip = cfg.skip_tol * fmax;
    let mut stats = VolterraStats::default();
    let mut gs: Vec<SampledField> = Vec::with_capacity(times.steps + 1);
    let mut prepared: Vec<Option<K::Prepared>> = Vec::with_capacity(times.steps + 1);
    for m in 0..=times.steps {
        let mut rhs = f.fields[m].clone();
        let terms: Vec<KernelTerm<'_, K::Prepared>> = (0..m)
            .filter_map(|j| {
                prepared[j].as_ref().map(|p| KernelTerm {
                    lag: times.node(m - j),
                    weight: dt * TimeGrid::trapezoid_weight(m, j),
                    data: p,
                })
            })
            .collect();
        if !terms.is_empty() {
            stats.kernel_terms += terms.len();
            rhs = rhs.add(&kernel.apply_sum(&terms)?)?;
        }
        drop(terms);
        let diag = if m == 0 { 0.0 } else { 0.5 * dt };
        let (g, p) = solve_diagonal(kernel, &rhs, diag, skip, cfg, &mut stats)?;
        if p.is_none() {
            stats.skipped += 1;
        }
        gs.push(g);
        prepared.push(p);
    }
    let g = SpaceTimeField::new(times, gs)?;
    stats.gain = if fmax > 0.0 { g.sup_l2() / fmax } else { 0.0 };
    Ok(VolterraSolution { g, prepared, stats })
}

/// `G = R + c T(0) G` by fixed-point sweeps.
fn solve_diagonal<K: VolterraKernel>(
    kernel: &K,
    rhs: &SampledField,
    c: f64,
    skip: f64,
    cfg: &VolterraConfig,
    stats: &mut VolterraStats,
) -> Result<(SampledField, Option<K::Prepared>)> {
    let rn = rhs.l2_norm();
    if rn <= skip {
        return Ok((rhs.clone(), None));
    }
    let mut g = rhs.clone();
    let mut p = kernel.prepare(&g)?;
    if c == 0.0 {
        return Ok((g, Some(p)));
    }
    for sweep in 1..=cfg.diag_max_sweeps {
        let d = kernel.apply_sum(&[KernelTerm { lag: 0.0, weight: c, data: &p }])?;
        if sweep == 1 {
            let factor = d.l2_norm() / rn;
            stats.diag_factor = stats.diag_factor.max(factor);
            if factor >= cfg.diag_max_factor {
                return Err(Error::NotConverged(format!(
                    "diagonal factor {factor:.3} ≥ {}: refine N_t",
                    cfg.diag_max_factor
                )));
            }
        }
        let next = rhs.add(&d)?;
        let change = next.sub(&g)?.l2_norm();
        g = next;
        p = kernel.prepare(&g)?;
        if change <= cfg.diag_tol * rn {
            stats.max_sweeps = stats.max_sweeps.max(sweep);
            return Ok((g, Some(p)));
        }
    }
    Err(Error::NotConverged("diagonal fixed-point sweeps".into()))
}

/// Truncated Picard series `Σ_{j<terms} V^j F`, `V F(t_m) = Δt Σ_i w_i T(t_m - t_i)F(t_i)`,
/// using the same trapezoid rule as [`volterra_solve`].
pub fn volterra_picard<K: VolterraKernel>(kernel: &K, f: &SpaceTimeField, terms: usize) -> Result<SpaceTimeField> {
    let times = f.times;
    let dt = times.dt();
    let mut sum = f.fields.clone();
    let mut cur = f.fields.clone();
    for _ in 1..terms {
        let prep = cur.iter().map(|c| kernel.prepare(c)).collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(cur.len());
        for m in 0..=times.steps {
            if m == 0 {
                next.push(SampledField::zeros(*f.grid()));
                continue;
            }
            let terms: Vec<_> = (0..=m)
                .map(|i| KernelTerm {
                    lag: times.node(m - i),
                    weight: dt * TimeGrid::trapezoid_weight(m, i),
                    data: &prep[i],
                })
                .collect();
            next.push(kernel.apply_sum(&terms)?);
        }
        for (s, n) in sum.iter_mut().zip(&next) {
            *s = s.add(n)?;
        }
        cur = next;
    }
    SpaceTimeField::new(times, sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;

    fn ones(times: TimeGrid) -> SpaceTimeField {
        let grid = Grid::torus(16).unwrap();
        SpaceTimeField::from_fn(times, |_| Ok(SampledField::from_real_fn(grid, |_| 1.0))).unwrap()
    }

    #[test]
    fn scalar_kernel_matches_exponential() {
        let times = TimeGrid::new(1.0, 64).unwrap();
        let kappa = 0.3;
        let sol = volterra_solve(&ScalarKernel { kappa }, &ones(times), &VolterraConfig::default()).unwrap();
        for (m, g) in sol.g.fields.iter().enumerate() {
            let want = (kappa * times.node(m)).exp();
            assert!((g.values()[3].re - want).abs() < 1e-6, "m={m}");
        }
    }

    #[test]
    fn picard_agrees_with_forward_substitution() {
        let times = TimeGrid::new(1.0, 32).unwrap();
        let k = ScalarKernel { kappa: 0.3 };
        let f = ones(times);
        let a = volterra_solve(&k, &f, &VolterraConfig::default()).unwrap().g;
        let b = volterra_picard(&k, &f, 8).unwrap();
        for (x, y) in a.fields.iter().zip(&b.fields) {
            assert!(x.sub(y).unwrap().max_abs() < 1e-6);
        }
    }

    #[test]
    fn zero_kernel_is_identity() {
        let times = TimeGrid::new(1.0, 16).unwrap();
        let f = ones(times);
        let sol = volterra_solve(&ScalarKernel { kappa: 0.0 }, &f, &VolterraConfig::default()).unwrap();
        for (x, y) in sol.g.fields.iter().zip(&f.fields) {
            assert!(x.sub(y).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn large_diagonal_is_rejected() {
        let times = TimeGrid::new(1.0, 16).unwrap();
        let r = volterra_solve(&ScalarKernel { kappa: 20.0 }, &ones(times), &VolterraConfig::default());
        assert!(matches!(r, Err(Error::NotConverged(_))));
    }
}
