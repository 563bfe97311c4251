use super::scatter::{scatter_into, Outputs, ScatterSpectra};
use super::{BandData, EvolutionRoute, Parametrix, SIGNS};
use crate::dyadic::{apply_band, apply_band_range, apply_p, apply_q};
use crate::fbi::{fbi_adjoint, fbi_adjoint_generator, fbi_eval_offgrid, fbi_forward, PhaseSpaceField, Window};
use crate::field::SampledField;
use crate::hamflow::FlowMap;
use crate::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::borrow::Cow;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Data prepared once per input: `f = (I+K)^{-1}g`, the transformed band
/// pieces `T_λ (i/2)Q^± β_k f` and the low part `Σ_{j<k0} β_j f`.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub th: Vec<[PhaseSpaceField; 2]>,
    pub low: SampledField,
    pub neumann_iters: usize,
}

/// `Ŝ(t)g`, `∂_t Ŝ(t)g` and `D_t² Ŝ(t)g` at one time.
#[derive(Clone, Debug)]
pub struct EvolvedState {
    pub t: f64,
    pub u: SampledField,
    pub dt_u: SampledField,
    pub dtt_u: SampledField,
}

/// Estimate of `‖K‖` from random trials and power iteration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KNormEstimate {
    pub norm: f64,
    pub trials: usize,
}

impl Parametrix {
    fn window(&self, b: &BandData) -> Window {
        Window::new(b.ops.lambda)
    }

    /// `(i/2)Q^σ β_k g`, the input of the band transform.
    pub fn band_input(&self, k: u32, sign: f64, g: &SampledField) -> Result<SampledField> {
        let b = self.band(k)?;
        let mut spec = apply_band(&self.part, g, k).spectrum().to_vec();
        // β_k vanishes at ξ = 0 for k ≥ 1; clear rounding in the zero mode.
        spec[0] = C64::new(0.0, 0.0);
        Ok(apply_q(&b.ops, sign, &SampledField::from_spectrum(self.grid, spec)?)?.scale(I * 0.5))
    }

    /// `T_λ (i/2)Q^σ β_k g` on the band's phase grid.
    pub fn band_transform(&self, b: &BandData, sign: f64, g: &SampledField) -> Result<PhaseSpaceField> {
        let h = self.band_input(b.ops.k, sign, g)?;
        fbi_forward(&self.window(b), &h, &b.pgrid)
    }

    /// Transforms of all bands and signs without the `(I+K)^{-1}` factor.
    pub fn prepare_raw(&self, g: &SampledField) -> Result<Prepared> {
        let mut th = Vec::with_capacity(self.bands.len());
        for b in &self.bands {
            // Q^- = -Q^+, so the minus transform is the negated plus one.
            let plus = self.band_transform(b, SIGNS[0], g)?;
            let mut minus = plus.clone();
            minus.values.iter_mut().for_each(|z| *z = -*z);
            th.push([plus, minus]);
        }
        let low = apply_band_range(&self.part, g, 0, self.k0 - 1);
        Ok(Prepared { th, low, neumann_iters: 0 })
    }

    /// `(I+K)^{-1}` followed by [`Parametrix::prepare_raw`].
    pub fn prepare(&self, g: &SampledField) -> Result<Prepared> {
        let (f, iters) = self.invert_i_plus_k(g)?;
        let mut p = self.prepare_raw(&f)?;
        p.neumann_iters = iters;
        Ok(p)
    }

    fn flows_at<'a>(&self, b: &'a BandData, s: usize, t: f64) -> Result<(Cow<'a, FlowMap>, usize)> {
        match self.lag_index(t) {
            Some(m) => Ok((Cow::Borrowed(&b.flows[s]), m)),
            None => {
                let nodes: Vec<f64> = (0..b.pgrid.n_x).map(|i| b.pgrid.x(i)).collect();
                Ok((Cow::Owned(FlowMap::build(&b.ops, SIGNS[s], &nodes, &[t.abs()])?), 0))
            }
        }
    }

    /// Accumulates `weight·(Σ scatter)` of prepared data at time `t ≥ 0`.
    /// The low part is not included.
    pub fn scatter_prepared(
        &self,
        p: &Prepared,
        t: f64,
        outs: Outputs,
        weight: C64,
        acc: &mut ScatterSpectra,
    ) -> Result<()> {
        if t < 0.0 {
            return Err(Error::InvalidArgument(format!("negative time {t}")));
        }
        for (b, th) in self.bands.iter().zip(&p.th) {
            for s in 0..2 {
                let (flow, m) = self.flows_at(b, s, t)?;
                scatter_into(&self.grid, SIGNS[s], &flow, m, &th[s], self.cfg.prune, outs, weight, acc);
            }
        }
        Ok(())
    }

    fn field(&self, spec: Vec<C64>) -> SampledField {
        SampledField::from_spectrum(self.grid, spec).expect("grid size")
    }

    /// `Ŝ(t)`-type evolution of prepared data: `u`, `∂_t u`, `D_t² u`.
    pub fn evolve_prepared(&self, p: &Prepared, t: f64) -> Result<EvolvedState> {
        let mut acc = ScatterSpectra::zeros(self.grid.n);
        self.scatter_prepared(p, t, Outputs::ALL, C64::new(1.0, 0.0), &mut acc)?;
        let u = self.field(acc.u).axpy(C64::new(t, 0.0), &p.low)?;
        let dt_u = self.field(acc.lu).scale(I).add(&p.low)?;
        let dtt_u = self.field(acc.llu);
        Ok(EvolvedState { t, u, dt_u, dtt_u })
    }

    /// `S̃(t)g` (no `(I+K)^{-1}`).
    pub fn apply_stilde(&self, g: &SampledField, t: f64) -> Result<SampledField> {
        Ok(self.evolve_prepared(&self.prepare_raw(g)?, t)?.u)
    }

    /// `Ŝ(t)g = S̃(t)(I+K)^{-1}g`.
    pub fn apply_shat(&self, g: &SampledField, t: f64) -> Result<SampledField> {
        Ok(self.evolve_prepared(&self.prepare(g)?, t)?.u)
    }

    /// `∂_t Ŝ(t)g`.
    pub fn shat_timederiv(&self, g: &SampledField, t: f64) -> Result<SampledField> {
        Ok(self.evolve_prepared(&self.prepare(g)?, t)?.dt_u)
    }

    pub fn shat_state(&self, g: &SampledField, t: f64) -> Result<EvolvedState> {
        self.evolve_prepared(&self.prepare(g)?, t)
    }

    /// `A u = a(x) D_x² u = -a u_xx`.
    pub fn apply_a(&self, u: &SampledField) -> Result<SampledField> {
        self.metric.field.product(&u.real_multiplier(|xi| xi * xi))
    }

    /// `T(t)g = (D_t² - A)Ŝ(t)g`.
    pub fn apply_t(&self, g: &SampledField, t: f64) -> Result<SampledField> {
        let st = self.shat_state(g, t)?;
        st.dtt_u.sub(&self.apply_a(&st.u)?)
    }

    /// `T(t)` applied to already prepared data.
    pub fn apply_t_prepared(&self, p: &Prepared, t: f64) -> Result<SampledField> {
        let st = self.evolve_prepared(p, t)?;
        st.dtt_u.sub(&self.apply_a(&st.u)?)
    }

    /// `K g = ∂_t S̃(0)g - g`, so that `∂_t Ŝ(0) = I` exactly.
    pub fn apply_k(&self, g: &SampledField) -> Result<SampledField> {
        let p = self.prepare_raw(g)?;
        let mut acc = p.low.sub(g)?;
        for (b, th) in self.bands.iter().zip(&p.th) {
            for s in 0..2 {
                let lu = fbi_adjoint_generator(&b.ops, SIGNS[s], &th[s], &self.grid)?;
                acc = acc.axpy(I, &lu)?;
            }
        }
        Ok(acc)
    }

    /// Neumann series for `(I+K)^{-1}g`; returns the iterate count too.
    pub fn invert_i_plus_k(&self, g: &SampledField) -> Result<(SampledField, usize)> {
        let gn = g.l2_norm();
        if gn == 0.0 {
            return Ok((g.clone(), 0));
        }
        let mut h = g.clone();
        for it in 1..=self.cfg.neumann_max_iter {
            let next = g.sub(&self.apply_k(&h)?)?;
            let d = next.sub(&h)?.l2_norm();
            h = next;
            if d <= self.cfg.neumann_tol * gn {
                return Ok((h, it));
            }
            if !d.is_finite() || d > 1e6 * gn {
                break;
            }
        }
        Err(Error::NotConverged("Neumann series for (I+K)^-1 did not converge".into()))
    }

    /// `max ‖Kv‖/‖v‖` over random real fields and a short power iteration.
    pub fn estimate_k_norm(&self, power_iters: usize, trials: usize, seed: u64) -> Result<KNormEstimate> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0f64;
        let mut count = 0;
        for _ in 0..trials {
            let vals: Vec<f64> = (0..self.grid.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut v = SampledField::from_real(self.grid, &vals)?;
            for _ in 0..=power_iters {
                let kv = self.apply_k(&v)?;
                let ratio = kv.l2_norm() / v.l2_norm();
                count += 1;
                best = best.max(ratio);
                if kv.l2_norm() == 0.0 {
                    break;
                }
                v = kv.scale(C64::new(1.0 / kv.l2_norm(), 0.0));
            }
        }
        Ok(KNormEstimate { norm: best, trials: count })
    }

    /// `E^σ_k(t)g = T*U^σ(t)T (i/2)Q^σ β_k g`.
    pub fn apply_e(&self, k: u32, sign: f64, g: &SampledField, t: f64) -> Result<SampledField> {
        Ok(self.band_state(k, sign, g, t, Outputs::U)?.0)
    }

    /// `E`, `D_t E` and `D_t² E` for one band and sign.
    fn band_state(
        &self,
        k: u32,
        sign: f64,
        g: &SampledField,
        t: f64,
        outs: Outputs,
    ) -> Result<(SampledField, SampledField, SampledField)> {
        sign_index(sign)?;
        if self.cfg.route == EvolutionRoute::Gather && outs == Outputs::U {
            return Ok((
                self.apply_e_gather(k, sign, g, t)?,
                SampledField::zeros(self.grid),
                SampledField::zeros(self.grid),
            ));
        }
        let h = self.band_input(k, sign, g)?;
        self.transport_state(k, sign, &h, t, outs)
    }

    /// `T*U^σ(t)T h`, `D_t` and `D_t²` of it, on band `k`'s phase grid.
    /// Unlike [`Parametrix::apply_e`] no band cut-off or `Q` is applied.
    pub fn transport_state(
        &self,
        k: u32,
        sign: f64,
        h: &SampledField,
        t: f64,
        outs: Outputs,
    ) -> Result<(SampledField, SampledField, SampledField)> {
        let b = self.band(k)?;
        let s = sign_index(sign)?;
        let th = fbi_forward(&self.window(b), h, &b.pgrid)?;
        let (flow, m) = self.flows_at(b, s, t)?;
        let mut acc = ScatterSpectra::zeros(self.grid.n);
        scatter_into(&self.grid, sign, &flow, m, &th, self.cfg.prune, outs, C64::new(1.0, 0.0), &mut acc);
        Ok((self.field(acc.u), self.field(acc.lu), self.field(acc.llu)))
    }

    /// Half-wave residual `(D_t + P^σ)E^σ_k(t)g`.
    pub fn apply_halfwave_residual(&self, k: u32, sign: f64, g: &SampledField, t: f64) -> Result<SampledField> {
        let (u, lu, _) = self.band_state(k, sign, g, t, Outputs { u: true, lu: true, llu: false })?;
        lu.add(&apply_p(&self.band(k)?.ops, sign, &u)?)
    }

    /// Full-wave residual `(D_t² - (P^σ)²)E^σ_k(t)g`.
    pub fn apply_fullwave_residual(&self, k: u32, sign: f64, g: &SampledField, t: f64) -> Result<SampledField> {
        let (u, _, llu) = self.band_state(k, sign, g, t, Outputs { u: true, lu: false, llu: true })?;
        let ops = &self.band(k)?.ops;
        llu.sub(&apply_p(ops, sign, &apply_p(ops, sign, &u)?)?)
    }

    /// `E^σ_k(t)g` evaluated by back-tracing nodes: `T*[(T h)∘χ_{0,t}]`.
    pub fn apply_e_gather(&self, k: u32, sign: f64, g: &SampledField, t: f64) -> Result<SampledField> {
        let b = self.band(k)?;
        let h = self.band_input(k, sign, g)?;
        let pg = &b.pgrid;
        let nodes: Vec<f64> = (0..pg.n_x).map(|i| pg.x(i)).collect();
        let back = FlowMap::build(&b.ops, -sign, &nodes, &[t])?;
        let w = self.window(b);
        let mut big = PhaseSpaceField::zeros(pg.clone());
        for (j, &xi) in pg.xi.iter().enumerate() {
            let eps = xi.signum();
            for i in 0..pg.n_x {
                let f = back.get(0, i, eps);
                big.values[pg.index(i, j)] = fbi_eval_offgrid(&w, &h, f.x, xi * f.rho);
            }
        }
        fbi_adjoint(&w, &big, &self.grid)
    }
}

pub(crate) fn sign_index(sign: f64) -> Result<usize> {
    if sign == 1.0 {
        Ok(0)
    } else if sign == -1.0 {
        Ok(1)
    } else {
        Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")))
    }
}
