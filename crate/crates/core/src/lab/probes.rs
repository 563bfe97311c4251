//! `‖(Op_A - Op_B)f‖` for the building blocks of the solver, fitted as
//! `C ‖A-B‖^p λ^q` over bands and amplitudes.

use super::PerturbationSweep;
use crate::dyadic::{apply_band, apply_p, apply_q, apply_r};
use crate::fbi::{correction_packet, packet_field, Window};
use crate::field::{random_band_limited, Metric, SampledField};
use crate::parametrix::{Outputs, Parametrix, ParametrixConfig};
use crate::solver::{volterra_solve, ParametrixKernel, SpaceTimeField, TimeGrid, VolterraConfig};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

pub const DELTA_EXPONENT: (f64, f64) = (0.9, 1.1);
pub const LAMBDA_WINDOW: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// `P = ±s_k|D|`.
    SymbolP,
    /// `Q = ±r_k|D|^{-1}`.
    SymbolQ,
    /// `R = PQ - I`.
    SymbolR,
    /// `(P + L)g_λ` for single packets.
    PacketCorrection,
    /// Half-wave residual of `E_k` at `t = 0`.
    InitialCorrection,
    /// `(I + K)^{-1}`.
    BoundaryCorrection,
    /// `T*U(t)T`.
    FlowedTransform,
    /// `(D_t + P)T*U(t)T`.
    HalfwaveError,
    /// `(D_t² - P²)T*U(t)T`.
    FullwaveError,
    /// `E_k(t)`.
    Evolution,
    /// `T(t)`.
    Residual,
    /// Solution operator of the Volterra equation with `F(t) = f`.
    Volterra,
}

/// Whether the `λ` power is expected to be attained or only bounds the growth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeBound {
    Sharp,
    Upper,
}

/// The stability estimates the probes cover; every one needs a probe row.
pub const STATEMENTS: [&str; 9] = [
    "symbol stability",
    "packet correction stability",
    "initial correction stability",
    "boundary correction stability",
    "flow stability",
    "localized error stability",
    "evolution stability",
    "residual stability",
    "volterra stability",
];

impl ProbeKind {
    pub const ALL: [ProbeKind; 12] = [
        ProbeKind::SymbolP,
        ProbeKind::SymbolQ,
        ProbeKind::SymbolR,
        ProbeKind::PacketCorrection,
        ProbeKind::InitialCorrection,
        ProbeKind::BoundaryCorrection,
        ProbeKind::FlowedTransform,
        ProbeKind::HalfwaveError,
        ProbeKind::FullwaveError,
        ProbeKind::Evolution,
        ProbeKind::Residual,
        ProbeKind::Volterra,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::SymbolP => "symbol_p",
            ProbeKind::SymbolQ => "symbol_q",
            ProbeKind::SymbolR => "symbol_r",
            ProbeKind::PacketCorrection => "packet_correction",
            ProbeKind::InitialCorrection => "initial_correction",
            ProbeKind::BoundaryCorrection => "boundary_correction",
            ProbeKind::FlowedTransform => "flowed_transform",
            ProbeKind::HalfwaveError => "halfwave_error",
            ProbeKind::FullwaveError => "fullwave_error",
            ProbeKind::Evolution => "evolution",
            ProbeKind::Residual => "residual",
            ProbeKind::Volterra => "volterra",
        }
    }

    pub fn statement(self) -> &'static str {
        let i = match self {
            ProbeKind::SymbolP | ProbeKind::SymbolQ | ProbeKind::SymbolR => 0,
            ProbeKind::PacketCorrection => 1,
            ProbeKind::InitialCorrection => 2,
            ProbeKind::BoundaryCorrection => 3,
            ProbeKind::FlowedTransform => 4,
            ProbeKind::HalfwaveError | ProbeKind::FullwaveError => 5,
            ProbeKind::Evolution => 6,
            ProbeKind::Residual => 7,
            ProbeKind::Volterra => 8,
        };
        STATEMENTS[i]
    }

    /// Power of `λ` in the bound.
    pub fn lambda_power(self) -> f64 {
        match self {
            ProbeKind::SymbolP
            | ProbeKind::PacketCorrection
            | ProbeKind::FlowedTransform
            | ProbeKind::HalfwaveError => 1.0,
            ProbeKind::SymbolQ | ProbeKind::SymbolR => -1.0,
            ProbeKind::FullwaveError => 2.0,
            ProbeKind::InitialCorrection
            | ProbeKind::BoundaryCorrection
            | ProbeKind::Evolution
            | ProbeKind::Residual
            | ProbeKind::Volterra => 0.0,
        }
    }

    pub fn bound(self) -> ProbeBound {
        match self {
            ProbeKind::SymbolP
            | ProbeKind::SymbolQ
            | ProbeKind::SymbolR
            | ProbeKind::FlowedTransform
            | ProbeKind::Evolution
            | ProbeKind::Residual => ProbeBound::Sharp,
            _ => ProbeBound::Upper,
        }
    }

    fn lambda_ok(self, q: f64) -> bool {
        match self.bound() {
            ProbeBound::Sharp => (q - self.lambda_power()).abs() <= LAMBDA_WINDOW,
            ProbeBound::Upper => q <= self.lambda_power() + LAMBDA_WINDOW,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeConfig {
    pub bands: Vec<u32>,
    pub t: f64,
    pub sign: f64,
    /// Time steps of the Volterra probe on `[0, t]`.
    pub volterra_steps: usize,
    /// Data are cut off above this fraction of the Nyquist frequency.
    pub data_cutoff: f64,
    pub seed: u64,
    pub kinds: Vec<ProbeKind>,
    pub parametrix: ParametrixConfig,
    pub volterra: VolterraConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            bands: vec![5, 6, 7],
            t: 0.1,
            sign: 1.0,
            volterra_steps: 16,
            data_cutoff: 0.75,
            seed: 3,
            kinds: ProbeKind::ALL.to_vec(),
            parametrix: ParametrixConfig::default(),
            volterra: VolterraConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeMeasurement {
    pub k: u32,
    pub lambda: f64,
    pub delta: f64,
    pub distance: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub kind: ProbeKind,
    pub statement: String,
    pub lambda_power: f64,
    pub bound: ProbeBound,
    pub delta_exponent: f64,
    pub lambda_exponent: f64,
    pub pass: bool,
    pub measurements: Vec<ProbeMeasurement>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub t: f64,
    pub sign: f64,
    pub rows: Vec<ProbeRow>,
    /// Statements without a probe row.
    pub uncovered: Vec<String>,
    pub pass: bool,
}

/// Statements of [`STATEMENTS`] not measured by any of `kinds`.
pub fn uncovered(kinds: &[ProbeKind]) -> Vec<String> {
    STATEMENTS.iter().filter(|s| !kinds.iter().any(|k| k.statement() == **s)).map(|s| s.to_string()).collect()
}

/// One metric's parametrix and its Volterra time grid.
struct Side {
    pmx: Parametrix,
    times: TimeGrid,
}

impl Side {
    fn new(metric: &Metric, cfg: &ProbeConfig, k0: Option<u32>) -> Result<Side> {
        let times = TimeGrid::new(cfg.t, cfg.volterra_steps)?;
        let pmx = match k0 {
            None => Parametrix::new(metric, &cfg.parametrix, &times.nodes())?,
            Some(k0) => Parametrix::with_k0(metric, &cfg.parametrix, &times.nodes(), k0)?,
        };
        Ok(Side { pmx, times })
    }

    /// Packet positions tested by the packet correction probe.
    fn packet_points(&self) -> [f64; 4] {
        let l = self.pmx.grid.length;
        [0.1 * l, 0.35 * l, 0.6 * l, 0.85 * l]
    }

    /// The output of `kind` on `f` (band `k`); for the packet probe the
    /// packets at [`Side::packet_points`] are concatenated.
    fn apply(
        &self,
        kind: ProbeKind,
        k: u32,
        sign: f64,
        f: &SampledField,
        cfg: &ProbeConfig,
    ) -> Result<Vec<SampledField>> {
        let pmx = &self.pmx;
        let ops = &pmx.band(k)?.ops;
        let t = cfg.t;
        let transport = |outs| pmx.transport_state(k, sign, f, t, outs);
        let one = |x: SampledField| Ok(vec![x]);
        match kind {
            ProbeKind::SymbolP => one(apply_p(ops, sign, f)?),
            ProbeKind::SymbolQ => one(apply_q(ops, sign, f)?),
            ProbeKind::SymbolR => one(apply_r(ops, f)?),
            ProbeKind::PacketCorrection => {
                self.packet_points().iter().map(|&x| correction_packet(ops, sign, x, ops.lambda)).collect()
            }
            ProbeKind::InitialCorrection => one(pmx.apply_halfwave_residual(k, sign, f, 0.0)?),
            ProbeKind::BoundaryCorrection => one(pmx.invert_i_plus_k(f)?.0),
            ProbeKind::FlowedTransform => one(transport(Outputs::U)?.0),
            ProbeKind::HalfwaveError => {
                let (u, lu, _) = transport(Outputs { u: true, lu: true, llu: false })?;
                one(lu.add(&apply_p(ops, sign, &u)?)?)
            }
            ProbeKind::FullwaveError => {
                let (u, _, llu) = transport(Outputs { u: true, lu: false, llu: true })?;
                one(llu.sub(&apply_p(ops, sign, &apply_p(ops, sign, &u)?)?)?)
            }
            ProbeKind::Evolution => one(pmx.apply_e(k, sign, f, t)?),
            ProbeKind::Residual => one(pmx.apply_t(f, t)?),
            ProbeKind::Volterra => {
                let rhs = SpaceTimeField::from_fn(self.times, |_| Ok(f.clone()))?;
                let sol = volterra_solve(&ParametrixKernel { pmx }, &rhs, &cfg.volterra)?;
                Ok(sol.g.fields)
            }
        }
    }
}

/// The normaliser of a probe's input.
fn input_norm(kind: ProbeKind, side: &Side, k: u32, f: &SampledField) -> Result<f64> {
    Ok(match kind {
        ProbeKind::PacketCorrection => {
            let ops = &side.pmx.band(k)?.ops;
            packet_field(&Window::new(ops.lambda), ops.grid(), 0.0, ops.lambda).l2_norm()
        }
        _ => f.l2_norm(),
    })
}

/// `max_j ‖a_j - b_j‖`.
fn max_diff(a: &[SampledField], b: &[SampledField]) -> Result<f64> {
    let mut m = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        m = m.max(x.sub(y)?.l2_norm());
    }
    Ok(m)
}

/// Band-limited unit test function concentrated on band `k`.
pub fn probe_input(pmx: &Parametrix, k: u32, cutoff: f64, seed: u64) -> SampledField {
    let grid = pmx.grid;
    let nyq = (grid.n / 2) as f64 * 2.0 * std::f64::consts::PI / grid.length;
    let raw = random_band_limited(grid, 1.0, cutoff * nyq, seed.wrapping_add(k as u64));
    let f = apply_band(&pmx.part, &raw, k);
    let mut spec = f.spectrum().to_vec();
    spec[0] = C64::new(0.0, 0.0);
    let f = SampledField::from_spectrum(grid, spec).expect("grid size");
    let n = f.l2_norm();
    f.scale(C64::new(1.0 / n, 0.0))
}

/// Least squares for `log v = c + p log x + q log y`; `(p, q)`.
fn fit_two(points: &[(f64, f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<[f64; 3]> = points
        .iter()
        .filter(|(x, y, v)| *x > 0.0 && *y > 0.0 && *v > 0.0)
        .map(|(x, y, v)| [x.ln(), y.ln(), v.ln()])
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mean = |i: usize| pts.iter().map(|p| p[i]).sum::<f64>() / n;
    let (mx, my, mv) = (mean(0), mean(1), mean(2));
    let (mut sxx, mut syy, mut sxy, mut sxv, mut syv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &pts {
        let (dx, dy, dv) = (p[0] - mx, p[1] - my, p[2] - mv);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
        sxv += dx * dv;
        syv += dy * dv;
    }
    let det = sxx * syy - sxy * sxy;
    if det.abs() <= 1e-12 * (sxx * syy).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(((syy * sxv - sxy * syv) / det, (sxx * syv - sxy * sxv) / det))
}

/// Measures every kind of `cfg.kinds` on the sweep's metrics. `δ = 0`
/// entries are skipped in the fits.
pub fn operator_difference_probes(sweep: &PerturbationSweep, cfg: &ProbeConfig) -> Result<ProbeReport> {
    if cfg.bands.len() < 2 {
        return Err(Error::InvalidArgument("probes need at least two bands".into()));
    }
    let base = Side::new(&sweep.base, cfg, None)?;
    let others: Vec<Side> =
        sweep.metrics.iter().map(|m| Side::new(m, cfg, Some(base.pmx.k0))).collect::<Result<_>>()?;
    let inputs: Vec<SampledField> =
        cfg.bands.iter().map(|&k| probe_input(&base.pmx, k, cfg.data_cutoff, cfg.seed)).collect();
    let mut rows = Vec::with_capacity(cfg.kinds.len());
    for &kind in &cfg.kinds {
        let mut measurements = Vec::new();
        for (&k, f) in cfg.bands.iter().zip(&inputs) {
            let lambda = 2f64.powi(k as i32);
            let norm = input_norm(kind, &base, k, f)?;
            let a = base.apply(kind, k, cfg.sign, f, cfg)?;
            for ((side, &delta), &distance) in others.iter().zip(&sweep.deltas).zip(&sweep.distances) {
                let b = side.apply(kind, k, cfg.sign, f, cfg)?;
                let value = max_diff(&a, &b)? / norm;
                measurements.push(ProbeMeasurement { k, lambda, delta, distance, value });
            }
        }
        let pts: Vec<(f64, f64, f64)> = measurements.iter().map(|m| (m.distance, m.lambda, m.value)).collect();
        let (p, q) = fit_two(&pts).unwrap_or((f64::NAN, f64::NAN));
        let pass = (DELTA_EXPONENT.0..=DELTA_EXPONENT.1).contains(&p) && kind.lambda_ok(q);
        rows.push(ProbeRow {
            kind,
            statement: kind.statement().to_string(),
            lambda_power: kind.lambda_power(),
            bound: kind.bound(),
            delta_exponent: p,
            lambda_exponent: q,
            pass,
            measurements,
        });
    }
    let uncovered = uncovered(&cfg.kinds);
    let pass = uncovered.is_empty() && rows.iter().all(|r| r.pass);
    Ok(ProbeReport { t: cfg.t, sign: cfg.sign, rows, uncovered, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_variable_fit_is_exact_on_powers() {
        let mut pts = Vec::new();
        for &x in &[1e-3, 1e-2, 1e-1] {
            for &y in &[32.0, 64.0, 128.0] {
                pts.push((x, y, 2.5 * f64::powf(x, 1.02) * f64::powf(y, -0.7)));
            }
        }
        let (p, q) = fit_two(&pts).unwrap();
        assert!((p - 1.02).abs() < 1e-12 && (q + 0.7).abs() < 1e-12);
    }

    #[test]
    fn every_statement_is_probed() {
        assert!(uncovered(&ProbeKind::ALL).is_empty());
        let partial: Vec<ProbeKind> = ProbeKind::ALL.iter().copied().filter(|k| *k != ProbeKind::Volterra).collect();
        assert_eq!(uncovered(&partial), vec!["volterra stability".to_string()]);
        for s in STATEMENTS {
            assert!(ProbeKind::ALL.iter().any(|k| k.statement() == s), "{s}");
        }
    }
}
