//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion and
//! exits nonzero if any fails. Numeric arguments select a subset, e.g.
//! `cargo test --test acceptance -- 1 2 7`.

use roughwave::dyadic::{apply_band, build_band_ops, BandPartition};
use roughwave::fbi::{fbi_adjoint, fbi_forward, fine_h_xi, PhaseGrid, Window};
use roughwave::field::{
    dalembert_velocity, make_metric_family, random_band_limited, Grid, Metric, MetricSpec, SampledField,
};
use roughwave::hamflow::{flow_integrate, symplectic_check, trajectory};
use roughwave::lab::{
    energy_stability_crosscheck, interpolation_probe, operator_difference_probes, run_lipschitz_sweep,
    run_uniform_sweep, uncovered, ExperimentConfig, InterpolationConfig, PerturbationSweep, ProbeKind,
};
use roughwave::parametrix::{Parametrix, ParametrixConfig};
use roughwave::solver::{
    fd_reference, solve, volterra_picard, volterra_solve, FdConfig, ScalarKernel, SolveConfig, SpaceTimeField,
    TimeGrid, VolterraConfig,
};
use std::time::Instant;

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rough(n: usize) -> Metric {
    make_metric_family(&MetricSpec::RoughSpline { amplitude: 0.1, knots: 8 }, Grid::torus(n).unwrap(), 7).unwrap()
}

fn rel(a: &SampledField, b: &SampledField) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

fn band_data(grid: Grid, k: u32, seed: u64) -> SampledField {
    let part = BandPartition::for_grid(&grid);
    apply_band(&part, &random_band_limited(grid, 1.0, (grid.n / 2) as f64, seed), k)
}

fn frame_pair(k: u32, refine: f64) -> (f64, f64) {
    let grid = Grid::torus(1024).unwrap();
    let lambda = 2f64.powi(k as i32);
    let f = band_data(grid, k, 100 + k as u64);
    let (lo, hi) = BandPartition::for_grid(&grid).support(k);
    let r = lambda.sqrt();
    let cover = [((lo - r).max(0.0), hi.min((grid.n / 2) as f64) + r)];
    let pg = PhaseGrid::compact(lambda, grid.length, 4.0 * refine, fine_h_xi(lambda) / refine, &cover).unwrap();
    let w = Window::new(lambda);
    let tf = fbi_forward(&w, &f, &pg).unwrap();
    let back = fbi_adjoint(&w, &tf, &grid).unwrap();
    (rel(&back, &f), (tf.l2_norm() / f.l2_norm() - 1.0).abs())
}

fn frame_identity() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for k in 5..=8 {
        let (e1, _) = frame_pair(k, 1.0);
        let (e2, _) = frame_pair(k, 2.0);
        pass &= e1 <= 1e-6 && (e2 * 4.0 <= e1 || e2 < 1e-13);
        notes.push(format!("k={k} err {e1:.1e} -> {e2:.1e}"));
    }
    Ok((pass, notes.join(", ")))
}

fn isometry() -> Outcome {
    let errs: Vec<f64> = (5..=8).map(|k| frame_pair(k, 1.0).1).collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    Ok((worst <= 1e-6, format!("max |‖Tf‖/‖f‖ - 1| = {worst:.1e}")))
}

fn flow_invariants() -> Outcome {
    let m = rough(1024);
    let mut homog = 0.0f64;
    let mut det = 0.0f64;
    let mut bound_ok = true;
    let mut count = 0;
    for k in 5..=8u32 {
        let ops = build_band_ops(&m, k).map_err(|e| e.to_string())?;
        let lambda = ops.lambda;
        let lip = ops.s_k.derivative(1).max_abs();
        for j in 0..25 {
            let y = m.grid().length * (j as f64 + 0.37) / 25.0;
            let eta = if j % 2 == 0 { 1.0 } else { -1.0 } * lambda * (0.6 + 1.3 * j as f64 / 25.0);
            let sign = if j % 3 == 0 { -1.0 } else { 1.0 };
            for st in trajectory(&ops, sign, y, eta, 1.0, 20).map_err(|e| e.to_string())? {
                let b = (st.t * lip).exp();
                bound_ok &=
                    st.xi.abs() <= b * eta.abs() * (1.0 + 1e-12) && st.xi.abs() >= eta.abs() / b * (1.0 - 1e-12);
            }
            count += 1;
            let a = flow_integrate(&ops, sign, y, eta, 0.0, 1.0).map_err(|e| e.to_string())?;
            let s = flow_integrate(&ops, sign, y, 3.0 * eta, 0.0, 1.0).map_err(|e| e.to_string())?;
            let dx = (a.x - s.x).rem_euclid(m.grid().length);
            homog = homog.max(dx.min(m.grid().length - dx)).max((s.xi / (3.0 * a.xi) - 1.0).abs());
            if j % 5 == 0 {
                det = det.max(symplectic_check(&ops, sign, y, eta, 1.0).map_err(|e| e.to_string())?);
            }
        }
    }
    let pass = homog <= 1e-9 && bound_ok && det <= 1e-5;
    Ok((pass, format!("homogeneity {homog:.1e}, frequency bound on {count} rays {bound_ok}, |det - 1| {det:.1e}")))
}

fn constant_exactness() -> Outcome {
    let grid = Grid::torus(1024).unwrap();
    let m = make_metric_family(&MetricSpec::Constant { c2: 1.0 }, grid, 0).unwrap();
    let part = BandPartition::for_grid(&grid);
    let raw = random_band_limited(grid, 1.0, 384.0, 21);
    let g = roughwave::dyadic::apply_band_range(&part, &raw, 5, 8);
    let sol = solve(&m, &g, 1.0, &SolveConfig { steps: 64, ..Default::default() }).map_err(|e| e.to_string())?;
    let err = rel(&sol.u, &dalembert_velocity(1.0, &g, 1.0).unwrap());
    Ok((err <= 1e-3, format!("relative L² error {err:.2e}")))
}

fn residual_orders() -> Outcome {
    // At N = 2048 the bands 5..=8 are all proper bands.
    let m = rough(2048);
    let p = Parametrix::new(&m, &ParametrixConfig::default(), &[0.0, 1.0]).map_err(|e| e.to_string())?;
    let g = random_band_limited(*m.grid(), 1.0, 384.0, 11);
    let tab = p.residual_table(&g, &[5, 6, 7, 8], 1.0, 1.0).map_err(|e| e.to_string())?;
    let pass = tab.halfwave_slope.abs() <= 0.15 && tab.fullwave_slope <= 1.15;
    Ok((pass, format!("half-wave slope {:.3}, full-wave slope {:.3}", tab.halfwave_slope, tab.fullwave_slope)))
}

fn k_and_initial_data() -> Outcome {
    let m = rough(1024);
    let p = Parametrix::new(&m, &ParametrixConfig::default(), &[0.0, 1.0]).map_err(|e| e.to_string())?;
    let est = p.estimate_k_norm(6, 3, 1).map_err(|e| e.to_string())?;
    let g = random_band_limited(*m.grid(), 1.0, 384.0, 4);
    let st = p.shat_state(&g, 0.0).map_err(|e| e.to_string())?;
    let u0 = st.u.l2_norm() / g.l2_norm();
    let v0 = rel(&st.dt_u, &g);
    let pass = est.norm <= 0.5 && u0 <= 1e-8 && v0 <= 1e-4;
    Ok((pass, format!("k0 = {}, ‖K‖ ≈ {:.3}, ‖Ŝ(0)g‖ {u0:.1e}, ‖∂_tŜ(0)g - g‖ {v0:.1e}", p.k0, est.norm)))
}

fn volterra() -> Outcome {
    let grid = Grid::torus(16).unwrap();
    let kappa = 0.3;
    let ones = |times| SpaceTimeField::from_fn(times, |_| Ok(SampledField::from_real_fn(grid, |_| 1.0))).unwrap();
    let times = TimeGrid::new(1.0, 64).unwrap();
    let sol =
        volterra_solve(&ScalarKernel { kappa }, &ones(times), &VolterraConfig::default()).map_err(|e| e.to_string())?;
    let closed = sol
        .g
        .fields
        .iter()
        .enumerate()
        .map(|(m, g)| (g.max_abs() - (kappa * times.node(m)).exp()).abs())
        .fold(0.0, f64::max);
    let times = TimeGrid::new(1.0, 32).unwrap();
    let a =
        volterra_solve(&ScalarKernel { kappa }, &ones(times), &VolterraConfig::default()).map_err(|e| e.to_string())?.g;
    let b = volterra_picard(&ScalarKernel { kappa }, &ones(times), 10).map_err(|e| e.to_string())?;
    let picard = a.fields.iter().zip(&b.fields).map(|(x, y)| x.sub(y).unwrap().max_abs()).fold(0.0, f64::max);
    Ok((closed <= 1e-6 && picard <= 1e-6, format!("closed form {closed:.1e}, Picard {picard:.1e}")))
}

fn oracle_agreement() -> Outcome {
    let grid = Grid::torus(1024).unwrap();
    let m = make_metric_family(&MetricSpec::SmoothTrig { amplitude: 0.2, mode: 1 }, grid, 0).unwrap();
    let g = random_band_limited(grid, 16.0, 384.0, 3);
    let sol = solve(&m, &g, 1.0, &SolveConfig::default()).map_err(|e| e.to_string())?;
    let fd = fd_reference(&m, &g, None, 1.0, &FdConfig { cfl: 0.05, richardson: true }).map_err(|e| e.to_string())?;
    let err = rel(&sol.u, &fd.u);
    Ok((err <= 0.02, format!("relative L² error {err:.2e}")))
}

fn lipschitz() -> Outcome {
    let cfg = ExperimentConfig::default();
    let sweep = cfg.sweep().map_err(|e| e.to_string())?;
    let mut pass = true;
    let mut notes = Vec::new();
    for alpha in [0.0, 1.0] {
        let g = cfg.data(alpha + 1.0).map_err(|e| e.to_string())?;
        let rep = run_lipschitz_sweep(&sweep, &g, alpha, 1.0, &cfg.solver).map_err(|e| e.to_string())?;
        pass &= rep.pass;
        let slope = rep.fit.map_or(f64::NAN, |f| f.slope);
        notes.push(format!("alpha={alpha}: slope {slope:.3}, drift {:.3}", rep.ratio_drift));
    }
    Ok((pass, notes.join("; ")))
}

fn uniform() -> Outcome {
    let cfg = ExperimentConfig::default();
    let sweep = cfg.sweep().map_err(|e| e.to_string())?;
    let g = cfg.data(1.5).map_err(|e| e.to_string())?;
    let rep = run_uniform_sweep(&sweep, &g, 1.5, 1.0, &cfg.solver).map_err(|e| e.to_string())?;
    let interp = interpolation_probe(&InterpolationConfig::default()).map_err(|e| e.to_string())?;
    let kappas: Vec<String> = interp.rows.iter().map(|r| format!("κ={} -> {:.3}", r.kappa, r.exponent)).collect();
    Ok((
        rep.pass && interp.pass,
        format!("monotone {}, δ→0 limit {:.1e}; {}", rep.monotone, rep.limit, kappas.join(", ")),
    ))
}

fn probes() -> Outcome {
    let cfg = ExperimentConfig {
        t: 0.1,
        grid: roughwave::lab::GridConfig { n: 1024, length: 2.0 * std::f64::consts::PI },
        ..Default::default()
    };
    let sweep = cfg.sweep().map_err(|e| e.to_string())?;
    let rep = operator_difference_probes(&sweep, &cfg.probe_config()).map_err(|e| e.to_string())?;
    let missing = uncovered(&ProbeKind::ALL);
    let failed: Vec<String> = rep
        .rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| {
            format!(
                "{} (δ-exp {:.3}, λ-exp {:.3}, expected {})",
                r.kind.name(),
                r.delta_exponent,
                r.lambda_exponent,
                r.lambda_power
            )
        })
        .collect();
    let note = if failed.is_empty() {
        format!("{} rows pass, {} statements unprobed", rep.rows.len(), missing.len())
    } else {
        format!("failing rows: {}; {} statements unprobed", failed.join(", "), missing.len())
    };
    Ok((rep.pass && missing.is_empty(), note))
}

fn crosscheck() -> Outcome {
    let cfg = ExperimentConfig::default();
    let base = cfg.sweep().map_err(|e| e.to_string())?;
    let sweep = PerturbationSweep::new(base.base, base.direction, &[1e-2]).map_err(|e| e.to_string())?;
    let g = cfg.data(1.0).map_err(|e| e.to_string())?;
    let rep =
        energy_stability_crosscheck(&sweep.base, &sweep.metrics[0], &g, 0.0, 1.0, &cfg.solver, &FdConfig::default())
            .map_err(|e| e.to_string())?;
    Ok((rep.pass, format!("agreement {:.2e}", rep.agreement)))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("frame identity", frame_identity),
        ("isometry", isometry),
        ("flow invariants", flow_invariants),
        ("constant-coefficient exactness", constant_exactness),
        ("residual orders", residual_orders),
        ("K smallness and initial conditions", k_and_initial_data),
        ("Volterra correctness", volterra),
        ("oracle agreement", oracle_agreement),
        ("Lipschitz stability", lipschitz),
        ("uniform continuity", uniform),
        ("operator-difference probes", probes),
        ("driven-problem cross-check", crosscheck),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let t0 = Instant::now();
        let (pass, note) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= pass;
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} {id:>2} {name}: {note} [{:.1}s]", t0.elapsed().as_secs_f64());
    }
    if !all {
        std::process::exit(1);
    }
}
