use super::*;
use crate::dyadic::apply_band;
use crate::field::{dalembert_velocity, make_metric_family, MetricSpec, SampledField};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn random_band(grid: Grid, lo: f64, hi: f64, seed: u64) -> SampledField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec = vec![C64::new(0.0, 0.0); grid.n];
    for m in 1..(grid.n / 2) as i64 {
        let xi = m as f64;
        if xi > lo && xi < hi {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            spec[grid.slot(m).unwrap()] = c;
            spec[grid.slot(-m).unwrap()] = c.conj();
        }
    }
    SampledField::from_spectrum(grid, spec).unwrap()
}

fn rough(n: usize) -> Metric {
    make_metric_family(&MetricSpec::RoughSpline { amplitude: 0.1, knots: 8 }, Grid::torus(n).unwrap(), 7).unwrap()
}

fn cfg() -> ParametrixConfig {
    ParametrixConfig { k_norm_limit: 0.0, ..Default::default() }
}

#[test]
fn constant_metric_matches_dalembert_per_band() {
    let grid = Grid::torus(256).unwrap();
    let m = make_metric_family(&MetricSpec::Constant { c2: 1.69 }, grid, 0).unwrap();
    let p = Parametrix::new(&m, &cfg(), &[0.0, 0.7]).unwrap();
    let g = random_band(grid, 1.0, 127.0, 5);
    for k in p.k0..=p.part.top {
        let gk = apply_band(&p.part, &g, k);
        let u = p.apply_e(k, 1.0, &g, 0.7).unwrap().add(&p.apply_e(k, -1.0, &g, 0.7).unwrap()).unwrap();
        let want = dalembert_velocity(1.69, &gk, 0.7).unwrap();
        let err = u.sub(&want).unwrap().l2_norm() / want.l2_norm().max(g.l2_norm() * 1e-3);
        assert!(err < 5e-5, "k={k} err={err}");
    }
}

#[test]
fn time_derivatives_match_differences() {
    let m = rough(512);
    let grid = *m.grid();
    let p = Parametrix::new(&m, &cfg(), &[0.0]).unwrap();
    let g = random_band(grid, 1.0, 255.0, 8);
    let k = 6;
    let t = 0.6;
    let b = p.band(k).unwrap();
    let th = p.band_transform(b, 1.0, &g).unwrap();
    let at = |t: f64| {
        let nodes: Vec<f64> = (0..b.pgrid.n_x).map(|i| b.pgrid.x(i)).collect();
        let fl = crate::hamflow::FlowMap::build(&b.ops, 1.0, &nodes, &[t]).unwrap();
        let mut acc = ScatterSpectra::zeros(grid.n);
        scatter::scatter_into(&grid, 1.0, &fl, 0, &th, 0.0, Outputs::ALL, C64::new(1.0, 0.0), &mut acc);
        acc
    };
    let c = at(t);
    let diff = |h: f64| {
        let (p1, m1) = (at(t + h), at(t - h));
        let d1: Vec<C64> = p1.u.iter().zip(&m1.u).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let d2: Vec<C64> = p1.u.iter().zip(&m1.u).zip(&c.u).map(|((a, b), z)| (a + b - z * 2.0) / (h * h)).collect();
        (d1, d2)
    };
    let (a1, a2) = diff(2e-3);
    let (b1, b2) = diff(1e-3);
    let rich = |x: &[C64], y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(p, q)| (q * 4.0 - p) / 3.0).collect() };
    let d1 = rich(&a1, &b1);
    let d2 = rich(&a2, &b2);
    let norm = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // ∂_t = i D_t and ∂_t² = -D_t².
    let e1: Vec<C64> = d1.iter().zip(&c.lu).map(|(d, l)| d - l * C64::new(0.0, 1.0)).collect();
    let e2: Vec<C64> = d2.iter().zip(&c.llu).map(|(d, l)| d + l).collect();
    assert!(norm(&e1) < 1e-6 * norm(&c.lu), "{}", norm(&e1) / norm(&c.lu));
    assert!(norm(&e2) < 1e-5 * norm(&c.llu), "{}", norm(&e2) / norm(&c.llu));
}

#[test]
fn scatter_and_gather_agree() {
    let m = rough(512);
    let grid = *m.grid();
    let p = Parametrix::new(&m, &cfg(), &[0.0, 1.0]).unwrap();
    let g = random_band(grid, 1.0, 255.0, 2);
    for k in [5, 7] {
        let a = p.apply_e(k, 1.0, &g, 1.0).unwrap();
        let b = p.apply_e_gather(k, 1.0, &g, 1.0).unwrap();
        let err = a.sub(&b).unwrap().l2_norm() / a.l2_norm();
        assert!(err < 1e-3, "k={k} err={err}");
    }
}

#[test]
fn initial_data_identities() {
    let m = rough(512);
    let grid = *m.grid();
    let p = Parametrix::new(&m, &ParametrixConfig::default(), &[0.0]).unwrap();
    let g = random_band(grid, 0.0, 255.0, 4);
    let st = p.shat_state(&g, 0.0).unwrap();
    assert!(st.u.l2_norm() < 1e-12 * g.l2_norm());
    let err = st.dt_u.sub(&g).unwrap().l2_norm() / g.l2_norm();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn k_norm_small_for_rough_metric() {
    let m = rough(512);
    let p = Parametrix::new(&m, &cfg(), &[0.0]).unwrap();
    let est = p.estimate_k_norm(6, 2, 1).unwrap();
    assert!(est.norm < 0.5, "{est:?}");
}

#[test]
fn nx_refinement_converges() {
    let m = rough(512);
    let grid = *m.grid();
    let g = random_band(grid, 1.0, 255.0, 6);
    let coarse = Parametrix::new(&m, &cfg(), &[1.0]).unwrap();
    let fine = Parametrix::new(&m, &ParametrixConfig { nx_factor: 16.0, ..cfg() }, &[1.0]).unwrap();
    for k in [5, 7] {
        let a = coarse.apply_e(k, 1.0, &g, 1.0).unwrap();
        let b = fine.apply_e(k, 1.0, &g, 1.0).unwrap();
        let err = a.sub(&b).unwrap().l2_norm() / b.l2_norm();
        assert!(err < 5e-5, "k={k} err={err}");
    }
}

#[test]
fn residual_orders_on_rough_metric() {
    // At N = 2048 every band in 5..=8 is a proper band, not the top remainder.
    let m = rough(2048);
    let grid = *m.grid();
    let p = Parametrix::new(&m, &ParametrixConfig::default(), &[0.0, 1.0]).unwrap();
    let g = random_band(grid, 1.0, 384.0, 11);
    let tab = p.residual_table(&g, &[5, 6, 7, 8], 1.0, 1.0).unwrap();
    assert!(tab.halfwave_slope.abs() <= 0.15);
    assert!(tab.fullwave_slope <= 1.15);
}
