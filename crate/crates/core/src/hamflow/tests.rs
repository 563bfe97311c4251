use super::*;
use crate::dyadic::build_band_ops;
use crate::field::{make_metric_family, Grid, Metric, MetricSpec};

fn rough() -> Metric {
    make_metric_family(&MetricSpec::RoughSpline { amplitude: 0.1, knots: 8 }, Grid::torus(1024).unwrap(), 7).unwrap()
}

#[test]
fn homogeneous_in_xi() {
    let ops = build_band_ops(&rough(), 7).unwrap();
    for &(y, eta) in &[(0.3, 40.0), (2.5, -70.0), (5.9, 100.0)] {
        let a = flow_integrate(&ops, 1.0, y, eta, 0.0, 1.3).unwrap();
        let b = flow_integrate(&ops, 1.0, y, 2.0 * eta, 0.0, 1.3).unwrap();
        assert!(periodic_dist(a.x, b.x, ops.grid().length) < 1e-9);
        assert!((b.xi - 2.0 * a.xi).abs() < 1e-9 * eta.abs());
    }
}

#[test]
fn conserved_symbol_and_frequency_bounds() {
    let ops = build_band_ops(&rough(), 8).unwrap();
    let h = BandHamiltonian::new(&ops, -1.0);
    let lip = ops.s_k.derivative(1).max_abs();
    for &(y, eta) in &[(1.0, 64.0), (4.0, -100.0)] {
        let p0 = h.symbol(y, eta);
        for st in trajectory(&ops, -1.0, y, eta, 2.0, 20).unwrap() {
            assert!((h.symbol(st.x, st.xi) - p0).abs() < 1e-9 * p0.abs());
            let bound = (st.t * lip).exp();
            assert!(st.xi.abs() <= bound * eta.abs() * (1.0 + 1e-12));
            assert!(st.xi.abs() >= eta.abs() / bound * (1.0 - 1e-12));
        }
    }
}

#[test]
fn group_law_and_symplectic() {
    let ops = build_band_ops(&rough(), 8).unwrap();
    for &(y, eta, r, s, t) in &[(0.5, 80.0, 0.0, 0.4, 1.0), (3.0, -128.0, 0.2, -0.5, 0.9), (6.0, 30.0, 1.0, 0.3, -0.6)]
    {
        assert!(flow_compose_check(&ops, 1.0, y, eta, r, s, t).unwrap() < 1e-7);
        assert!(symplectic_check(&ops, 1.0, y, eta, t).unwrap() < 1e-5);
        assert!(symplectic_check(&ops, -1.0, y, eta, t).unwrap() < 1e-5);
    }
}

#[test]
fn constant_metric_is_translation() {
    let g = Grid::torus(256).unwrap();
    let m = make_metric_family(&MetricSpec::Constant { c2: 2.25 }, g, 0).unwrap();
    let ops = build_band_ops(&m, 6).unwrap();
    let st = flow_integrate(&ops, -1.0, 1.0, 20.0, 0.0, 0.5).unwrap();
    assert!((st.x - 0.25).abs() < 1e-12 && (st.xi - 20.0).abs() < 1e-12);
}

#[test]
fn flow_map_matches_pointwise() {
    let ops = build_band_ops(&rough(), 7).unwrap();
    let nodes: Vec<f64> = (0..16).map(|i| i as f64 * 0.39).collect();
    let times = [0.0, 0.25, 0.5, 1.0];
    let map = FlowMap::build(&ops, 1.0, &nodes, &times).unwrap();
    for (m, &t) in times.iter().enumerate() {
        for i in [0usize, 5, 11] {
            for eps in [1.0, -1.0] {
                let st = flow_integrate(&ops, 1.0, nodes[i], 50.0 * eps, 0.0, t).unwrap();
                let s = map.get(m, i, eps);
                assert!(periodic_dist(s.x, st.x, ops.grid().length) < 1e-9);
                assert!((s.rho * 50.0 * eps - st.xi).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn deformation_of_constants_is_closed_form() {
    let g = Grid::torus(256).unwrap();
    let a = make_metric_family(&MetricSpec::Constant { c2: 1.44 }, g, 0).unwrap();
    let b = make_metric_family(&MetricSpec::Constant { c2: 1.0 }, g, 0).unwrap();
    let path = DeformationPath::new(a, b).unwrap();
    for &r in &[0.0, 0.5, 1.0] {
        let rep = deformation_derivative(&path, 6, 1.0, 1.0, -30.0, 0.8, r).unwrap();
        let cr = (r * 1.44 + (1.0 - r)).sqrt();
        let want = -0.8 * (1.44 - 1.0) / (2.0 * cr);
        assert!((rep.dx_dr - want).abs() < 1e-8, "{} {want}", rep.dx_dr);
        assert!(rep.dxi_dr.abs() < 1e-8);
    }
}

#[test]
fn deformation_symbol_derivative_and_bound() {
    let g = Grid::torus(1024).unwrap();
    let a = rough();
    let b = make_metric_family(&MetricSpec::RoughSpline { amplitude: 0.1, knots: 8 }, g, 11).unwrap();
    let path = DeformationPath::new(a, b).unwrap();
    let k = 7;
    let r = 0.4;
    let exact = dp_dr(&path, k, r).unwrap();
    let e = 1e-4;
    let sp = build_band_ops(&path.at(r + e).unwrap(), k).unwrap().s_k;
    let sm = build_band_ops(&path.at(r - e).unwrap(), k).unwrap().s_k;
    for i in (0..g.n).step_by(g.n / 10).take(10) {
        let fd = (sp.values()[i].re - sm.values()[i].re) / (2.0 * e);
        assert!((fd - exact.values()[i].re).abs() < 1e-6, "{fd} {}", exact.values()[i].re);
    }
    for &(y, eta, t) in &[(0.7, 60.0, 1.0), (3.3, -90.0, 0.5)] {
        let rep = deformation_derivative(&path, k, 1.0, y, eta, t, r).unwrap();
        assert!(rep.richardson_error < 1e-6, "{rep:?}");
        assert!(rep.dx_dr.abs() + rep.dxi_dr.abs() / eta.abs() <= rep.gronwall_bound, "{rep:?}");
    }
}
