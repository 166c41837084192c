use std::f64::consts::PI;

use quartic_core::{balance, uniform, CurveMesh, Error, Herm3, PlaneCurve};

fn sup_diff(x: &[f64], y: &[f64], shift: f64) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b - shift).abs()).fold(0.0, f64::max)
}

#[test]
fn conic_constant_curvature_scales() {
    let mesh = CurveMesh::build(&PlaneCurve::conic(), 4, 0).unwrap();
    let half = uniform::uniformize(&mesh, 0.5).unwrap();
    let one = uniform::uniformize(&mesh, 1.0).unwrap();
    for (r, area) in [(&half, 8.0 * PI), (&one, 4.0 * PI)] {
        assert!(r.residual_norm < 1e-8, "{}", r.residual_norm);
        assert!(((r.area - area) / area).abs() < 1e-9, "{}", r.area / PI);
    }
    // e^{2u} K = const, so doubling K shifts u by -ln(2)/2
    let d = sup_diff(&one.u.u, &half.u.u, -0.5 * 2f64.ln());
    assert!(d < 1e-6, "{d}");
    // the induced metric has K = 1/2 already, up to discretization
    let off = half.u.u.iter().map(|x| x.abs()).fold(0.0, f64::max);
    assert!(off < 2e-2, "{off}");
}

#[test]
fn hyperbolic_factor_is_unique() {
    let mesh = CurveMesh::build(&PlaneCurve::klein_quartic(), 4, 0).unwrap();
    let a = uniform::uniformize(&mesh, -1.0).unwrap();
    let b = uniform::uniformize_topo(&mesh.topo, -1.0, Some(&uniform::sigma_start(&mesh, 5))).unwrap();
    assert!(sup_diff(&a.u.u, &b.u.u, 0.0) < 1e-9);
    assert!(((a.area - 8.0 * PI) / (8.0 * PI)).abs() < 1e-9);
    let k = uniform::curvature_of_factor(&mesh.topo, &a.u).unwrap();
    let worst = k.iter().map(|k| (k + 1.0).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-4, "{worst}");
    let w = a.u.weights(&mesh.lumped_areas());
    let total: f64 = k.iter().zip(&w).map(|(k, w)| k * w).sum();
    assert!((total + 8.0 * PI).abs() < 1e-6, "{total}");
}

#[test]
fn gauss_bonnet_sign_is_enforced() {
    let mesh = CurveMesh::build(&PlaneCurve::klein_quartic(), 2, 0).unwrap();
    assert!(matches!(uniform::uniformize(&mesh, 1.0), Err(Error::GaussBonnet { .. })));
    assert!(matches!(uniform::uniformize(&mesh, 0.0), Err(Error::GaussBonnet { .. })));
}

#[test]
fn symmetric_curves_are_balanced_at_zero() {
    for curve in [PlaneCurve::klein_quartic(), PlaneCurve::conic()] {
        let mut last = f64::INFINITY;
        for level in [5, 6] {
            let mesh = CurveMesh::build(&curve, level, 0).unwrap();
            let c = balance::center_of_mass(&mesh, None, 0.0).unwrap();
            let dev = (c - Herm3::third_identity()).norm();
            assert!(dev < 1e-3 && dev < last, "level {level}: {dev:.3e} after {last:.3e}");
            last = dev;
            let c15 = balance::center_of_mass(&mesh, None, 0.15).unwrap();
            assert!((c15.trace() - c.trace()).abs() < 1e-12);
        }
    }
}

#[test]
fn mesh_file_round_trip() {
    let curve = PlaneCurve::fermat(4).unwrap();
    let mesh = CurveMesh::build(&curve, 3, 7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let hash = mesh.save(&path).unwrap();
    assert_eq!(hash, mesh.content_hash().unwrap());
    let back = CurveMesh::load(&path, &curve).unwrap();
    assert_eq!(back.content_hash().unwrap(), hash);
    assert_eq!(back.n_vertices(), mesh.n_vertices());
    assert!((back.area(None) - mesh.area(None)).abs() < 1e-12 * mesh.area(None));
    // same seed, same mesh
    assert_eq!(CurveMesh::build(&curve, 3, 7).unwrap().content_hash().unwrap(), hash);
}
