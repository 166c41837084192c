use std::f64::consts::PI;

use proptest::prelude::*;
use quartic_core::balance::exp_param;
use quartic_core::bounds::Surd;
use quartic_core::hermitian::{project, C64};
use quartic_core::testmap::{compare_f, f_general, f_value, minimize_f, phi, radius_sq, total_energy};
use quartic_core::{uniform, Herm3};

fn surd() -> impl Strategy<Value = Surd> {
    (-20i64..20, 1i64..6, -20i64..20, -20i64..20, -20i64..20).prop_map(|(a, d, b, c, e)| {
        Surd::ratio(a, d) + Surd::ratio(b, d) * Surd::sqrt3() + Surd::ratio(c, d) * Surd::sqrt7()
            + Surd::int(e) * Surd::sqrt3() * Surd::sqrt7()
    })
}

fn cvec() -> impl Strategy<Value = [C64; 3]> {
    prop::array::uniform6(-1.0f64..1.0).prop_filter_map("nonzero", |x| {
        let z = [C64::new(x[0], x[1]), C64::new(x[2], x[3]), C64::new(x[4], x[5])];
        (z.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3).then_some(z)
    })
}

proptest! {
    #[test]
    fn surd_field_operations(x in surd(), y in surd()) {
        prop_assert_eq!((x + y) - y, x);
        prop_assert!(((x * y).to_f64() - x.to_f64() * y.to_f64()).abs() < 1e-6 * (1.0 + (x.to_f64() * y.to_f64()).abs()));
        if !y.is_zero() {
            prop_assert_eq!((x / y) * y, x);
            prop_assert_eq!(y * y.recip().unwrap(), Surd::int(1));
        }
    }

    #[test]
    fn surd_sign_matches_float(x in surd()) {
        let v = x.to_f64();
        if v.abs() > 1e-9 {
            prop_assert_eq!(x.signum(), v.signum() as i32);
        }
        prop_assert_eq!((-x).signum(), -x.signum());
    }

    #[test]
    fn comparator_matches_direct(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let d = f_value(x) - f_value(y);
        if d.abs() > 1e-9 {
            prop_assert_eq!(compare_f(x, y), d.total_cmp(&0.0));
        }
    }

    #[test]
    fn a1_is_the_global_minimum(a in -50.0f64..50.0) {
        let m = minimize_f();
        prop_assert!(compare_f(a, m.a1_f64).is_ge() || (a - m.a1_f64).abs() < 1e-12);
        prop_assert!(f_value(a) >= m.value * (1.0 - 1e-15));
    }

    #[test]
    fn quartic_specialisation(a in -5.0f64..5.0) {
        prop_assert!((f_general(3, 4, a) - f_value(a)).abs() < 1e-12 * f_value(a));
        prop_assert!((total_energy(3, 4, a) - 32.0 * PI * (7.0 * a * a - 4.0 * a + 1.0)).abs() < 1e-9 * total_energy(3, 4, a));
        // energy is positive for every (g, d) with d >= 1
        prop_assert!(total_energy(0, 1, a) > 0.0 && total_energy(10, 6, a) > 0.0);
    }

    #[test]
    fn projector_identities(z in cvec()) {
        let a = project(&z).unwrap();
        let id = Herm3::identity();
        prop_assert!((a.trace() - 1.0).abs() < 1e-12);
        prop_assert!((a.norm_sq() - 2.0).abs() < 1e-12);
        prop_assert!((a.inner(&id) - 2.0).abs() < 1e-12);
        let aa = a.matmul(&a) - a.to_matrix();
        prop_assert!(aa.norm() < 1e-12);
        let scaled = project(&z.map(|c| c * C64::new(0.3, -2.0))).unwrap();
        prop_assert!((scaled - a).norm() < 1e-12);
    }

    #[test]
    fn test_map_is_spherical(z in cvec(), w in cvec(), a in -2.0f64..2.0) {
        // any two distinct points span a line; B is the antipode of A on it
        let pa = project(&z).unwrap();
        let mut v = w;
        let zz: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        let dot: C64 = z.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
        for (vi, zi) in v.iter_mut().zip(&z) {
            *vi -= zi * (dot / zz);
        }
        prop_assume!(v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3);
        let b = project(&v).unwrap() - pa;
        let r = phi(&pa, &b, a) - Herm3::third_identity();
        prop_assert!((r.norm_sq() - radius_sq(a)).abs() < 1e-12);
    }

    #[test]
    fn exp_param_is_interior(x in prop::array::uniform8(-3.0f64..3.0)) {
        let p = exp_param(&x);
        prop_assert!(p.is_positive_definite());
        prop_assert!((p.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn richardson_recovers_power_laws(limit in -30.0f64..30.0, c in 0.1f64..5.0, p in 1.1f64..2.9) {
        let v = [limit + c, limit + c * 2f64.powf(-p), limit + c * 4f64.powf(-p)];
        let (l, order) = uniform::richardson(v);
        prop_assert!((order - p).abs() < 1e-9);
        prop_assert!((l - limit).abs() < 1e-9 * (1.0 + limit.abs()));
    }
}
