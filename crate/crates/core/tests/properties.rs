use accelbeam_core::beams::{cyl_beam, sph_beam, CylBeamParams, SphBeamParams};
use accelbeam_core::diff::{curl, div, grad, partial};
use accelbeam_core::dirac::{b_scalars_detailed, choose_g_with_derivative, p_symbol, Chi, Matrix8, MediumProfile};
use accelbeam_core::kelvin::{zeta_for, KelvinMap, Mat3};
use accelbeam_core::{C64, Complex3, Complex8, CylPoint, FdScheme, Point3};
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn vacuum() -> MediumProfile {
    MediumProfile::constant(1.0, 1.0, 0.0, 1.0).unwrap()
}

fn complex3() -> impl Strategy<Value = Complex3> {
    prop::array::uniform6(-3.0..3.0f64)
        .prop_map(|a| Complex3::new(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5])))
}

proptest! {
    #[test]
    fn complex8_array_round_trip(a in prop::array::uniform16(-1e3..1e3f64)) {
        let arr: [C64; 8] = core::array::from_fn(|i| c(a[2 * i], a[2 * i + 1]));
        prop_assert_eq!(Complex8::from_array(arr).to_array(), arr);
    }

    #[test]
    fn cylindrical_round_trip(x1 in -5.0..5.0f64, r in 1e-3..10.0f64, theta in -3.14..3.14f64) {
        let p = CylPoint::new(x1, r, theta).unwrap();
        let q = p.to_cart().to_cyl().unwrap();
        prop_assert!((q.x1 - x1).abs() < 1e-12);
        prop_assert!((q.r - r).abs() < 1e-12 * r.max(1.0));
        prop_assert!((q.theta - theta).abs() < 1e-12);
    }

    #[test]
    fn p_symbol_squares_to_bilinear_norm(xi in complex3()) {
        let p = p_symbol(xi);
        let want = Matrix8::scaled_identity(xi.dot(xi));
        prop_assert!(p.mul(&p).sub(&want).max_abs() <= 1e-12 * xi.norm_sqr().max(1.0));
    }

    #[test]
    fn kelvin_involution_and_jacobian_square(
        dir in prop::array::uniform3(-1.0..1.0f64),
        s in 0.1..10.0f64,
        radius in 0.5..8.0f64,
    ) {
        let d = Point3::from_array(dir);
        prop_assume!(d.norm() > 1e-2);
        let x = d.scale(s * radius / d.norm());
        let km = KelvinMap::new(radius).unwrap();
        let back = km.map(km.map(x).unwrap()).unwrap();
        prop_assert!((back - x).norm() <= 1e-12 * x.norm());
        let j = km.jacobian(x).unwrap();
        let want = Mat3::IDENTITY.scale(radius.powi(4) / x.dot(x).powi(2));
        prop_assert!(j.mul(&j).sub(&want).max_abs() <= 1e-12 * want.max_abs());
        let det = j.det().abs();
        let want_det = (radius / x.norm()).powi(6);
        prop_assert!((det - want_det).abs() <= 1e-12 * want_det);
    }

    #[test]
    fn zeta_is_null_with_norm_tau(tau in 1.0..100.0f64, frac in 0.0..0.999f64) {
        let z = zeta_for(tau, frac * tau).unwrap();
        prop_assert!(z.dot(z).norm() <= 1e-12 * tau * tau);
        prop_assert!((z.norm_sqr() - tau * tau).abs() <= 1e-12 * tau * tau);
    }

    #[test]
    fn cyl_beam_modulus_is_theta_invariant(
        tau in 1.0..40.0f64, lambda in 0.0..2.0f64, rho in 0.0..5.0f64,
        x1 in -0.05..0.05f64, r in 0.2..3.0f64, t1 in -3.1..3.1f64, t2 in -3.1..3.1f64,
    ) {
        let bp = CylBeamParams::new(tau, lambda, rho, vacuum()).unwrap();
        let a = cyl_beam(&bp, CylPoint::new(x1, r, t1).unwrap()).unwrap();
        let b = cyl_beam(&bp, CylPoint::new(x1, r, t2).unwrap()).unwrap();
        prop_assert!((a.e.norm() - b.e.norm()).abs() <= 1e-12 * a.e.norm());
        prop_assert!((a.h.norm() - b.h.norm()).abs() <= 1e-12 * a.h.norm());
        let t = |f: Complex3| f.y.norm_sqr() + f.z.norm_sqr();
        prop_assert!((t(a.e) - t(b.e)).abs() <= 1e-12 * t(a.e));
    }

    #[test]
    fn sph_beam_modulus_is_theta_invariant(
        tau in 1.0..12.0f64, x1 in 0.5..3.0f64, r in 0.2..3.0f64, t1 in 0.05..3.09f64, t2 in 0.05..3.09f64,
    ) {
        let bp = SphBeamParams::new(tau, 0.5, 1.0, vacuum()).unwrap();
        let a = sph_beam(&bp, CylPoint::new(x1, r, t1).unwrap()).unwrap().e.norm();
        let b = sph_beam(&bp, CylPoint::new(x1, r, t2).unwrap()).unwrap().e.norm();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn cyl_beam_is_linear_in_chi(alpha in -2.0..2.0f64, r in 0.3..2.0f64, theta in -3.0..3.0f64) {
        let base = CylBeamParams::new(10.0, 0.5, 1.0, vacuum()).unwrap();
        let c1 = Chi::Exp { rho: 1.0 };
        let c2 = Chi::Exp { rho: 2.0 };
        let mix = Chi::Custom(std::sync::Arc::new(move |t: f64| {
            Chi::Exp { rho: 1.0 }.value(t) * alpha + Chi::Exp { rho: 2.0 }.value(t)
        }));
        let p = CylPoint::new(0.0, r, theta).unwrap();
        let f = |a: Chi, b: Chi| cyl_beam(&base.clone().with_chi(a, b), p).unwrap();
        let lhs = f(mix.clone(), mix);
        let rhs1 = f(c1.clone(), c1);
        let rhs2 = f(c2.clone(), c2);
        let want = rhs1.e * alpha + rhs2.e;
        prop_assert!((lhs.e - want).max_abs() <= 1e-12 * want.max_abs().max(rhs1.e.max_abs()));
    }

    #[test]
    fn chosen_g_annihilates_b(
        r in 0.1..5.0f64, theta in -PI..PI, tau in 1.0..100.0f64,
        lambda in 0.0..3.0f64, k in 0.0..5.0f64, rho in 0.0..4.0f64,
    ) {
        let chi = Chi::Exp { rho };
        let p = CylPoint::new(0.0, r, theta).unwrap();
        let (g, dg) = choose_g_with_derivative(&chi, &chi, tau, lambda, k, theta).unwrap();
        let b = b_scalars_detailed(g, dg, tau, lambda, k, p).unwrap();
        prop_assert!(b.relative() < 1e-10, "{:?}", b);
    }

    #[test]
    fn curl_grad_and_div_curl_vanish(x in prop::array::uniform3(-1.0..1.0f64)) {
        let s = FdScheme::new(1e-3).unwrap();
        let f = |p: Point3| Ok(c((p.x1 * p.x2).sin() + p.x3.exp(), p.x1 * p.x3 * p.x3));
        let g = |p: Point3| grad(&f, p, s);
        let cg = curl(&g, Point3::from_array(x), s).unwrap();
        prop_assert!(cg.max_abs() < 1e-8);

        let v = |p: Point3| Ok(Complex3::new(c(p.x2.sin(), p.x3), c(p.x1 * p.x3, 0.0), c(p.x1.cos() * p.x2, 1.0)));
        let cv = |p: Point3| curl(&v, p, s);
        prop_assert!(div(&cv, Point3::from_array(x), s).unwrap().norm() < 1e-8);
    }

    #[test]
    fn central_difference_is_second_order(x in prop::array::uniform3(-1.0..1.0f64), axis in 0usize..3) {
        let f = |p: Point3| Ok(c((1.3 * p.x1 + 0.7 * p.x2 - 0.4 * p.x3).sin(), 0.0));
        let coef = [1.3, 0.7, -0.4][axis];
        let p = Point3::from_array(x);
        let exact = coef * (1.3 * p.x1 + 0.7 * p.x2 - 0.4 * p.x3).cos();
        prop_assume!((1.3 * p.x1 + 0.7 * p.x2 - 0.4 * p.x3).sin().abs() > 0.05);
        let err = |h: f64| {
            let d: C64 = partial(&f, p, axis, FdScheme::new(h).unwrap()).unwrap();
            (d.re - exact).abs()
        };
        let order = (err(0.02) / err(0.01)).log2();
        prop_assert!((1.7..=2.3).contains(&order), "order {}", order);
    }
}
