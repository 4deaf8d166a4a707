//! Sphere inversion, push-forward of fields and media, and the accelerating
//! beam obtained by Kelvin-transforming a linear-phase CGO solution.

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::beams::{EhPair, MaxwellField};
use crate::field::{c, I};
use crate::{C64, Complex3, Error, Point3, Result, R_MIN};

/// Real 3x3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn outer(a: Point3, b: Point3) -> Mat3 {
        let (a, b) = (a.to_array(), b.to_array());
        Mat3(core::array::from_fn(|i| core::array::from_fn(|j| a[i] * b[j])))
    }

    pub fn scale(&self, s: f64) -> Mat3 {
        Mat3(self.0.map(|row| row.map(|v| v * s)))
    }

    pub fn sub(&self, o: &Mat3) -> Mat3 {
        Mat3(core::array::from_fn(|i| core::array::from_fn(|j| self.0[i][j] - o.0[i][j])))
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        Mat3(core::array::from_fn(|i| {
            core::array::from_fn(|j| (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum())
        }))
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3(core::array::from_fn(|i| core::array::from_fn(|j| self.0[j][i])))
    }

    pub fn mul_point(&self, v: Point3) -> Point3 {
        let a = v.to_array();
        Point3::from_array(core::array::from_fn(|i| (0..3).map(|k| self.0[i][k] * a[k]).sum()))
    }

    pub fn mul_complex(&self, v: Complex3) -> Complex3 {
        let a = v.to_array();
        Complex3::from_array(core::array::from_fn(|i| {
            (0..3).fold(c(0.0, 0.0), |acc, k| acc + a[k] * self.0[i][k])
        }))
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Result<Mat3> {
        let d = self.det();
        let scale = self.max_abs();
        if !(d.abs() > 1e-14 * scale * scale * scale) || !d.is_finite() {
            return Err(Error::SingularJacobian);
        }
        let m = &self.0;
        let cof = |i: usize, j: usize| {
            let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        Ok(Mat3(core::array::from_fn(|i| core::array::from_fn(|j| cof(j, i) / d))))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// A smooth invertible map with a closed-form Jacobian.
pub trait Diffeomorphism {
    fn forward(&self, x: Point3) -> Result<Point3>;
    fn inverse(&self, y: Point3) -> Result<Point3>;
    /// `DF(x)`.
    fn jacobian(&self, x: Point3) -> Result<Mat3>;
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Identity;

impl Diffeomorphism for Identity {
    fn forward(&self, x: Point3) -> Result<Point3> {
        Ok(x)
    }
    fn inverse(&self, y: Point3) -> Result<Point3> {
        Ok(y)
    }
    fn jacobian(&self, _x: Point3) -> Result<Mat3> {
        Ok(Mat3::IDENTITY)
    }
}

/// Inversion in the sphere of radius `radius` about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelvinMap {
    radius: f64,
}

impl KelvinMap {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter { name: "R", reason: "must be positive and finite" });
        }
        Ok(KelvinMap { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `K(x) = R^2 x / |x|^2`.
    pub fn map(&self, x: Point3) -> Result<Point3> {
        let n2 = x.dot(x);
        if !(n2.sqrt() > R_MIN) {
            return Err(Error::OriginSingularity);
        }
        Ok(x.scale(self.radius * self.radius / n2))
    }

    /// `DK(x) = (R^2/|x|^2)(I - 2 r_hat r_hat^t)`.
    pub fn jacobian(&self, x: Point3) -> Result<Mat3> {
        let n = x.norm();
        if !(n > R_MIN) {
            return Err(Error::OriginSingularity);
        }
        let rh = x.scale(1.0 / n);
        Ok(reflection(rh).scale(self.radius * self.radius / (n * n)))
    }
}

/// `I - 2 n n^t` for a unit vector `n`.
pub fn reflection(n: Point3) -> Mat3 {
    Mat3::IDENTITY.sub(&Mat3::outer(n, n).scale(2.0))
}

impl Diffeomorphism for KelvinMap {
    fn forward(&self, x: Point3) -> Result<Point3> {
        self.map(x)
    }
    fn inverse(&self, y: Point3) -> Result<Point3> {
        self.map(y)
    }
    fn jacobian(&self, x: Point3) -> Result<Mat3> {
        KelvinMap::jacobian(self, x)
    }
}

/// `F_* E (y) = [D(F^-1)(y)]^t E(F^-1(y))`, the covariant push-forward.
/// For the Kelvin map the Jacobian is symmetric and the transpose is immaterial.
pub fn pushforward_field<D, F>(d: &D, field: &F, y: Point3) -> Result<Complex3>
where
    D: Diffeomorphism,
    F: Fn(Point3) -> Result<Complex3>,
{
    let x = d.inverse(y)?;
    let dinv = d.jacobian(x)?.inverse()?;
    Ok(dinv.transpose().mul_complex(field(x)?))
}

/// `DF m DF^t / |det DF|` at `x`.
pub fn pushforward_tensor<D: Diffeomorphism>(d: &D, x: Point3, m: &Mat3) -> Result<Mat3> {
    let j = d.jacobian(x)?;
    let det = j.det();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::SingularJacobian);
    }
    Ok(j.mul(m).mul(&j.transpose()).scale(1.0 / det.abs()))
}

/// Kelvin push-forward of scalar parameters: `(R^2/|y|^2) mu0`, `(R^2/|y|^2) gamma0`.
pub fn pushforward_params(km: &KelvinMap, mu0: C64, gamma0: C64, y: Point3) -> Result<(C64, C64)> {
    let n2 = y.dot(y);
    if !(n2.sqrt() > R_MIN) {
        return Err(Error::OriginSingularity);
    }
    let s = km.radius * km.radius / n2;
    Ok((mu0 * s, gamma0 * s))
}

/// `zeta = ((-tau, tau, 0) + i (s, s, sqrt(2) rho)) / 2`, `s = sqrt(tau^2 - rho^2)`.
pub fn zeta_for(tau: f64, rho: f64) -> Result<Complex3> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Parameter { name: "tau", reason: "must be positive" });
    }
    if !(rho >= 0.0 && rho < tau) {
        return Err(Error::Parameter { name: "rho", reason: "must satisfy 0 <= rho < tau" });
    }
    let s = (tau * tau - rho * rho).sqrt();
    Ok(Complex3::new(c(-tau, s), c(tau, s), c(0.0, 2f64.sqrt() * rho)) * 0.5)
}

/// `lim zeta / tau = ((-1, 1, 0) + i (1, 1, 0)) / 2`.
pub fn zeta_hat0() -> Complex3 {
    Complex3::new(c(-0.5, 0.5), c(0.5, 0.5), c(0.0, 0.0))
}

/// Default annulus size `L / R`.
pub const DEFAULT_L_OVER_R: f64 = 4.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualBeamParams {
    pub tau: f64,
    pub rho: f64,
    pub a: Point3,
    pub b: Point3,
    pub mu0: f64,
    pub eps0: f64,
    pub sigma0: f64,
    pub omega: f64,
    pub l_over_r: f64,
}

impl VirtualBeamParams {
    /// Vacuum (`mu0 = eps0 = 1`, lossless, `omega = 1`) and `L = 4.5 R`.
    pub fn new(tau: f64, rho: f64, a: Point3, b: Point3) -> Result<Self> {
        VirtualBeamParams { tau, rho, a, b, mu0: 1.0, eps0: 1.0, sigma0: 0.0, omega: 1.0, l_over_r: DEFAULT_L_OVER_R }
            .validated()
    }

    pub fn with_medium(self, mu0: f64, eps0: f64, sigma0: f64, omega: f64) -> Result<Self> {
        VirtualBeamParams { mu0, eps0, sigma0, omega, ..self }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.tau >= 1.0 && self.tau.is_finite()) {
            return Err(Error::Parameter { name: "tau", reason: "must be finite and >= 1" });
        }
        zeta_for(self.tau, self.rho)?;
        if !(self.mu0 > 0.0 && self.eps0 > 0.0 && self.sigma0 >= 0.0 && self.omega > 0.0) {
            return Err(Error::Parameter { name: "medium", reason: "need mu0, eps0, omega > 0 and sigma0 >= 0" });
        }
        if !(self.l_over_r > 2.0) {
            return Err(Error::Parameter { name: "l_over_r", reason: "annulus needs L > 2R" });
        }
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::Parameter { name: "a/b", reason: "must be finite" });
        }
        Ok(self)
    }

    /// `gamma0 = eps0 + i sigma0 / omega`.
    pub fn gamma0(&self) -> C64 {
        c(self.eps0, self.sigma0 / self.omega)
    }

    pub fn zeta(&self) -> Complex3 {
        zeta_for(self.tau, self.rho).expect("validated")
    }
}

fn annulus_check(vp: &VirtualBeamParams, km: &KelvinMap, y: Point3) -> Result<()> {
    let n = y.norm();
    let l = vp.l_over_r * km.radius;
    if n > km.radius * km.radius / l && n < l {
        Ok(())
    } else {
        Err(Error::OutsideAnnulus { norm: n })
    }
}

fn real3(v: Point3) -> Complex3 {
    Complex3::real(v.x1, v.x2, v.x3)
}

/// Leading virtual amplitudes `e~ = e^{zeta . y} (z0 . a) z0`, `h~` with `b`.
pub fn virtual_beam(vp: &VirtualBeamParams, km: &KelvinMap, y: Point3) -> Result<(Complex3, Complex3)> {
    annulus_check(vp, km, y)?;
    let z0 = zeta_hat0();
    let phase = vp.zeta().dot(real3(y)).exp();
    Ok((z0 * (phase * z0.dot(real3(vp.a))), z0 * (phase * z0.dot(real3(vp.b)))))
}

/// Virtual fields `E~ = -i tau eps~^(-1/2) e~`, `H~ = -i tau mu~^(-1/2) h~`.
pub fn virtual_fields(vp: &VirtualBeamParams, km: &KelvinMap, y: Point3) -> Result<EhPair> {
    let (e, h) = virtual_beam(vp, km, y)?;
    let (mu, gamma) = pushforward_params(km, c(vp.mu0, 0.0), vp.gamma0(), y)?;
    let pre = -I * vp.tau;
    Ok(EhPair { e: e * (pre / gamma.sqrt()), h: h * (pre / mu.sqrt()) })
}

/// Physical beam `E = -i tau gamma0^(-1/2) (R^3/|x|^3)(I - 2 r_hat r_hat^t) e~(K x)`,
/// `H` likewise with `mu0` and `h~`.
pub fn physical_beam(vp: &VirtualBeamParams, km: &KelvinMap, x: Point3) -> Result<EhPair> {
    let y = km.map(x)?;
    let (e, h) = virtual_beam(vp, km, y)?;
    let n = x.norm();
    let refl = reflection(x.scale(1.0 / n));
    let r3 = (km.radius / n).powi(3);
    let pre = -I * vp.tau * r3;
    Ok(EhPair {
        e: refl.mul_complex(e) * (pre / vp.gamma0().sqrt()),
        h: refl.mul_complex(h) * (pre / c(vp.mu0, 0.0).sqrt()),
    })
}

/// The physical beam as a field in the homogeneous background medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalBeam {
    pub params: VirtualBeamParams,
    pub map: KelvinMap,
}

impl MaxwellField for PhysicalBeam {
    fn fields(&self, x: Point3) -> Result<EhPair> {
        physical_beam(&self.params, &self.map, x)
    }
    fn mu(&self, _x: Point3) -> Result<C64> {
        Ok(c(self.params.mu0, 0.0))
    }
    fn gamma(&self, _x: Point3) -> Result<C64> {
        Ok(self.params.gamma0())
    }
    fn omega(&self) -> f64 {
        self.params.omega
    }
}

/// The virtual beam in the pushed-forward medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VirtualBeam {
    pub params: VirtualBeamParams,
    pub map: KelvinMap,
}

impl MaxwellField for VirtualBeam {
    fn fields(&self, y: Point3) -> Result<EhPair> {
        virtual_fields(&self.params, &self.map, y)
    }
    fn mu(&self, y: Point3) -> Result<C64> {
        Ok(pushforward_params(&self.map, c(self.params.mu0, 0.0), self.params.gamma0(), y)?.0)
    }
    fn gamma(&self, y: Point3) -> Result<C64> {
        Ok(pushforward_params(&self.map, c(self.params.mu0, 0.0), self.params.gamma0(), y)?.1)
    }
    fn omega(&self) -> f64 {
        self.params.omega
    }
}

/// Kelvin push-forward of a field in an isotropic medium; the pushed medium
/// is `(R^2/|y|^2) mu(K y)`, `(R^2/|y|^2) gamma(K y)`. `K` reverses
/// orientation, so with these positive parameters `H~` carries a minus sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KelvinPushed<F> {
    pub inner: F,
    pub map: KelvinMap,
}

impl<F: MaxwellField> MaxwellField for KelvinPushed<F> {
    fn fields(&self, y: Point3) -> Result<EhPair> {
        let e = pushforward_field(&self.map, &|x: Point3| Ok(self.inner.fields(x)?.e), y)?;
        let h = pushforward_field(&self.map, &|x: Point3| Ok(self.inner.fields(x)?.h), y)?;
        Ok(EhPair { e, h: -h })
    }
    fn mu(&self, y: Point3) -> Result<C64> {
        let x = self.map.map(y)?;
        Ok(self.inner.mu(x)? * (self.map.radius * self.map.radius / y.dot(y)))
    }
    fn gamma(&self, y: Point3) -> Result<C64> {
        let x = self.map.map(y)?;
        Ok(self.inner.gamma(x)? * (self.map.radius * self.map.radius / y.dot(y)))
    }
    fn omega(&self) -> f64 {
        self.inner.omega()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::jacobian;
    use crate::FdScheme;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn fig4_params() -> VirtualBeamParams {
        let a = Point3::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0);
        VirtualBeamParams::new(4.0, 7f64.sqrt(), a, a).unwrap()
    }

    #[test]
    fn fixed_sphere_and_origin() {
        let km = KelvinMap::new(2.0).unwrap();
        let x = Point3::new(0.0, 1.2, 1.6);
        assert!((km.map(x).unwrap() - x).norm() < 1e-15);
        assert_eq!(km.map(Point3::default()), Err(Error::OriginSingularity));
        assert!(KelvinMap::new(0.0).is_err());
    }

    #[test]
    fn sphere_through_origin_maps_to_plane() {
        let km = KelvinMap::new(1.0).unwrap();
        for i in 1..20 {
            let t = i as f64 * 0.31;
            let x = Point3::new(0.5 + 0.5 * t.cos(), 0.5 * t.sin() * 0.6, 0.5 * t.sin() * 0.8);
            assert!((km.map(x).unwrap().x1 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobian_examples() {
        let r = 3.0;
        let km = KelvinMap::new(r).unwrap();
        let j = km.jacobian(Point3::new(r, 0.0, 0.0)).unwrap();
        assert!(j.sub(&Mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])).max_abs() < 1e-15);
        let x = Point3::new(2.0 * r * 0.6, 0.0, 2.0 * r * 0.8);
        assert!((km.jacobian(x).unwrap().det().abs() - 1.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_differences() {
        let km = KelvinMap::new(5.0).unwrap();
        let x = Point3::new(1.0, -2.0, 3.5);
        let s = FdScheme::new(1e-5 * x.norm()).unwrap();
        let cols: [Complex3; 3] =
            jacobian(&|p: Point3| Ok(real3(km.map(p)?)), x, s).unwrap();
        let j = km.jacobian(x).unwrap();
        for col in 0..3 {
            for row in 0..3 {
                assert!((cols[col].component(row).re - j.0[row][col]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn inverse_and_tensor() {
        let m = Mat3([[2.0, 1.0, 0.0], [0.0, 1.0, 3.0], [1.0, 0.0, 1.0]]);
        assert!(m.mul(&m.inverse().unwrap()).sub(&Mat3::IDENTITY).max_abs() < 1e-14);
        assert_eq!(Mat3::outer(Point3::new(1.0, 0.0, 0.0), Point3::new(1.0, 0.0, 0.0)).inverse(), Err(Error::SingularJacobian));

        let km = KelvinMap::new(5.0).unwrap();
        let x = Point3::new(3.0, 4.0, 1.0);
        let t = pushforward_tensor(&km, x, &Mat3::IDENTITY.scale(2.0)).unwrap();
        assert!(t.sub(&Mat3::IDENTITY.scale(2.0 * x.dot(x) / 25.0)).max_abs() < 1e-12);
    }

    #[test]
    fn params_examples() {
        let km = KelvinMap::new(5.0).unwrap();
        let (mu, g) = pushforward_params(&km, c(1.0, 0.0), c(2.0, 0.0), Point3::new(0.0, 5.0, 0.0)).unwrap();
        assert_eq!((mu, g), (c(1.0, 0.0), c(2.0, 0.0)));
        let (mu, g) = pushforward_params(&km, c(1.0, 0.0), c(2.0, 0.0), Point3::new(0.0, 0.0, 10.0)).unwrap();
        assert!((mu - c(0.25, 0.0)).norm() < 1e-15 && (g - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_pushforward() {
        let f = |p: Point3| Ok(Complex3::new(c(p.x1, 1.0), c(0.0, p.x2), c(p.x3, 0.0)));
        let y = Point3::new(0.3, 0.2, 0.1);
        assert_eq!(pushforward_field(&Identity, &f, y).unwrap(), f(y).unwrap());
    }

    #[test]
    fn zeta_examples() {
        let z = zeta_for(5.0, 0.0).unwrap();
        assert!((z - Complex3::new(c(-2.5, 2.5), c(2.5, 2.5), c(0.0, 0.0))).max_abs() < 1e-15);
        let z = zeta_for(4.0, 7f64.sqrt()).unwrap();
        assert!(z.dot(z).norm() < 1e-12 * 16.0);
        assert!((z.norm_sqr() - 16.0).abs() < 1e-12 * 16.0);
        assert!(zeta_for(2.0, 2.0).is_err());
        assert!((zeta_for(1e8, 1.0).unwrap() * (1.0 / 1e8) - zeta_hat0()).max_abs() < 1e-8);
    }

    #[test]
    fn virtual_beam_structure() {
        let km = KelvinMap::new(5.0).unwrap();
        let vp = VirtualBeamParams::new(4.0, 7f64.sqrt(), Point3::new(0.0, 0.0, 1.0), Point3::new(1.0, 0.0, 0.0)).unwrap();
        let (e, h) = virtual_beam(&vp, &km, Point3::new(3.0, 1.0, 2.0)).unwrap();
        assert_eq!(e, Complex3::ZERO);
        assert_eq!(h.z, c(0.0, 0.0));
        assert!(matches!(virtual_beam(&vp, &km, Point3::new(30.0, 0.0, 0.0)), Err(Error::OutsideAnnulus { .. })));
        assert!(virtual_beam(&vp, &km, Point3::new(1.0, 0.0, 0.0)).is_err());

        // |e~| is constant on planes y1 - y2 = const.
        let vp = fig4_params();
        let m = |y: Point3| virtual_beam(&vp, &km, y).unwrap().0.norm();
        let base = m(Point3::new(3.0, 2.0, 0.0));
        for y in [Point3::new(4.0, 3.0, 1.0), Point3::new(2.5, 1.5, -2.0)] {
            assert!((m(y) / base - 1.0).abs() < 1e-12);
        }
        let direct = zeta_hat0().dot(real3(vp.a)).norm() * zeta_hat0().norm() * (-0.5f64 * 4.0).exp();
        assert!((base / direct - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pushed_plane_wave_solves_pushed_system() {
        use crate::beams::PlaneWave;
        use crate::verify::maxwell_residual;
        let pw = PlaneWave::new(Point3::new(1.0, 2.0, 2.0), Complex3::real(2.0, -1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 1.0)
            .unwrap();
        let pushed = KelvinPushed { inner: pw, map: KelvinMap::new(1.0).unwrap() };
        let y = Point3::new(0.4, -0.9, 1.3);
        let s = FdScheme::default_at(y);
        assert!(maxwell_residual(&pushed, y, s).unwrap().relative < 1e-6);

        // Without the orientation sign on H the curl equations fail.
        struct SameSign(KelvinPushed<PlaneWave>);
        impl MaxwellField for SameSign {
            fn fields(&self, y: Point3) -> Result<EhPair> {
                let f = self.0.fields(y)?;
                Ok(EhPair { e: f.e, h: -f.h })
            }
            fn mu(&self, y: Point3) -> Result<C64> {
                self.0.mu(y)
            }
            fn gamma(&self, y: Point3) -> Result<C64> {
                self.0.gamma(y)
            }
            fn omega(&self) -> f64 {
                self.0.omega()
            }
        }
        assert!(maxwell_residual(&SameSign(pushed), y, s).unwrap().relative > 0.1);
    }

    #[test]
    fn physical_beam_modulus_and_dual_route() {
        let km = KelvinMap::new(5.0).unwrap();
        let vp = fig4_params().with_medium(1.0, 2.0, 0.3, 0.5).unwrap();
        let x = Point3::new(3.0, 4.0, 2.0);
        let f = physical_beam(&vp, &km, x).unwrap();
        let (e, _) = virtual_beam(&vp, &km, km.map(x).unwrap()).unwrap();
        let want = vp.tau * vp.gamma0().sqrt().inv().norm() * (5.0 / x.norm()).powi(3) * e.norm();
        assert!((f.e.norm() / want - 1.0).abs() < 1e-12);

        // E(x) = DK(x)^t E~(K x).
        let v = virtual_fields(&vp, &km, km.map(x).unwrap()).unwrap();
        let dk = km.jacobian(x).unwrap().transpose();
        assert!((dk.mul_complex(v.e) - f.e).max_abs() < 1e-12 * f.e.max_abs());
        assert!((dk.mul_complex(v.h) - f.h).max_abs() < 1e-12 * f.h.max_abs());
    }
}
