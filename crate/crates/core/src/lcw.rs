//! Limiting Carleman weights and the CGO phase `phi + i psi`.
//!
//! Three phases are supported: a linear phase `zeta . x`, the cylindrical
//! phase `l(z) = -z` and the logarithmic phase `l(conj z) = -log(conj z)`,
//! where `z = x1 + i r`. Logs and square roots use the principal branch.

use core::f64::consts::PI;

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diff::{cyl_gradient, grad, hessian, jacobian, laplacian};
use crate::field::{c, I};
use crate::{C64, Complex3, Complex8, CylPoint, Error, FdScheme, Point3, Result, R_MIN};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseKind {
    /// `zeta . x` in Cartesian coordinates.
    Linear(Complex3),
    /// `l(z) = -z`: `phi = -x1`, `psi = -r`.
    CylLinear,
    /// `l(conj z) = -log(conj z)`: `phi = -log|z|`, `psi = arg z`.
    LogBar,
}

/// A CGO phase together with the amplitude frequency `lambda >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub kind: PhaseKind,
    pub lambda: f64,
}

/// Residuals of `|grad psi|^2 = |grad phi|^2` and `grad phi . grad psi = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EikonalReport {
    pub res_norm: f64,
    pub res_orth: f64,
}

impl EikonalReport {
    pub fn max(&self) -> f64 {
        self.res_norm.max(self.res_orth)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name: "lambda", reason: "must be finite and >= 0" })
    }
}

/// theta reduced to (-pi, pi].
pub(crate) fn principal_angle(theta: f64) -> f64 {
    let t = theta - 2.0 * PI * ((theta + PI) / (2.0 * PI)).floor();
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

pub(crate) fn require_upper_half(p: CylPoint) -> Result<()> {
    let t = principal_angle(p.theta);
    if t > 0.0 && t < PI {
        Ok(())
    } else {
        Err(Error::Domain { constraint: "theta in (0, pi)" })
    }
}

fn require_off_axis(p: CylPoint) -> Result<()> {
    if p.r > R_MIN {
        Ok(())
    } else {
        Err(Error::Domain { constraint: "r > r_min (axis excluded)" })
    }
}

impl Phase {
    /// Linear phase; requires `zeta . zeta = 0` (bilinear) to `1e-12 |zeta|^2`.
    pub fn linear(zeta: Complex3, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if zeta.dot(zeta).norm() > 1e-12 * zeta.norm_sqr().max(f64::MIN_POSITIVE) {
            return Err(Error::Parameter { name: "zeta", reason: "zeta . zeta must vanish" });
        }
        Ok(Phase { kind: PhaseKind::Linear(zeta), lambda })
    }

    /// Helmholtz variant of the linear phase, `zeta . zeta = -k^2`.
    pub fn linear_helmholtz(zeta: Complex3, k: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let defect = (zeta.dot(zeta) + C64::new(k * k, 0.0)).norm();
        if defect > 1e-12 * zeta.norm_sqr().max(k * k).max(f64::MIN_POSITIVE) {
            return Err(Error::Parameter { name: "zeta", reason: "zeta . zeta must equal -k^2" });
        }
        Ok(Phase { kind: PhaseKind::Linear(zeta), lambda })
    }

    pub fn cyl_linear(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Phase { kind: PhaseKind::CylLinear, lambda })
    }

    pub fn log_bar(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Phase { kind: PhaseKind::LogBar, lambda })
    }

    /// `phi + i psi` at a cylindrical point.
    pub fn eval(&self, p: CylPoint) -> Result<C64> {
        require_off_axis(p)?;
        match self.kind {
            PhaseKind::Linear(zeta) => {
                let x = p.to_cart();
                Ok(zeta.dot(Complex3::real(x.x1, x.x2, x.x3)))
            }
            PhaseKind::CylLinear => Ok(-p.z()),
            PhaseKind::LogBar => {
                require_upper_half(p)?;
                Ok(-p.z().conj().ln())
            }
        }
    }

    /// `phi + i psi` at a Cartesian point.
    pub fn eval_cart(&self, x: Point3) -> Result<C64> {
        match self.kind {
            PhaseKind::Linear(zeta) => Ok(zeta.dot(Complex3::real(x.x1, x.x2, x.x3))),
            _ => self.eval(x.to_cyl()?),
        }
    }

    /// Real weight `phi` at a Cartesian point.
    pub fn weight(&self, x: Point3) -> Result<f64> {
        match self.kind {
            PhaseKind::Linear(zeta) => Ok(zeta.re().dot(x)),
            PhaseKind::CylLinear => Ok(-x.x1),
            PhaseKind::LogBar => Ok(-x.norm().ln()),
        }
    }
}

/// Eikonal residuals of an arbitrary phase given in cylindrical coordinates.
pub fn eikonal_report<F>(phase: &F, p: CylPoint, scheme: FdScheme) -> Result<EikonalReport>
where
    F: Fn(CylPoint) -> Result<C64>,
{
    Ok(report_from_gradient(cyl_gradient(phase, p, scheme)?))
}

fn report_from_gradient(g: Complex3) -> EikonalReport {
    let gphi = g.re();
    let gpsi = g.im();
    EikonalReport {
        res_norm: (gpsi.dot(gpsi) - gphi.dot(gphi)).abs(),
        res_orth: gphi.dot(gpsi).abs(),
    }
}

pub fn check_eikonal(ph: &Phase, p: CylPoint, scheme: FdScheme) -> Result<EikonalReport> {
    match ph.kind {
        PhaseKind::Linear(_) => {
            let g = grad(&|x: Point3| ph.eval_cart(x), p.to_cart(), scheme)?;
            Ok(report_from_gradient(g))
        }
        _ => eikonal_report(&|q: CylPoint| ph.eval(q), p, scheme),
    }
}

/// Max over sampled directions `xi` (with `|xi| = |grad phi|`, `xi . grad phi = 0`)
/// of `|<phi'' grad phi, grad phi> + <phi'' xi, xi>|`.
pub fn check_lcw<F>(phi: &F, p: Point3, n_dirs: usize, seed: u64, scheme: FdScheme) -> Result<f64>
where
    F: Fn(Point3) -> Result<f64>,
{
    let g = grad(&|x: Point3| phi(x).map(|v| c(v, 0.0)), p, scheme)?.re();
    let gn2 = g.dot(g);
    if gn2.sqrt() < 1e-10 {
        return Err(Error::DegenerateGradient { norm: gn2.sqrt() });
    }
    let hs = hessian(phi, p, scheme)?;
    let quad = |v: Point3| -> f64 {
        let a = v.to_array();
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += hs[i][j] * a[i] * a[j];
            }
        }
        s
    };
    let base = quad(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut taken = 0;
    while taken < n_dirs {
        let v = Point3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let xi = v - g.scale(v.dot(g) / gn2);
        let n = xi.norm();
        if n < 1e-3 {
            continue;
        }
        let xi = xi.scale(gn2.sqrt() / n);
        worst = worst.max((base + quad(xi)).abs());
        taken += 1;
    }
    Ok(worst)
}

/// `(2 i r)^(-1/2)` with the principal square root.
pub(crate) fn inv_sqrt_2ir(r: f64) -> C64 {
    C64::new(0.0, 2.0 * r).sqrt().inv()
}

/// Transport-equation amplitude `A = (2ir)^(-1/2) e^{i lambda z} g(theta)`
/// (with `conj z` for the logarithmic phase).
pub fn amplitude<G>(ph: &Phase, g: G, p: CylPoint) -> Result<Complex8>
where
    G: Fn(f64) -> Complex8,
{
    require_off_axis(p)?;
    let w = match ph.kind {
        PhaseKind::CylLinear => p.z(),
        PhaseKind::LogBar => {
            require_upper_half(p)?;
            p.z().conj()
        }
        PhaseKind::Linear(_) => {
            return Err(Error::Parameter {
                name: "phase",
                reason: "a linear phase takes a constant amplitude",
            })
        }
    };
    let pref = inv_sqrt_2ir(p.r) * (I * ph.lambda * w).exp();
    Ok(g(p.theta).scale(pref))
}

/// Max component of `[2 grad(phi + i psi) . grad + Laplacian(phi + i psi)] A`,
/// all derivatives taken by Cartesian finite differences.
pub fn transport_residual<A>(ph: &Phase, a: &A, p: CylPoint, scheme: FdScheme) -> Result<f64>
where
    A: Fn(CylPoint) -> Result<Complex8>,
{
    let x0 = p.to_cart();
    let l = |x: Point3| ph.eval_cart(x);
    let a_cart = |x: Point3| a(x.to_cyl()?);
    let gl = grad(&l, x0, scheme)?;
    let lap: C64 = laplacian(&l, x0, scheme)?;
    let ja: [Complex8; 3] = jacobian(&a_cart, x0, scheme)?;
    let a0 = a_cart(x0)?;
    let gl = gl.to_array();
    let res = (ja[0] * gl[0] + ja[1] * gl[1] + ja[2] * gl[2]) * 2.0 + a0 * lap;
    Ok(res.max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, FRAC_PI_4};

    fn sch(h: f64) -> FdScheme {
        FdScheme::new(h).unwrap()
    }

    fn smooth_g(theta: f64) -> Complex8 {
        Complex8::new(
            C64::from_polar(1.0, theta),
            Complex3::new(c(theta.cos(), 0.0), c(0.0, theta.sin()), c(1.0, 0.5)),
            c(0.3, -0.2),
            Complex3::new(c(0.0, 0.0), C64::from_polar(1.0, 2.0 * theta), c(2.0, 0.0)),
        )
    }

    #[test]
    fn phase_values() {
        let cl = Phase::cyl_linear(0.0).unwrap();
        assert_eq!(cl.eval(CylPoint::new(1.0, 2.0, 0.4).unwrap()).unwrap(), c(-1.0, -2.0));

        // -log(-i) = i pi / 2.
        let lb = Phase::log_bar(0.0).unwrap();
        let v = lb.eval(CylPoint::new(0.0, 1.0, 1.0).unwrap()).unwrap();
        assert!((v - c(0.0, PI / 2.0)).norm() < 1e-15);

        // |z| = e gives phi = -1.
        let v = lb.eval(CylPoint::new(E * 0.6, E * 0.8, 2.0).unwrap()).unwrap();
        assert!((v.re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_phase_needs_upper_half() {
        let lb = Phase::log_bar(0.0).unwrap();
        assert!(matches!(
            lb.eval(CylPoint::new(0.0, 1.0, -0.5).unwrap()),
            Err(Error::Domain { constraint: "theta in (0, pi)" })
        ));
        assert!(lb.eval(CylPoint::new(0.0, 1.0, PI).unwrap()).is_err());
        // 2 pi + 1 reduces into (0, pi).
        assert!(lb.eval(CylPoint::new(0.0, 1.0, 2.0 * PI + 1.0).unwrap()).is_ok());
    }

    #[test]
    fn linear_phase_validation() {
        let zeta = Complex3::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        assert!(Phase::linear(zeta, 0.0).is_ok());
        assert!(Phase::linear(Complex3::real(1.0, 0.0, 0.0), 0.0).is_err());
        let z2 = Complex3::new(c(1.0, 0.0), c(0.0, 2.0), c(0.0, 0.0));
        assert!(Phase::linear_helmholtz(z2, 3.0_f64.sqrt(), 0.0).is_ok());
        assert!(Phase::cyl_linear(-1.0).is_err());
    }

    #[test]
    fn cylindrical_phase_eikonal() {
        let ph = Phase::cyl_linear(0.5).unwrap();
        let rep = check_eikonal(&ph, CylPoint::new(0.2, 1.3, 2.2).unwrap(), sch(1e-4)).unwrap();
        assert!(rep.res_norm < 1e-10 && rep.res_orth < 1e-10, "{rep:?}");
    }

    #[test]
    fn broken_phase_is_detected() {
        let broken = |q: CylPoint| Ok(c(-q.x1, -2.0 * q.r));
        let rep = eikonal_report(&broken, CylPoint::new(0.1, 0.9, 0.3).unwrap(), sch(1e-4)).unwrap();
        assert!((rep.res_norm - 3.0).abs() < 1e-8, "{rep:?}");
    }

    #[test]
    fn linear_phase_eikonal() {
        let zeta = Complex3::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0));
        let ph = Phase::linear(zeta, 0.0).unwrap();
        let rep = check_eikonal(&ph, CylPoint::new(0.2, 1.3, 2.2).unwrap(), sch(1e-4)).unwrap();
        assert!(rep.max() < 1e-10);
    }

    #[test]
    fn lcw_examples() {
        let s = sch(1e-4);
        let plane = |x: Point3| Ok(-x.x1);
        assert!(check_lcw(&plane, Point3::new(0.3, 0.2, 0.1), 16, 1, s).unwrap() < 1e-9);

        // |x|^2 at (1,0,0): 2|grad|^2 + 2|xi|^2 = 16.
        let bowl = |x: Point3| Ok(x.dot(x));
        let v = check_lcw(&bowl, Point3::new(1.0, 0.0, 0.0), 16, 1, sch(1e-3)).unwrap();
        assert!((v - 16.0).abs() < 1e-5, "{v}");

        let flat = |_x: Point3| Ok(1.0);
        assert!(matches!(
            check_lcw(&flat, Point3::new(1.0, 0.0, 0.0), 4, 1, s),
            Err(Error::DegenerateGradient { .. })
        ));
    }

    #[test]
    fn amplitude_principal_branch() {
        let ph = Phase::cyl_linear(0.0).unwrap();
        let g = |_t: f64| Complex8::new(c(1.0, 0.0), Complex3::ZERO, c(0.0, 0.0), Complex3::ZERO);
        let a = amplitude(&ph, g, CylPoint::new(3.0, 0.5, 0.0).unwrap()).unwrap();
        assert!((a.s1 - C64::from_polar(1.0, -FRAC_PI_4)).norm() < 1e-15);
    }

    #[test]
    fn amplitude_modulus_properties() {
        let ph = Phase::cyl_linear(0.5).unwrap();
        let g = |t: f64| Complex8::new(C64::from_polar(1.0, 3.0 * t), Complex3::ZERO, c(0.0, 0.0), Complex3::ZERO);
        let m = |x1: f64, th: f64| amplitude(&ph, g, CylPoint::new(x1, 0.8, th).unwrap()).unwrap().norm();
        let m0 = m(0.0, 0.0);
        for (x1, th) in [(1.0, 0.3), (-2.0, 2.0), (0.5, -3.0)] {
            assert!((m(x1, th) / m0 - 1.0).abs() < 1e-14);
        }
        // |e^{i lambda (x1 + i r)}| = e^{-lambda r}.
        assert!((m0 - (-0.5f64 * 0.8).exp() / (1.6f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn transport_holds_for_both_phases() {
        let s = sch(1e-4);
        for ph in [Phase::cyl_linear(0.5).unwrap(), Phase::log_bar(0.5).unwrap()] {
            let a = |q: CylPoint| amplitude(&ph, smooth_g, q);
            let res = transport_residual(&ph, &a, CylPoint::new(0.4, 1.1, 1.2).unwrap(), s).unwrap();
            assert!(res < 1e-6, "{ph:?}: {res}");
        }
    }

    #[test]
    fn transport_rejects_amplitude_without_radial_factor() {
        let ph = Phase::cyl_linear(0.5).unwrap();
        let wrong = |q: CylPoint| Ok(smooth_g(q.theta).scale((I * 0.5 * q.z()).exp()));
        for r in [0.5, 1.0, 1.9] {
            let res = transport_residual(&ph, &wrong, CylPoint::new(0.0, r, 0.7).unwrap(), sch(1e-4)).unwrap();
            assert!(res > 0.1, "r = {r}: {res}");
        }
    }

    #[test]
    fn principal_angle_range() {
        assert_eq!(principal_angle(PI), PI);
        assert!((principal_angle(-PI) - PI).abs() < 1e-15);
        assert!((principal_angle(3.0 * PI + 0.5) - (-PI + 0.5)).abs() < 1e-12);
    }
}
