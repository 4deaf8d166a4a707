//! Leading-order beam fields.
//!
//! Only the explicit `tau`-proportional term is evaluated; the `O(1)`
//! remainder of the CGO construction is dropped. [`crate::verify`] measures
//! how far the result is from solving the Maxwell system.

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::dirac::{Chi, MediumProfile};
use crate::field::{c, I};
use crate::lcw::{inv_sqrt_2ir, require_upper_half};
use crate::{C64, Complex3, CylPoint, Error, FdScheme, Point3, Result, R_MIN};

/// Electric and magnetic complex amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EhPair {
    pub e: Complex3,
    pub h: Complex3,
}

impl EhPair {
    pub fn is_finite(&self) -> bool {
        self.e.is_finite() && self.h.is_finite()
    }
}

/// A time-harmonic field with its medium: `curl E = i omega mu H`,
/// `curl H = -i omega gamma E`.
pub trait MaxwellField {
    fn fields(&self, x: Point3) -> Result<EhPair>;
    fn mu(&self, x: Point3) -> Result<C64>;
    fn gamma(&self, x: Point3) -> Result<C64>;
    fn omega(&self) -> f64;
}

impl<T: MaxwellField + ?Sized> MaxwellField for &T {
    fn fields(&self, x: Point3) -> Result<EhPair> {
        (**self).fields(x)
    }
    fn mu(&self, x: Point3) -> Result<C64> {
        (**self).mu(x)
    }
    fn gamma(&self, x: Point3) -> Result<C64> {
        (**self).gamma(x)
    }
    fn omega(&self) -> f64 {
        (**self).omega()
    }
}

pub const TAU_MIN: f64 = 1.0;

fn check_common(tau: f64, lambda: f64, rho: f64) -> Result<()> {
    if !(tau >= TAU_MIN && tau.is_finite()) {
        return Err(Error::Parameter { name: "tau", reason: "must be finite and >= tau_min = 1" });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter { name: "lambda", reason: "must be finite and >= 0" });
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Parameter { name: "rho", reason: "must be finite and >= 0" });
    }
    Ok(())
}

/// Parameters of the cylindrical accelerating beam.
#[derive(Debug, Clone)]
pub struct CylBeamParams {
    pub tau: f64,
    pub lambda: f64,
    pub rho: f64,
    pub medium: MediumProfile,
    pub chi1: Chi,
    pub chi2: Chi,
}

impl CylBeamParams {
    /// `chi1 = chi2 = -e^{i rho theta}`.
    pub fn new(tau: f64, lambda: f64, rho: f64, medium: MediumProfile) -> Result<Self> {
        check_common(tau, lambda, rho)?;
        Ok(CylBeamParams { tau, lambda, rho, medium, chi1: Chi::Exp { rho }, chi2: Chi::Exp { rho } })
    }

    pub fn with_chi(mut self, chi1: Chi, chi2: Chi) -> Self {
        self.chi1 = chi1;
        self.chi2 = chi2;
        self
    }

    pub fn k(&self) -> f64 {
        self.medium.k()
    }
}

/// Parameters of the spherical-phase beam (`k = 0` construction).
#[derive(Debug, Clone)]
pub struct SphBeamParams {
    pub tau: f64,
    pub lambda: f64,
    pub rho: f64,
    pub medium: MediumProfile,
    pub chi1: Chi,
    pub chi2: Chi,
}

impl SphBeamParams {
    pub fn new(tau: f64, lambda: f64, rho: f64, medium: MediumProfile) -> Result<Self> {
        check_common(tau, lambda, rho)?;
        Ok(SphBeamParams { tau, lambda, rho, medium, chi1: Chi::Exp { rho }, chi2: Chi::Exp { rho } })
    }

    pub fn with_chi(mut self, chi1: Chi, chi2: Chi) -> Self {
        self.chi1 = chi1;
        self.chi2 = chi2;
        self
    }
}

/// `E = tau gamma^(-1/2) e^{(-tau + i lambda) z} / sqrt(2ir) chi1(theta) (-i, cos, sin)`,
/// `H` likewise with `mu^(-1/2)` and `chi2`.
pub fn cyl_beam(bp: &CylBeamParams, p: CylPoint) -> Result<EhPair> {
    if !(p.r > R_MIN) {
        return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
    }
    let x = p.to_cart();
    let gamma = bp.medium.gamma_at(x)?;
    let mu = bp.medium.mu_at(x)?;
    let common = (c(-bp.tau, bp.lambda) * p.z()).exp() * inv_sqrt_2ir(p.r) * bp.tau;
    let (s, co) = p.theta.sin_cos();
    let pol = Complex3::new(-I, c(co, 0.0), c(s, 0.0));
    Ok(EhPair {
        e: pol * (common * bp.chi1.value(p.theta) / gamma.sqrt()),
        h: pol * (common * bp.chi2.value(p.theta) / mu.sqrt()),
    })
}

/// `E = tau gamma^(-1/2) e^{i lambda w} / (w^(tau+1) sqrt(2ir)) chi1(theta) (i, cos, sin)`
/// with `w = x1 - i r`, principal branch `w^(tau+1) = exp((tau+1) log w)`.
pub fn sph_beam(bp: &SphBeamParams, p: CylPoint) -> Result<EhPair> {
    if !(p.r > R_MIN) {
        return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
    }
    require_upper_half(p)?;
    let w = p.z().conj();
    let x = p.to_cart();
    let gamma = bp.medium.gamma_at(x)?;
    let mu = bp.medium.mu_at(x)?;
    let common = ((I * bp.lambda) * w - w.ln() * (bp.tau + 1.0)).exp() * inv_sqrt_2ir(p.r) * bp.tau;
    let (s, co) = p.theta.sin_cos();
    let pol = Complex3::new(I, c(co, 0.0), c(s, 0.0));
    Ok(EhPair {
        e: pol * (common * bp.chi1.value(p.theta) / gamma.sqrt()),
        h: pol * (common * bp.chi2.value(p.theta) / mu.sqrt()),
    })
}

/// True when `x1 - i r` is within `1e-3 |x1|` of the branch cut of the log
/// (negative real axis); values there are accurate but jump across the cut.
pub fn near_branch_cut(p: CylPoint) -> bool {
    p.x1 < 0.0 && p.r < 1e-3 * p.x1.abs()
}

/// TM mode from a Hertz potential `psi(r, theta)`: `E = -r_hat psi_theta / r + theta_hat psi_r`.
pub fn hertz_tm<F>(psi: &F, p: CylPoint, scheme: FdScheme) -> Result<Complex3>
where
    F: Fn(f64, f64) -> Result<C64>,
{
    if !(p.r > R_MIN) {
        return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
    }
    let h = scheme.h;
    let hr = h.min(0.5 * p.r);
    let d_r = (psi(p.r + hr, p.theta)? - psi(p.r - hr, p.theta)?) / (2.0 * hr);
    let d_th = (psi(p.r, p.theta + h)? - psi(p.r, p.theta - h)?) / (2.0 * h);
    let e = p.theta_hat() * d_r - p.r_hat() * (d_th / p.r);
    if !e.is_finite() {
        return Err(Error::NonFinite { at: p.to_cart() });
    }
    Ok(e)
}

impl MaxwellField for CylBeamParams {
    fn fields(&self, x: Point3) -> Result<EhPair> {
        cyl_beam(self, x.to_cyl()?)
    }
    fn mu(&self, x: Point3) -> Result<C64> {
        self.medium.mu_at(x)
    }
    fn gamma(&self, x: Point3) -> Result<C64> {
        self.medium.gamma_at(x)
    }
    fn omega(&self) -> f64 {
        self.medium.omega
    }
}

impl MaxwellField for SphBeamParams {
    fn fields(&self, x: Point3) -> Result<EhPair> {
        sph_beam(self, x.to_cyl()?)
    }
    fn mu(&self, x: Point3) -> Result<C64> {
        self.medium.mu_at(x)
    }
    fn gamma(&self, x: Point3) -> Result<C64> {
        self.medium.gamma_at(x)
    }
    fn omega(&self) -> f64 {
        self.medium.omega
    }
}

/// Exact plane wave `E = e0 exp(i kappa d . x)`, `H = kappa/(omega mu) d x E`
/// in a homogeneous medium, `kappa = omega sqrt(mu gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub dir: Point3,
    pub e0: Complex3,
    pub mu: C64,
    pub gamma: C64,
    pub omega: f64,
}

impl PlaneWave {
    /// `dir` is normalized; `e0` must be orthogonal to it.
    pub fn new(dir: Point3, e0: Complex3, mu: C64, gamma: C64, omega: f64) -> Result<Self> {
        let n = dir.norm();
        if !(n > 0.0) {
            return Err(Error::Parameter { name: "dir", reason: "must be nonzero" });
        }
        let dir = dir.scale(1.0 / n);
        let d = Complex3::real(dir.x1, dir.x2, dir.x3);
        if d.dot(e0).norm() > 1e-12 * e0.norm().max(1.0) {
            return Err(Error::Parameter { name: "e0", reason: "must be transverse to dir" });
        }
        if !(omega > 0.0) {
            return Err(Error::Parameter { name: "omega", reason: "must be positive" });
        }
        Ok(PlaneWave { dir, e0, mu, gamma, omega })
    }

    pub fn kappa(&self) -> C64 {
        (self.mu * self.gamma).sqrt() * self.omega
    }
}

impl MaxwellField for PlaneWave {
    fn fields(&self, x: Point3) -> Result<EhPair> {
        let kappa = self.kappa();
        let d = Complex3::real(self.dir.x1, self.dir.x2, self.dir.x3);
        let e = self.e0 * (I * kappa * self.dir.dot(x)).exp();
        let h = d.cross(e) * (kappa / (self.mu * self.omega));
        Ok(EhPair { e, h })
    }
    fn mu(&self, _x: Point3) -> Result<C64> {
        Ok(self.mu)
    }
    fn gamma(&self, _x: Point3) -> Result<C64> {
        Ok(self.gamma)
    }
    fn omega(&self) -> f64 {
        self.omega
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, FRAC_PI_2, PI};

    fn vacuum() -> MediumProfile {
        MediumProfile::constant(1.0, 1.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn cyl_beam_modulus_is_theta_free() {
        let bp = CylBeamParams::new(10.0, 0.5, 1.0, vacuum()).unwrap();
        let m0 = cyl_beam(&bp, CylPoint::new(0.0, 1.2, 0.0).unwrap()).unwrap().e.norm();
        for th in [0.3, 1.7, -2.9, PI] {
            let m = cyl_beam(&bp, CylPoint::new(0.0, 1.2, th).unwrap()).unwrap().e.norm();
            assert!((m / m0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cyl_beam_decays_off_plane() {
        let bp = CylBeamParams::new(10.0, 0.5, 1.0, vacuum()).unwrap();
        let a = cyl_beam(&bp, CylPoint::new(0.1, 1.0, 0.4).unwrap()).unwrap().e.norm();
        let b = cyl_beam(&bp, CylPoint::new(0.0, 1.0, 0.4).unwrap()).unwrap().e.norm();
        assert!((a / b - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn cyl_beam_value() {
        // theta = 0, chi = -1: E = -tau e^{(-tau + i lambda) i r} / sqrt(2ir) (-i, 1, 0).
        let bp = CylBeamParams::new(2.0, 0.0, 0.0, vacuum()).unwrap();
        let f = cyl_beam(&bp, CylPoint::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        let s = -(c(0.0, -2.0)).exp() * 2.0 / c(0.0, 2.0).sqrt();
        assert!((f.e - Complex3::new(-I * s, s, c(0.0, 0.0))).max_abs() < 1e-14);
        assert_eq!(f.e, f.h);
    }

    #[test]
    fn sph_beam_radial_ratio() {
        let (tau, lambda) = (9.0, 0.5);
        let bp = SphBeamParams::new(tau, lambda, 1.0, vacuum()).unwrap();
        let e = |r: f64| sph_beam(&bp, CylPoint::new(0.0, r, 1.0).unwrap()).unwrap().e.norm();
        let want = E.powf(lambda) * 2f64.powf(-(tau + 1.0)) * 2f64.powf(-0.5);
        assert!((e(2.0) / e(1.0) / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sph_beam_domain_and_linearity() {
        let bp = SphBeamParams::new(9.0, 0.5, 1.0, vacuum()).unwrap();
        assert!(sph_beam(&bp, CylPoint::new(2.0, 1.0, -0.5).unwrap()).is_err());
        let zero = bp.clone().with_chi(Chi::Zero, Chi::Zero);
        assert_eq!(sph_beam(&zero, CylPoint::new(2.0, 1.0, 0.5).unwrap()).unwrap().e, Complex3::ZERO);
        assert!(near_branch_cut(CylPoint::new(-1.0, 1e-5, 1.0).unwrap()));
        assert!(!near_branch_cut(CylPoint::new(1.0, 1e-5, 1.0).unwrap()));
    }

    #[test]
    fn hertz_examples() {
        let s = FdScheme::new(1e-5).unwrap();
        let e = hertz_tm(&|r: f64, _t: f64| Ok(c(r * r, 0.0)), CylPoint::new(0.0, 1.5, 0.0).unwrap(), s).unwrap();
        assert!((e - Complex3::real(0.0, 0.0, 3.0)).max_abs() < 1e-9);
        let e = hertz_tm(&|_r: f64, _t: f64| Ok(c(2.0, 1.0)), CylPoint::new(0.0, 1.5, 0.0).unwrap(), s).unwrap();
        assert_eq!(e, Complex3::ZERO);
        let p = CylPoint::new(0.0, 2.0, FRAC_PI_2).unwrap();
        let e = hertz_tm(&|_r: f64, t: f64| Ok(C64::from_polar(1.0, t)), p, s).unwrap();
        assert!((e - Complex3::real(0.0, 0.0, 0.5)).max_abs() < 1e-9);
    }

    #[test]
    fn parameter_validation() {
        assert!(CylBeamParams::new(0.5, 0.5, 1.0, vacuum()).is_err());
        assert!(CylBeamParams::new(2.0, -0.5, 1.0, vacuum()).is_err());
        assert!(PlaneWave::new(Point3::new(1.0, 0.0, 0.0), Complex3::real(1.0, 0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 1.0).is_err());
    }
}
