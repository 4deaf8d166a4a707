//! The 8x8 Dirac reduction of the Maxwell system.
//!
//! Eight-vectors are ordered `(s1, V1, s2, V2)`; for the field
//! `X = (Phi, H, Psi, E)`. The reduced system is `(P - k + W) Y = 0` with
//! `P = P(D)`, `D = -i grad`, and `P(xi)^2 = (xi . xi) I`.

use alloc::sync::Arc;
use core::fmt;

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::diff::{grad, jacobian};
use crate::field::{c, I};
use crate::lcw::inv_sqrt_2ir;
use crate::{C64, Complex3, Complex8, CylPoint, Error, FdScheme, Point3, Result};

/// Dense complex 8x8 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix8(pub [[C64; 8]; 8]);

impl Matrix8 {
    pub const ZERO: Matrix8 = Matrix8([[C64::new(0.0, 0.0); 8]; 8]);

    pub fn identity() -> Self {
        let mut m = Self::ZERO;
        for i in 0..8 {
            m.0[i][i] = c(1.0, 0.0);
        }
        m
    }

    pub fn scaled_identity(s: C64) -> Self {
        Self::identity().scale(s)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    pub fn mul(&self, o: &Matrix8) -> Matrix8 {
        let mut m = Self::ZERO;
        for i in 0..8 {
            for k in 0..8 {
                let a = self.0[i][k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..8 {
                    m.0[i][j] += a * o.0[k][j];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: Complex8) -> Complex8 {
        let x = v.to_array();
        Complex8::from_array(core::array::from_fn(|i| {
            (0..8).fold(C64::new(0.0, 0.0), |acc, j| acc + self.0[i][j] * x[j])
        }))
    }

    pub fn transpose(&self) -> Matrix8 {
        Matrix8(core::array::from_fn(|i| core::array::from_fn(|j| self.0[j][i])))
    }

    pub fn scale(&self, s: C64) -> Matrix8 {
        Matrix8(self.0.map(|row| row.map(|a| a * s)))
    }

    pub fn add(&self, o: &Matrix8) -> Matrix8 {
        Matrix8(core::array::from_fn(|i| core::array::from_fn(|j| self.0[i][j] + o.0[i][j])))
    }

    pub fn sub(&self, o: &Matrix8) -> Matrix8 {
        self.add(&o.scale(c(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|a| a.is_finite())
    }
}

fn put_cross(m: &mut Matrix8, row: usize, col: usize, v: Complex3, sign: f64) {
    let [a, b, cc] = v.to_array();
    let z = C64::new(0.0, 0.0);
    let blk = [[z, -cc, b], [cc, z, -a], [-b, a, z]];
    for i in 0..3 {
        for j in 0..3 {
            m.0[row + i][col + j] += blk[i][j] * sign;
        }
    }
}

fn put_row(m: &mut Matrix8, row: usize, col: usize, v: Complex3) {
    for (j, a) in v.to_array().into_iter().enumerate() {
        m.0[row][col + j] += a;
    }
}

fn put_col(m: &mut Matrix8, row: usize, col: usize, v: Complex3) {
    for (i, a) in v.to_array().into_iter().enumerate() {
        m.0[row + i][col] += a;
    }
}

/// Symbol `P(xi)`: `s1 = xi.V2`, `V1 = xi s2 + xi x V2`, `s2 = xi.V1`,
/// `V2 = xi s1 - xi x V1`. Complex `xi` is allowed.
pub fn p_symbol(xi: Complex3) -> Matrix8 {
    let mut m = Matrix8::ZERO;
    put_row(&mut m, 0, 5, xi);
    put_col(&mut m, 1, 4, xi);
    put_cross(&mut m, 1, 5, xi, 1.0);
    put_row(&mut m, 4, 1, xi);
    put_col(&mut m, 5, 0, xi);
    put_cross(&mut m, 5, 1, xi, -1.0);
    m
}

/// `P(xi) y` without forming the matrix.
pub fn p_apply(xi: Complex3, y: Complex8) -> Complex8 {
    Complex8::new(
        xi.dot(y.v2),
        xi * y.s2 + xi.cross(y.v2),
        xi.dot(y.v1),
        xi * y.s1 - xi.cross(y.v1),
    )
}

/// `P(D) Y` at `p` with `D = -i grad` by central differences.
pub fn apply_p<Y>(y: &Y, p: Point3, scheme: FdScheme) -> Result<Complex8>
where
    Y: Fn(Point3) -> Result<Complex8>,
{
    let j = jacobian(y, p, scheme)?;
    let e = [Complex3::real(1.0, 0.0, 0.0), Complex3::real(0.0, 1.0, 0.0), Complex3::real(0.0, 0.0, 1.0)];
    let mut out = Complex8::ZERO;
    for a in 0..3 {
        out = out + p_apply(e[a], j[a] * (-I));
    }
    Ok(out)
}

/// A scalar material profile.
#[derive(Clone)]
pub enum Profile {
    Constant(C64),
    /// `background * (1 + rel_amplitude * exp(1 - 1/(1 - t^2)))`, `t = |x| / radius`,
    /// and `background` for `t >= 1`.
    Bump { background: C64, rel_amplitude: f64, radius: f64 },
    Custom { background: C64, support_radius: f64, f: Arc<dyn Fn(Point3) -> C64 + Send + Sync> },
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Profile::Bump { background, rel_amplitude, radius } => f
                .debug_struct("Bump")
                .field("background", background)
                .field("rel_amplitude", rel_amplitude)
                .field("radius", radius)
                .finish(),
            Profile::Custom { background, support_radius, .. } => f
                .debug_struct("Custom")
                .field("background", background)
                .field("support_radius", support_radius)
                .finish_non_exhaustive(),
        }
    }
}

/// Smooth compactly supported bump, 1 at the origin and 0 for `t >= 1`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

impl Profile {
    pub fn value(&self, p: Point3) -> C64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Bump { background, rel_amplitude, radius } => {
                *background * (1.0 + rel_amplitude * bump(p.norm() / radius))
            }
            Profile::Custom { f, .. } => f(p),
        }
    }

    pub fn background(&self) -> C64 {
        match self {
            Profile::Constant(v) => *v,
            Profile::Bump { background, .. } | Profile::Custom { background, .. } => *background,
        }
    }

    /// Radius outside which the profile equals its background (0 when constant).
    pub fn support_radius(&self) -> f64 {
        match self {
            Profile::Constant(_) => 0.0,
            Profile::Bump { radius, .. } => *radius,
            Profile::Custom { support_radius, .. } => *support_radius,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Profile::Constant(_))
    }
}

/// Permeability `mu` and complex permittivity `gamma = eps + i sigma / omega`.
#[derive(Debug, Clone)]
pub struct MediumProfile {
    pub mu: Profile,
    pub gamma: Profile,
    pub mu0: f64,
    pub eps0: f64,
    pub sigma0: f64,
    pub omega: f64,
}

impl MediumProfile {
    pub fn new(mu: Profile, gamma: Profile, mu0: f64, eps0: f64, sigma0: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Parameter { name: "omega", reason: "must be positive" });
        }
        if !(mu0 > 0.0 && eps0 > 0.0) {
            return Err(Error::Parameter { name: "mu0/eps0", reason: "must be positive" });
        }
        if !(sigma0 >= 0.0) {
            return Err(Error::Parameter { name: "sigma0", reason: "must be >= 0" });
        }
        let m = MediumProfile { mu, gamma, mu0, eps0, sigma0, omega };
        if (m.mu.background() - c(mu0, 0.0)).norm() > 1e-12 * mu0
            || (m.gamma.background() - m.gamma0()).norm() > 1e-12 * m.gamma0().norm()
        {
            return Err(Error::Parameter {
                name: "medium",
                reason: "profile backgrounds must equal mu0 and eps0 + i sigma0/omega",
            });
        }
        Ok(m)
    }

    /// Homogeneous medium, lossy when `sigma0 > 0`.
    pub fn constant(mu0: f64, eps0: f64, sigma0: f64, omega: f64) -> Result<Self> {
        let g0 = c(eps0, sigma0 / omega);
        Self::new(Profile::Constant(c(mu0, 0.0)), Profile::Constant(g0), mu0, eps0, sigma0, omega)
    }

    /// Lossless background with radial bumps in `mu` and `eps` of the given
    /// relative amplitudes, supported in `|x| < radius`.
    pub fn bump(mu0: f64, eps0: f64, omega: f64, rel_mu: f64, rel_eps: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Parameter { name: "radius", reason: "must be positive" });
        }
        Self::new(
            Profile::Bump { background: c(mu0, 0.0), rel_amplitude: rel_mu, radius },
            Profile::Bump { background: c(eps0, 0.0), rel_amplitude: rel_eps, radius },
            mu0,
            eps0,
            0.0,
            omega,
        )
    }

    pub fn gamma0(&self) -> C64 {
        c(self.eps0, self.sigma0 / self.omega)
    }

    /// `k = omega sqrt(mu0 eps0)`.
    pub fn k(&self) -> f64 {
        self.omega * (self.mu0 * self.eps0).sqrt()
    }

    pub fn mu_at(&self, p: Point3) -> Result<C64> {
        let v = self.mu.value(p);
        if v.re > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Medium { at: p })
        }
    }

    pub fn gamma_at(&self, p: Point3) -> Result<C64> {
        let v = self.gamma.value(p);
        if v.re > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Medium { at: p })
        }
    }

    /// `kappa = omega mu^(1/2) gamma^(1/2)`, principal roots.
    pub fn kappa(&self, p: Point3) -> Result<C64> {
        Ok(self.mu_at(p)?.sqrt() * self.gamma_at(p)?.sqrt() * self.omega)
    }

    pub fn support_radius(&self) -> f64 {
        self.mu.support_radius().max(self.gamma.support_radius())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.mu.is_constant() && self.gamma.is_constant()
    }
}

/// `W = -(kappa - k) I + M/2` with `M`: `s1 += Da.V2`, `V1 += Da s2 - Da x V2`,
/// `s2 += Db.V1`, `V2 += Db s1 + Db x V1`, where `Da = -i grad log gamma`
/// and `Db = -i grad log mu`.
pub fn build_w(m: &MediumProfile, p: Point3, scheme: FdScheme) -> Result<Matrix8> {
    let kappa = m.kappa(p)?;
    let mut w = Matrix8::scaled_identity(-(kappa - m.k()));
    if m.is_homogeneous() {
        return Ok(w);
    }
    let da = grad(&|x: Point3| Ok(m.gamma_at(x)?.ln()), p, scheme)? * (-I);
    let db = grad(&|x: Point3| Ok(m.mu_at(x)?.ln()), p, scheme)? * (-I);
    let mut g = Matrix8::ZERO;
    put_row(&mut g, 0, 5, da);
    put_col(&mut g, 1, 4, da);
    put_cross(&mut g, 1, 5, da, -1.0);
    put_row(&mut g, 4, 1, db);
    put_col(&mut g, 5, 0, db);
    put_cross(&mut g, 5, 1, db, 1.0);
    w = w.add(&g.scale(c(0.5, 0.0)));
    Ok(w)
}

/// Angular profile `chi(theta)` with its derivative.
#[derive(Clone)]
pub enum Chi {
    /// `-e^{i rho theta}`.
    Exp { rho: f64 },
    Zero,
    /// Arbitrary profile; the derivative is taken by central differences.
    Custom(Arc<dyn Fn(f64) -> C64 + Send + Sync>),
}

impl fmt::Debug for Chi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chi::Exp { rho } => f.debug_struct("Exp").field("rho", rho).finish(),
            Chi::Zero => f.write_str("Zero"),
            Chi::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Chi {
    pub fn value(&self, theta: f64) -> C64 {
        match self {
            Chi::Exp { rho } => -C64::from_polar(1.0, rho * theta),
            Chi::Zero => c(0.0, 0.0),
            Chi::Custom(f) => f(theta),
        }
    }

    pub fn derivative(&self, theta: f64) -> C64 {
        match self {
            Chi::Exp { rho } => -I * *rho * C64::from_polar(1.0, rho * theta),
            Chi::Zero => c(0.0, 0.0),
            Chi::Custom(f) => {
                let h = 1e-5;
                (f(theta + h) - f(theta - h)) / (2.0 * h)
            }
        }
    }
}

/// `g(theta)` that annihilates both b-scalars, with its theta-derivative:
/// `g1 = -((i tau + lambda)/(i tau)) chi1`, `G1 = (k/(i tau)) (chi2, sin, -cos)`,
/// `g2 = -((i tau + lambda)/(i tau)) chi2`, `G2 = (k/(i tau)) (chi1, sin, -cos)`.
pub fn choose_g_with_derivative(
    chi1: &Chi,
    chi2: &Chi,
    tau: f64,
    lambda: f64,
    k: f64,
    theta: f64,
) -> Result<(Complex8, Complex8)> {
    if tau == 0.0 || !tau.is_finite() {
        return Err(Error::Parameter { name: "tau", reason: "must be nonzero and finite" });
    }
    let it = I * tau;
    let a = -(it + lambda) / it;
    let kk = c(k, 0.0) / it;
    let (s, co) = theta.sin_cos();
    let g = Complex8::new(
        a * chi1.value(theta),
        Complex3::new(chi2.value(theta), c(s, 0.0), c(-co, 0.0)) * kk,
        a * chi2.value(theta),
        Complex3::new(chi1.value(theta), c(s, 0.0), c(-co, 0.0)) * kk,
    );
    let dg = Complex8::new(
        a * chi1.derivative(theta),
        Complex3::new(chi2.derivative(theta), c(co, 0.0), c(s, 0.0)) * kk,
        a * chi2.derivative(theta),
        Complex3::new(chi1.derivative(theta), c(co, 0.0), c(s, 0.0)) * kk,
    );
    Ok((g, dg))
}

pub fn choose_g(chi1: &Chi, chi2: &Chi, tau: f64, lambda: f64, k: f64, theta: f64) -> Result<Complex8> {
    Ok(choose_g_with_derivative(chi1, chi2, tau, lambda, k, theta)?.0)
}

/// The b-scalars and, for each, the sum of the moduli of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BScalars {
    pub b1: C64,
    pub b2: C64,
    pub scale1: f64,
    pub scale2: f64,
}

impl BScalars {
    /// `max(|b1| / scale1, |b2| / scale2)`, with 0/0 read as 0.
    pub fn relative(&self) -> f64 {
        let rel = |b: C64, s: f64| if s > 0.0 { b.norm() / s } else { b.norm() };
        rel(self.b1, self.scale1).max(rel(self.b2, self.scale2))
    }
}

/// Cylindrical b-scalars of `g` (with theta-derivative `dg`):
/// `b1 = e^{i lambda z}/sqrt(2ir) [ (i tau + lambda) G2_1
///   + ((-tau + i lambda + i/(2r)) cos + (i/r) sin d_theta) G2_2
///   + ((-tau + i lambda + i/(2r)) sin - (i/r) cos d_theta) G2_3 + k g1 ]`
/// and `b2` likewise with `G1`, `g2`.
pub fn b_scalars_detailed(
    g: Complex8,
    dg: Complex8,
    tau: f64,
    lambda: f64,
    k: f64,
    p: CylPoint,
) -> Result<BScalars> {
    if !(p.r > crate::R_MIN) {
        return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
    }
    let pref = (I * lambda * p.z()).exp() * inv_sqrt_2ir(p.r);
    let a = c(-tau, lambda) + I / (2.0 * p.r);
    let (s, co) = p.theta.sin_cos();
    let ir = I / p.r;
    let terms = |gv: Complex3, dgv: Complex3, scalar: C64| -> [C64; 6] {
        [
            (I * tau + lambda) * gv.x,
            a * co * gv.y,
            ir * s * dgv.y,
            a * s * gv.z,
            -ir * co * dgv.z,
            scalar * k,
        ]
    };
    let t1 = terms(g.v2, dg.v2, g.s1);
    let t2 = terms(g.v1, dg.v1, g.s2);
    let sum = |t: &[C64; 6]| t.iter().fold(c(0.0, 0.0), |acc, v| acc + v) * pref;
    let mag = |t: &[C64; 6]| t.iter().map(|v| v.norm()).sum::<f64>() * pref.norm();
    Ok(BScalars { b1: sum(&t1), b2: sum(&t2), scale1: mag(&t1), scale2: mag(&t2) })
}

pub fn b_scalars(g: Complex8, dg: Complex8, tau: f64, lambda: f64, k: f64, p: CylPoint) -> Result<(C64, C64)> {
    let b = b_scalars_detailed(g, dg, tau, lambda, k, p)?;
    Ok((b.b1, b.b2))
}

/// The b-scalars computed directly from the amplitude field `A = (a1, A1, a2, A2)`
/// of the cylindrical phase `-z`: `b1 = tau D(-z) . A2 + D . A2 + k a1`,
/// `b2 = tau D(-z) . A1 + D . A1 + k a2`, with `D = -i grad` by differences.
pub fn b_scalars_fd<A>(a: &A, tau: f64, k: f64, p: CylPoint, scheme: FdScheme) -> Result<(C64, C64)>
where
    A: Fn(Point3) -> Result<Complex8>,
{
    let x0 = p.to_cart();
    let dphase = grad(&|x: Point3| Ok(-x.to_cyl()?.z()), x0, scheme)? * (-I);
    let j = jacobian(a, x0, scheme)?;
    let a0 = a(x0)?;
    let div2 = (j[0].v2.x + j[1].v2.y + j[2].v2.z) * (-I);
    let div1 = (j[0].v1.x + j[1].v1.y + j[2].v1.z) * (-I);
    Ok((
        dphase.dot(a0.v2) * tau + div2 + a0.s1 * k,
        dphase.dot(a0.v1) * tau + div1 + a0.s2 * k,
    ))
}

/// Which potential enters the locality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WVariant {
    /// `(P - k + W)(P + k - W^t)`.
    Exact,
    /// `W` replaced by `s W` in both factors.
    Scaled(f64),
    /// `W^t` replaced by `W` in the right factor.
    Untransposed,
}

/// `L Y (p)` with `L = (P - k + W)(P + k - W^t) + Laplacian + k^2`, all
/// derivatives nested central differences, so `P^2 + Laplacian` cancels exactly.
pub fn l_apply<Y>(m: &MediumProfile, y: &Y, p: Point3, scheme: FdScheme, variant: WVariant) -> Result<Complex8>
where
    Y: Fn(Point3) -> Result<Complex8>,
{
    let k = m.k();
    let w_left = |x: Point3| -> Result<Matrix8> {
        let w = build_w(m, x, scheme)?;
        Ok(match variant {
            WVariant::Scaled(s) => w.scale(c(s, 0.0)),
            _ => w,
        })
    };
    let w_right = |x: Point3| -> Result<Matrix8> {
        let w = w_left(x)?;
        Ok(match variant {
            WVariant::Untransposed => w,
            _ => w.transpose(),
        })
    };
    let z = |x: Point3| -> Result<Complex8> {
        let yx = y(x)?;
        Ok(apply_p(y, x, scheme)? + yx * k - w_right(x)?.mul_vec(yx))
    };
    let z0 = z(p)?;
    let y0 = y(p)?;
    let h = scheme.h;
    let mut lap = Complex8::ZERO;
    for axis in 0..3 {
        let yp = y(p.shifted(axis, 2.0 * h))?;
        let ym = y(p.shifted(axis, -2.0 * h))?;
        lap = lap + (yp + ym - y0 * 2.0) * (1.0 / (4.0 * h * h));
    }
    Ok(apply_p(&z, p, scheme)? - z0 * k + w_left(p)?.mul_vec(z0) + lap + y0 * (k * k))
}

/// `max |L(chi Y)(p) - chi(p) L(Y)(p)|`: zero when `L` is a multiplication operator.
pub fn locality_check<Y, X>(
    m: &MediumProfile,
    test_y: &Y,
    cutoff: &X,
    p: Point3,
    scheme: FdScheme,
    variant: WVariant,
) -> Result<f64>
where
    Y: Fn(Point3) -> Result<Complex8>,
    X: Fn(Point3) -> f64,
{
    let chi_y = |x: Point3| Ok(test_y(x)? * cutoff(x));
    let lhs = l_apply(m, &chi_y, p, scheme, variant)?;
    let rhs = l_apply(m, test_y, p, scheme, variant)? * cutoff(p);
    Ok((lhs - rhs).max_abs())
}
