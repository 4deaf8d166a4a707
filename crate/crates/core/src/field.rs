//! Complex vectors, coordinates and finite-difference schemes.

use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};


#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Points closer than this to the cylinder axis (or to the inversion centre)
/// are outside every evaluator's domain.
pub const R_MIN: f64 = 1e-6;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Cartesian point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point3 {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point3 { x1, x2, x3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn scale(self, s: f64) -> Point3 {
        Point3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// `self + h * e_axis`.
    pub fn shifted(self, axis: usize, h: f64) -> Point3 {
        let mut a = self.to_array();
        a[axis] += h;
        Point3::from_array(a)
    }

    /// Cylindrical coordinates about the x1 axis, theta in (-pi, pi].
    pub fn to_cyl(self) -> Result<CylPoint> {
        let r = self.x2.hypot(self.x3);
        if !(r > R_MIN) {
            return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
        }
        let mut theta = self.x3.atan2(self.x2);
        if theta <= -PI {
            theta = PI;
        }
        Ok(CylPoint { x1: self.x1, r, theta })
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

/// Cylindrical point `(x1, r, theta)`; `z = x1 + i r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub x1: f64,
    pub r: f64,
    pub theta: f64,
}

impl CylPoint {
    pub fn new(x1: f64, r: f64, theta: f64) -> Result<Self> {
        if !(r > R_MIN) {
            return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
        }
        if !(x1.is_finite() && r.is_finite() && theta.is_finite()) {
            return Err(Error::Domain { constraint: "finite coordinates" });
        }
        Ok(CylPoint { x1, r, theta })
    }

    pub fn to_cart(self) -> Point3 {
        let (s, c) = self.theta.sin_cos();
        Point3::new(self.x1, self.r * c, self.r * s)
    }

    /// `z = x1 + i r`.
    pub fn z(self) -> C64 {
        c(self.x1, self.r)
    }

    /// Radial unit vector `(0, cos, sin)`.
    pub fn r_hat(self) -> Complex3 {
        let (s, co) = self.theta.sin_cos();
        Complex3::real(0.0, co, s)
    }

    /// Angular unit vector `(0, -sin, cos)`.
    pub fn theta_hat(self) -> Complex3 {
        let (s, co) = self.theta.sin_cos();
        Complex3::real(0.0, -s, co)
    }
}

/// Complex 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex3 {
    pub x: C64,
    pub y: C64,
    pub z: C64,
}

impl Complex3 {
    pub const ZERO: Complex3 = Complex3 {
        x: C64::new(0.0, 0.0),
        y: C64::new(0.0, 0.0),
        z: C64::new(0.0, 0.0),
    };

    pub const fn new(x: C64, y: C64, z: C64) -> Self {
        Complex3 { x, y, z }
    }

    pub const fn real(x: f64, y: f64, z: f64) -> Self {
        Complex3::new(C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0))
    }

    pub fn from_array(a: [C64; 3]) -> Self {
        Complex3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [C64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn re(self) -> Point3 {
        Point3::new(self.x.re, self.y.re, self.z.re)
    }

    pub fn im(self) -> Point3 {
        Point3::new(self.x.im, self.y.im, self.z.im)
    }

    /// Bilinear product `sum a_i b_i` (no conjugation).
    pub fn dot(self, o: Complex3) -> C64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Hermitian norm squared `sum |a_i|^2`.
    pub fn norm_sqr(self) -> f64 {
        self.x.norm_sqr() + self.y.norm_sqr() + self.z.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest component modulus.
    pub fn max_abs(self) -> f64 {
        self.x.norm().max(self.y.norm()).max(self.z.norm())
    }

    pub fn cross(self, o: Complex3) -> Complex3 {
        Complex3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn scale(self, s: C64) -> Complex3 {
        Complex3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn conj(self) -> Complex3 {
        Complex3::new(self.x.conj(), self.y.conj(), self.z.conj())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn component(self, i: usize) -> C64 {
        self.to_array()[i]
    }
}

impl Add for Complex3 {
    type Output = Complex3;
    fn add(self, o: Complex3) -> Complex3 {
        Complex3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Complex3 {
    fn add_assign(&mut self, o: Complex3) {
        *self = *self + o;
    }
}

impl Sub for Complex3 {
    type Output = Complex3;
    fn sub(self, o: Complex3) -> Complex3 {
        Complex3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Complex3 {
    type Output = Complex3;
    fn neg(self) -> Complex3 {
        Complex3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Complex3 {
    type Output = Complex3;
    fn mul(self, s: f64) -> Complex3 {
        Complex3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<C64> for Complex3 {
    type Output = Complex3;
    fn mul(self, s: C64) -> Complex3 {
        self.scale(s)
    }
}

/// Eight-vector `(s1, V1, s2, V2)`, e.g. `X = (Phi, H, Psi, E)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex8 {
    pub s1: C64,
    pub v1: Complex3,
    pub s2: C64,
    pub v2: Complex3,
}

impl Complex8 {
    pub const ZERO: Complex8 = Complex8 {
        s1: C64::new(0.0, 0.0),
        v1: Complex3::ZERO,
        s2: C64::new(0.0, 0.0),
        v2: Complex3::ZERO,
    };

    pub const fn new(s1: C64, v1: Complex3, s2: C64, v2: Complex3) -> Self {
        Complex8 { s1, v1, s2, v2 }
    }

    pub fn from_array(a: [C64; 8]) -> Self {
        Complex8 {
            s1: a[0],
            v1: Complex3::new(a[1], a[2], a[3]),
            s2: a[4],
            v2: Complex3::new(a[5], a[6], a[7]),
        }
    }

    pub fn to_array(self) -> [C64; 8] {
        [
            self.s1, self.v1.x, self.v1.y, self.v1.z, self.s2, self.v2.x, self.v2.y, self.v2.z,
        ]
    }

    pub fn blocks(self) -> (C64, Complex3, C64, Complex3) {
        (self.s1, self.v1, self.s2, self.v2)
    }

    pub fn scale(self, s: C64) -> Complex8 {
        Complex8::new(self.s1 * s, self.v1 * s, self.s2 * s, self.v2 * s)
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|z| z.is_finite())
    }
}

impl Add for Complex8 {
    type Output = Complex8;
    fn add(self, o: Complex8) -> Complex8 {
        Complex8::new(self.s1 + o.s1, self.v1 + o.v1, self.s2 + o.s2, self.v2 + o.v2)
    }
}

impl Sub for Complex8 {
    type Output = Complex8;
    fn sub(self, o: Complex8) -> Complex8 {
        Complex8::new(self.s1 - o.s1, self.v1 - o.v1, self.s2 - o.s2, self.v2 - o.v2)
    }
}

impl Mul<f64> for Complex8 {
    type Output = Complex8;
    fn mul(self, s: f64) -> Complex8 {
        Complex8::new(self.s1 * s, self.v1 * s, self.s2 * s, self.v2 * s)
    }
}

impl Mul<C64> for Complex8 {
    type Output = Complex8;
    fn mul(self, s: C64) -> Complex8 {
        self.scale(s)
    }
}

/// Values that finite differences can be taken of.
pub trait FieldValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn is_finite_value(&self) -> bool;
}

impl FieldValue for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for C64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex3 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex8 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

/// Second-order central differences with step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    pub h: f64,
}

impl FdScheme {
    pub const DEFAULT_REL_STEP: f64 = 1e-4;

    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter { name: "h", reason: "step must be positive and finite" });
        }
        Ok(FdScheme { h })
    }

    /// `h = 1e-4 * max(1, |p|)`.
    pub fn default_at(p: Point3) -> Self {
        FdScheme { h: Self::DEFAULT_REL_STEP * p.norm().max(1.0) }
    }

    pub fn halved(self) -> Self {
        FdScheme { h: self.h * 0.5 }
    }
}

/// Evaluate a field and reject non-finite values, tagging the point.
pub(crate) fn eval_finite<T: FieldValue, F: Fn(Point3) -> Result<T>>(f: &F, p: Point3) -> Result<T> {
    let v = f(p)?;
    if v.is_finite_value() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: p })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cart_to_cyl_examples() {
        let p = Point3::new(1.0, 0.0, 2.0).to_cyl().unwrap();
        assert_eq!(p.x1, 1.0);
        assert!((p.r - 2.0).abs() < 1e-15);
        assert!((p.theta - PI / 2.0).abs() < 1e-15);

        // Branch convention: the negative x2 axis maps to +pi, also for -0.0.
        assert_eq!(Point3::new(0.0, -1.0, 0.0).to_cyl().unwrap().theta, PI);
        assert_eq!(Point3::new(0.0, -1.0, -0.0).to_cyl().unwrap().theta, PI);
    }

    #[test]
    fn cyl_round_trip() {
        let p = CylPoint::new(-3.0, 0.7, 2.5).unwrap();
        let q = p.to_cart().to_cyl().unwrap();
        assert!((q.x1 - p.x1).abs() < 1e-14);
        assert!((q.r - p.r).abs() < 1e-14);
        assert!((q.theta - p.theta).abs() < 1e-14);
    }

    #[test]
    fn axis_is_excluded() {
        assert!(matches!(Point3::new(4.0, 0.0, 0.0).to_cyl(), Err(Error::Domain { .. })));
        assert!(CylPoint::new(0.0, 0.0, 1.0).is_err());
        assert!(CylPoint::new(0.0, 1e-7, 1.0).is_err());
    }

    #[test]
    fn complex8_blocks() {
        let a: [C64; 8] = core::array::from_fn(|i| c(i as f64, -(i as f64)));
        let x = Complex8::from_array(a);
        assert_eq!(x.s1, a[0]);
        assert_eq!(x.v1.z, a[3]);
        assert_eq!(x.s2, a[4]);
        assert_eq!(x.v2.x, a[5]);
        assert_eq!(x.to_array(), a);
    }

    #[test]
    fn hermitian_norm_vs_bilinear_dot() {
        let v = Complex3::new(c(1.0, 0.0), I, c(0.0, 0.0));
        assert_eq!(v.dot(v), c(0.0, 0.0));
        assert_eq!(v.norm_sqr(), 2.0);
        assert_eq!(Complex3::ZERO.norm(), 0.0);
    }

    #[test]
    fn scheme_validation() {
        assert!(FdScheme::new(0.0).is_err());
        assert!(FdScheme::new(f64::NAN).is_err());
        assert_eq!(FdScheme::default_at(Point3::new(0.1, 0.0, 0.0)).h, 1e-4);
        assert!((FdScheme::default_at(Point3::new(3.0, 4.0, 0.0)).h - 5e-4).abs() < 1e-18);
    }
}
