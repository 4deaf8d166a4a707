//! Central-difference differential operators on callable fields.
//!
//! All operators are second order: the truncation error is `O(h^2)` and is
//! exactly zero on linear fields. Every stencil value is checked for
//! finiteness; a non-finite value aborts with [`Error::NonFinite`] carrying
//! the offending point.

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::field::{eval_finite, FieldValue};
use crate::{C64, Complex3, CylPoint, Error, FdScheme, Point3, Result, R_MIN};

/// `d f / d x_axis` at `p`.
pub fn partial<T, F>(f: &F, p: Point3, axis: usize, scheme: FdScheme) -> Result<T>
where
    T: FieldValue,
    F: Fn(Point3) -> Result<T>,
{
    let h = scheme.h;
    let fp = eval_finite(f, p.shifted(axis, h))?;
    let fm = eval_finite(f, p.shifted(axis, -h))?;
    Ok((fp - fm) * (0.5 / h))
}

pub fn grad<F>(f: &F, p: Point3, scheme: FdScheme) -> Result<Complex3>
where
    F: Fn(Point3) -> Result<C64>,
{
    Ok(Complex3::new(
        partial(f, p, 0, scheme)?,
        partial(f, p, 1, scheme)?,
        partial(f, p, 2, scheme)?,
    ))
}

/// Columns `d F / d x_j`, j = 1..3.
pub fn jacobian<T, F>(f: &F, p: Point3, scheme: FdScheme) -> Result<[T; 3]>
where
    T: FieldValue,
    F: Fn(Point3) -> Result<T>,
{
    Ok([partial(f, p, 0, scheme)?, partial(f, p, 1, scheme)?, partial(f, p, 2, scheme)?])
}

/// Divergence from a Jacobian given as columns.
pub fn div_of(j: &[Complex3; 3]) -> C64 {
    j[0].x + j[1].y + j[2].z
}

/// Curl from a Jacobian given as columns.
pub fn curl_of(j: &[Complex3; 3]) -> Complex3 {
    Complex3::new(j[1].z - j[2].y, j[2].x - j[0].z, j[0].y - j[1].x)
}

pub fn div<F>(f: &F, p: Point3, scheme: FdScheme) -> Result<C64>
where
    F: Fn(Point3) -> Result<Complex3>,
{
    Ok(div_of(&jacobian(f, p, scheme)?))
}

pub fn curl<F>(f: &F, p: Point3, scheme: FdScheme) -> Result<Complex3>
where
    F: Fn(Point3) -> Result<Complex3>,
{
    Ok(curl_of(&jacobian(f, p, scheme)?))
}

/// Seven-point Laplacian, componentwise for vector-valued fields.
pub fn laplacian<T, F>(f: &F, p: Point3, scheme: FdScheme) -> Result<T>
where
    T: FieldValue,
    F: Fn(Point3) -> Result<T>,
{
    let h = scheme.h;
    let f0 = eval_finite(f, p)?;
    let mut acc = f0 * 0.0;
    for axis in 0..3 {
        let fp = eval_finite(f, p.shifted(axis, h))?;
        let fm = eval_finite(f, p.shifted(axis, -h))?;
        acc = acc + (fp + fm - f0 * 2.0);
    }
    Ok(acc * (1.0 / (h * h)))
}

/// Hessian of a real scalar field.
pub fn hessian<F>(f: &F, p: Point3, scheme: FdScheme) -> Result<[[f64; 3]; 3]>
where
    F: Fn(Point3) -> Result<f64>,
{
    let h = scheme.h;
    let f0 = eval_finite(f, p)?;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        let fp = eval_finite(f, p.shifted(i, h))?;
        let fm = eval_finite(f, p.shifted(i, -h))?;
        out[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..3 {
            let q = |si: f64, sj: f64| eval_finite(f, p.shifted(i, si * h).shifted(j, sj * h));
            let v = (q(1.0, 1.0)? - q(1.0, -1.0)? - q(-1.0, 1.0)? + q(-1.0, -1.0)?) / (4.0 * h * h);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

/// Gradient of a scalar given in cylindrical coordinates:
/// `(d_x1 f, cos d_r f - sin/r d_theta f, sin d_r f + cos/r d_theta f)`.
///
/// The radial step is capped at `r / 2` so the stencil never crosses the axis.
pub fn cyl_gradient<F>(f: &F, p: CylPoint, scheme: FdScheme) -> Result<Complex3>
where
    F: Fn(CylPoint) -> Result<C64>,
{
    if !(p.r > R_MIN) {
        return Err(Error::Domain { constraint: "r > r_min (axis excluded)" });
    }
    let ev = |q: CylPoint| -> Result<C64> {
        let v = f(q)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: q.to_cart() })
        }
    };
    let h = scheme.h;
    let hr = h.min(0.5 * p.r);
    let d_x1 = (ev(CylPoint { x1: p.x1 + h, ..p })? - ev(CylPoint { x1: p.x1 - h, ..p })?) / (2.0 * h);
    let d_r = (ev(CylPoint { r: p.r + hr, ..p })? - ev(CylPoint { r: p.r - hr, ..p })?) / (2.0 * hr);
    let d_th = (ev(CylPoint { theta: p.theta + h, ..p })? - ev(CylPoint { theta: p.theta - h, ..p })?)
        / (2.0 * h);
    let (s, co) = p.theta.sin_cos();
    Ok(Complex3::new(d_x1, d_r * co - d_th * (s / p.r), d_r * s + d_th * (co / p.r)))
}
