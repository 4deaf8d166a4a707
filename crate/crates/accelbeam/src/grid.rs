//! Sampling grids and rasters of complex vector fields.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use accelbeam_core::kelvin::KelvinMap;
use accelbeam_core::{Complex3, Point3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Points that fail to evaluate beyond this fraction abort sampling.
pub const MAX_MISSING_FRACTION: f64 = 0.05;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("{missing} of {total} grid points could not be evaluated (most frequent violated constraint: {constraint})")]
    TooManyMissing { missing: usize, total: usize, constraint: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }

    /// The two remaining axes in increasing order.
    fn in_plane(self) -> (usize, usize) {
        match self {
            Axis::X1 => (1, 2),
            Axis::X2 => (0, 2),
            Axis::X3 => (0, 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    /// Plane `x[normal] = offset`; `u`, `v` run over the other two axes in order.
    Plane { normal: Axis, offset: f64, u_range: [f64; 2], v_range: [f64; 2], nu: usize, nv: usize },
    /// Sphere with polar angle measured from the x3 axis; cell-centred in theta.
    Sphere { center: [f64; 3], radius: f64, n_theta: usize, n_phi: usize },
    /// Square `n x n` grid on a plane, masked to `r_inner <= rho <= r_outer`
    /// where `rho` is the in-plane distance from the normal axis.
    AnnulusSlice { normal: Axis, offset: f64, r_inner: f64, r_outer: f64, n: usize },
    /// Circle `{x1, r}` with `n_theta` angles starting at `-pi`.
    Circle { x1: f64, r: f64, n_theta: usize },
    /// Kelvin image of the virtual plane patch `y1 + y2 = R^2/(2a)`,
    /// `u = y1 - y2` in `[-d_half, d_half]`, `v = y3` in `[-t_half, t_half]`;
    /// it lies on the sphere `(x1-a)^2 + (x2-a)^2 + x3^2 = 2a^2`.
    KelvinPatch { radius: f64, a: f64, d_half: f64, t_half: f64, nd: usize, nt: usize },
}

/// One grid node: parameters, position, physical cell area and support flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub u: f64,
    pub v: f64,
    pub x: Point3,
    pub area: f64,
    pub inside: bool,
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

fn bad(msg: &str) -> GridError {
    GridError::Invalid(msg.to_string())
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), GridError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            GridSpec::Plane { offset, u_range, v_range, nu, nv, .. } => {
                if *nu < 2 || *nv < 2 {
                    return Err(bad("plane resolution must be at least 2 x 2"));
                }
                if !finite(&[*offset, u_range[0], u_range[1], v_range[0], v_range[1]]) {
                    return Err(bad("plane ranges must be finite"));
                }
                if !(u_range[1] > u_range[0] && v_range[1] > v_range[0]) {
                    return Err(bad("plane ranges must be increasing"));
                }
            }
            GridSpec::Sphere { center, radius, n_theta, n_phi } => {
                if *n_theta < 2 || *n_phi < 2 {
                    return Err(bad("sphere resolution must be at least 2 x 2"));
                }
                if !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(bad("sphere needs a finite centre and positive radius"));
                }
            }
            GridSpec::AnnulusSlice { offset, r_inner, r_outer, n, .. } => {
                if *n < 2 {
                    return Err(bad("annulus resolution must be at least 2"));
                }
                if !finite(&[*offset]) || !(*r_inner >= 0.0 && r_outer > r_inner && r_outer.is_finite()) {
                    return Err(bad("annulus needs 0 <= r_inner < r_outer"));
                }
            }
            GridSpec::Circle { x1, r, n_theta } => {
                if *n_theta < 2 {
                    return Err(bad("circle resolution must be at least 2"));
                }
                if !x1.is_finite() || !(*r > 0.0 && r.is_finite()) {
                    return Err(bad("circle needs a finite x1 and positive r"));
                }
            }
            GridSpec::KelvinPatch { radius, a, d_half, t_half, nd, nt } => {
                if *nd < 2 || *nt < 2 {
                    return Err(bad("patch resolution must be at least 2 x 2"));
                }
                if !(*radius > 0.0 && *a > 0.0 && *d_half > 0.0 && *t_half > 0.0)
                    || !finite(&[*radius, *a, *d_half, *t_half])
                {
                    return Err(bad("patch needs positive finite radius, a, d_half, t_half"));
                }
            }
        }
        Ok(())
    }

    /// `(nu, nv)`; nodes are stored row-major with `u` fastest.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            GridSpec::Plane { nu, nv, .. } => (*nu, *nv),
            GridSpec::Sphere { n_theta, n_phi, .. } => (*n_phi, *n_theta),
            GridSpec::AnnulusSlice { n, .. } => (*n, *n),
            GridSpec::Circle { n_theta, .. } => (*n_theta, 1),
            GridSpec::KelvinPatch { nd, nt, .. } => (*nd, *nt),
        }
    }

    pub fn points(&self) -> Result<Vec<GridPoint>, GridError> {
        self.validate()?;
        let (nu, nv) = self.shape();
        let mut out = Vec::with_capacity(nu * nv);
        for j in 0..nv {
            for i in 0..nu {
                out.push(self.node(i, j)?);
            }
        }
        Ok(out)
    }

    fn node(&self, i: usize, j: usize) -> Result<GridPoint, GridError> {
        let place = |normal: Axis, offset: f64, u: f64, v: f64| {
            let mut a = [0.0; 3];
            let (iu, iv) = normal.in_plane();
            a[normal.index()] = offset;
            a[iu] = u;
            a[iv] = v;
            Point3::from_array(a)
        };
        Ok(match *self {
            GridSpec::Plane { normal, offset, u_range, v_range, nu, nv } => {
                let u = linspace(u_range[0], u_range[1], nu, i);
                let v = linspace(v_range[0], v_range[1], nv, j);
                let area = (u_range[1] - u_range[0]) / (nu - 1) as f64 * (v_range[1] - v_range[0]) / (nv - 1) as f64;
                GridPoint { u, v, x: place(normal, offset, u, v), area, inside: true }
            }
            GridSpec::Sphere { center, radius, n_theta, n_phi } => {
                let dth = PI / n_theta as f64;
                let dph = 2.0 * PI / n_phi as f64;
                let th = (j as f64 + 0.5) * dth;
                let ph = i as f64 * dph;
                let (st, ct) = th.sin_cos();
                let (sp, cp) = ph.sin_cos();
                let x = Point3::from_array(center) + Point3::new(st * cp, st * sp, ct).scale(radius);
                GridPoint { u: ph, v: th, x, area: radius * radius * st * dth * dph, inside: true }
            }
            GridSpec::AnnulusSlice { normal, offset, r_inner, r_outer, n } => {
                let u = linspace(-r_outer, r_outer, n, i);
                let v = linspace(-r_outer, r_outer, n, j);
                let rho = u.hypot(v);
                let step = 2.0 * r_outer / (n - 1) as f64;
                GridPoint {
                    u,
                    v,
                    x: place(normal, offset, u, v),
                    area: step * step,
                    inside: rho >= r_inner && rho <= r_outer,
                }
            }
            GridSpec::Circle { x1, r, n_theta } => {
                let dth = 2.0 * PI / n_theta as f64;
                let th = -PI + i as f64 * dth;
                let (s, c) = th.sin_cos();
                GridPoint { u: th, v: 0.0, x: Point3::new(x1, r * c, r * s), area: r * dth, inside: true }
            }
            GridSpec::KelvinPatch { radius, a, d_half, t_half, nd, nt } => {
                let d = linspace(-d_half, d_half, nd, i);
                let t = linspace(-t_half, t_half, nt, j);
                let c = radius * radius / (2.0 * a);
                let y = Point3::new(0.5 * (c + d), 0.5 * (c - d), t);
                let km = KelvinMap::new(radius).map_err(|e| GridError::Invalid(e.to_string()))?;
                let x = km.map(y).map_err(|e| GridError::Invalid(e.to_string()))?;
                let dd = 2.0 * d_half / (nd - 1) as f64;
                let dt = 2.0 * t_half / (nt - 1) as f64;
                let conformal = radius * radius / y.dot(y);
                let area = dd / 2f64.sqrt() * dt * conformal * conformal;
                GridPoint { u: d, v: t, x, area, inside: true }
            }
        })
    }
}

/// Sampled field values on a grid. `None` marks nodes outside the support
/// or nodes where evaluation failed.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRaster {
    pub spec: GridSpec,
    pub nu: usize,
    pub nv: usize,
    pub points: Vec<GridPoint>,
    pub values: Vec<Option<Complex3>>,
    /// Nodes outside the grid's support (not evaluated).
    pub masked: usize,
    /// Nodes inside the support whose evaluation failed.
    pub missing: usize,
    /// Provenance written next to every exported artifact.
    pub meta: serde_json::Value,
}

/// Evaluate `field` at every node in parallel; output order is the grid order.
pub fn sample_grid<F>(spec: &GridSpec, field: &F) -> Result<FieldRaster, GridError>
where
    F: Fn(Point3) -> accelbeam_core::Result<Complex3> + Sync,
{
    let points = spec.points()?;
    let evaluated: Vec<Result<Option<Complex3>, &'static str>> = points
        .par_iter()
        .map(|gp| {
            if !gp.inside {
                return Ok(None);
            }
            match field(gp.x) {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                Ok(_) => Err("finite field value"),
                Err(e) => Err(e.constraint()),
            }
        })
        .collect();
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut values = Vec::with_capacity(points.len());
    let mut masked = 0;
    for (gp, r) in points.iter().zip(evaluated) {
        match r {
            Ok(v) => {
                if !gp.inside {
                    masked += 1;
                }
                values.push(v);
            }
            Err(c) => {
                *counts.entry(c).or_default() += 1;
                values.push(None);
            }
        }
    }
    let missing: usize = counts.values().sum();
    let total = points.len() - masked;
    if missing as f64 > MAX_MISSING_FRACTION * total as f64 {
        let constraint = counts
            .iter()
            .max_by_key(|(_, n)| **n)
            .map(|(c, _)| c.to_string())
            .unwrap_or_default();
        return Err(GridError::TooManyMissing { missing, total, constraint });
    }
    let (nu, nv) = spec.shape();
    Ok(FieldRaster {
        spec: spec.clone(),
        nu,
        nv,
        points,
        values,
        masked,
        missing,
        meta: serde_json::Value::Null,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use accelbeam_core::{Error, C64};

    fn plane(nu: usize, nv: usize) -> GridSpec {
        GridSpec::Plane { normal: Axis::X1, offset: 0.0, u_range: [-1.0, 1.0], v_range: [0.0, 2.0], nu, nv }
    }

    #[test]
    fn constant_field_on_small_plane() {
        let v = Complex3::new(C64::new(1.0, 2.0), C64::new(0.0, 0.0), C64::new(-3.0, 0.5));
        let r = sample_grid(&plane(2, 2), &|_x: Point3| Ok(v)).unwrap();
        assert_eq!(r.values, vec![Some(v); 4]);
        assert_eq!(r.points[1].x, Point3::new(0.0, 1.0, 0.0));
        assert_eq!(r.points[2].x, Point3::new(0.0, -1.0, 2.0));
    }

    #[test]
    fn resolution_and_range_validation() {
        assert!(plane(1, 4).validate().is_err());
        let g = GridSpec::Plane { normal: Axis::X3, offset: 0.0, u_range: [1.0, 1.0], v_range: [0.0, 1.0], nu: 3, nv: 3 };
        assert!(g.validate().is_err());
        assert!(GridSpec::Circle { x1: 0.0, r: -1.0, n_theta: 8 }.validate().is_err());
    }

    #[test]
    fn missing_points_policy() {
        // One node of 25 on the axis: 4% missing is tolerated.
        let g = GridSpec::Plane { normal: Axis::X1, offset: 0.0, u_range: [-1.0, 1.0], v_range: [-1.0, 1.0], nu: 5, nv: 5 };
        let f = |x: Point3| {
            x.to_cyl()?;
            Ok(Complex3::real(1.0, 0.0, 0.0))
        };
        let r = sample_grid(&g, &f).unwrap();
        assert_eq!(r.missing, 1);
        assert_eq!(r.values[12], None);

        let g = GridSpec::Plane { normal: Axis::X1, offset: 0.0, u_range: [-1.0, 1.0], v_range: [-1.0, 1.0], nu: 3, nv: 3 };
        match sample_grid(&g, &f) {
            Err(GridError::TooManyMissing { missing: 1, total: 9, constraint }) => {
                assert_eq!(constraint, Error::Domain { constraint: "r > r_min (axis excluded)" }.constraint())
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn annulus_mask_is_not_missing() {
        let g = GridSpec::AnnulusSlice { normal: Axis::X1, offset: 0.0, r_inner: 1.0, r_outer: 2.0, n: 21 };
        let r = sample_grid(&g, &|x: Point3| {
            x.to_cyl()?;
            Ok(Complex3::real(1.0, 0.0, 0.0))
        })
        .unwrap();
        assert_eq!(r.missing, 0);
        assert!(r.masked > 0);
        assert_eq!(r.values.iter().filter(|v| v.is_none()).count(), r.masked);
    }

    #[test]
    fn kelvin_patch_lies_on_sphere() {
        let a = 50.0 / (3.0 * PI);
        let g = GridSpec::KelvinPatch { radius: 5.0, a, d_half: 2.0, t_half: 6.0, nd: 9, nt: 7 };
        for gp in g.points().unwrap() {
            let x = gp.x;
            let s = (x.x1 - a).powi(2) + (x.x2 - a).powi(2) + x.x3 * x.x3 - 2.0 * a * a;
            assert!(s.abs() < 1e-10, "{s}");
            assert!(gp.area > 0.0);
        }
    }

    #[test]
    fn sphere_areas_sum_to_surface() {
        let g = GridSpec::Sphere { center: [1.0, 0.0, 0.0], radius: 2.0, n_theta: 200, n_phi: 8 };
        let total: f64 = g.points().unwrap().iter().map(|p| p.area).sum();
        assert!((total - 16.0 * PI).abs() < 1e-3 * 16.0 * PI);
    }
}
