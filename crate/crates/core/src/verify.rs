//! Pointwise Maxwell residuals, tau-scaling studies and intensity profiles.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::beams::MaxwellField;
use crate::diff::{curl_of, div_of, jacobian};
use crate::field::{FieldValue, I};
use crate::{Complex3, Error, FdScheme, Point3, Result};

/// Residuals of `curl E = i omega mu H`, `curl H = -i omega gamma E`,
/// `div(gamma E) = 0`, `div(mu H) = 0` at one point (max-component moduli).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub r_faraday: f64,
    pub r_ampere: f64,
    pub r_div_e: f64,
    pub r_div_h: f64,
    /// `omega max(|mu|, |gamma|) max(|E|, |H|)`.
    pub amplitude_scale: f64,
    /// `max(amplitude_scale, |DE|, |DH|)`: includes the size of the derivatives.
    pub field_scale: f64,
    /// `max(r_faraday, r_ampere) / field_scale`.
    pub relative: f64,
    /// `max(r_faraday, r_ampere) / amplitude_scale`.
    pub relative_amplitude: f64,
    /// `max(r_div_e / |gamma|, r_div_h / |mu|) / field_scale`.
    pub relative_div: f64,
    pub degenerate: bool,
}

#[derive(Clone, Copy)]
struct Quad([Complex3; 4]);

impl Add for Quad {
    type Output = Quad;
    fn add(self, o: Quad) -> Quad {
        Quad(core::array::from_fn(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, o: Quad) -> Quad {
        Quad(core::array::from_fn(|i| self.0[i] - o.0[i]))
    }
}

impl Mul<f64> for Quad {
    type Output = Quad;
    fn mul(self, s: f64) -> Quad {
        Quad(self.0.map(|v| v * s))
    }
}

impl FieldValue for Quad {
    fn is_finite_value(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

pub fn maxwell_residual<M: MaxwellField>(m: &M, p: Point3, scheme: FdScheme) -> Result<ResidualReport> {
    let omega = m.omega();
    let quad = |x: Point3| -> Result<Quad> {
        let f = m.fields(x)?;
        Ok(Quad([f.e, f.h, f.e * m.gamma(x)?, f.h * m.mu(x)?]))
    };
    let j = jacobian(&quad, p, scheme)?;
    let col = |k: usize| [j[0].0[k], j[1].0[k], j[2].0[k]];
    let f = m.fields(p)?;
    let (mu, gamma) = (m.mu(p)?, m.gamma(p)?);
    let (je, jh) = (col(0), col(1));
    let r_faraday = (curl_of(&je) - f.h * (I * omega * mu)).max_abs();
    let r_ampere = (curl_of(&jh) + f.e * (I * omega * gamma)).max_abs();
    let r_div_e = div_of(&col(2)).norm();
    let r_div_h = div_of(&col(3)).norm();
    let amplitude_scale = omega * mu.norm().max(gamma.norm()) * f.e.max_abs().max(f.h.max_abs());
    let dmax = je.iter().chain(jh.iter()).fold(0.0f64, |acc, v| acc.max(v.max_abs()));
    let field_scale = amplitude_scale.max(dmax);
    let res = r_faraday.max(r_ampere);
    let degenerate = !(field_scale > 0.0);
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::NAN };
    Ok(ResidualReport {
        r_faraday,
        r_ampere,
        r_div_e,
        r_div_h,
        amplitude_scale,
        field_scale,
        relative: ratio(res, field_scale),
        relative_amplitude: ratio(res, amplitude_scale),
        relative_div: ratio((r_div_e / gamma.norm()).max(r_div_h / mu.norm()), field_scale),
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub tau: f64,
    pub median_relative: f64,
    pub p90_relative: f64,
    /// Samples excluded because evaluation failed or the report was degenerate.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingStudy {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log median_relative` against `log tau`.
    pub slope: f64,
}

impl ScalingStudy {
    /// `median(tau_j) / median(tau_i)` for two tabulated taus.
    pub fn ratio(&self, tau_num: f64, tau_den: f64) -> Option<f64> {
        let find = |t: f64| self.rows.iter().find(|r| r.tau == t).map(|r| r.median_relative);
        Some(find(tau_num)? / find(tau_den)?)
    }
}

pub const MIN_SCALING_SAMPLES: usize = 30;
pub const MAX_FAILURE_FRACTION: f64 = 0.2;

/// Linear-interpolated quantile of a sorted slice.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Median and 90th percentile of the relative residual over `samples` for each tau.
pub fn scaling_study<M, F>(family: F, taus: &[f64], samples: &[Point3]) -> Result<ScalingStudy>
where
    M: MaxwellField,
    F: Fn(f64) -> Result<M>,
{
    if taus.len() < 3 || taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Parameter { name: "taus", reason: "need at least 3 strictly increasing values" });
    }
    if samples.len() < MIN_SCALING_SAMPLES {
        return Err(Error::Parameter { name: "samples", reason: "need at least 30 sample points" });
    }
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let field = family(tau)?;
        let mut rel: Vec<f64> = Vec::with_capacity(samples.len());
        for &p in samples {
            if let Ok(r) = maxwell_residual(&field, p, FdScheme::default_at(p)) {
                if !r.degenerate && r.relative.is_finite() {
                    rel.push(r.relative);
                }
            }
        }
        let failures = samples.len() - rel.len();
        if failures as f64 > MAX_FAILURE_FRACTION * samples.len() as f64 {
            return Err(Error::TooManyFailures { failed: failures, total: samples.len() });
        }
        rel.sort_by(f64::total_cmp);
        rows.push(ScalingRow {
            tau,
            median_relative: quantile(&rel, 0.5),
            p90_relative: quantile(&rel, 0.9),
            failures,
        });
    }
    let lx: Vec<f64> = rows.iter().map(|r| r.tau.ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.median_relative.ln()).collect();
    let slope = fit_slope(&lx, &ly);
    Ok(ScalingStudy { rows, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntensityProfile {
    /// `(arc length, |field|)` along the trajectory.
    pub samples: Vec<(f64, f64)>,
    /// `(max - min) / max` of `|field|`.
    pub max_rel_deviation: f64,
    pub strictly_increasing: bool,
}

/// Hermitian modulus of a field sampled along a polyline.
pub fn intensity_profile<F>(field: &F, trajectory: &[Point3]) -> Result<IntensityProfile>
where
    F: Fn(Point3) -> Result<Complex3>,
{
    if trajectory.is_empty() {
        return Err(Error::Parameter { name: "trajectory", reason: "must be non-empty" });
    }
    let mut samples = Vec::with_capacity(trajectory.len());
    let mut arc = 0.0;
    for (i, &p) in trajectory.iter().enumerate() {
        if i > 0 {
            arc += (p - trajectory[i - 1]).norm();
        }
        let v = field(p)?;
        if !v.is_finite() {
            return Err(Error::NonFinite { at: p });
        }
        samples.push((arc, v.norm()));
    }
    let max = samples.iter().fold(f64::NEG_INFINITY, |a, s| a.max(s.1));
    let min = samples.iter().fold(f64::INFINITY, |a, s| a.min(s.1));
    let max_rel_deviation = if max > 0.0 { (max - min) / max } else { 0.0 };
    let strictly_increasing = samples.windows(2).all(|w| w[1].1 > w[0].1);
    Ok(IntensityProfile { samples, max_rel_deviation, strictly_increasing })
}

/// `n` points on the circle `{x1, r}` for theta from `theta0` to `theta1` inclusive.
pub fn circle_trajectory(x1: f64, r: f64, n: usize, theta0: f64, theta1: f64) -> Vec<Point3> {
    (0..n)
        .map(|i| {
            let t = if n > 1 { theta0 + (theta1 - theta0) * i as f64 / (n - 1) as f64 } else { theta0 };
            let (s, co) = t.sin_cos();
            Point3::new(x1, r * co, r * s)
        })
        .collect()
}

/// Seeded uniform samples with `x1` in `x1_range`, `r` in `r_range`, theta in `[-pi, pi)`.
pub fn cylinder_samples(n: usize, seed: u64, x1_range: (f64, f64), r_range: (f64, f64)) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let x1 = x1_range.0 + (x1_range.1 - x1_range.0) * rng.gen::<f64>();
            let r = r_range.0 + (r_range.1 - r_range.0) * rng.gen::<f64>();
            let t = -PI + 2.0 * PI * rng.gen::<f64>();
            let (s, co) = t.sin_cos();
            Point3::new(x1, r * co, r * s)
        })
        .collect()
}

/// Seeded samples with uniformly distributed direction and `|x|` uniform in `(r_inner, r_outer)`.
pub fn shell_samples(n: usize, seed: u64, r_inner: f64, r_outer: f64) -> Vec<Point3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let len = v.norm();
        if !(len > 1e-3 && len <= 1.0) {
            continue;
        }
        let rad = r_inner + (r_outer - r_inner) * rng.gen::<f64>();
        out.push(v.scale(rad / len));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beams::{CylBeamParams, EhPair, PlaneWave};
    use crate::dirac::MediumProfile;
    use crate::field::c;
    use crate::C64;

    fn vacuum(omega: f64) -> MediumProfile {
        MediumProfile::constant(1.0, 1.0, 0.0, omega).unwrap()
    }

    #[test]
    fn plane_wave_is_exact() {
        let pw = PlaneWave::new(Point3::new(1.0, 2.0, 2.0), Complex3::real(2.0, -1.0, 0.0), c(1.0, 0.0), c(2.0, 0.3), 1.5)
            .unwrap();
        let p = Point3::new(0.3, -0.2, 0.7);
        let r = maxwell_residual(&pw, p, FdScheme::new(1e-4).unwrap()).unwrap();
        assert!(r.relative < 1e-8 && r.relative_amplitude < 1e-8, "{r:?}");
        assert!(r.r_div_e < 1e-7 && r.r_div_h < 1e-7);
    }

    #[test]
    fn cyl_beam_residual_decays_like_inverse_tau() {
        let p = Point3::new(0.0, 0.6, 0.9);
        let rel = |tau: f64| {
            let bp = CylBeamParams::new(tau, 0.5, 1.0, vacuum(1.0)).unwrap();
            maxwell_residual(&bp, p, FdScheme::default_at(p)).unwrap().relative
        };
        let ratio = rel(40.0) / rel(10.0);
        assert!((0.15..=0.40).contains(&ratio), "{ratio}");
    }

    struct Detuned(CylBeamParams, f64);

    impl MaxwellField for Detuned {
        fn fields(&self, x: Point3) -> Result<EhPair> {
            self.0.fields(x)
        }
        fn mu(&self, x: Point3) -> Result<C64> {
            self.0.mu(x)
        }
        fn gamma(&self, x: Point3) -> Result<C64> {
            self.0.gamma(x)
        }
        fn omega(&self) -> f64 {
            self.1 * self.0.omega()
        }
    }

    #[test]
    fn wrong_frequency_is_detected() {
        let p = Point3::new(0.0, 0.6, 0.9);
        let bp = CylBeamParams::new(10.0, 0.5, 1.0, vacuum(1.0)).unwrap();
        let r = maxwell_residual(&Detuned(bp, 1.3), p, FdScheme::default_at(p)).unwrap();
        assert!(r.relative > 0.05, "{r:?}");
    }

    #[test]
    fn degenerate_report_for_zero_field() {
        let bp = CylBeamParams::new(10.0, 0.5, 1.0, vacuum(1.0))
            .unwrap()
            .with_chi(crate::dirac::Chi::Zero, crate::dirac::Chi::Zero);
        let p = Point3::new(0.0, 1.0, 0.0);
        let r = maxwell_residual(&bp, p, FdScheme::default_at(p)).unwrap();
        assert!(r.degenerate && r.relative.is_nan());
    }

    #[test]
    fn scaling_input_validation() {
        let s = cylinder_samples(30, 1, (0.0, 0.0), (0.5, 2.0));
        let fam = |tau: f64| CylBeamParams::new(tau, 0.5, 1.0, vacuum(1.0));
        assert!(scaling_study(fam, &[10.0, 20.0], &s).is_err());
        assert!(scaling_study(fam, &[10.0, 40.0, 20.0], &s).is_err());
        assert!(scaling_study(fam, &[10.0, 20.0, 40.0], &s[..29]).is_err());
    }

    #[test]
    fn too_many_failures() {
        // Points on the axis cannot be evaluated.
        let mut s = cylinder_samples(30, 1, (0.0, 0.0), (0.5, 2.0));
        for p in s.iter_mut().take(7) {
            *p = Point3::new(0.0, 0.0, 0.0);
        }
        let fam = |tau: f64| CylBeamParams::new(tau, 0.5, 1.0, vacuum(1.0));
        assert_eq!(
            scaling_study(fam, &[10.0, 20.0, 40.0], &s),
            Err(Error::TooManyFailures { failed: 7, total: 30 })
        );
        s[6] = Point3::new(0.0, 1.0, 0.0);
        let st = scaling_study(fam, &[10.0, 20.0, 40.0], &s).unwrap();
        assert_eq!(st.rows[0].failures, 6);
    }

    #[test]
    fn helpers() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.9), 2.8);
        assert!((fit_slope(&[0.0, 1.0, 2.0], &[1.0, 0.0, -1.0]) + 1.0).abs() < 1e-15);
        let sh = shell_samples(50, 3, 2.0, 3.0);
        assert!(sh.iter().all(|p| (2.0..3.0).contains(&p.norm())));
        assert_eq!(sh, shell_samples(50, 3, 2.0, 3.0));
        let tr = circle_trajectory(0.0, 2.0, 5, 0.0, PI);
        assert!((tr[4] - Point3::new(0.0, -2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn intensity_on_circle() {
        let bp = CylBeamParams::new(10.0, 0.5, 1.0, vacuum(1.0)).unwrap();
        let tr = circle_trajectory(0.0, 1.0, 360, -PI, PI);
        let prof = intensity_profile(&|x: Point3| Ok(bp.fields(x)?.e), &tr).unwrap();
        assert!(prof.max_rel_deviation < 1e-12);
        assert!(!prof.strictly_increasing);
        assert!((prof.samples.last().unwrap().0 - 2.0 * PI).abs() < 1e-3);
    }
}
