//! Named verification suites and the residual sweep behind `verify` and `sweep`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use accelbeam_core::beams::{CylBeamParams, PlaneWave};
use accelbeam_core::dirac::{
    b_scalars_detailed, choose_g_with_derivative, locality_check, p_symbol, Chi, Matrix8, MediumProfile, WVariant,
};
use accelbeam_core::kelvin::{KelvinMap, KelvinPushed, PhysicalBeam, VirtualBeamParams};
use accelbeam_core::lcw::{amplitude, check_eikonal, check_lcw, eikonal_report, transport_residual, Phase};
use accelbeam_core::verify::{cylinder_samples, maxwell_residual, scaling_study, shell_samples, ScalingStudy};
use accelbeam_core::{diff, C64, Complex3, Complex8, CylPoint, FdScheme, Point3};
use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Below(f64),
    Above(f64),
    Within(f64, f64),
}

impl Bound {
    pub fn holds(self, v: f64) -> bool {
        match self {
            Bound::Below(t) => v < t,
            Bound::Above(t) => v > t,
            Bound::Within(lo, hi) => v >= lo && v <= hi,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Below(t) => write!(f, "< {t:e}"),
            Bound::Above(t) => write!(f, "> {t:e}"),
            Bound::Within(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        Check { name: name.into(), value, bound, passed: bound.holds(value) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Eikonal,
    Transport,
    Lcw,
    Dirac,
    Kelvin,
    Residual,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Eikonal, Suite::Transport, Suite::Lcw, Suite::Dirac, Suite::Kelvin, Suite::Residual];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Eikonal => "eikonal",
            Suite::Transport => "transport",
            Suite::Lcw => "lcw",
            Suite::Dirac => "dirac",
            Suite::Kelvin => "kelvin",
            Suite::Residual => "residual",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {}", self.suite.name())?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {}: {:.6e} ({})",
                if c.passed { "pass" } else { "FAIL" },
                c.name,
                c.value,
                c.bound
            )?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Eikonal => eikonal(seed)?,
        Suite::Transport => transport(seed)?,
        Suite::Lcw => lcw(seed)?,
        Suite::Dirac => dirac(seed)?,
        Suite::Kelvin => kelvin(seed)?,
        Suite::Residual => residual(seed)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Seeded points with `x1` in `[-2, 2)`, `r` in `r_range` and `theta` in
/// `(0.05, pi - 0.05)` (admissible for both phases).
pub fn upper_half_points(n: usize, seed: u64, r_range: (f64, f64)) -> Vec<CylPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            CylPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(r_range.0..r_range.1), rng.gen_range(0.05..PI - 0.05))
                .expect("off-axis by construction")
        })
        .collect()
}

fn eikonal(seed: u64) -> Result<Vec<Check>> {
    let s = FdScheme::new(1e-5)?;
    let pts = upper_half_points(100, seed, (0.2, 3.0));
    let mut checks = Vec::new();
    for (name, ph) in [("-z", Phase::cyl_linear(0.5)?), ("-log conj z", Phase::log_bar(0.5)?)] {
        let mut worst = 0.0f64;
        for &p in &pts {
            worst = worst.max(check_eikonal(&ph, p, s)?.max());
        }
        checks.push(Check::new(format!("eikonal residual of {name} over 100 points"), worst, Bound::Below(1e-7)));
    }
    let broken = |q: CylPoint| Ok(c(-q.x1, -2.0 * q.r));
    let rep = eikonal_report(&broken, pts[0], s)?;
    checks.push(Check::new("control psi = -2r reports |grad psi|^2 - |grad phi|^2", rep.res_norm, Bound::Within(3.0 - 1e-6, 3.0 + 1e-6)));
    Ok(checks)
}

/// Smooth angular profile used for the transport checks.
pub fn transport_g(theta: f64) -> Complex8 {
    let chi = Chi::Exp { rho: 1.0 };
    choose_g_with_derivative(&chi, &chi, 10.0, 0.5, 1.0, theta).expect("tau nonzero").0
}

fn transport(seed: u64) -> Result<Vec<Check>> {
    // Truncation error of the (2ir)^(-1/2) factor blows up towards the axis,
    // so the sample stays at r >= 0.5.
    let pts = upper_half_points(50, seed, (0.5, 2.5));
    let mut checks = Vec::new();
    for (name, ph) in [("-z", Phase::cyl_linear(0.5)?), ("-log conj z", Phase::log_bar(0.5)?)] {
        let a = |q: CylPoint| amplitude(&ph, transport_g, q);
        let mut worst = 0.0f64;
        for &p in &pts {
            worst = worst.max(transport_residual(&ph, &a, p, FdScheme::default_at(p.to_cart()))?);
        }
        checks.push(Check::new(format!("transport residual for {name} over 50 points"), worst, Bound::Below(1e-6)));
    }
    let ph = Phase::cyl_linear(0.5)?;
    let a = |q: CylPoint| amplitude(&ph, transport_g, q);
    let p = CylPoint::new(0.3, 1.2, 0.8)?;
    let r1 = transport_residual(&ph, &a, p, FdScheme::new(0.02)?)?;
    let r2 = transport_residual(&ph, &a, p, FdScheme::new(0.01)?)?;
    checks.push(Check::new("observed order under step halving (0.02 -> 0.01)", (r1 / r2).log2(), Bound::Within(1.7, 2.3)));
    Ok(checks)
}

fn lcw(seed: u64) -> Result<Vec<Check>> {
    let s = FdScheme::new(1e-4)?;
    let pts = shell_samples(20, seed, 0.5, 2.0);
    let plane = |x: Point3| Ok(-x.x1);
    let log = |x: Point3| Ok(-x.norm().ln());
    let bowl = |x: Point3| Ok(x.dot(x));
    let mut worst = [0.0f64; 3];
    for (i, &p) in pts.iter().enumerate() {
        let sd = seed.wrapping_add(i as u64);
        worst[0] = worst[0].max(check_lcw(&plane, p, 16, sd, s)?);
        worst[1] = worst[1].max(check_lcw(&log, p, 16, sd, s)?);
        worst[2] = worst[2].max(check_lcw(&bowl, p, 16, sd, FdScheme::new(1e-3)?)?);
    }
    Ok(vec![
        Check::new("LCW residual of -x1", worst[0], Bound::Below(1e-6)),
        Check::new("LCW residual of -log|x|", worst[1], Bound::Below(1e-6)),
        Check::new("control |x|^2 is not limiting Carleman", worst[2], Bound::Above(1.0)),
    ])
}

fn random_complex3(rng: &mut ChaCha8Rng) -> Complex3 {
    let mut r = || c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    Complex3::new(r(), r(), r())
}

/// Medium, constant test section and Gaussian cutoff of the locality checks.
pub fn locality_setup() -> Result<(MediumProfile, Complex8)> {
    let m = MediumProfile::bump(1.0, 1.0, 1.0, 0.3, 0.2, 1.0)?;
    let y0 = Complex8::from_array(core::array::from_fn(|i| c(1.0, 0.1 * i as f64)));
    Ok((m, y0))
}

fn dirac(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p2 = 0.0f64;
    for _ in 0..50 {
        let xi = random_complex3(&mut rng);
        let p = p_symbol(xi);
        p2 = p2.max(p.mul(&p).sub(&Matrix8::scaled_identity(xi.dot(xi))).max_abs() / xi.norm_sqr().max(1.0));
    }
    let mut b = 0.0f64;
    for _ in 0..100 {
        let p = CylPoint::new(0.0, rng.gen_range(0.1..5.0), rng.gen_range(-PI..PI))?;
        let (tau, lambda, k, rho) =
            (rng.gen_range(1.0..100.0), rng.gen_range(0.0..3.0), rng.gen_range(0.0..5.0), rng.gen_range(0.0..4.0));
        let chi = Chi::Exp { rho };
        let (g, dg) = choose_g_with_derivative(&chi, &chi, tau, lambda, k, p.theta)?;
        b = b.max(b_scalars_detailed(g, dg, tau, lambda, k, p)?.relative());
    }
    let (m, y0) = locality_setup()?;
    let y = move |_x: Point3| Ok(y0);
    let chi = |x: Point3| (-(x.dot(x))).exp();
    let s = FdScheme::new(1e-3)?;
    let pts = shell_samples(20, seed, 0.05, 0.9);
    let mut worst = [0.0f64; 3];
    for &p in &pts {
        for (w, v) in worst.iter_mut().zip([WVariant::Exact, WVariant::Scaled(2.0), WVariant::Untransposed]) {
            *w = w.max(locality_check(&m, &y, &chi, p, s, v)?);
        }
    }
    Ok(vec![
        Check::new("P(xi)^2 - (xi.xi) I over 50 xi (relative)", p2, Bound::Below(1e-12)),
        Check::new("b-scalars with chosen g over 100 samples (relative)", b, Bound::Below(1e-10)),
        Check::new("locality residual, bump medium, 20 points", worst[0], Bound::Below(1e-4)),
        Check::new("control 2W in place of W, same points", worst[1], Bound::Above(1e-2)),
        Check::new("control W in place of W^t, same points", worst[2], Bound::Above(1e-2)),
    ])
}

fn kelvin(seed: u64) -> Result<Vec<Check>> {
    let radius = 2.0;
    let km = KelvinMap::new(radius)?;
    let pts = shell_samples(100, seed, 0.1 * radius, 10.0 * radius);
    let mut inv = 0.0f64;
    let mut jac = 0.0f64;
    for &x in &pts {
        let back = km.map(km.map(x)?)?;
        inv = inv.max((back - x).norm() / x.norm());
        let s = FdScheme::new(1e-5 * x.norm())?;
        let cols: [Complex3; 3] = diff::jacobian(
            &|p: Point3| {
                let y = km.map(p)?;
                Ok(Complex3::real(y.x1, y.x2, y.x3))
            },
            x,
            s,
        )?;
        let j = km.jacobian(x)?;
        let scale = j.max_abs();
        for (col, v) in cols.iter().enumerate() {
            for row in 0..3 {
                jac = jac.max((v.component(row).re - j.0[row][col]).abs() / scale);
            }
        }
    }
    let mut det = 0.0f64;
    for &x in &shell_samples(20, seed ^ 1, 1.0, 1.0 + 1e-9) {
        let x = x.scale(2.0 * radius / x.norm());
        det = det.max((km.jacobian(x)?.det().abs() - 1.0 / 64.0).abs());
    }
    let pw = PlaneWave::new(Point3::new(1.0, 2.0, 2.0), Complex3::real(2.0, -1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 1.0)?;
    let pushed = KelvinPushed { inner: pw, map: KelvinMap::new(1.0)? };
    let mut res = 0.0f64;
    for &y in &shell_samples(20, seed ^ 2, 0.5, 3.0) {
        res = res.max(maxwell_residual(&pushed, y, FdScheme::default_at(y))?.relative);
    }
    Ok(vec![
        Check::new("K(K(x)) = x over 100 points (relative)", inv, Bound::Below(1e-12)),
        Check::new("analytic DK vs differences over 100 points (relative)", jac, Bound::Below(1e-6)),
        Check::new("|det DK| - 1/64 at |x| = 2R", det, Bound::Below(1e-12)),
        Check::new("pushed plane wave Maxwell residual, 20 annulus points", res, Bound::Below(1e-4)),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepBeam {
    Cyl,
    Kelvin,
    Plane,
}

impl SweepBeam {
    pub fn default_taus(self) -> &'static [f64] {
        match self {
            SweepBeam::Cyl | SweepBeam::Plane => &[10.0, 20.0, 40.0, 80.0],
            SweepBeam::Kelvin => &[4.0, 8.0, 16.0],
        }
    }
}

/// Samples used by [`sweep`]: 40 points per family.
pub fn sweep_samples(beam: SweepBeam, seed: u64) -> Vec<Point3> {
    match beam {
        SweepBeam::Cyl => cylinder_samples(40, seed, (-0.5, 0.5), (0.5, 2.0)),
        SweepBeam::Kelvin => shell_samples(40, seed, 6.0, 15.0),
        SweepBeam::Plane => shell_samples(40, seed, 0.5, 2.0),
    }
}

/// Median relative Maxwell residual against `tau`. The Kelvin family runs at
/// `omega = 0.2` so that `k R` stays small next to `tau`.
pub fn sweep(beam: SweepBeam, taus: &[f64], seed: u64) -> Result<ScalingStudy> {
    let samples = sweep_samples(beam, seed);
    Ok(match beam {
        SweepBeam::Cyl => {
            let m = MediumProfile::constant(1.0, 1.0, 0.0, 1.0)?;
            scaling_study(|tau| CylBeamParams::new(tau, 0.5, 1.0, m.clone()), taus, &samples)?
        }
        SweepBeam::Kelvin => {
            let map = KelvinMap::new(5.0)?;
            let a = Point3::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0);
            scaling_study(
                |tau| {
                    let params = VirtualBeamParams::new(tau, 7f64.sqrt(), a, a)?.with_medium(1.0, 1.0, 0.0, 0.2)?;
                    Ok(PhysicalBeam { params, map })
                },
                taus,
                &samples,
            )?
        }
        SweepBeam::Plane => {
            let pw =
                PlaneWave::new(Point3::new(0.0, 0.6, 0.8), Complex3::real(1.0, 0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), 1.0)?;
            scaling_study(|_tau| Ok(pw), taus, &samples)?
        }
    })
}

fn residual(seed: u64) -> Result<Vec<Check>> {
    let cyl = sweep(SweepBeam::Cyl, SweepBeam::Cyl.default_taus(), seed)?;
    let kel = sweep(SweepBeam::Kelvin, SweepBeam::Kelvin.default_taus(), seed)?;
    let pl = sweep(SweepBeam::Plane, SweepBeam::Plane.default_taus(), seed)?;
    Ok(vec![
        Check::new("cyl beam log-log slope over tau 10..80", cyl.slope, Bound::Within(-1.4, -0.6)),
        Check::new("cyl beam median ratio tau 40 / tau 10", cyl.ratio(40.0, 10.0).unwrap_or(f64::NAN), Bound::Within(0.15, 0.40)),
        Check::new("physical Kelvin beam log-log slope over tau 4..16", kel.slope, Bound::Within(-1.5, -0.5)),
        Check::new("plane-wave control slope", pl.slope, Bound::Within(-0.2, 0.2)),
    ])
}

/// Render a sweep as a plain table.
pub fn format_study(study: &ScalingStudy) -> String {
    let mut s = format!("{:>10} {:>16} {:>16} {:>9}\n", "tau", "median", "p90", "failures");
    for r in &study.rows {
        s.push_str(&format!("{:>10} {:>16.6e} {:>16.6e} {:>9}\n", r.tau, r.median_relative, r.p90_relative, r.failures));
    }
    s.push_str(&format!("slope = {:.4}\n", study.slope));
    s
}
