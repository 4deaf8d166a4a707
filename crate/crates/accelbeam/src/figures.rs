//! Figure presets, artifact writing and the structural checks on each figure.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};

use accelbeam_core::verify::{circle_trajectory, intensity_profile};
use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::{field_fn, BeamConfig, FieldSelect, MediumConfig, RunConfig};
use crate::export::export_csv;
use crate::grid::{sample_grid, Axis, FieldRaster, GridSpec};
use crate::pixmap::{render, scalar_values, write_pixmap, Normalization, Quantity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig4,
}

impl FigureId {
    pub const ALL: [FigureId; 3] = [FigureId::Fig1, FigureId::Fig2, FigureId::Fig4];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig4 => "fig4",
        }
    }
}

/// A named run with the parameters it had to choose itself.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub config: RunConfig,
    pub assumed: Vec<String>,
}

/// Sphere parameters `a` of the two fig4 panels, smaller panel first.
pub const FIG4_SPHERES: [(&str, f64); 2] = [("fig4_a50_3pi", 50.0 / (3.0 * PI)), ("fig4_a150_17pi", 150.0 / (17.0 * PI))];

fn fig1() -> Vec<Preset> {
    vec![Preset {
        name: "fig1".into(),
        config: RunConfig {
            seed: 0,
            beam: BeamConfig::Cyl { tau: 10.0, lambda: 0.5, rho: 1.0, medium: MediumConfig::default() },
            grid: GridSpec::AnnulusSlice { normal: Axis::X1, offset: 0.0, r_inner: 1.0, r_outer: 2.0, n: 256 },
            field: FieldSelect::E,
            component: Some(0),
            quantities: vec![Quantity::Abs, Quantity::Re],
            normalization: Normalization::Linear,
        },
        assumed: vec![
            "rho = 1".into(),
            "vacuum medium with omega = 1".into(),
            "window 1 <= r <= 2 on x1 = 0 at 256 x 256, axis neighbourhood masked".into(),
            "rendered quantities |E1| and Re E1".into(),
            "colormaps viridis (abs) and coolwarm (re), linear normalization".into(),
        ],
    }]
}

fn fig2() -> Vec<Preset> {
    vec![Preset {
        name: "fig2".into(),
        config: RunConfig {
            seed: 0,
            beam: BeamConfig::Sph { tau: 9.0, lambda: 0.5, rho: 1.0, medium: MediumConfig::default() },
            grid: GridSpec::Plane { normal: Axis::X1, offset: 2.0, u_range: [-3.0, 3.0], v_range: [0.05, 3.0], nu: 256, nv: 128 },
            field: FieldSelect::E,
            component: None,
            quantities: vec![Quantity::Abs],
            normalization: Normalization::Linear,
        },
        assumed: vec![
            "rho = 1".into(),
            "vacuum medium with omega = 1".into(),
            "window -3 <= x2 <= 3, 0.05 <= x3 <= 3 (upper half plane) at 256 x 128".into(),
            "rendered quantity |E|".into(),
            "colormap viridis, linear normalization".into(),
        ],
    }]
}

fn fig4() -> Vec<Preset> {
    FIG4_SPHERES
        .iter()
        .map(|&(name, a)| Preset {
            name: name.into(),
            config: RunConfig {
                seed: 0,
                beam: BeamConfig::Kelvin {
                    tau: 4.0,
                    rho: 7f64.sqrt(),
                    a: [-FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
                    b: None,
                    radius: 5.0,
                    l_over_r: 4.5,
                    medium: MediumConfig::default(),
                },
                grid: GridSpec::KelvinPatch { radius: 5.0, a, d_half: 2.0, t_half: 6.0, nd: 128, nt: 128 },
                field: FieldSelect::ETildeScaled,
                component: Some(0),
                quantities: vec![Quantity::Re],
                normalization: Normalization::Linear,
            },
            assumed: vec![
                "b = a".into(),
                "vacuum medium with omega = 1".into(),
                "L / R = 4.5".into(),
                "patch |y1 - y2| <= 2, |y3| <= 6 of the virtual plane at 128 x 128".into(),
                "rendered quantity Re of the first component of R^3/|x|^3 e~(K x)".into(),
                "colormap coolwarm, linear normalization".into(),
            ],
        })
        .collect()
}

pub fn presets(id: FigureId, seed: u64) -> Vec<Preset> {
    let mut v = match id {
        FigureId::Fig1 => fig1(),
        FigureId::Fig2 => fig2(),
        FigureId::Fig4 => fig4(),
    };
    for p in &mut v {
        p.config.seed = seed;
    }
    v
}

#[derive(Debug, Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    run: &'a str,
    seed: u64,
    config: &'a RunConfig,
    assumed: &'a [String],
}

/// Sample the configured field and write `<name>.csv` (with its meta
/// sidecar) plus one `<name>_<quantity>.ppm` per requested quantity.
pub fn run_config(cfg: &RunConfig, name: &str, assumed: &[String], out_dir: &Path) -> Result<(FieldRaster, Vec<PathBuf>)> {
    let beam = cfg.beam.build()?;
    let field = field_fn(&beam, cfg.field)?;
    let mut raster = sample_grid(&cfg.grid, &|x| field(x)).with_context(|| format!("sampling `{name}`"))?;
    raster.meta = serde_json::to_value(Provenance {
        tool: "accelbeam",
        version: env!("CARGO_PKG_VERSION"),
        run: name,
        seed: cfg.seed,
        config: cfg,
        assumed,
    })?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut files = Vec::new();
    let csv = out_dir.join(format!("{name}.csv"));
    export_csv(&raster, &csv)?;
    files.push(csv);
    for &q in &cfg.quantities {
        let img = render(&raster, q, cfg.component, cfg.normalization).with_context(|| format!("rendering `{name}`"))?;
        let ppm = out_dir.join(format!("{name}_{}.ppm", q.name()));
        write_pixmap(&img, &raster, cfg.component, &ppm, assumed)?;
        files.push(ppm);
    }
    Ok((raster, files))
}

/// A named scalar with its acceptance bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct FigureReport {
    pub id: FigureId,
    pub files: Vec<PathBuf>,
    pub metrics: Vec<Metric>,
}

impl FigureReport {
    pub fn passed(&self) -> bool {
        self.metrics.iter().all(|m| m.passed)
    }
}

fn in_plane_radius(raster: &FieldRaster, i: usize) -> f64 {
    let p = raster.points[i];
    p.u.hypot(p.v)
}

/// Fraction of the top-decile nodes (by `|component|`) whose in-plane radius
/// lies in `[0.7, 1.3] r_peak`, `r_peak` being the radius of the maximum.
pub fn top_decile_fraction(raster: &FieldRaster, component: usize) -> Result<(f64, f64)> {
    let vals = scalar_values(raster, Quantity::Abs, Some(component))?;
    let mut idx: Vec<(usize, f64)> = vals.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
    anyhow::ensure!(!idx.is_empty(), "raster has no values");
    idx.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let top = idx.len().div_ceil(10);
    let r_peak = in_plane_radius(raster, idx[0].0);
    let inside = idx[..top]
        .iter()
        .filter(|(i, _)| {
            let r = in_plane_radius(raster, *i);
            r >= 0.7 * r_peak && r <= 1.3 * r_peak
        })
        .count();
    Ok((inside as f64 / top as f64, r_peak))
}

/// Largest relative difference of `|E|` between nodes mirrored in `u`.
pub fn mirror_deviation(raster: &FieldRaster) -> Result<f64> {
    let vals = scalar_values(raster, Quantity::Abs, None)?;
    let mut worst: f64 = 0.0;
    for j in 0..raster.nv {
        for i in 0..raster.nu / 2 {
            let (a, b) = (vals[j * raster.nu + i], vals[j * raster.nu + raster.nu - 1 - i]);
            if let (Some(a), Some(b)) = (a, b) {
                let m = a.max(b);
                if m > 0.0 {
                    worst = worst.max((a - b).abs() / m);
                }
            }
        }
    }
    Ok(worst)
}

/// Peak modulus (of one component, or the vector norm for `None`) and the
/// physical area of nodes at or above half of it.
pub fn peak_and_half_max_area(raster: &FieldRaster, component: Option<usize>) -> Result<(f64, f64)> {
    let vals = scalar_values(raster, Quantity::Abs, component)?;
    let peak = vals.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    anyhow::ensure!(peak > 0.0, "raster has no positive values");
    let area = vals
        .iter()
        .zip(&raster.points)
        .filter_map(|(v, p)| v.filter(|&v| v >= 0.5 * peak).map(|_| p.area))
        .sum();
    Ok((peak, area))
}

fn metric(name: impl Into<String>, value: f64, bound: impl Into<String>, passed: bool) -> Metric {
    Metric { name: name.into(), value, bound: bound.into(), passed }
}

/// Generate one figure's artifacts in `out_dir` and evaluate its checks.
pub fn figure(id: FigureId, out_dir: &Path, seed: u64) -> Result<FigureReport> {
    let mut files = Vec::new();
    let mut metrics = Vec::new();
    let mut rasters = Vec::new();
    for p in presets(id, seed) {
        let (raster, f) = run_config(&p.config, &p.name, &p.assumed, out_dir)?;
        files.extend(f);
        rasters.push(raster);
    }
    match id {
        FigureId::Fig1 => {
            let (frac, r_peak) = top_decile_fraction(&rasters[0], 0)?;
            metrics.push(metric(format!("top-decile |E1| within [0.7, 1.3] r_peak (r_peak = {r_peak:.4})"), frac, ">= 0.9", frac >= 0.9));
        }
        FigureId::Fig2 => {
            let dev = mirror_deviation(&rasters[0])?;
            metrics.push(metric("mirror deviation of |E| (x2 -> -x2)", dev, "< 1e-12", dev < 1e-12));
            let BeamConfig::Sph { tau, lambda, rho, medium } = &presets(id, seed)[0].config.beam else {
                unreachable!("fig2 uses the spherical beam")
            };
            let bp = accelbeam_core::beams::SphBeamParams::new(*tau, *lambda, *rho, medium.build()?)?;
            for r in [0.5, 1.0, 2.0] {
                let tr = circle_trajectory(2.0, r, 181, 0.1, PI - 0.1);
                let prof = intensity_profile(&|x| Ok(accelbeam_core::beams::MaxwellField::fields(&bp, x)?.e), &tr)?;
                metrics.push(metric(
                    format!("|E| variation on circle x1 = 2, r = {r}"),
                    prof.max_rel_deviation,
                    "< 1e-12",
                    prof.max_rel_deviation < 1e-12,
                ));
            }
        }
        FigureId::Fig4 => {
            let (p0, a0) = peak_and_half_max_area(&rasters[0], None)?;
            let (p1, a1) = peak_and_half_max_area(&rasters[1], None)?;
            metrics.push(metric(format!("half-max area ratio ({a1:.4} / {a0:.4})"), a1 / a0, "< 1", a1 < a0));
            metrics.push(metric(format!("peak ratio ({p1:.4} / {p0:.4})"), p1 / p0, "> 1", p1 > p0));
        }
    }
    Ok(FigureReport { id, files, metrics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use accelbeam_core::{Complex3, Point3};

    #[test]
    fn seed_is_propagated() {
        for id in FigureId::ALL {
            assert!(presets(id, 42).iter().all(|p| p.config.seed == 42));
        }
        assert_eq!(presets(FigureId::Fig4, 0).len(), 2);
    }

    #[test]
    fn preset_configs_build() {
        for id in FigureId::ALL {
            for p in presets(id, 0) {
                p.config.beam.build().unwrap();
                p.config.grid.validate().unwrap();
                assert!(!p.assumed.is_empty());
            }
        }
    }

    #[test]
    fn decile_metric_on_a_ring() {
        let g = GridSpec::AnnulusSlice { normal: Axis::X1, offset: 0.0, r_inner: 0.0, r_outer: 3.0, n: 61 };
        let r = sample_grid(&g, &|x: Point3| {
            let rho = x.x2.hypot(x.x3);
            Ok(Complex3::real((-(rho - 2.0).powi(2) * 20.0).exp(), 0.0, 0.0))
        })
        .unwrap();
        let (frac, r_peak) = top_decile_fraction(&r, 0).unwrap();
        assert!((r_peak - 2.0).abs() < 0.1);
        assert_eq!(frac, 1.0);
    }

    #[test]
    fn half_max_area_of_a_box() {
        let g = GridSpec::Plane { normal: Axis::X3, offset: 0.0, u_range: [0.0, 1.0], v_range: [0.0, 1.0], nu: 11, nv: 11 };
        let r = sample_grid(&g, &|x: Point3| Ok(Complex3::real(if x.x1 < 0.25 { 2.0 } else { 0.5 }, 0.0, 0.0))).unwrap();
        let (peak, area) = peak_and_half_max_area(&r, Some(0)).unwrap();
        assert_eq!(peak, 2.0);
        assert!((area - 3.0 * 11.0 * 0.01).abs() < 1e-12);
    }
}
