//! Binary PPM (P6) heatmaps with a plain-text sidecar of the colour bounds.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::grid::FieldRaster;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Re,
    Im,
    Abs,
    Abs2,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Re => "re",
            Quantity::Im => "im",
            Quantity::Abs => "abs",
            Quantity::Abs2 => "abs2",
        }
    }

    pub fn is_signed(self) -> bool {
        matches!(self, Quantity::Re | Quantity::Im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Linear,
    Log,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RenderError {
    #[error("raster has no finite values")]
    AllMissing,
    #[error("quantity `{0}` needs a single component")]
    NeedsComponent(&'static str),
    #[error("component index {0} out of range (0..=2)")]
    BadComponent(usize),
}

/// Scalar per node; `component = None` takes the vector norm (abs/abs2 only).
pub fn scalar_values(raster: &FieldRaster, quantity: Quantity, component: Option<usize>) -> Result<Vec<Option<f64>>, RenderError> {
    if let Some(c) = component {
        if c > 2 {
            return Err(RenderError::BadComponent(c));
        }
    } else if quantity.is_signed() {
        return Err(RenderError::NeedsComponent(quantity.name()));
    }
    Ok(raster
        .values
        .iter()
        .map(|v| {
            v.map(|v| match (component, quantity) {
                (Some(c), Quantity::Re) => v.component(c).re,
                (Some(c), Quantity::Im) => v.component(c).im,
                (Some(c), Quantity::Abs) => v.component(c).norm(),
                (Some(c), Quantity::Abs2) => v.component(c).norm_sqr(),
                (None, Quantity::Abs) => v.norm(),
                (None, _) => v.norm_sqr(),
            })
        })
        .collect())
}

const VIRIDIS: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 123.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

const COOLWARM: [[f64; 3]; 5] = [
    [59.0, 76.0, 192.0],
    [141.0, 176.0, 254.0],
    [221.0, 221.0, 221.0],
    [244.0, 154.0, 123.0],
    [180.0, 4.0, 38.0],
];

pub const MASK_RGB: [u8; 3] = [128, 128, 128];

fn lookup(table: &[[f64; 3]], t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0) * (table.len() - 1) as f64;
    let i = (t.floor() as usize).min(table.len() - 2);
    let f = t - i as f64;
    core::array::from_fn(|k| (table[i][k] + (table[i + 1][k] - table[i][k]) * f).round() as u8)
}

/// Colour bounds and the image bytes (full P6 file).
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub width: usize,
    pub height: usize,
    pub lo: f64,
    pub hi: f64,
    pub quantity: Quantity,
    pub normalization: Normalization,
    pub bytes: Vec<u8>,
}

/// Map scalar values to colours. Signed quantities use a diverging map on
/// `[-M, M]` (symmetric log for `Log`); magnitudes use a sequential map on
/// `[min, max]` (`[max 1e-6, max]` in decades for `Log`).
pub fn render(
    raster: &FieldRaster,
    quantity: Quantity,
    component: Option<usize>,
    normalization: Normalization,
) -> Result<Rendered, RenderError> {
    let vals = scalar_values(raster, quantity, component)?;
    let finite: Vec<f64> = vals.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return Err(RenderError::AllMissing);
    }
    let max = finite.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min = finite.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let signed = quantity.is_signed();
    let (lo, hi) = match (signed, normalization) {
        (true, _) => {
            let m = max.abs().max(min.abs());
            (-m, m)
        }
        (false, Normalization::Linear) => (min, max),
        (false, Normalization::Log) => ((max * 1e-6).max(min), max),
    };
    let to_t = |v: f64| -> f64 {
        if hi <= lo {
            return 0.5;
        }
        match (signed, normalization) {
            (true, Normalization::Linear) => 0.5 + 0.5 * v / hi,
            (true, Normalization::Log) => {
                let thr = hi * 1e-3;
                let s = |x: f64| x.signum() * (1.0 + x.abs() / thr).log10();
                0.5 + 0.5 * s(v) / s(hi)
            }
            (false, Normalization::Linear) => (v - lo) / (hi - lo),
            (false, Normalization::Log) => {
                if v <= lo {
                    0.0
                } else {
                    (v / lo).log10() / (hi / lo).log10()
                }
            }
        }
    };
    let (w, h) = (raster.nu, raster.nv);
    let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
    bytes.reserve(w * h * 3);
    // Top row is the largest v.
    for row in (0..h).rev() {
        for col in 0..w {
            let rgb = match vals[row * w + col] {
                Some(v) if v.is_finite() => {
                    if signed {
                        lookup(&COOLWARM, to_t(v))
                    } else {
                        lookup(&VIRIDIS, to_t(v))
                    }
                }
                _ => MASK_RGB,
            };
            bytes.extend_from_slice(&rgb);
        }
    }
    Ok(Rendered { width: w, height: h, lo, hi, quantity, normalization, bytes })
}

pub fn sidecar_path(ppm: &Path) -> PathBuf {
    ppm.with_extension("txt")
}

/// Write the image and its sidecar: bounds, rendering choices, any
/// `assumed:` notes, and the raster provenance as one JSON line.
pub fn write_pixmap(r: &Rendered, raster: &FieldRaster, component: Option<usize>, path: &Path, assumed: &[String]) -> Result<()> {
    std::fs::write(path, &r.bytes).with_context(|| format!("cannot write {}", path.display()))?;
    let mut side = String::new();
    side.push_str(&format!("image = {}\n", path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()));
    side.push_str(&format!("size = {} x {}\n", r.width, r.height));
    side.push_str(&format!("quantity = {}\n", r.quantity.name()));
    side.push_str(&format!(
        "component = {}\n",
        component.map_or("norm".to_string(), |c| c.to_string())
    ));
    side.push_str(&format!(
        "normalization = {}\n",
        match r.normalization {
            Normalization::Linear => "linear",
            Normalization::Log => "log",
        }
    ));
    side.push_str(&format!("colormap = {}\n", if r.quantity.is_signed() { "coolwarm" } else { "viridis" }));
    side.push_str(&format!("lo = {:.16e}\nhi = {:.16e}\n", r.lo, r.hi));
    side.push_str(&format!("masked = {}\nmissing = {}\n", raster.masked, raster.missing));
    for a in assumed {
        side.push_str(&format!("assumed: {a}\n"));
    }
    side.push_str(&format!("provenance = {}\n", serde_json::to_string(&raster.meta)?));
    let sp = sidecar_path(path);
    std::fs::write(&sp, side).with_context(|| format!("cannot write {}", sp.display()))?;
    Ok(())
}
