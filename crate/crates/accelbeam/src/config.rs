//! Run configuration (JSON) and the field it selects.

use std::path::Path;
use std::sync::Arc;

use accelbeam_core::beams::{CylBeamParams, MaxwellField, PlaneWave, SphBeamParams};
use accelbeam_core::dirac::{MediumProfile, Profile};
use accelbeam_core::kelvin::{virtual_beam, KelvinMap, PhysicalBeam, VirtualBeamParams, DEFAULT_L_OVER_R};
use accelbeam_core::{C64, Complex3, Point3};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::pixmap::{Normalization, Quantity};

fn one() -> f64 {
    1.0
}

fn default_l_over_r() -> f64 {
    DEFAULT_L_OVER_R
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub rel_mu: f64,
    pub rel_eps: f64,
    pub radius: f64,
}

/// Background medium; an optional radial bump perturbs `mu` and `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    #[serde(default = "one")]
    pub mu0: f64,
    #[serde(default = "one")]
    pub eps0: f64,
    #[serde(default)]
    pub sigma0: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump: Option<BumpConfig>,
}

impl Default for MediumConfig {
    fn default() -> Self {
        MediumConfig { mu0: 1.0, eps0: 1.0, sigma0: 0.0, omega: 1.0, bump: None }
    }
}

impl MediumConfig {
    pub fn build(&self) -> Result<MediumProfile> {
        Ok(match &self.bump {
            None => MediumProfile::constant(self.mu0, self.eps0, self.sigma0, self.omega)?,
            Some(b) => {
                let g0 = C64::new(self.eps0, self.sigma0 / self.omega);
                MediumProfile::new(
                    Profile::Bump { background: C64::new(self.mu0, 0.0), rel_amplitude: b.rel_mu, radius: b.radius },
                    Profile::Bump { background: g0, rel_amplitude: b.rel_eps, radius: b.radius },
                    self.mu0,
                    self.eps0,
                    self.sigma0,
                    self.omega,
                )?
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BeamConfig {
    /// Cylindrical accelerating beam, `chi = -e^{i rho theta}`.
    Cyl {
        tau: f64,
        lambda: f64,
        rho: f64,
        #[serde(default)]
        medium: MediumConfig,
    },
    /// Spherical-phase beam.
    Sph {
        tau: f64,
        lambda: f64,
        rho: f64,
        #[serde(default)]
        medium: MediumConfig,
    },
    /// Kelvin-transformed beam; `b` defaults to `a`.
    Kelvin {
        tau: f64,
        rho: f64,
        a: [f64; 3],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<[f64; 3]>,
        radius: f64,
        #[serde(default = "default_l_over_r")]
        l_over_r: f64,
        #[serde(default)]
        medium: MediumConfig,
    },
    /// Exact plane wave `e0 exp(i kappa dir . x)`; `e0` as `[re, im]` pairs.
    Plane {
        dir: [f64; 3],
        e0: [[f64; 2]; 3],
        #[serde(default)]
        medium: MediumConfig,
    },
}

impl BeamConfig {
    pub fn name(&self) -> &'static str {
        match self {
            BeamConfig::Cyl { .. } => "cyl",
            BeamConfig::Sph { .. } => "sph",
            BeamConfig::Kelvin { .. } => "kelvin",
            BeamConfig::Plane { .. } => "plane",
        }
    }

    pub fn medium_mut(&mut self) -> &mut MediumConfig {
        match self {
            BeamConfig::Cyl { medium, .. }
            | BeamConfig::Sph { medium, .. }
            | BeamConfig::Kelvin { medium, .. }
            | BeamConfig::Plane { medium, .. } => medium,
        }
    }

    pub fn set_tau(&mut self, t: f64) -> Result<()> {
        match self {
            BeamConfig::Cyl { tau, .. } | BeamConfig::Sph { tau, .. } | BeamConfig::Kelvin { tau, .. } => *tau = t,
            BeamConfig::Plane { .. } => bail!("the plane-wave beam has no tau"),
        }
        Ok(())
    }

    pub fn set_lambda(&mut self, l: f64) -> Result<()> {
        match self {
            BeamConfig::Cyl { lambda, .. } | BeamConfig::Sph { lambda, .. } => *lambda = l,
            _ => bail!("beam `{}` has no lambda", self.name()),
        }
        Ok(())
    }

    pub fn set_rho(&mut self, r: f64) -> Result<()> {
        match self {
            BeamConfig::Cyl { rho, .. } | BeamConfig::Sph { rho, .. } | BeamConfig::Kelvin { rho, .. } => *rho = r,
            BeamConfig::Plane { .. } => bail!("the plane-wave beam has no rho"),
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Beam> {
        Ok(match self {
            BeamConfig::Cyl { tau, lambda, rho, medium } => {
                Beam::Cyl(CylBeamParams::new(*tau, *lambda, *rho, medium.build()?)?)
            }
            BeamConfig::Sph { tau, lambda, rho, medium } => {
                Beam::Sph(SphBeamParams::new(*tau, *lambda, *rho, medium.build()?)?)
            }
            BeamConfig::Kelvin { tau, rho, a, b, radius, l_over_r, medium } => {
                if medium.bump.is_some() {
                    bail!("the Kelvin beam lives in a homogeneous background; remove `bump`");
                }
                let mut vp = VirtualBeamParams::new(*tau, *rho, Point3::from_array(*a), Point3::from_array(b.unwrap_or(*a)))?
                    .with_medium(medium.mu0, medium.eps0, medium.sigma0, medium.omega)?;
                vp.l_over_r = *l_over_r;
                let vp = vp.validated()?;
                Beam::Kelvin(PhysicalBeam { params: vp, map: KelvinMap::new(*radius)? })
            }
            BeamConfig::Plane { dir, e0, medium } => {
                if medium.bump.is_some() {
                    bail!("the plane wave needs a homogeneous medium; remove `bump`");
                }
                let e0 = Complex3::new(
                    C64::new(e0[0][0], e0[0][1]),
                    C64::new(e0[1][0], e0[1][1]),
                    C64::new(e0[2][0], e0[2][1]),
                );
                Beam::Plane(PlaneWave::new(
                    Point3::from_array(*dir),
                    e0,
                    C64::new(medium.mu0, 0.0),
                    C64::new(medium.eps0, medium.sigma0 / medium.omega),
                    medium.omega,
                )?)
            }
        })
    }
}

/// A constructed beam.
#[derive(Debug, Clone)]
pub enum Beam {
    Cyl(CylBeamParams),
    Sph(SphBeamParams),
    Kelvin(PhysicalBeam),
    Plane(PlaneWave),
}

impl Beam {
    pub fn as_maxwell(&self) -> &dyn MaxwellField {
        match self {
            Beam::Cyl(b) => b,
            Beam::Sph(b) => b,
            Beam::Kelvin(b) => b,
            Beam::Plane(b) => b,
        }
    }
}

/// Which vector field a run samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FieldSelect {
    E,
    H,
    /// Kelvin beam only: `R^3/|x|^3 e~(K x)`, the physical field without the
    /// reflection and the `-i tau eps0^(-1/2)` factor.
    ETildeScaled,
    HTildeScaled,
}

pub type FieldFn = Arc<dyn Fn(Point3) -> accelbeam_core::Result<Complex3> + Send + Sync>;

pub fn field_fn(beam: &Beam, select: FieldSelect) -> Result<FieldFn> {
    let b = beam.clone();
    Ok(match select {
        FieldSelect::E => Arc::new(move |x| Ok(b.as_maxwell().fields(x)?.e)),
        FieldSelect::H => Arc::new(move |x| Ok(b.as_maxwell().fields(x)?.h)),
        FieldSelect::ETildeScaled | FieldSelect::HTildeScaled => {
            let Beam::Kelvin(pb) = b else {
                bail!("field `e_tilde_scaled`/`h_tilde_scaled` needs the kelvin beam");
            };
            let take_e = select == FieldSelect::ETildeScaled;
            Arc::new(move |x: Point3| {
                let y = pb.map.map(x)?;
                let (e, h) = virtual_beam(&pb.params, &pb.map, y)?;
                let s = (pb.map.radius() / x.norm()).powi(3);
                Ok(if take_e { e } else { h } * s)
            })
        }
    })
}

fn default_quantities() -> Vec<Quantity> {
    vec![Quantity::Abs]
}

fn default_component() -> Option<usize> {
    Some(0)
}

fn default_normalization() -> Normalization {
    Normalization::Linear
}

fn default_field() -> FieldSelect {
    FieldSelect::E
}

/// Everything an `eval` run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub beam: BeamConfig,
    pub grid: GridSpec,
    #[serde(default = "default_field")]
    pub field: FieldSelect,
    /// Component 0, 1 or 2; `null` takes the vector norm (abs/abs2 only).
    #[serde(default = "default_component")]
    pub component: Option<usize>,
    #[serde(default = "default_quantities")]
    pub quantities: Vec<Quantity>,
    #[serde(default = "default_normalization")]
    pub normalization: Normalization,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid configuration")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
