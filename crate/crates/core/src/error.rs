use crate::field::Point3;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A point violates a domain constraint (axis exclusion, half-space, ...).
    #[error("domain violation: {constraint}")]
    Domain { constraint: &'static str },

    #[error("non-finite field value at ({}, {}, {})", at.x1, at.x2, at.x3)]
    NonFinite { at: Point3 },

    #[error("gradient of the weight vanishes (|grad| = {norm:e})")]
    DegenerateGradient { norm: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: &'static str },

    /// Re(mu) <= 0 or Re(gamma) <= 0.
    #[error("non-physical medium at ({}, {}, {})", at.x1, at.x2, at.x3)]
    Medium { at: Point3 },

    #[error("point too close to the inversion centre")]
    OriginSingularity,

    #[error("singular Jacobian")]
    SingularJacobian,

    /// The virtual point lies outside the annulus where the cutoff equals one.
    #[error("point outside the annulus R^2/L < |x| < L (|x| = {norm})")]
    OutsideAnnulus { norm: f64 },

    #[error("{failed} of {total} evaluations failed")]
    TooManyFailures { failed: usize, total: usize },
}

impl Error {
    /// Short, stable name of the violated constraint, used for reporting.
    pub fn constraint(&self) -> &'static str {
        match self {
            Error::Domain { constraint } => constraint,
            Error::NonFinite { .. } => "finite field value",
            Error::DegenerateGradient { .. } => "non-vanishing gradient",
            Error::Parameter { name, .. } => name,
            Error::Medium { .. } => "Re mu > 0 and Re gamma > 0",
            Error::OriginSingularity => "|x| > r_min",
            Error::SingularJacobian => "invertible Jacobian",
            Error::OutsideAnnulus { .. } => "R^2/L < |x~| < L",
            Error::TooManyFailures { .. } => "failure budget",
        }
    }
}
