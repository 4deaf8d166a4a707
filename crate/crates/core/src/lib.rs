//! Accelerating, near-nondiffracting electromagnetic beams built from complex
//! geometrical optics (CGO) solutions of the time-harmonic Maxwell system.
//!
//! The crate is `no_std` (it needs `alloc` only for sample sets and scaling
//! tables). Everything is a pure function of its inputs; fields are passed
//! around as closures `Fn(Point3) -> Result<T>` and differentiated with
//! second-order central differences.
//!
//! Layout:
//! - [`field`]: complex 3- and 8-vectors, Cartesian/cylindrical points,
//!   finite-difference schemes.
//! - [`diff`]: gradient, divergence, curl, Laplacian, Hessian and the
//!   cylindrical gradient.
//! - [`lcw`]: limiting Carleman weights, eikonal/LCW/transport checks.
//! - [`dirac`]: the 8x8 Dirac symbol, the potential `W`, the `b`-scalars and
//!   the locality test for the factorization.
//! - [`beams`]: leading-order beam evaluators (cylindrical, spherical, Hertz TM).
//! - [`kelvin`]: sphere inversion, push-forward and the Kelvin-transformed beam.
//! - [`verify`]: Maxwell residuals, tau-scaling studies, intensity profiles.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod beams;
pub mod diff;
pub mod dirac;
mod error;
pub mod field;
pub mod kelvin;
pub mod lcw;
pub mod verify;

pub use error::{Error, Result};
pub use field::{C64, Complex3, Complex8, CylPoint, FdScheme, Point3, R_MIN};
