//! Grids, file formats, figure presets and verification suites for the
//! accelerating-beam core.

pub mod config;
pub mod export;
pub mod figures;
pub mod grid;
pub mod pixmap;
pub mod suites;
