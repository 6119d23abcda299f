//! Euler characteristic transforms of 2-D binary shapes and permutation
//! tests between shape collections.
//!
//! The pipeline: embed a pixel mask in a ball ([`shape`]), build its
//! cubical complex ([`complex`]), sweep directional sublevel filtrations
//! into exact step functions ([`sweep`]), sample those curves (raw or
//! smoothed) on direction/level grids ([`transform`]), pool pairwise
//! distances ([`metrics`]), and run a seeded permutation test ([`nhst`]).
//! [`simgen`] samples a two-arm elliptical-arc shape family and drives
//! rejection-rate experiments; [`io`] covers the on-disk formats.

pub mod complex;
pub mod error;
pub mod io;
pub mod metrics;
pub mod nhst;
pub mod oracle;
pub mod seeds;
pub mod shape;
pub mod simgen;
pub mod sweep;
pub mod transform;

pub use complex::CubicalComplex;
pub use error::{Error, Result};
pub use metrics::{ect_distance, sect_distance, within_group_loss, DistanceMatrix, GroupLabels};
pub use nhst::{ect_test, permutation_test, sect_test, Decision, TestConfig, TestResult};
pub use oracle::euler_number;
pub use shape::{Direction, DirectionGrid, Frame, GridShape, LevelGrid};
pub use sweep::{euler_curve, StepFunction};
pub use transform::{ect, ect_and_sect, sect, ECTMatrix, SECTMatrix};
