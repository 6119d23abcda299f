//! Discretized transforms of a shape: Euler characteristic curves and
//! their smoothed counterparts evaluated on direction/level grids.

use crate::complex::CubicalComplex;
use crate::error::{Error, Result};
use crate::shape::{DirectionGrid, GridShape, LevelGrid};
use crate::sweep::euler_curve;

/// Γ×Δ integer matrix of sampled Euler characteristic curves, one row per
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ECTMatrix {
    values: Vec<i64>,
    directions: DirectionGrid,
    levels: LevelGrid,
}

/// Γ×Δ real matrix of smoothed curves (running integral minus linear
/// trend), one row per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct SECTMatrix {
    values: Vec<f64>,
    directions: DirectionGrid,
    levels: LevelGrid,
}

macro_rules! matrix_impl {
    ($name:ident, $elem:ty) => {
        impl $name {
            pub fn new(
                values: Vec<$elem>,
                directions: DirectionGrid,
                levels: LevelGrid,
            ) -> Result<Self> {
                if values.len() != directions.len() * levels.len() {
                    return Err(Error::InvalidArgument(format!(
                        "matrix has {} values for a {}x{} grid",
                        values.len(),
                        directions.len(),
                        levels.len()
                    )));
                }
                Ok(Self {
                    values,
                    directions,
                    levels,
                })
            }

            pub fn num_directions(&self) -> usize {
                self.directions.len()
            }

            pub fn num_levels(&self) -> usize {
                self.levels.len()
            }

            pub fn direction_grid(&self) -> &DirectionGrid {
                &self.directions
            }

            pub fn level_grid(&self) -> &LevelGrid {
                &self.levels
            }

            pub fn value(&self, p: usize, q: usize) -> $elem {
                self.values[p * self.levels.len() + q]
            }

            /// Row `p`: the curve for direction `ν_p` across all levels.
            pub fn row(&self, p: usize) -> &[$elem] {
                let width = self.levels.len();
                &self.values[p * width..(p + 1) * width]
            }

            pub fn values(&self) -> &[$elem] {
                &self.values
            }

            /// True when the two matrices live on the same grids
            /// (componentwise within 1e-12).
            pub fn same_grids(&self, other: &Self) -> bool {
                self.directions.approx_eq(&other.directions)
                    && self.levels.approx_eq(&other.levels)
            }
        }
    };
}

matrix_impl!(ECTMatrix, i64);
matrix_impl!(SECTMatrix, f64);

/// Euler characteristic transform of a shape on the given grids.
pub fn ect(shape: &GridShape, directions: &DirectionGrid, levels: &LevelGrid) -> Result<ECTMatrix> {
    let complex = CubicalComplex::from_shape(shape);
    let mut values = Vec::with_capacity(directions.len() * levels.len());
    for dir in directions.iter() {
        values.extend(euler_curve(&complex, dir)?.sample(levels)?);
    }
    ECTMatrix::new(values, directions.clone(), levels.clone())
}

/// Smooth Euler characteristic transform of a shape on the given grids.
pub fn sect(
    shape: &GridShape,
    directions: &DirectionGrid,
    levels: &LevelGrid,
) -> Result<SECTMatrix> {
    let complex = CubicalComplex::from_shape(shape);
    let mut values = Vec::with_capacity(directions.len() * levels.len());
    for dir in directions.iter() {
        values.extend(euler_curve(&complex, dir)?.sect_sample(levels)?);
    }
    SECTMatrix::new(values, directions.clone(), levels.clone())
}

/// Both transforms from a single sweep per direction.
pub fn ect_and_sect(
    shape: &GridShape,
    directions: &DirectionGrid,
    levels: &LevelGrid,
) -> Result<(ECTMatrix, SECTMatrix)> {
    let complex = CubicalComplex::from_shape(shape);
    let mut euler_values = Vec::with_capacity(directions.len() * levels.len());
    let mut smooth_values = Vec::with_capacity(directions.len() * levels.len());
    for dir in directions.iter() {
        let curve = euler_curve(&complex, dir)?;
        euler_values.extend(curve.sample(levels)?);
        smooth_values.extend(curve.sect_sample(levels)?);
    }
    Ok((
        ECTMatrix::new(euler_values, directions.clone(), levels.clone())?,
        SECTMatrix::new(smooth_values, directions.clone(), levels.clone())?,
    ))
}
