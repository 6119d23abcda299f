//! Embedded binary shapes and the direction/level grids shared by the
//! transform pipeline.
//!
//! A shape is a pixel mask together with a [`Frame`] that places it inside
//! the open ball `B(0, R)`. All filtration machinery downstream works on
//! the physical coordinates this module hands out.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Physical embedding of a pixel grid inside the ball `B(0, R)`.
///
/// Pixel `(i, j)` occupies the closed square with corners
/// `origin + (i, j)·pitch` and `origin + (i+1, j+1)·pitch`, so every cell
/// vertex sits on the lattice `origin + Z²·pitch` and vertex coordinates
/// are exact lattice evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    radius: f64,
    pitch: f64,
    origin: (f64, f64),
}

impl Frame {
    pub fn new(radius: f64, pitch: f64, origin: (f64, f64)) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        if !pitch.is_finite() || pitch <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "pixel pitch must be positive, got {pitch}"
            )));
        }
        if !origin.0.is_finite() || !origin.1.is_finite() {
            return Err(Error::InvalidArgument("origin must be finite".into()));
        }
        Ok(Self {
            radius,
            pitch,
            origin,
        })
    }

    /// Frame whose `resolution × resolution` pixel grid tiles `[-R, R]²`.
    pub fn centered(radius: f64, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::InvalidArgument("resolution must be positive".into()));
        }
        let pitch = 2.0 * radius / resolution as f64;
        Self::new(radius, pitch, (-radius, -radius))
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    /// Filtration horizon `T = 2R`.
    pub fn horizon(&self) -> f64 {
        2.0 * self.radius
    }

    /// Physical coordinates of lattice vertex `(i, j)`.
    pub fn vertex(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + i as f64 * self.pitch,
            self.origin.1 + j as f64 * self.pitch,
        )
    }

    /// Physical coordinates of the center of pixel `(i, j)`.
    pub fn pixel_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.origin.0 + (i as f64 + 0.5) * self.pitch,
            self.origin.1 + (j as f64 + 0.5) * self.pitch,
        )
    }
}

/// A binary pixel mask embedded in a [`Frame`].
///
/// The mask is stored row-major: pixel `(i, j)` is `mask[j * width + i]`,
/// with `i` indexing x and `j` indexing y. Construction rejects empty
/// masks and foreground that reaches the ball boundary, so a `GridShape`
/// is always a valid nonempty shape strictly inside `B(0, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridShape {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    frame: Frame,
}

impl GridShape {
    pub fn new(width: usize, height: usize, mask: Vec<bool>, frame: Frame) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(
                "grid dimensions must be positive".into(),
            ));
        }
        if mask.len() != width * height {
            return Err(Error::InvalidArgument(format!(
                "mask length {} does not match {width}x{height}",
                mask.len()
            )));
        }
        let shape = Self {
            width,
            height,
            mask,
            frame,
        };
        if !shape.mask.iter().any(|&b| b) {
            return Err(Error::EmptyShape);
        }
        shape.validate_in_ball()?;
        Ok(shape)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn pixel(&self, i: usize, j: usize) -> bool {
        self.mask[j * self.width + i]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Iterates over foreground pixel indices `(i, j)`.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let width = self.width;
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k % width, k / width))
    }

    pub fn foreground_count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Checks that every foreground pixel's four corner vertices lie
    /// strictly inside the ball (`‖v‖ < R`, boundary excluded).
    pub fn validate_in_ball(&self) -> Result<()> {
        let r = self.frame.radius;
        let r2 = r * r;
        for (i, j) in self.foreground() {
            for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let (x, y) = self.frame.vertex(i + di, j + dj);
                let d2 = x * x + y * y;
                if d2 >= r2 {
                    return Err(Error::ShapeExceedsBall(format!(
                        "corner ({x}, {y}) of pixel ({i}, {j}) lies at distance {} >= radius {r}",
                        d2.sqrt()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Unit vector on the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    x: f64,
    y: f64,
}

impl Direction {
    /// Tolerance on `|‖ν‖ - 1|` accepted at construction.
    pub const UNIT_NORM_TOL: f64 = 1e-12;

    pub fn new(x: f64, y: f64) -> Result<Self> {
        let norm = x.hypot(y);
        if !norm.is_finite() || (norm - 1.0).abs() > Self::UNIT_NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "direction ({x}, {y}) has norm {norm}, not a unit vector"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_angle(radians: f64) -> Self {
        Self {
            x: radians.cos(),
            y: radians.sin(),
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Angle in `(-π, π]` recovered from the components.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dot(&self, point: (f64, f64)) -> f64 {
        self.x * point.0 + self.y * point.1
    }

    pub fn opposite(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
        }
    }
}

/// Ordered family of directions `{ν_p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGrid {
    directions: Vec<Direction>,
}

impl DirectionGrid {
    pub fn new(directions: Vec<Direction>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidArgument(
                "direction grid needs at least one direction".into(),
            ));
        }
        Ok(Self { directions })
    }

    /// `count` directions evenly spaced over the full circle, starting at
    /// `(1, 0)`: `ν_p = (cos 2π(p-1)/count, sin 2π(p-1)/count)`.
    pub fn uniform(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument(
                "direction count must be positive".into(),
            ));
        }
        let directions = (0..count)
            .map(|p| Direction::from_angle(2.0 * PI * p as f64 / count as f64))
            .collect();
        Ok(Self { directions })
    }

    /// Directions at the given angles (radians), in order.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidArgument(
                "direction grid needs at least one angle".into(),
            ));
        }
        for &a in angles {
            if !a.is_finite() {
                return Err(Error::InvalidArgument(format!("angle {a} is not finite")));
            }
        }
        Ok(Self {
            directions: angles.iter().map(|&a| Direction::from_angle(a)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn iter(&self) -> impl Iterator<Item = &Direction> {
        self.directions.iter()
    }

    /// Componentwise agreement within `1e-12`. Used wherever two grids
    /// must be "identical" but one of them went through an angle
    /// round-trip (atan2 then cos/sin is not bit-exact).
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .directions
                .iter()
                .zip(&other.directions)
                .all(|(a, b)| (a.x - b.x).abs() <= 1e-12 && (a.y - b.y).abs() <= 1e-12)
    }
}

/// Strictly increasing sublevel thresholds `{t_q}` in `(0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelGrid {
    levels: Vec<f64>,
    horizon: f64,
}

impl LevelGrid {
    pub fn new(levels: Vec<f64>, horizon: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if levels.is_empty() {
            return Err(Error::InvalidArgument(
                "level grid needs at least one level".into(),
            ));
        }
        if !levels[0].is_finite() || levels[0] <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "levels must be positive, got {}",
                levels[0]
            )));
        }
        for pair in levels.windows(2) {
            if !pair[1].is_finite() || pair[1] <= pair[0] {
                return Err(Error::InvalidArgument(format!(
                    "levels must be strictly increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }
        if *levels.last().unwrap() > horizon {
            return Err(Error::InvalidArgument(format!(
                "last level {} exceeds horizon {horizon}",
                levels.last().unwrap()
            )));
        }
        Ok(Self { levels, horizon })
    }

    /// `count` evenly spaced levels `t_q = q·T/count`, ending at the
    /// horizon exactly.
    pub fn uniform(count: usize, horizon: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidArgument("level count must be positive".into()));
        }
        let levels = (1..=count)
            .map(|q| q as f64 * horizon / count as f64)
            .collect();
        Self::new(levels, horizon)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Exact agreement of levels and horizon.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.horizon == other.horizon && self.levels == other.levels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_directions_quarter_rotations() {
        let grid = DirectionGrid::uniform(4).unwrap();
        let expected = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (dir, (ex, ey)) in grid.iter().zip(expected) {
            assert!((dir.x() - ex).abs() < 1e-15, "{dir:?} vs ({ex}, {ey})");
            assert!((dir.y() - ey).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_directions_single() {
        let grid = DirectionGrid::uniform(1).unwrap();
        assert_eq!(grid.len(), 1);
        assert_eq!(grid.directions()[0].x(), 1.0);
        assert_eq!(grid.directions()[0].y(), 0.0);
    }

    #[test]
    fn uniform_directions_72_evenly_spaced_unit_vectors() {
        let grid = DirectionGrid::uniform(72).unwrap();
        assert_eq!(grid.len(), 72);
        for (p, dir) in grid.iter().enumerate() {
            let norm = dir.x().hypot(dir.y());
            assert!((norm - 1.0).abs() < 1e-12);
            let expected = 2.0 * PI * p as f64 / 72.0;
            let angle = dir.angle().rem_euclid(2.0 * PI);
            assert!((angle - expected).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn uniform_directions_zero_rejected() {
        assert!(matches!(
            DirectionGrid::uniform(0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn half_circle_angles() {
        let angles: Vec<f64> = (0..4).map(|p| p as f64 * PI / 4.0).collect();
        let grid = DirectionGrid::from_angles(&angles).unwrap();
        assert_eq!(grid.len(), 4);
        assert!((grid.directions()[3].x() + (0.5f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn uniform_levels_paper_settings() {
        let grid = LevelGrid::uniform(50, 3.0).unwrap();
        for (q, &t) in grid.levels().iter().enumerate() {
            let expected = (q + 1) as f64 * 3.0 / 50.0;
            assert_eq!(t, expected);
            assert!((t - 0.06 * (q + 1) as f64).abs() < 1e-12);
        }
        assert!((grid.levels()[49] - 3.0).abs() < 1e-12);
        assert_eq!(*grid.levels().last().unwrap(), 3.0);
    }

    #[test]
    fn uniform_levels_single() {
        let grid = LevelGrid::uniform(1, 2.0).unwrap();
        assert_eq!(grid.levels(), &[2.0]);
    }

    #[test]
    fn uniform_levels_hundred() {
        let grid = LevelGrid::uniform(100, 3.0).unwrap();
        assert_eq!(grid.len(), 100);
        assert!((grid.levels()[0] - 0.03).abs() < 1e-15);
        assert_eq!(*grid.levels().last().unwrap(), 3.0);
    }

    #[test]
    fn uniform_levels_rejects_bad_inputs() {
        assert!(LevelGrid::uniform(0, 1.0).is_err());
        assert!(LevelGrid::uniform(10, 0.0).is_err());
        assert!(LevelGrid::uniform(10, -1.0).is_err());
    }

    #[test]
    fn single_centered_pixel_in_large_ball() {
        let frame = Frame::new(10.0, 1.0, (-0.5, -0.5)).unwrap();
        let shape = GridShape::new(1, 1, vec![true], frame).unwrap();
        assert!(shape.validate_in_ball().is_ok());
    }

    #[test]
    fn corner_exactly_on_boundary_rejected() {
        // Corner (3, 4) sits at distance exactly 5 from the origin.
        let frame = Frame::new(5.0, 1.0, (2.0, 3.0)).unwrap();
        let err = GridShape::new(1, 1, vec![true], frame).unwrap_err();
        assert!(matches!(err, Error::ShapeExceedsBall(_)));
    }

    #[test]
    fn empty_mask_rejected() {
        let frame = Frame::new(5.0, 1.0, (0.0, 0.0)).unwrap();
        assert!(matches!(
            GridShape::new(2, 2, vec![false; 4], frame),
            Err(Error::EmptyShape)
        ));
    }

    #[test]
    fn corner_coordinates_are_exact_lattice_evaluations() {
        let frame = Frame::new(8.0, 0.25, (-2.0, -3.0)).unwrap();
        for (i, j) in [(0usize, 0usize), (3, 7), (11, 2)] {
            let (x, y) = frame.vertex(i, j);
            assert_eq!(x, -2.0 + i as f64 * 0.25);
            assert_eq!(y, -3.0 + j as f64 * 0.25);
        }
    }

    #[test]
    fn direction_rejects_non_unit() {
        assert!(Direction::new(1.0, 1.0).is_err());
        assert!(Direction::new(0.5, 0.0).is_err());
        assert!(Direction::new(1.0, 0.0).is_ok());
    }
}
