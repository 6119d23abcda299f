//! Directional filtration sweeps and the resulting Euler characteristic
//! step functions.
//!
//! For a direction `ν` every vertex gets the height `h(v) = v·ν + R`,
//! every higher cell the maximum height of its vertices (lower-star
//! rule), and the curve `t ↦ χ(K_t^ν)` is swept exactly: sort the cells
//! by filtration value and accumulate `(-1)^dim`. Ties are absorbed into
//! a single jump so the recorded value at a breakpoint reflects every
//! cell with filtration up to and including it.

use crate::complex::CubicalComplex;
use crate::error::{Error, Result};
use crate::shape::{Direction, LevelGrid};

/// Piecewise-constant integer curve on `[0, T]`, right-continuous.
///
/// `values` has one more entry than `breakpoints`: `values[0]` is the
/// leading value on `[0, b_0)` (always 0 for a filtration sweep) and
/// `values[k+1]` the value on `[b_k, b_{k+1})`, the last one extending to
/// the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<i64>,
    horizon: f64,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<i64>, horizon: f64) -> Result<Self> {
        if !horizon.is_finite() || horizon <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "need one value per interval: {} breakpoints require {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if values[0] != 0 {
            return Err(Error::InvalidArgument(format!(
                "leading value must be 0, got {}",
                values[0]
            )));
        }
        for (k, &b) in breakpoints.iter().enumerate() {
            if !b.is_finite() || !(0.0..=horizon).contains(&b) {
                return Err(Error::InvalidArgument(format!(
                    "breakpoint {b} outside [0, {horizon}]"
                )));
            }
            if k > 0 && breakpoints[k - 1] >= b {
                return Err(Error::InvalidArgument(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self {
            breakpoints,
            values,
            horizon,
        })
    }

    /// Curve that is `value` on all of `[0, T]` (a breakpoint at 0 keeps
    /// the leading interval empty).
    pub fn constant(value: i64, horizon: f64) -> Result<Self> {
        if value == 0 {
            Self::new(Vec::new(), vec![0], horizon)
        } else {
            Self::new(vec![0.0], vec![0, value], horizon)
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn leading_value(&self) -> i64 {
        self.values[0]
    }

    pub fn trailing_value(&self) -> i64 {
        *self.values.last().unwrap()
    }

    /// Value at `t` under right-continuity (post-jump value at a
    /// breakpoint).
    pub fn value_at(&self, t: f64) -> i64 {
        let k = self.breakpoints.partition_point(|&b| b <= t);
        self.values[k]
    }

    /// Exact integral of the curve over `[0, t]`.
    pub fn integral_to(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut start = 0.0;
        for (k, &b) in self.breakpoints.iter().enumerate() {
            if b >= t {
                return acc + self.values[k] as f64 * (t - start);
            }
            acc += self.values[k] as f64 * (b - start);
            start = b;
        }
        acc + self.trailing_value() as f64 * (t - start)
    }

    /// Samples the curve at the grid levels.
    pub fn sample(&self, levels: &LevelGrid) -> Result<Vec<i64>> {
        self.check_levels(levels)?;
        Ok(levels.levels().iter().map(|&t| self.value_at(t)).collect())
    }

    /// Samples the running integral minus its linear trend,
    /// `I(t_q) - (t_q/T)·I(T)`, with both integrals exact.
    pub fn sect_sample(&self, levels: &LevelGrid) -> Result<Vec<f64>> {
        self.check_levels(levels)?;
        let rel = 1e-9 * self.horizon.max(1.0);
        if (levels.horizon() - self.horizon).abs() > rel {
            return Err(Error::IncompatibleGrids(format!(
                "level grid horizon {} does not match curve horizon {}",
                levels.horizon(),
                self.horizon
            )));
        }
        let total = self.integral_to(self.horizon);
        Ok(levels
            .levels()
            .iter()
            .map(|&t| self.integral_to(t) - t / self.horizon * total)
            .collect())
    }

    fn check_levels(&self, levels: &LevelGrid) -> Result<()> {
        for &t in levels.levels() {
            if !(0.0..=self.horizon).contains(&t) {
                return Err(Error::InvalidArgument(format!(
                    "level {t} outside [0, {}]",
                    self.horizon
                )));
            }
        }
        Ok(())
    }
}

/// Sweeps the sublevel filtration of the complex along one direction.
///
/// Breakpoints are the distinct cell filtration values; the value after a
/// breakpoint is the Euler characteristic of the sublevel complex there.
pub fn euler_curve(complex: &CubicalComplex, direction: &Direction) -> Result<StepFunction> {
    let radius = complex.frame().radius();
    let horizon = complex.frame().horizon();
    let tol = 1e-9 * horizon.max(1.0);

    let mut heights = Vec::with_capacity(complex.vertex_count());
    for idx in 0..complex.vertex_count() as u32 {
        let h = direction.dot(complex.vertex_position(idx)) + radius;
        if h < -tol || h > horizon + tol {
            return Err(Error::ShapeExceedsBall(format!(
                "vertex height {h} outside [0, {horizon}] along direction ({}, {})",
                direction.x(),
                direction.y()
            )));
        }
        heights.push(h.clamp(0.0, horizon));
    }

    let cell_count = complex.vertex_count() + complex.edge_count() + complex.face_count();
    let mut cells: Vec<(f64, i64)> = Vec::with_capacity(cell_count);
    for &h in &heights {
        cells.push((h, 1));
    }
    for &(a, b) in complex.edges() {
        cells.push((heights[a as usize].max(heights[b as usize]), -1));
    }
    for face in complex.faces() {
        let h = face
            .iter()
            .map(|&v| heights[v as usize])
            .fold(f64::NEG_INFINITY, f64::max);
        cells.push((h, 1));
    }
    cells.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut breakpoints = Vec::new();
    let mut values = vec![0i64];
    let mut chi = 0i64;
    let mut idx = 0;
    while idx < cells.len() {
        let filtration = cells[idx].0;
        let mut jump = 0i64;
        while idx < cells.len() && cells[idx].0 == filtration {
            jump += cells[idx].1;
            idx += 1;
        }
        chi += jump;
        breakpoints.push(filtration);
        values.push(chi);
    }

    StepFunction::new(breakpoints, values, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::CubicalComplex;
    use crate::shape::{Frame, GridShape};

    fn shape_from(rows: &[&str], radius: f64, pitch: f64) -> GridShape {
        let height = rows.len();
        let width = rows[0].len();
        let mut mask = vec![false; width * height];
        for (j, row) in rows.iter().enumerate() {
            for (i, c) in row.chars().enumerate() {
                mask[(height - 1 - j) * width + i] = c == '#';
            }
        }
        let frame = Frame::new(
            radius,
            pitch,
            (
                -(width as f64) * pitch / 2.0,
                -(height as f64) * pitch / 2.0,
            ),
        )
        .unwrap();
        GridShape::new(width, height, mask, frame).unwrap()
    }

    #[test]
    fn single_pixel_sweep_along_x() {
        // Unit pixel spanning [-0.5, 0.5]^2 in a ball of radius 4.
        let shape = shape_from(&["#"], 4.0, 1.0);
        let complex = CubicalComplex::from_shape(&shape);
        let curve = euler_curve(&complex, &Direction::new(1.0, 0.0).unwrap()).unwrap();

        // Left corners enter at h = -0.5 + 4, right corners at h = 0.5 + 4.
        assert_eq!(curve.breakpoints(), &[3.5, 4.5]);
        // 2 vertices - 1 edge = +1, then 2 vertices - 3 edges + 1 face = 0.
        assert_eq!(curve.values(), &[0, 1, 1]);
        assert_eq!(curve.leading_value(), 0);
        assert_eq!(curve.trailing_value(), complex.euler_characteristic());
    }

    #[test]
    fn beyond_all_breakpoints_gives_full_euler_characteristic() {
        let shape = shape_from(&["##", "#."], 8.0, 1.0);
        let complex = CubicalComplex::from_shape(&shape);
        for dir in [
            Direction::new(1.0, 0.0).unwrap(),
            Direction::from_angle(1.1),
        ] {
            let curve = euler_curve(&complex, &dir).unwrap();
            assert_eq!(curve.value_at(curve.horizon()), complex.euler_characteristic());
        }
    }

    #[test]
    fn ring_final_value_is_zero() {
        let shape = shape_from(&["###", "#.#", "###"], 8.0, 1.0);
        let complex = CubicalComplex::from_shape(&shape);
        let curve = euler_curve(&complex, &Direction::from_angle(0.3)).unwrap();
        assert_eq!(curve.trailing_value(), 0);
        assert_eq!(curve.trailing_value(), crate::oracle::euler_number(&shape));
    }

    #[test]
    fn sample_of_constant_zero_curve() {
        let curve = StepFunction::constant(0, 3.0).unwrap();
        let levels = LevelGrid::uniform(5, 3.0).unwrap();
        assert_eq!(curve.sample(&levels).unwrap(), vec![0; 5]);
    }

    #[test]
    fn sampling_is_right_continuous() {
        let curve = StepFunction::new(vec![1.0], vec![0, 1], 2.0).unwrap();
        let levels = LevelGrid::new(vec![0.5, 1.0, 1.5], 2.0).unwrap();
        assert_eq!(curve.sample(&levels).unwrap(), vec![0, 1, 1]);
    }

    #[test]
    fn sample_rejects_levels_beyond_horizon() {
        let curve = StepFunction::constant(0, 1.0).unwrap();
        let levels = LevelGrid::uniform(4, 2.0).unwrap();
        assert!(matches!(
            curve.sample(&levels),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sect_of_constant_curve_vanishes() {
        for c in [0, 1, 3, -2] {
            let curve = StepFunction::constant(c, 3.0).unwrap();
            let levels = LevelGrid::uniform(7, 3.0).unwrap();
            for v in curve.sect_sample(&levels).unwrap() {
                assert_eq!(v, 0.0, "constant {c}");
            }
        }
    }

    #[test]
    fn sect_of_late_step_at_midpoint() {
        // chi = 1 for tau >= T/2, else 0; at t = T/2 the value is -T/4.
        let horizon = 3.0;
        let curve = StepFunction::new(vec![horizon / 2.0], vec![0, 1], horizon).unwrap();
        let levels = LevelGrid::new(vec![horizon / 2.0, horizon], horizon).unwrap();
        let sect = curve.sect_sample(&levels).unwrap();
        assert!((sect[0] - (-horizon / 4.0)).abs() < 1e-15);
        assert_eq!(sect[1], 0.0);
    }

    #[test]
    fn sect_last_entry_zero_when_grid_ends_at_horizon() {
        let shape = shape_from(&["#.#", "###"], 8.0, 1.0);
        let complex = CubicalComplex::from_shape(&shape);
        let levels = LevelGrid::uniform(10, 16.0).unwrap();
        for angle in [0.0, 0.9, 2.4, 4.0] {
            let curve = euler_curve(&complex, &Direction::from_angle(angle)).unwrap();
            let sect = curve.sect_sample(&levels).unwrap();
            assert_eq!(*sect.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn integral_is_exact_for_hand_curve() {
        let curve = StepFunction::new(vec![1.0, 2.0], vec![0, 2, -1], 4.0).unwrap();
        assert_eq!(curve.integral_to(0.5), 0.0);
        assert_eq!(curve.integral_to(1.5), 1.0);
        assert_eq!(curve.integral_to(2.0), 2.0);
        assert_eq!(curve.integral_to(4.0), 2.0 - 2.0);
    }

    #[test]
    fn leading_value_must_be_zero() {
        assert!(StepFunction::new(vec![1.0], vec![1, 2], 2.0).is_err());
    }
}
