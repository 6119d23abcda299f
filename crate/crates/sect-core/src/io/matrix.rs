//! Transform matrices as CSV.
//!
//! Schema: the header row starts with a corner cell `<mode>:T=<horizon>`
//! (`mode` is `ect` or `sect`) followed by the level values `t_q`. Each
//! data row starts with the direction angle in radians followed by the
//! Γ-th curve's sampled values. Numbers are printed in shortest
//! round-trip form, so a written file parses back to bit-identical
//! values.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::shape::{DirectionGrid, LevelGrid};
use crate::transform::{ECTMatrix, SECTMatrix};

/// A parsed matrix file, either mode.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFile {
    Ect(ECTMatrix),
    Sect(SECTMatrix),
}

impl MatrixFile {
    pub fn mode(&self) -> &'static str {
        match self {
            MatrixFile::Ect(_) => "ect",
            MatrixFile::Sect(_) => "sect",
        }
    }

    pub fn direction_grid(&self) -> &DirectionGrid {
        match self {
            MatrixFile::Ect(m) => m.direction_grid(),
            MatrixFile::Sect(m) => m.direction_grid(),
        }
    }

    pub fn level_grid(&self) -> &LevelGrid {
        match self {
            MatrixFile::Ect(m) => m.level_grid(),
            MatrixFile::Sect(m) => m.level_grid(),
        }
    }
}

fn parse_finite(token: &str, line: usize, what: &str) -> Result<f64> {
    let value: f64 = token
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("{what} `{token}` is not a number")))?;
    if !value.is_finite() {
        return Err(Error::parse(line, format!("{what} `{token}` is not finite")));
    }
    Ok(value)
}

fn parse_int(token: &str, line: usize) -> Result<i64> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("value `{token}` is not an integer")))
}

/// Parses a matrix CSV from text.
pub fn parse_matrix_csv(text: &str) -> Result<MatrixFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line))
        .filter(|(_, line)| !line.trim().is_empty());

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty matrix file"))?;
    let mut cells = header.split(',');
    let corner = cells.next().unwrap_or("").trim();
    let (mode, horizon_token) = corner.split_once(":T=").ok_or_else(|| {
        Error::parse(1, "corner cell must be `ect:T=<horizon>` or `sect:T=<horizon>`")
    })?;
    if mode != "ect" && mode != "sect" {
        return Err(Error::parse(1, format!("unknown mode `{mode}`")));
    }
    let horizon = parse_finite(horizon_token, 1, "horizon")?;
    let levels: Vec<f64> = cells
        .map(|c| parse_finite(c, 1, "level"))
        .collect::<Result<_>>()?;
    let level_grid = LevelGrid::new(levels, horizon).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::parse(1, msg),
        other => other,
    })?;
    let width = level_grid.len();

    let mut angles = Vec::new();
    let mut ect_values: Vec<i64> = Vec::new();
    let mut sect_values: Vec<f64> = Vec::new();
    for (line_no, line) in lines {
        let mut cells = line.split(',');
        let angle = parse_finite(cells.next().unwrap_or(""), line_no, "direction angle")?;
        angles.push(angle);
        let mut count = 0usize;
        for cell in cells {
            count += 1;
            if count > width {
                break;
            }
            if mode == "ect" {
                ect_values.push(parse_int(cell, line_no)?);
            } else {
                sect_values.push(parse_finite(cell, line_no, "value")?);
            }
        }
        if count != width {
            return Err(Error::parse(
                line_no,
                format!("row has {count} values, header declares {width} levels"),
            ));
        }
    }
    if angles.is_empty() {
        return Err(Error::parse(1, "matrix file has no direction rows"));
    }
    let directions = DirectionGrid::from_angles(&angles).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::parse(1, msg),
        other => other,
    })?;

    if mode == "ect" {
        Ok(MatrixFile::Ect(ECTMatrix::new(
            ect_values, directions, level_grid,
        )?))
    } else {
        Ok(MatrixFile::Sect(SECTMatrix::new(
            sect_values, directions, level_grid,
        )?))
    }
}

fn push_header(out: &mut String, mode: &str, levels: &LevelGrid) {
    let _ = write!(out, "{mode}:T={}", levels.horizon());
    for &t in levels.levels() {
        let _ = write!(out, ",{t}");
    }
    out.push('\n');
}

/// Serializes an integer-curve matrix.
pub fn format_ect_csv(matrix: &ECTMatrix) -> String {
    let mut out = String::new();
    push_header(&mut out, "ect", matrix.level_grid());
    for (p, dir) in matrix.direction_grid().iter().enumerate() {
        let _ = write!(out, "{}", dir.angle());
        for &v in matrix.row(p) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

/// Serializes a smoothed-curve matrix.
pub fn format_sect_csv(matrix: &SECTMatrix) -> String {
    let mut out = String::new();
    push_header(&mut out, "sect", matrix.level_grid());
    for (p, dir) in matrix.direction_grid().iter().enumerate() {
        let _ = write!(out, "{}", dir.angle());
        for &v in matrix.row(p) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn format_matrix_csv(matrix: &MatrixFile) -> String {
    match matrix {
        MatrixFile::Ect(m) => format_ect_csv(m),
        MatrixFile::Sect(m) => format_sect_csv(m),
    }
}

/// Reads and parses a matrix file, attaching the path to any error.
pub fn read_matrix_file(path: &Path) -> Result<MatrixFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(e).in_file(path))?;
    parse_matrix_csv(&text).map_err(|e| e.in_file(path))
}

/// Writes a matrix file atomically.
pub fn write_matrix_file(path: &Path, matrix: &MatrixFile) -> Result<()> {
    super::write_atomic(path, format_matrix_csv(matrix).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{DirectionGrid, LevelGrid};

    fn sample_sect() -> SECTMatrix {
        let dirs = DirectionGrid::uniform(3).unwrap();
        let levels = LevelGrid::uniform(4, 3.0).unwrap();
        let values: Vec<f64> = (0..12).map(|k| (k as f64) * 0.7 - 3.1).collect();
        SECTMatrix::new(values, dirs, levels).unwrap()
    }

    #[test]
    fn sect_round_trip_is_exact() {
        let matrix = sample_sect();
        let text = format_sect_csv(&matrix);
        let parsed = match parse_matrix_csv(&text).unwrap() {
            MatrixFile::Sect(m) => m,
            _ => panic!("mode flipped"),
        };
        assert_eq!(parsed.values(), matrix.values());
        assert_eq!(parsed.level_grid().levels(), matrix.level_grid().levels());
        assert_eq!(parsed.level_grid().horizon(), matrix.level_grid().horizon());
        assert!(parsed.direction_grid().approx_eq(matrix.direction_grid()));
        // Angles round-trip exactly even though components may not.
        for (a, b) in parsed
            .direction_grid()
            .iter()
            .zip(matrix.direction_grid().iter())
        {
            assert_eq!(a.angle(), b.angle());
        }
    }

    #[test]
    fn ect_round_trip_is_exact() {
        let dirs = DirectionGrid::uniform(2).unwrap();
        let levels = LevelGrid::uniform(3, 8.0).unwrap();
        let matrix = ECTMatrix::new(vec![0, 1, -2, 5, 0, 3], dirs, levels).unwrap();
        let text = format_ect_csv(&matrix);
        let parsed = match parse_matrix_csv(&text).unwrap() {
            MatrixFile::Ect(m) => m,
            _ => panic!("mode flipped"),
        };
        assert_eq!(parsed.values(), matrix.values());
    }

    #[test]
    fn malformed_inputs_are_parse_errors() {
        for (text, needle) in [
            ("", "empty"),
            ("bogus,1,2\n0,1,2\n", "corner cell"),
            ("sect:T=abc,1\n0,1\n", "not a number"),
            ("sect:T=3,1,2\n0,1\n", "row has 1 values"),
            ("sect:T=3,1,2\n0,1,2,3\n", "row has"),
            ("sect:T=3,2,1\n0,1,2\n", "strictly increasing"),
            ("ect:T=3,1,2\n0,1.5,2\n", "not an integer"),
            ("sect:T=3,1,2\n", "no direction rows"),
            ("sect:T=3,1,2\n0,nan,1\n", "not finite"),
            ("flip:T=3,1,2\n0,1,2\n", "unknown mode"),
        ] {
            let err = parse_matrix_csv(text).unwrap_err();
            let msg = err.to_string();
            assert!(
                matches!(err, Error::Parse { .. }),
                "{text:?} gave {err:?}"
            );
            assert!(msg.contains(needle), "{text:?} gave `{msg}`");
        }
    }

    #[test]
    fn blank_lines_are_tolerated() {
        let text = "sect:T=3,1,3\n\n0,1.5,0\n\n1.5,2.5,0\n\n";
        let parsed = parse_matrix_csv(text).unwrap();
        assert_eq!(parsed.direction_grid().len(), 2);
    }
}
