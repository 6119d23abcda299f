//! `sect transform`: images in, curve-matrix CSVs out.

use std::collections::HashSet;
use std::path::PathBuf;

use rayon::prelude::*;
use sect_core::io::images::{load_grayscale, threshold_to_shape};
use sect_core::io::manifest::RunManifest;
use sect_core::io::matrix::{write_matrix_file, MatrixFile};
use sect_core::shape::{DirectionGrid, LevelGrid};
use sect_core::{ect, sect};

use crate::util::{collect_files, CliError};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Ect,
    Sect,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Ect => "ect",
            Mode::Sect => "sect",
        }
    }
}

#[derive(clap::Args)]
pub struct TransformArgs {
    /// Input images (.pgm or .png), or directories of them
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    /// Output directory for the matrix CSVs and the manifest
    #[arg(long)]
    out: PathBuf,

    /// Number of directions evenly spaced over the full circle
    #[arg(long, default_value_t = 72, conflicts_with = "angles")]
    directions: usize,

    /// Explicit direction angles in radians, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,

    /// Number of sublevel thresholds on (0, 2R]
    #[arg(long, default_value_t = 100)]
    levels: usize,

    /// Ball radius R; the filtration horizon is T = 2R
    #[arg(long)]
    radius: f64,

    /// Foreground threshold on normalized intensity in [0, 1]
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,

    /// Which transform to write
    #[arg(long, value_enum, default_value_t = Mode::Sect)]
    mode: Mode,
}

pub fn run(args: TransformArgs) -> Result<u8, CliError> {
    let files = collect_files(&args.inputs, &["pgm", "png"])?;
    if files.is_empty() {
        return Err(CliError::no_input("no .pgm or .png inputs found"));
    }
    let mut stems = HashSet::new();
    for file in &files {
        let stem = file
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::usage(format!("unusable file name {}", file.display())))?;
        if !stems.insert(stem.to_string()) {
            return Err(CliError::usage(format!(
                "two inputs share the stem `{stem}`; outputs would collide"
            )));
        }
    }

    let directions = match &args.angles {
        Some(angles) => DirectionGrid::from_angles(angles)?,
        None => DirectionGrid::uniform(args.directions)?,
    };
    let levels = LevelGrid::uniform(args.levels, 2.0 * args.radius)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::from(sect_core::Error::Io(e).in_file(&args.out)))?;

    let matrices: Result<Vec<(PathBuf, MatrixFile)>, sect_core::Error> = files
        .par_iter()
        .map(|file| {
            let image = load_grayscale(file)?;
            let shape = threshold_to_shape(&image, args.threshold, args.radius)
                .map_err(|e| e.in_file(file))?;
            let matrix = match args.mode {
                Mode::Ect => MatrixFile::Ect(ect(&shape, &directions, &levels)?),
                Mode::Sect => MatrixFile::Sect(sect(&shape, &directions, &levels)?),
            };
            let stem = file.file_stem().and_then(|s| s.to_str()).unwrap();
            let output = args.out.join(format!("{stem}.{}.csv", args.mode.name()));
            Ok((output, matrix))
        })
        .collect();
    let matrices = matrices?;

    let mut manifest = RunManifest::new(
        "transform",
        serde_json::json!({
            "mode": args.mode.name(),
            "directions": directions.iter().map(|d| d.angle()).collect::<Vec<_>>(),
            "levels": levels.levels(),
            "radius": args.radius,
            "threshold": args.threshold,
        }),
    );
    for file in &files {
        manifest.add_input(file)?;
    }
    for (path, matrix) in &matrices {
        write_matrix_file(path, matrix)?;
        manifest.add_output(path)?;
    }
    manifest.write(&args.out.join("manifest.json"))?;
    Ok(0)
}
