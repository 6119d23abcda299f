//! `sect simulate`: rejection-rate experiment over the bundled shape
//! family, with CSV outputs for external plotting.

use std::fmt::Write as _;
use std::path::PathBuf;

use sect_core::io::config::parse_config;
use sect_core::io::manifest::RunManifest;
use sect_core::io::pgm::format_mask_pgm;
use sect_core::io::write_atomic;
use sect_core::shape::{DirectionGrid, LevelGrid};
use sect_core::simgen::{
    example_shape, run_experiment, ExperimentConfig, MethodSelection, RejectionTable,
};
use sect_core::{sect, Error};

use crate::util::{fmt_f64, CliError};

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodChoice {
    Sect,
    Ect,
    Both,
}

impl MethodChoice {
    fn selection(self) -> MethodSelection {
        match self {
            MethodChoice::Sect => MethodSelection::Sect,
            MethodChoice::Ect => MethodSelection::Ect,
            MethodChoice::Both => MethodSelection::Both,
        }
    }
}

#[derive(clap::Args)]
pub struct SimulateArgs {
    /// Flat key = value config file; command-line flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    /// Which test(s) to run [default: both]
    #[arg(long, value_enum)]
    method: Option<MethodChoice>,

    /// Distribution indices to test against epsilon = 0
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,

    /// Shapes per group
    #[arg(long)]
    shapes_per_group: Option<usize>,

    /// Replicates per epsilon
    #[arg(long)]
    replicates: Option<usize>,

    /// Number of directions evenly spaced over the full circle
    #[arg(long, conflicts_with = "angles")]
    directions: Option<usize>,

    /// Explicit direction angles in radians, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,

    /// Number of sublevel thresholds on (0, 2R]
    #[arg(long)]
    levels: Option<usize>,

    /// Ball radius R of the raster frame
    #[arg(long)]
    radius: Option<f64>,

    /// Significance level
    #[arg(long)]
    alpha: Option<f64>,

    /// Number of label permutations per test
    #[arg(long)]
    permutations: Option<usize>,

    /// Master seed; all randomness derives from it
    #[arg(long)]
    seed: Option<u64>,

    /// Raster grid resolution
    #[arg(long)]
    resolution: Option<usize>,

    /// Mean of the ellipse axis noise
    #[arg(long)]
    noise_mean: Option<f64>,

    /// Standard deviation of the ellipse axis noise
    #[arg(long)]
    noise_sd: Option<f64>,

    /// Also dump each epsilon's example mask as a PGM
    #[arg(long)]
    dump_masks: bool,
}

fn parse_key<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::data(format!("config key `{key}`: cannot parse `{value}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(|token| parse_key::<f64>(key, token))
        .collect()
}

/// Defaults, overridden by the config file, overridden by flags.
fn build_config(args: &SimulateArgs) -> Result<(ExperimentConfig, MethodSelection), CliError> {
    let mut cfg = ExperimentConfig::simulation_defaults(0);
    let mut method = MethodChoice::Both;
    let mut file_directions: Option<usize> = None;
    let mut file_angles: Option<Vec<f64>> = None;

    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::from(Error::Io(e).in_file(path)))?;
        let map = parse_config(&text).map_err(|e| CliError::from(e.in_file(path)))?;
        for (key, value) in &map {
            match key.as_str() {
                "epsilons" => cfg.epsilons = parse_list(key, value)?,
                "shapes_per_group" => cfg.shapes_per_group = parse_key(key, value)?,
                "replicates" => cfg.replicates = parse_key(key, value)?,
                "directions" => file_directions = Some(parse_key(key, value)?),
                "angles" => file_angles = Some(parse_list(key, value)?),
                "levels" => {
                    let count: usize = parse_key(key, value)?;
                    cfg.levels = LevelGrid::uniform(count, cfg.levels.horizon())?;
                }
                "radius" => cfg.radius = parse_key(key, value)?,
                "alpha" => cfg.alpha = parse_key(key, value)?,
                "permutations" => cfg.permutations = parse_key(key, value)?,
                "seed" => cfg.seed = parse_key(key, value)?,
                "resolution" => cfg.resolution = parse_key(key, value)?,
                "noise_mean" => cfg.noise_mean = parse_key(key, value)?,
                "noise_sd" => cfg.noise_sd = parse_key(key, value)?,
                "method" => {
                    method = match value.trim() {
                        "sect" => MethodChoice::Sect,
                        "ect" => MethodChoice::Ect,
                        "both" => MethodChoice::Both,
                        other => {
                            return Err(CliError::data(format!(
                                "config key `method`: unknown value `{other}`"
                            )))
                        }
                    };
                }
                other => {
                    return Err(CliError::data(format!("unknown config key `{other}`")));
                }
            }
        }
    }

    if let Some(v) = &args.epsilons {
        cfg.epsilons = v.clone();
    }
    if let Some(v) = args.shapes_per_group {
        cfg.shapes_per_group = v;
    }
    if let Some(v) = args.replicates {
        cfg.replicates = v;
    }
    if let Some(v) = args.radius {
        cfg.radius = v;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = args.permutations {
        cfg.permutations = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.resolution {
        cfg.resolution = v;
    }
    if let Some(v) = args.noise_mean {
        cfg.noise_mean = v;
    }
    if let Some(v) = args.noise_sd {
        cfg.noise_sd = v;
    }
    if let Some(v) = args.method {
        method = v;
    }

    // Direction grid: flags beat the file; explicit angles beat a count.
    if let Some(angles) = &args.angles {
        cfg.directions = DirectionGrid::from_angles(angles)?;
    } else if let Some(count) = args.directions {
        cfg.directions = DirectionGrid::uniform(count)?;
    } else if let Some(angles) = &file_angles {
        cfg.directions = DirectionGrid::from_angles(angles)?;
    } else if let Some(count) = file_directions {
        cfg.directions = DirectionGrid::uniform(count)?;
    }

    // Levels end at the horizon T = 2R, which may have moved.
    let level_count = args.levels.unwrap_or(cfg.levels.len());
    cfg.levels = LevelGrid::uniform(level_count, 2.0 * cfg.radius)?;

    cfg.validate()?;
    Ok((cfg, method.selection()))
}

fn rates_csv(table: &RejectionTable) -> String {
    let mut out = String::from("epsilon,rate,replicates\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(row.epsilon),
            fmt_f64(row.rejection_rate()),
            row.replicates()
        );
    }
    out
}

fn pvalues_csv(table: &RejectionTable) -> String {
    let mut out = String::from("epsilon,replicate,p_value,reject\n");
    for row in &table.rows {
        for (idx, outcome) in row.outcomes.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(row.epsilon),
                idx + 1,
                fmt_f64(outcome.p_value),
                u8::from(outcome.rejected)
            );
        }
    }
    out
}

fn curves_csv(cfg: &ExperimentConfig, epsilon: f64) -> Result<String, Error> {
    let matrix = sect(
        &example_shape(cfg, epsilon)?,
        &cfg.directions,
        &cfg.levels,
    )?;
    let mut out = String::from("t");
    for dir in cfg.directions.iter() {
        let _ = write!(out, ",{}", fmt_f64(dir.angle()));
    }
    out.push('\n');
    for (q, &t) in cfg.levels.levels().iter().enumerate() {
        let _ = write!(out, "{}", fmt_f64(t));
        for p in 0..cfg.directions.len() {
            let _ = write!(out, ",{}", fmt_f64(matrix.value(p, q)));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn run(args: SimulateArgs) -> Result<u8, CliError> {
    let (cfg, selection) = build_config(&args)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::from(Error::Io(e).in_file(&args.out)))?;

    let report = run_experiment(&cfg, selection)?;

    let mut manifest = RunManifest::new(
        "simulate",
        serde_json::json!({
            "epsilons": cfg.epsilons,
            "shapes_per_group": cfg.shapes_per_group,
            "replicates": cfg.replicates,
            "directions": cfg.directions.iter().map(|d| d.angle()).collect::<Vec<_>>(),
            "levels": cfg.levels.len(),
            "horizon": cfg.levels.horizon(),
            "alpha": cfg.alpha,
            "permutations": cfg.permutations,
            "seed": cfg.seed,
            "resolution": cfg.resolution,
            "radius": cfg.radius,
            "noise_mean": cfg.noise_mean,
            "noise_sd": cfg.noise_sd,
        }),
    );
    if let Some(path) = &args.config {
        manifest.add_input(path)?;
    }

    let mut write_output = |name: String, bytes: &[u8]| -> Result<(), CliError> {
        let path = args.out.join(name);
        write_atomic(&path, bytes)?;
        manifest.add_output(&path)?;
        Ok(())
    };

    for table in [report.sect.as_ref(), report.ect.as_ref()].into_iter().flatten() {
        write_output(
            format!("rates_{}.csv", table.method.name()),
            rates_csv(table).as_bytes(),
        )?;
        write_output(
            format!("pvalues_{}.csv", table.method.name()),
            pvalues_csv(table).as_bytes(),
        )?;
    }

    for &epsilon in &cfg.epsilons {
        let label = fmt_f64(epsilon);
        write_output(
            format!("sect_curves_eps_{label}.csv"),
            curves_csv(&cfg, epsilon)
                .map_err(CliError::from)?
                .as_bytes(),
        )?;
        if args.dump_masks {
            let mask = format_mask_pgm(&example_shape(&cfg, epsilon)?);
            write_output(format!("mask_eps_{label}.pgm"), &mask)?;
        }
    }

    manifest.write(&args.out.join("manifest.json"))?;
    Ok(0)
}
