//! Error-to-exit-code mapping and small shared helpers.

use std::fmt;
use std::path::{Path, PathBuf};

pub const EXIT_REJECT: u8 = 3;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_DATA: u8 = 65;
pub const EXIT_NOINPUT: u8 = 66;
pub const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    pub fn no_input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NOINPUT,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn io_code(err: &std::io::Error) -> u8 {
    if err.kind() == std::io::ErrorKind::NotFound {
        EXIT_NOINPUT
    } else {
        EXIT_IO
    }
}

fn core_code(err: &sect_core::Error) -> u8 {
    use sect_core::Error;
    match err {
        Error::File { source, .. } => match source.as_ref() {
            Error::Io(io) => io_code(io),
            inner => core_code(inner),
        },
        Error::Io(io) => io_code(io),
        Error::Parse { .. } => EXIT_DATA,
        Error::InvalidArgument(_) | Error::DegenerateThreshold { .. } => EXIT_USAGE,
        Error::EmptyShape
        | Error::ShapeExceedsBall(_)
        | Error::IncompatibleGrids(_)
        | Error::DegenerateGroup { .. } => EXIT_DATA,
    }
}

impl From<sect_core::Error> for CliError {
    fn from(err: sect_core::Error) -> Self {
        Self {
            code: core_code(&err),
            message: err.to_string(),
        }
    }
}

/// Collects files with one of the given extensions from a mix of file
/// and directory paths; directory contents are sorted by name.
pub fn collect_files(inputs: &[PathBuf], extensions: &[&str]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| CliError {
                    code: io_code(&e),
                    message: format!("{}: {e}", input.display()),
                })?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|path| has_extension(path, extensions))
                .collect();
            entries.sort();
            files.extend(entries);
        } else if input.exists() {
            files.push(input.clone());
        } else {
            return Err(CliError::no_input(format!(
                "{}: no such file or directory",
                input.display()
            )));
        }
    }
    Ok(files)
}

fn has_extension(path: &Path, extensions: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| extensions.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

/// Shortest round-trip decimal form of a float, for file names and CSV.
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}
