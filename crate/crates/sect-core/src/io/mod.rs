//! On-disk formats: transform matrix CSVs, PGM/PNG images, flat
//! key-value configs, and run manifests.

pub mod config;
pub mod images;
pub mod manifest;
pub mod matrix;
pub mod pgm;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Writes a file atomically: the bytes land in a temporary file in the
/// destination directory and are renamed into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(e.error).in_file(path))?;
    Ok(())
}
