//! Loading grayscale images (PGM or PNG) and thresholding them into
//! shapes.

use std::path::Path;

use crate::error::{Error, Result};
use crate::io::pgm;
use crate::shape::{Frame, GridShape};

/// A grayscale raster with samples normalized to `[0, 1]`, row 0 at the
/// top.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayscaleImage {
    pub width: usize,
    pub height: usize,
    pub samples: Vec<f64>,
}

/// Loads a PGM (`.pgm`) or PNG (`.png`) file by extension.
pub fn load_grayscale(path: &Path) -> Result<GrayscaleImage> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "pgm" => {
            let data = std::fs::read(path).map_err(|e| Error::Io(e).in_file(path))?;
            let img = pgm::parse_pgm(&data).map_err(|e| e.in_file(path))?;
            let maxval = img.maxval as f64;
            Ok(GrayscaleImage {
                width: img.width,
                height: img.height,
                samples: img.samples.iter().map(|&v| v as f64 / maxval).collect(),
            })
        }
        "png" => {
            let img = image::open(path)
                .map_err(|e| {
                    Error::parse(1, format!("PNG decode failed: {e}")).in_file(path)
                })?
                .to_luma16();
            Ok(GrayscaleImage {
                width: img.width() as usize,
                height: img.height() as usize,
                samples: img.iter().map(|&v| v as f64 / 65535.0).collect(),
            })
        }
        other => Err(Error::InvalidArgument(format!(
            "unsupported image extension `{other}` for {}; expected .pgm or .png",
            path.display()
        ))),
    }
}

/// Thresholds a grayscale image into a shape centered in a ball of the
/// given radius: foreground iff normalized intensity >= threshold.
///
/// The pixel pitch is chosen so the longer image side spans the ball
/// diameter; foreground too close to the grid corners can therefore
/// still violate the strict ball containment and is reported as such.
/// Image rows are flipped so +y points up in physical coordinates.
pub fn threshold_to_shape(img: &GrayscaleImage, threshold: f64, radius: f64) -> Result<GridShape> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    let (w, h) = (img.width, img.height);
    if img.samples.len() != w * h {
        return Err(Error::InvalidArgument("image sample count mismatch".into()));
    }
    let pitch = 2.0 * radius / w.max(h) as f64;
    let frame = Frame::new(
        radius,
        pitch,
        (-(w as f64) * pitch / 2.0, -(h as f64) * pitch / 2.0),
    )?;
    let mut mask = vec![false; w * h];
    for row in 0..h {
        for col in 0..w {
            if img.samples[row * w + col] >= threshold {
                mask[(h - 1 - row) * w + col] = true;
            }
        }
    }
    GridShape::new(w, h, mask, frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_flips_rows() {
        // 4x4 image, bright pixels in the upper half of the middle; rows
        // near the grid corners stay dark so the shape fits in the ball.
        let mut samples = vec![0.0; 16];
        samples[1 * 4 + 1] = 1.0;
        samples[1 * 4 + 2] = 1.0;
        let img = GrayscaleImage {
            width: 4,
            height: 4,
            samples,
        };
        let shape = threshold_to_shape(&img, 0.5, 10.0).unwrap();
        // Image row 1 (second from the top) is grid row 2.
        assert!(shape.pixel(1, 2));
        assert!(shape.pixel(2, 2));
        assert!(!shape.pixel(1, 1));
    }

    #[test]
    fn all_dark_image_is_empty() {
        let img = GrayscaleImage {
            width: 2,
            height: 2,
            samples: vec![0.1; 4],
        };
        assert!(matches!(
            threshold_to_shape(&img, 0.5, 10.0),
            Err(Error::EmptyShape)
        ));
    }

    #[test]
    fn threshold_is_inclusive() {
        // Center pixel of a 3x3 grid sits well inside the ball.
        let mut samples = vec![0.0; 9];
        samples[4] = 0.5;
        let img = GrayscaleImage {
            width: 3,
            height: 3,
            samples,
        };
        let shape = threshold_to_shape(&img, 0.5, 10.0).unwrap();
        assert!(shape.pixel(1, 1));
    }
}
