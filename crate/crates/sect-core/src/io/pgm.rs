//! PGM (P2 ASCII / P5 binary) parsing and writing.

use crate::error::{Error, Result};
use crate::shape::GridShape;

/// Refuse to allocate images beyond 64M pixels.
const MAX_PIXELS: usize = 1 << 26;

/// A decoded grayscale raster, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

struct Tokenizer<'a> {
    data: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0, line: 1 }
    }

    fn bump(&mut self) -> Option<u8> {
        let byte = *self.data.get(self.pos)?;
        self.pos += 1;
        if byte == b'\n' {
            self.line += 1;
        }
        Some(byte)
    }

    fn skip_separators(&mut self) {
        while let Some(&byte) = self.data.get(self.pos) {
            if byte.is_ascii_whitespace() {
                self.bump();
            } else if byte == b'#' {
                while let Some(b) = self.bump() {
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        self.skip_separators();
        let start = self.pos;
        while let Some(&byte) = self.data.get(self.pos) {
            if byte.is_ascii_whitespace() || byte == b'#' {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.line, "unexpected end of header"));
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .map_err(|_| Error::parse(self.line, "header token is not ASCII"))
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let line = self.line;
        let token = self.token()?;
        token
            .parse()
            .map_err(|_| Error::parse(line, format!("{what} `{token}` is not a number")))
    }
}

/// Decodes a PGM file (P2 or P5).
pub fn parse_pgm(data: &[u8]) -> Result<PgmImage> {
    let mut tok = Tokenizer::new(data);
    let magic = tok.token()?;
    let binary = match magic {
        "P2" => false,
        "P5" => true,
        other => {
            return Err(Error::parse(
                1,
                format!("unsupported magic `{other}`, expected P2 or P5"),
            ))
        }
    };
    let width = tok.number("width")?;
    let height = tok.number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::parse(tok.line, "image dimensions must be positive"));
    }
    let pixels = width
        .checked_mul(height)
        .filter(|&n| n <= MAX_PIXELS)
        .ok_or_else(|| Error::parse(tok.line, "image too large"))?;
    let maxval = tok.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(
            tok.line,
            format!("maxval {maxval} outside 1..=65535"),
        ));
    }
    let maxval = maxval as u16;

    let mut samples = Vec::with_capacity(pixels);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match tok.bump() {
            Some(b) if b.is_ascii_whitespace() => {}
            _ => return Err(Error::parse(tok.line, "expected whitespace before raster")),
        }
        let wide = maxval > 255;
        let bytes_per_sample = if wide { 2 } else { 1 };
        let raster = &data[tok.pos..];
        if raster.len() < pixels * bytes_per_sample {
            return Err(Error::parse(
                tok.line,
                format!(
                    "raster truncated: need {} bytes, found {}",
                    pixels * bytes_per_sample,
                    raster.len()
                ),
            ));
        }
        for k in 0..pixels {
            let value = if wide {
                u16::from_be_bytes([raster[2 * k], raster[2 * k + 1]])
            } else {
                raster[k] as u16
            };
            if value > maxval {
                return Err(Error::parse(
                    tok.line,
                    format!("sample {value} exceeds maxval {maxval}"),
                ));
            }
            samples.push(value);
        }
    } else {
        for _ in 0..pixels {
            let line = tok.line;
            let value = tok.number("sample")?;
            if value > maxval as usize {
                return Err(Error::parse(
                    line,
                    format!("sample {value} exceeds maxval {maxval}"),
                ));
            }
            samples.push(value as u16);
        }
    }

    Ok(PgmImage {
        width,
        height,
        maxval,
        samples,
    })
}

/// Encodes a binary mask as an 8-bit P5 file, foreground white. Grid row
/// 0 sits at the bottom, so rows are flipped into raster order.
pub fn format_mask_pgm(shape: &GridShape) -> Vec<u8> {
    let (w, h) = (shape.width(), shape.height());
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for j in (0..h).rev() {
        for i in 0..w {
            out.push(if shape.pixel(i, j) { 255 } else { 0 });
        }
    }
    out
}
