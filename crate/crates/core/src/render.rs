//! Grayscale matrix maps as binary PGM (P5, maxval 255).
//!
//! Intensity is `255 (1 - |m_ij| / max |m|)`, so the largest-magnitude cell is
//! black and zeros are white.

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Gray level for every cell, row-major, before upscaling.
pub fn gray_levels(m: &SymMatrix) -> Vec<u8> {
    let max = m.max_abs();
    m.as_slice()
        .iter()
        .map(|x| {
            if max == 0.0 {
                255
            } else {
                (255.0 * (1.0 - x.abs() / max)).round().clamp(0.0, 255.0) as u8
            }
        })
        .collect()
}

/// Encodes `m` as a P5 image, replicating every cell into a `cell_size` square.
pub fn render_pgm(m: &SymMatrix, cell_size: usize) -> Result<Vec<u8>> {
    if cell_size == 0 {
        return Err(Error::InvalidArgument(
            "cell size must be at least 1".into(),
        ));
    }
    let d = m.dim();
    if d == 0 {
        return Err(Error::InvalidArgument(
            "cannot render an empty matrix".into(),
        ));
    }
    let side = d * cell_size;
    let levels = gray_levels(m);
    let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
    out.reserve(side * side);
    for row in levels.chunks(d) {
        for _ in 0..cell_size {
            for &g in row {
                out.extend(std::iter::repeat_n(g, cell_size));
            }
        }
    }
    Ok(out)
}

/// Splits a P5 image into `(width, height, pixels)`.
pub fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |msg: &str| Error::Parse(format!("PGM: {msg}"));
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
    }
    pos += 1;
    if fields[0] != "P5" || fields[3] != "255" {
        return Err(bad("expected P5 with maxval 255"));
    }
    let w: usize = fields[1].parse().map_err(|_| bad("width"))?;
    let h: usize = fields[2].parse().map_err(|_| bad("height"))?;
    let pixels = bytes.get(pos..).unwrap_or_default().to_vec();
    if pixels.len() != w * h {
        return Err(bad("pixel count does not match header"));
    }
    Ok((w, h, pixels))
}
