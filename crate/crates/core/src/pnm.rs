//! Netpbm codecs: P2/P3/P5/P6 decoding, binary PGM/PPM encoding.
//!
//! Headers are `magic`, width, height, maxval separated by whitespace, with
//! `#` comments running to end of line. Binary formats start their raster
//! after exactly one whitespace byte following maxval. Only 8-bit data
//! (maxval ≤ 255) is accepted.

use std::io::Write;

use crate::error::{Error, Result};
use crate::image::{GrayImage, Mask, RasterImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal token, which must be followed by whitespace,
    /// a comment, or end of input.
    fn read_uint(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: usize = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as usize))
                .ok_or_else(|| Error::pnm(start, format!("{what} too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(if self.pos >= self.bytes.len() {
                Error::pnm(self.pos, format!("unexpected end of data reading {what}"))
            } else {
                Error::pnm(self.pos, format!("expected {what}"))
            });
        }
        match self.bytes.get(self.pos) {
            None => {}
            Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
            Some(_) => return Err(Error::pnm(self.pos, format!("malformed {what}"))),
        }
        Ok(value)
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<RasterImage> {
    if bytes.len() < 2 {
        return Err(Error::pnm(0, "missing magic number"));
    }
    let (channels, encoding) = match &bytes[..2] {
        b"P2" => (1, Encoding::Ascii),
        b"P3" => (3, Encoding::Ascii),
        b"P5" => (1, Encoding::Binary),
        b"P6" => (3, Encoding::Binary),
        _ => return Err(Error::pnm(0, "unrecognized magic number")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => return Err(Error::pnm(2, "expected whitespace after magic number")),
    }
    let header_start = cur.pos;
    let width = cur.read_uint("width")?;
    let height = cur.read_uint("height")?;
    if width == 0 || height == 0 {
        return Err(Error::pnm(header_start, "zero dimension"));
    }
    let maxval_pos = cur.pos;
    let maxval = cur.read_uint("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::pnm(maxval_pos, format!("maxval {maxval} outside 1..=255")));
    }
    let count = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::pnm(header_start, "dimensions overflow"))?;
    let scale = maxval as f64;

    let samples = match encoding {
        Encoding::Binary => {
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(Error::pnm(cur.pos, "expected single whitespace before raster")),
            }
            let body = &bytes[cur.pos..];
            if body.len() < count {
                return Err(Error::pnm(
                    bytes.len(),
                    format!("truncated raster: need {count} bytes, have {}", body.len()),
                ));
            }
            let mut out = Vec::with_capacity(count);
            for (k, &b) in body[..count].iter().enumerate() {
                if b as usize > maxval {
                    return Err(Error::pnm(cur.pos + k, "sample exceeds maxval"));
                }
                out.push(b as f64 / scale);
            }
            out
        }
        Encoding::Ascii => {
            // every ASCII sample needs at least one digit byte plus a separator
            if count > bytes.len() - cur.pos {
                return Err(Error::pnm(bytes.len(), "truncated raster"));
            }
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let at = cur.pos;
                let v = cur.read_uint("sample")?;
                if v > maxval {
                    return Err(Error::pnm(at, "sample exceeds maxval"));
                }
                out.push(v as f64 / scale);
            }
            out
        }
    };
    RasterImage::new(width, height, channels, samples).map_err(|e| Error::pnm(0, e.to_string()))
}

/// How real-valued samples map onto 0..=255.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmScale {
    /// Min-max stretch; a constant image maps to all zeros.
    Linear,
    /// Nonzero → 255, zero → 0.
    Binary,
}

fn pnm_header(magic: &str, width: usize, height: usize) -> Vec<u8> {
    format!("{magic}\n{width} {height}\n255\n").into_bytes()
}

pub fn encode_pgm(img: &GrayImage, scale: PgmScale) -> Vec<u8> {
    let mut out = pnm_header("P5", img.width(), img.height());
    match scale {
        PgmScale::Binary => out.extend(img.iter().map(|&v| if v != 0.0 { 255u8 } else { 0 })),
        PgmScale::Linear => {
            let (lo, hi) = img
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            let range = hi - lo;
            out.extend(img.iter().map(|&v| {
                if range > 0.0 {
                    (255.0 * (v - lo) / range).round() as u8
                } else {
                    0
                }
            }));
        }
    }
    out
}

pub fn encode_mask(mask: &Mask) -> Vec<u8> {
    let mut out = pnm_header("P5", mask.width(), mask.height());
    out.extend(mask.iter().map(|&m| if m { 255u8 } else { 0 }));
    out
}

/// Binary PPM (or PGM for one channel); samples are clamped to `[0, 1]`.
pub fn encode_pnm(img: &RasterImage) -> Vec<u8> {
    let magic = if img.channels() == 3 { "P6" } else { "P5" };
    let mut out = pnm_header(magic, img.width(), img.height());
    out.extend(img.samples().iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp_name = format!(".{name}.tmp{}", std::process::id());
    let tmp = match dir {
        Some(d) => d.join(tmp_name),
        None => std::path::PathBuf::from(tmp_name),
    };
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}
