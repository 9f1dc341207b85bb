//! Grayscale PGM (P2 and P5) reading and writing.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

pub const MAX_MAXVAL: u32 = 65_535;

/// Raster encoding of a PGM file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// P2, decimal text.
    Ascii,
    /// P5, one byte per sample below 256, else two bytes big-endian.
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    /// Offset of the most recently parsed number.
    last: usize,
    path: &'a Path,
}

impl<'a> Cursor<'a> {
    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            offset: self.pos,
            message: message.into(),
        }
    }

    fn fail_at_last(&mut self, message: impl Into<String>) -> Error {
        self.pos = self.last;
        self.fail(message)
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_blank();
        let start = self.pos;
        self.last = start;
        let mut value: u64 = 0;
        while let Some(&c) = self.bytes.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            value = value * 10 + u64::from(c - b'0');
            if value > u64::from(u32::MAX) {
                self.pos = start;
                return Err(self.fail(format!("{what} is too large")));
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail(format!("expected {what}")));
        }
        Ok(value as u32)
    }
}

/// Parses PGM bytes into an image normalized by `maxval`.
pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<Image> {
    let mut cur = Cursor {
        bytes,
        pos: 0,
        last: 0,
        path,
    };
    let encoding = match bytes.get(..2) {
        Some(b"P2") => PgmEncoding::Ascii,
        Some(b"P5") => PgmEncoding::Binary,
        _ => return Err(cur.fail("expected magic number P2 or P5")),
    };
    cur.pos = 2;
    let width = cur.number("width")? as usize;
    if width == 0 {
        return Err(cur.fail_at_last("width must be positive"));
    }
    let height = cur.number("height")? as usize;
    if height == 0 {
        return Err(cur.fail_at_last("height must be positive"));
    }
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > MAX_MAXVAL {
        return Err(cur.fail_at_last(format!("maxval {maxval} outside 1..={MAX_MAXVAL}")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| cur.fail("image size overflows"))?;
    let denom = f64::from(maxval);
    let mut data = Vec::with_capacity(count);

    match encoding {
        PgmEncoding::Ascii => {
            for _ in 0..count {
                let v = cur.number("sample")?;
                if v > maxval {
                    return Err(cur.fail_at_last(format!("sample {v} exceeds maxval {maxval}")));
                }
                data.push(f64::from(v) / denom);
            }
        }
        PgmEncoding::Binary => {
            match bytes.get(cur.pos) {
                Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(cur.fail("expected a single whitespace byte before the raster")),
            }
            let wide = maxval > 255;
            let sample_len = if wide { 2 } else { 1 };
            let needed = count * sample_len;
            if bytes.len() - cur.pos < needed {
                cur.pos = bytes.len();
                return Err(cur.fail(format!("raster truncated: need {needed} bytes")));
            }
            for i in 0..count {
                let at = cur.pos + i * sample_len;
                let v = if wide {
                    u32::from(u16::from_be_bytes([bytes[at], bytes[at + 1]]))
                } else {
                    u32::from(bytes[at])
                };
                if v > maxval {
                    cur.pos = at;
                    return Err(cur.fail(format!("sample {v} exceeds maxval {maxval}")));
                }
                data.push(f64::from(v) / denom);
            }
        }
    }
    Image::new(width, height, data)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes, path)
}

/// Clamps to `[0, 1]` and rounds half away from zero onto `0..=maxval`.
pub fn quantize(v: f64, maxval: u32) -> u32 {
    (v.clamp(0.0, 1.0) * f64::from(maxval)).round() as u32
}

pub fn encode_pgm(img: &Image, maxval: u32, encoding: PgmEncoding) -> Result<Vec<u8>> {
    if maxval == 0 || maxval > MAX_MAXVAL {
        return Err(Error::invalid(format!("maxval {maxval} outside 1..={MAX_MAXVAL}")));
    }
    let (w, h) = img.dims();
    let magic = match encoding {
        PgmEncoding::Ascii => "P2",
        PgmEncoding::Binary => "P5",
    };
    let mut out = format!("{magic}\n{w} {h}\n{maxval}\n").into_bytes();
    let samples = img.as_slice().iter().map(|&v| quantize(v, maxval));
    match encoding {
        PgmEncoding::Ascii => {
            for row in img.as_slice().chunks(w) {
                let line: Vec<String> = row.iter().map(|&v| quantize(v, maxval).to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Binary if maxval > 255 => {
            samples.for_each(|s| out.extend_from_slice(&(s as u16).to_be_bytes()));
        }
        PgmEncoding::Binary => out.extend(samples.map(|s| s as u8)),
    }
    Ok(out)
}

/// Writes an 8-bit binary PGM.
pub fn write_pgm(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    write_pgm_with(path, img, 255, PgmEncoding::Binary)
}

pub fn write_pgm_with(path: impl AsRef<Path>, img: &Image, maxval: u32, encoding: PgmEncoding) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img, maxval, encoding)?).map_err(|e| Error::io(path, e))
}
