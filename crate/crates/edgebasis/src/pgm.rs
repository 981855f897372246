//! Binary (P5) and plain (P2) PGM images.
//!
//! Samples are normalized to `[0, 1]` by dividing by maxval. Saving always
//! writes maxval 255 with round-half-up quantization.

use edgebasis_core::GrayImage;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("not a PGM file (magic must be P2 or P5)")]
    BadMagic,
    #[error("malformed header field `{0}`")]
    BadHeader(String),
    #[error("file ends before the {0} is complete")]
    Truncated(&'static str),
    #[error("image has zero width or height")]
    ZeroDimension,
    #[error("maxval is 0")]
    ZeroMaxval,
    #[error("maxval {0} exceeds 65535")]
    MaxvalTooLarge(u32),
    #[error("sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },
    #[error("image dimensions {0}x{1} are too large")]
    TooLarge(usize, usize),
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next decimal token.
    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                None => Err(PgmError::Truncated(what)),
                Some(_) => {
                    let end = self.bytes[start..]
                        .iter()
                        .position(u8::is_ascii_whitespace)
                        .map_or(self.bytes.len(), |e| start + e);
                    Err(PgmError::BadHeader(String::from_utf8_lossy(&self.bytes[start..end]).into_owned()))
                }
            };
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse().map_err(|_| PgmError::BadHeader(text.to_owned()))
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(PgmError::BadMagic),
    };
    if bytes.get(2).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
        return Err(PgmError::BadMagic);
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("header")? as usize;
    let height = cur.number("header")? as usize;
    let maxval = cur.number("header")?;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension);
    }
    if maxval == 0 {
        return Err(PgmError::ZeroMaxval);
    }
    if maxval > 65535 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    let count = width.checked_mul(height).ok_or(PgmError::TooLarge(width, height))?;
    let check = |value: u32| {
        if value > maxval {
            Err(PgmError::SampleOutOfRange { value, maxval })
        } else {
            Ok(value as f64 / maxval as f64)
        }
    };

    let mut pixels = Vec::with_capacity(count.min(1 << 24));
    if binary {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(PgmError::BadHeader("maxval".into())),
            None => return Err(PgmError::Truncated("raster")),
        }
        let wide = maxval > 255;
        let sample_len = if wide { 2 } else { 1 };
        let needed = count.checked_mul(sample_len).ok_or(PgmError::TooLarge(width, height))?;
        let raster = bytes.get(cur.pos..cur.pos + needed).ok_or(PgmError::Truncated("raster"))?;
        if wide {
            for pair in raster.chunks_exact(2) {
                pixels.push(check(u16::from_be_bytes([pair[0], pair[1]]) as u32)?);
            }
        } else {
            for &b in raster {
                pixels.push(check(b as u32)?);
            }
        }
    } else {
        for _ in 0..count {
            let v = cur.number("raster").map_err(|e| match e {
                PgmError::BadHeader(t) => PgmError::BadHeader(format!("sample {t}")),
                other => other,
            })?;
            pixels.push(check(v)?);
        }
    }
    Ok(GrayImage::new(width, height, pixels).expect("validated raster"))
}

/// Quantizes an intensity in `[0, 1]` to 0..=255, rounding halves up.
pub fn quantize(v: f64) -> u8 {
    (v * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn save_pgm(img: &GrayImage, ascii: bool) -> Vec<u8> {
    let magic = if ascii { "P2" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    if ascii {
        for row in img.pixels().chunks(img.width()) {
            let line: Vec<String> = row.iter().map(|&v| quantize(v).to_string()).collect();
            out.extend_from_slice(line.join(" ").as_bytes());
            out.push(b'\n');
        }
    } else {
        out.extend(img.pixels().iter().map(|&v| quantize(v)));
    }
    out
}
