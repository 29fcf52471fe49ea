//! Minimal netpbm support: binary PGM ("P5", maxval up to 255) in, binary
//! PPM ("P6") out.

use std::error::Error;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use odlm::PixelGrid;

#[derive(Debug)]
pub enum PnmError {
    /// File does not start with a P-number magic.
    BadMagic,
    /// A netpbm flavor other than binary PGM.
    UnsupportedFormat(String),
    /// Sample depth above 8 bits.
    UnsupportedDepth(u32),
    /// Malformed or incomplete header.
    Header(String),
    /// Fewer pixel bytes than the header promises.
    Truncated { expected: usize, got: usize },
    Io(io::Error),
}

impl fmt::Display for PnmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PnmError::BadMagic => write!(f, "not a netpbm file (missing P-number magic)"),
            PnmError::UnsupportedFormat(magic) => {
                write!(f, "unsupported netpbm flavor {magic:?}: need binary PGM (P5)")
            }
            PnmError::UnsupportedDepth(maxval) => {
                write!(f, "unsupported sample depth: maxval {maxval} exceeds 255")
            }
            PnmError::Header(msg) => write!(f, "malformed PGM header: {msg}"),
            PnmError::Truncated { expected, got } => {
                write!(f, "truncated pixel data: expected {expected} bytes, found {got}")
            }
            PnmError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl Error for PnmError {}

impl From<io::Error> for PnmError {
    fn from(e: io::Error) -> Self {
        PnmError::Io(e)
    }
}

pub fn read_pgm(path: &Path) -> Result<PixelGrid, PnmError> {
    parse_pgm(&fs::read(path)?)
}

pub fn parse_pgm(bytes: &[u8]) -> Result<PixelGrid, PnmError> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(PnmError::BadMagic);
    }
    if bytes[1] != b'5' {
        return match bytes[1] {
            b'1'..=b'7' => {
                Err(PnmError::UnsupportedFormat(format!("P{}", bytes[1] as char)))
            }
            _ => Err(PnmError::BadMagic),
        };
    }

    let mut pos = 2;
    let width = header_number(bytes, &mut pos, "width")?;
    let height = header_number(bytes, &mut pos, "height")?;
    let maxval = header_number(bytes, &mut pos, "maxval")?;
    if maxval > 255 {
        return Err(PnmError::UnsupportedDepth(maxval));
    }
    if maxval == 0 {
        return Err(PnmError::Header("maxval must be positive".into()));
    }
    if width == 0 || height == 0 {
        return Err(PnmError::Header("zero image dimension".into()));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(PnmError::Header("missing whitespace before pixel data".into()));
    }
    pos += 1;

    let expected = width as usize * height as usize;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(PnmError::Truncated { expected, got: raster.len() });
    }
    PixelGrid::new(width, height, raster[..expected].to_vec())
        .map_err(|e| PnmError::Header(e.to_string()))
}

/// Read the next decimal header token, skipping whitespace and `#` comments.
fn header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32, PnmError> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(PnmError::Header(format!("missing {what}")));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| PnmError::Header(format!("bad {what}")))
}

/// Encode an RGB raster as binary PPM.
pub fn encode_ppm(width: u32, height: u32, rgb: &[u8]) -> Vec<u8> {
    assert_eq!(rgb.len(), width as usize * height as usize * 3);
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}

pub fn write_ppm(path: &Path, width: u32, height: u32, rgb: &[u8]) -> io::Result<()> {
    fs::write(path, encode_ppm(width, height, rgb))
}
