//! Binary field snapshots.
//!
//! Layout, all little-endian: magic `DS2F`, version `u32`, `nx u32`,
//! `ny u32`, `Lx f64`, `Ly f64`, `t f64`, then `nx*ny` coefficients as
//! interleaved `(re, im)` `f64` pairs in storage order (row-major over
//! `(j, l)`, unshifted).

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid2D, SpectralField};

pub const MAGIC: &[u8; 4] = b"DS2F";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 3 + 8 * 3;

pub fn encode(u_hat: &SpectralField, t: f64) -> Vec<u8> {
    let g = u_hat.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.nx() as u32).to_le_bytes());
    out.extend_from_slice(&(g.ny() as u32).to_le_bytes());
    out.extend_from_slice(&g.lx().to_le_bytes());
    out.extend_from_slice(&g.ly().to_le_bytes());
    out.extend_from_slice(&t.to_le_bytes());
    for c in u_hat.coeffs() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"))
}

/// Decode a snapshot; `path` is only used for error messages.
pub fn decode(bytes: &[u8], path: &Path) -> Result<(SpectralField, f64)> {
    let format = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    if bytes.len() < HEADER_LEN {
        return Err(format(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[0..4] != MAGIC {
        return Err(format(format!("bad magic {:?}", &bytes[0..4])));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(format(format!("unsupported version {version}")));
    }
    let nx = u32_at(bytes, 8) as usize;
    let ny = u32_at(bytes, 12) as usize;
    let lx = f64_at(bytes, 16);
    let ly = f64_at(bytes, 24);
    let t = f64_at(bytes, 32);
    let grid = Grid2D::new(nx, ny, lx, ly).map_err(|e| format(e.to_string()))?;
    let expected = HEADER_LEN + 16 * grid.len();
    if bytes.len() != expected {
        return Err(format(format!(
            "expected {expected} bytes for a {nx}x{ny} field, found {}",
            bytes.len()
        )));
    }
    let coeffs = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    let field = SpectralField::new(grid, coeffs).map_err(|e| format(e.to_string()))?;
    Ok((field, t))
}

pub fn write_snapshot(u_hat: &SpectralField, t: f64, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(u_hat, t)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<(SpectralField, f64)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}

/// Read a snapshot that must have the given `(nx, ny)`.
pub fn read_snapshot_expecting(
    path: impl AsRef<Path>,
    shape: (usize, usize),
) -> Result<(SpectralField, f64)> {
    let (field, t) = read_snapshot(path)?;
    let found = (field.grid().nx(), field.grid().ny());
    if found != shape {
        return Err(Error::Dimension {
            expected: shape,
            found,
        });
    }
    Ok((field, t))
}
