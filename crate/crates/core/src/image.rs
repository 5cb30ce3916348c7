//! 16-bit binary PGM (`P5`, maxval 65535) of the amplitude `|u|`.
//!
//! Columns run over `x`, rows over `y`; the first row written is the
//! smallest `y`. Samples are big-endian as the format requires.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

pub const MAXVAL: u16 = 65535;

/// Gray levels in row order (`y` outer, `x` inner).
pub fn amplitude_levels(u_hat: &SpectralField) -> Vec<u16> {
    let g = u_hat.grid();
    let amp: Vec<f64> = u_hat.to_physical().iter().map(|v| v.norm()).collect();
    let peak = amp.iter().copied().fold(0.0, f64::max);
    let mut levels = Vec::with_capacity(amp.len());
    for b in 0..g.ny() {
        for a in 0..g.nx() {
            let v = amp[g.index(a, b)];
            let level = if peak > 0.0 {
                (v / peak * MAXVAL as f64).round().clamp(0.0, MAXVAL as f64) as u16
            } else {
                0
            };
            levels.push(level);
        }
    }
    levels
}

pub fn encode_pgm(u_hat: &SpectralField) -> Vec<u8> {
    let g = u_hat.grid();
    let mut out = format!("P5\n{} {}\n{}\n", g.nx(), g.ny(), MAXVAL).into_bytes();
    for level in amplitude_levels(u_hat) {
        out.extend_from_slice(&level.to_be_bytes());
    }
    out
}

pub fn emit_amplitude_image(u_hat: &SpectralField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(u_hat)).map_err(|e| Error::io(path, e))
}
