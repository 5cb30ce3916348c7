//! Grids, transforms and the weighted Sobolev norm.
//!
//! Transform convention: a plane wave `A exp(i(k_j x + m_l y))` sampled on
//! the grid has the single coefficient `A` at mode `(j, l)`. The inverse
//! transform is the plain Fourier sum, so the two are exact inverses.
//!
//! The `H^p` norm of a field is
//! `sqrt(sum w (1 + |k| + |m|)^(2p) |c|^2)` with `w = (2pi/Lx)(2pi/Ly)`,
//! the k-space cell measure. Physical-space `L^2` mass uses Parseval:
//! `sum |u|^2 dx dy = Lx Ly sum |c|^2`.

mod fft;
mod grid;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) use grid::AXIS_NAMES;
pub use grid::{signed_mode, storage_index, Grid2D, GridN};

/// Sobolev exponent `p` of the weight `(1 + |k| + |m|)^p`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevExponent(f64);

impl SobolevExponent {
    /// Any finite `p >= 0`. Stricter bounds are checked where a model needs them.
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 0.0) {
            return Err(Error::config(
                "params.p",
                format!("Sobolev exponent must be finite and >= 0, got {p}"),
            ));
        }
        Ok(SobolevExponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Require `p > bound`, naming `key` in the error.
    pub fn require_above(self, bound: f64, key: &str) -> Result<Self> {
        if self.0 > bound {
            Ok(self)
        } else {
            Err(Error::config(
                key,
                format!("Sobolev exponent must exceed {bound}, got {}", self.0),
            ))
        }
    }
}

fn check_finite(coeffs: &[Complex64]) -> Result<()> {
    if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteField)
    }
}

/// Fourier coefficients of a complex field on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid2D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::config(
                "coeffs",
                format!(
                    "expected {} coefficients for a {}x{} grid, got {}",
                    grid.len(),
                    grid.nx(),
                    grid.ny(),
                    coeffs.len()
                ),
            ));
        }
        check_finite(&coeffs)?;
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zeros(grid: Grid2D) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Field with the single coefficient `amplitude` at signed mode `(j, l)`.
    pub fn single_mode(grid: Grid2D, j: isize, l: isize, amplitude: Complex64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[grid.mode_index(j, l)] = amplitude;
        f
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at signed mode `(j, l)`.
    pub fn mode(&self, j: isize, l: isize) -> Complex64 {
        self.coeffs[self.grid.mode_index(j, l)]
    }

    /// Physical-space samples (inverse transform).
    pub fn to_physical(&self) -> Vec<Complex64> {
        inverse_transform(self)
    }

    /// Discrete `integral |u|^2`, computed from the coefficients.
    pub fn mass(&self) -> f64 {
        self.grid.lx() * self.grid.ly() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        SpectralField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self - other`; grids must be compatible.
    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        ensure_compatible(&self.grid, &other.grid)?;
        Ok(SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn to_nd(&self) -> FieldN {
        FieldN {
            grid: self.grid.to_nd(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub(crate) fn from_parts(grid: Grid2D, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), coeffs.len());
        SpectralField { grid, coeffs }
    }
}

pub(crate) fn ensure_compatible(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::config(
            "grid",
            format!("incompatible grids {a:?} and {b:?}"),
        ))
    }
}

/// Fourier coefficients of a complex field on an n-dimensional grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldN {
    grid: GridN,
    coeffs: Vec<Complex64>,
}

impl FieldN {
    pub fn new(grid: GridN, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::config(
                "coeffs",
                format!("expected {} coefficients, got {}", grid.len(), coeffs.len()),
            ));
        }
        check_finite(&coeffs)?;
        Ok(FieldN { grid, coeffs })
    }

    pub fn zeros(grid: GridN) -> Self {
        let len = grid.len();
        FieldN {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_physical(grid: GridN, values: &[Complex64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::config(
                "values",
                format!("expected {} samples, got {}", grid.len(), values.len()),
            ));
        }
        let coeffs = fft::forward(values, grid.shape());
        Self::new(grid, coeffs)
    }

    pub fn grid(&self) -> &GridN {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn mode(&self, modes: &[isize]) -> Complex64 {
        self.coeffs[self.grid.mode_index(modes)]
    }

    pub fn to_physical(&self) -> Vec<Complex64> {
        fft::inverse(&self.coeffs, self.grid.shape())
    }

    pub fn mass(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn sobolev_norm(&self, p: SobolevExponent) -> f64 {
        weighted_norm(&self.coeffs, &sobolev_weights(&self.grid, p))
    }

    /// Back to a 2-D field; `None` unless the grid is two-dimensional.
    pub fn to_2d(&self) -> Option<SpectralField> {
        self.grid
            .as_2d()
            .map(|g| SpectralField::from_parts(g, self.coeffs.clone()))
    }

    pub(crate) fn from_parts(grid: GridN, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), coeffs.len());
        FieldN { grid, coeffs }
    }
}

impl From<SpectralField> for FieldN {
    fn from(f: SpectralField) -> Self {
        FieldN {
            grid: f.grid.to_nd(),
            coeffs: f.coeffs,
        }
    }
}

pub(crate) fn forward_nd(values: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
    fft::forward(values, shape)
}

pub(crate) fn inverse_nd(coeffs: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
    fft::inverse(coeffs, shape)
}

/// Transform physical samples on `grid` to coefficients.
pub fn forward_transform(grid: &Grid2D, values: &[Complex64]) -> Result<SpectralField> {
    if values.len() != grid.len() {
        return Err(Error::config(
            "values",
            format!(
                "expected {} samples for a {}x{} grid, got {}",
                grid.len(),
                grid.nx(),
                grid.ny(),
                values.len()
            ),
        ));
    }
    SpectralField::new(*grid, fft::forward(values, &grid.shape()))
}

pub fn inverse_transform(f: &SpectralField) -> Vec<Complex64> {
    fft::inverse(&f.coeffs, &f.grid.shape())
}

/// Squared norm weights `w (1 + sum |k_i|)^(2p)` per mode.
pub(crate) fn sobolev_weights(grid: &GridN, p: SobolevExponent) -> Vec<f64> {
    let w = grid.cell_measure();
    grid.wavevectors()
        .iter()
        .map(|k| w * (1.0 + k[0].abs() + k[1].abs() + k[2].abs()).powf(2.0 * p.value()))
        .collect()
}

pub(crate) fn weighted_norm(coeffs: &[Complex64], weights: &[f64]) -> f64 {
    coeffs
        .iter()
        .zip(weights)
        .map(|(c, w)| w * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn sobolev_norm(f: &SpectralField, p: SobolevExponent) -> f64 {
    weighted_norm(&f.coeffs, &sobolev_weights(&f.grid.to_nd(), p))
}

/// Pointwise product `f g`, computed through physical space.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    ensure_compatible(&f.grid, &g.grid)?;
    let fu = inverse_transform(f);
    let gu = inverse_transform(g);
    let prod: Vec<Complex64> = fu.iter().zip(&gu).map(|(a, b)| a * b).collect();
    forward_transform(&f.grid, &prod)
}

/// Returns `(|fg|_p, |fg|_p / (|f|_p |g|_p))`, with `0/0` reported as 0.
pub fn algebra_check(
    f: &SpectralField,
    g: &SpectralField,
    p: SobolevExponent,
) -> Result<(f64, f64)> {
    let p = p.require_above(1.0, "params.p")?;
    let prod = pointwise_product(f, g)?;
    let lhs = sobolev_norm(&prod, p);
    let denom = sobolev_norm(f, p) * sobolev_norm(g, p);
    let ratio = if denom == 0.0 { 0.0 } else { lhs / denom };
    Ok((lhs, ratio))
}

/// Keep-mask for the 2/3 rule: modes with `3|s| >= n` on any axis are dropped.
pub(crate) fn two_thirds_mask(grid: &GridN) -> Vec<bool> {
    (0..grid.len())
        .map(|flat| {
            let idx = grid.multi_index(flat);
            (0..grid.dim()).all(|axis| {
                let n = grid.shape()[axis];
                3 * signed_mode(idx[axis], n).unsigned_abs() < n
            })
        })
        .collect()
}

pub(crate) fn apply_mask(coeffs: &mut [Complex64], mask: &[bool]) {
    for (c, &keep) in coeffs.iter_mut().zip(mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}
