use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Signed mode number for storage index `j` on an axis of `n` points:
/// `0, 1, ..., n/2 - 1, -n/2, ..., -1`.
pub fn signed_mode(j: usize, n: usize) -> isize {
    if j < n / 2 {
        j as isize
    } else {
        j as isize - n as isize
    }
}

/// Storage index of signed mode `s` (wraps periodically).
pub fn storage_index(s: isize, n: usize) -> usize {
    s.rem_euclid(n as isize) as usize
}

fn check_axis(key: &str, n: usize, length: f64) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::config(
            key,
            format!("grid size must be even and >= 4, got {n}"),
        ));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::config(
            key,
            format!("period length must be positive and finite, got {length}"),
        ));
    }
    Ok(())
}

/// Periodic truncation of the plane: `nx x ny` points on
/// `[-Lx/2, Lx/2) x [-Ly/2, Ly/2)`.
///
/// Coefficients and samples are stored row-major with `x` as the slow axis:
/// entry `(j, l)` lives at `j * ny + l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        check_axis("grid.nx", nx, lx)?;
        check_axis("grid.ny", ny, ly)?;
        Ok(Grid2D { nx, ny, lx, ly })
    }

    /// Square grid with both periods equal to `2*pi`, so wavenumbers are integers.
    pub fn unit_periodic(n: usize) -> Result<Self> {
        Self::new(n, n, 2.0 * PI, 2.0 * PI)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> [usize; 2] {
        [self.nx, self.ny]
    }

    pub fn index(&self, j: usize, l: usize) -> usize {
        j * self.ny + l
    }

    /// Flat index of the signed mode `(j, l)`.
    pub fn mode_index(&self, j: isize, l: isize) -> usize {
        self.index(storage_index(j, self.nx), storage_index(l, self.ny))
    }

    pub fn kx(&self, j: usize) -> f64 {
        2.0 * PI * signed_mode(j, self.nx) as f64 / self.lx
    }

    pub fn ky(&self, l: usize) -> f64 {
        2.0 * PI * signed_mode(l, self.ny) as f64 / self.ly
    }

    pub fn x(&self, a: usize) -> f64 {
        -0.5 * self.lx + a as f64 * self.lx / self.nx as f64
    }

    pub fn y(&self, b: usize) -> f64 {
        -0.5 * self.ly + b as f64 * self.ly / self.ny as f64
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// k-space cell measure `(2*pi/Lx)*(2*pi/Ly)` used as the norm weight.
    pub fn cell_measure(&self) -> f64 {
        (2.0 * PI / self.lx) * (2.0 * PI / self.ly)
    }

    /// Sample `f(x, y)` at every grid point.
    pub fn sample<F>(&self, mut f: F) -> Vec<Complex64>
    where
        F: FnMut(f64, f64) -> Complex64,
    {
        let mut out = Vec::with_capacity(self.len());
        for a in 0..self.nx {
            let x = self.x(a);
            for b in 0..self.ny {
                out.push(f(x, self.y(b)));
            }
        }
        out
    }

    pub fn to_nd(&self) -> GridN {
        GridN {
            shape: vec![self.nx, self.ny],
            lengths: vec![self.lx, self.ly],
        }
    }
}

/// Periodic grid in 1, 2 or 3 dimensions, row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridN {
    shape: Vec<usize>,
    lengths: Vec<f64>,
}

pub(crate) const AXIS_NAMES: [&str; 3] = ["x", "y", "z"];

impl GridN {
    pub fn new(shape: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > 3 {
            return Err(Error::config(
                "general.n",
                format!("dimension must be 1, 2 or 3, got {}", shape.len()),
            ));
        }
        if shape.len() != lengths.len() {
            return Err(Error::config(
                "grid",
                "shape and period lengths differ in dimension",
            ));
        }
        for (axis, (&n, &l)) in shape.iter().zip(&lengths).enumerate() {
            check_axis(&format!("grid.n{}", AXIS_NAMES[axis]), n, l)?;
        }
        Ok(GridN { shape, lengths })
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    pub fn cell_measure(&self) -> f64 {
        self.lengths.iter().map(|l| 2.0 * PI / l).product()
    }

    /// Multi-index of a flat position, padded with zeros to three axes.
    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.shape[axis];
            flat /= self.shape[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.shape)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Flat index of a signed mode vector.
    pub fn mode_index(&self, modes: &[isize]) -> usize {
        let idx: Vec<usize> = modes
            .iter()
            .zip(&self.shape)
            .map(|(&s, &n)| storage_index(s, n))
            .collect();
        self.flat_index(&idx)
    }

    pub fn wavenumber(&self, axis: usize, j: usize) -> f64 {
        2.0 * PI * signed_mode(j, self.shape[axis]) as f64 / self.lengths[axis]
    }

    /// Wavevector of every mode in storage order, zero-padded to three axes.
    pub fn wavevectors(&self) -> Vec<[f64; 3]> {
        (0..self.len())
            .map(|flat| {
                let idx = self.multi_index(flat);
                let mut k = [0.0; 3];
                for axis in 0..self.dim() {
                    k[axis] = self.wavenumber(axis, idx[axis]);
                }
                k
            })
            .collect()
    }

    /// Physical coordinates of every grid point in storage order.
    pub fn points(&self) -> Vec<[f64; 3]> {
        (0..self.len())
            .map(|flat| {
                let idx = self.multi_index(flat);
                let mut x = [0.0; 3];
                for axis in 0..self.dim() {
                    let n = self.shape[axis] as f64;
                    x[axis] = -0.5 * self.lengths[axis] + idx[axis] as f64 * self.lengths[axis] / n;
                }
                x
            })
            .collect()
    }

    /// `true` when a flat point index lies on the outermost ring of the box.
    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        (0..self.dim()).any(|axis| idx[axis] == 0 || idx[axis] + 1 == self.shape[axis])
    }

    pub fn as_2d(&self) -> Option<Grid2D> {
        if self.dim() == 2 {
            Some(Grid2D {
                nx: self.shape[0],
                ny: self.shape[1],
                lx: self.lengths[0],
                ly: self.lengths[1],
            })
        } else {
            None
        }
    }
}

impl From<Grid2D> for GridN {
    fn from(g: Grid2D) -> Self {
        g.to_nd()
    }
}
