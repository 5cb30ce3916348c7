//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use ds2sim::{forward_transform, Complex64, Grid2D, SpectralField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_field(rng: &mut ChaCha8Rng, grid: Grid2D) -> SpectralField {
    SpectralField::new(grid, random_values(rng, grid.len())).unwrap()
}

/// `sum_q c_q exp(-|x - x_q|^2 / (2 s_q^2))` with random parameters.
#[derive(Debug, Clone)]
pub struct SmoothBumps {
    bumps: Vec<(Complex64, f64, f64, f64)>,
}

impl SmoothBumps {
    pub fn random(rng: &mut ChaCha8Rng, count: usize, width: (f64, f64), spread: f64) -> Self {
        let bumps = (0..count)
            .map(|_| {
                (
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    rng.gen_range(-spread..spread),
                    rng.gen_range(-spread..spread),
                    rng.gen_range(width.0..width.1),
                )
            })
            .collect();
        SmoothBumps { bumps }
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.bumps
            .iter()
            .map(|(c, x0, y0, s)| {
                c * (-((x - x0).powi(2) + (y - y0).powi(2)) / (2.0 * s * s)).exp()
            })
            .sum()
    }

    pub fn field(&self, grid: Grid2D) -> SpectralField {
        forward_transform(&grid, &grid.sample(|x, y| self.eval(x, y))).unwrap()
    }
}

pub fn gaussian(grid: Grid2D, amplitude: f64) -> SpectralField {
    let vals = grid.sample(|x, y| Complex64::new(amplitude * (-(x * x + y * y)).exp(), 0.0));
    forward_transform(&grid, &vals).unwrap()
}

/// Direct double-loop DFT with the centered-grid phase.
pub fn naive_forward(grid: &Grid2D, values: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in 0..grid.nx() {
        for l in 0..grid.ny() {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..grid.nx() {
                for b in 0..grid.ny() {
                    let phase = -(grid.kx(j) * grid.x(a) + grid.ky(l) * grid.y(b));
                    acc += values[grid.index(a, b)] * Complex64::from_polar(1.0, phase);
                }
            }
            out[grid.index(j, l)] = acc / n;
        }
    }
    out
}

pub fn naive_inverse(grid: &Grid2D, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for a in 0..grid.nx() {
        for b in 0..grid.ny() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..grid.nx() {
                for l in 0..grid.ny() {
                    let phase = grid.kx(j) * grid.x(a) + grid.ky(l) * grid.y(b);
                    acc += coeffs[grid.index(j, l)] * Complex64::from_polar(1.0, phase);
                }
            }
            out[grid.index(a, b)] = acc;
        }
    }
    out
}

pub fn l2(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn l2_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Continuous `L^2` distance of two fields (Parseval).
pub fn field_l2_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).unwrap().mass().sqrt()
}

/// Phase error of `got` against `A exp(-i omega t)`.
pub fn phase_error(got: Complex64, amplitude: f64, omega: f64, t: f64) -> f64 {
    (got / Complex64::from_polar(amplitude, -omega * t))
        .arg()
        .abs()
}
