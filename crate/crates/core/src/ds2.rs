//! Davey-Stewartson-II right-hand side.
//!
//! `i u_t + u_xx - u_yy = gamma |u|^2 u + lambda u phi_x`,
//! `phi_xx + phi_yy = mu (|u|^2)_x`.
//!
//! In Fourier variables the free flow is `exp(i (m^2 - k^2) t)` and the
//! constraint gives `(phi_x)^ = mu k^2 / (k^2 + m^2) (|u|^2)^`, with the
//! origin mode fixed to zero (zero-mean potential gradient).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    apply_mask, forward_nd, inverse_nd, two_thirds_mask, Grid2D, GridN, SobolevExponent,
    SpectralField,
};
use crate::stepper::Dynamics;

/// Physical constants of the system and the Sobolev exponent used for norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DS2Params {
    pub gamma: f64,
    pub lambda: f64,
    pub mu: f64,
    pub p: SobolevExponent,
    /// 2/3-rule dealiasing around the nonlinear products. Off by default.
    pub dealias: bool,
}

impl DS2Params {
    pub fn new(gamma: f64, lambda: f64, mu: f64, p: f64) -> Result<Self> {
        for (key, v) in [
            ("params.gamma", gamma),
            ("params.lambda", lambda),
            ("params.mu", mu),
        ] {
            if !v.is_finite() {
                return Err(Error::config(key, format!("must be finite, got {v}")));
            }
        }
        let p = SobolevExponent::new(p)?.require_above(1.0, "params.p")?;
        Ok(DS2Params {
            gamma,
            lambda,
            mu,
            p,
            dealias: false,
        })
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    /// `gamma = lambda = 0`: the free Schroedinger-type flow.
    pub fn is_linear(&self) -> bool {
        self.gamma == 0.0 && self.lambda == 0.0
    }
}

/// Per-mode exponent `m^2 - k^2` of the free propagator `exp(i (m^2 - k^2) t)`.
#[derive(Debug, Clone)]
pub struct DispersionPhase {
    grid: Grid2D,
    exponent: Vec<f64>,
}

impl DispersionPhase {
    pub fn new(grid: Grid2D) -> Self {
        let mut exponent = Vec::with_capacity(grid.len());
        for j in 0..grid.nx() {
            let k = grid.kx(j);
            for l in 0..grid.ny() {
                let m = grid.ky(l);
                exponent.push(m * m - k * k);
            }
        }
        DispersionPhase { grid, exponent }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Imaginary part of the exponent per mode.
    pub fn exponent(&self) -> &[f64] {
        &self.exponent
    }

    pub fn apply(&self, f: &SpectralField, t: f64) -> SpectralField {
        debug_assert_eq!(f.grid(), &self.grid);
        let coeffs = f
            .coeffs()
            .iter()
            .zip(&self.exponent)
            .map(|(c, e)| c * Complex64::from_polar(1.0, e * t))
            .collect();
        SpectralField::from_parts(self.grid, coeffs)
    }
}

/// Free Schroedinger-type evolution over duration `t`.
pub fn free_evolve(f: &SpectralField, t: f64) -> SpectralField {
    DispersionPhase::new(*f.grid()).apply(f, t)
}

fn nonlocal_multiplier(grid: &Grid2D) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..grid.nx() {
        let k = grid.kx(j);
        for l in 0..grid.ny() {
            let m = grid.ky(l);
            let r = k * k + m * m;
            out.push(if r == 0.0 { 0.0 } else { k * k / r });
        }
    }
    out
}

/// Transform of `phi_x` for the field `u_hat`, with zero origin mode.
pub fn phi_x_from_u(u_hat: &SpectralField, mu: f64) -> SpectralField {
    let grid = *u_hat.grid();
    let shape = grid.shape();
    let u = inverse_nd(u_hat.coeffs(), &shape);
    let rho: Vec<Complex64> = u
        .iter()
        .map(|v| Complex64::new(v.norm_sqr(), 0.0))
        .collect();
    let mut rho_hat = forward_nd(&rho, &shape);
    for (c, m) in rho_hat.iter_mut().zip(nonlocal_multiplier(&grid)) {
        *c *= mu * m;
    }
    SpectralField::from_parts(grid, rho_hat)
}

/// Precomputed DS-II operator on a fixed grid.
#[derive(Debug, Clone)]
pub struct Ds2Model {
    grid: Grid2D,
    grid_nd: GridN,
    params: DS2Params,
    phase: DispersionPhase,
    multiplier: Vec<f64>,
    dispersion: Vec<f64>,
    mask: Option<Vec<bool>>,
}

impl Ds2Model {
    pub fn new(grid: Grid2D, params: DS2Params) -> Self {
        let phase = DispersionPhase::new(grid);
        let dispersion = phase.exponent().iter().map(|e| -e).collect();
        let grid_nd = grid.to_nd();
        let mask = params.dealias.then(|| two_thirds_mask(&grid_nd));
        Ds2Model {
            grid,
            grid_nd,
            params,
            multiplier: nonlocal_multiplier(&grid),
            phase,
            dispersion,
            mask,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn params(&self) -> &DS2Params {
        &self.params
    }

    pub fn phase(&self) -> &DispersionPhase {
        &self.phase
    }

    /// `phi_x` in physical space for physical samples `u`.
    pub(crate) fn phi_x_physical(&self, u: &[Complex64]) -> Vec<Complex64> {
        let shape = self.grid.shape();
        let rho: Vec<Complex64> = u
            .iter()
            .map(|v| Complex64::new(v.norm_sqr(), 0.0))
            .collect();
        let mut rho_hat = forward_nd(&rho, &shape);
        for (c, m) in rho_hat.iter_mut().zip(&self.multiplier) {
            *c *= self.params.mu * m;
        }
        inverse_nd(&rho_hat, &shape)
    }

    /// `gamma |u|^2 u + lambda u phi_x` evaluated pointwise on physical samples.
    pub(crate) fn nonlinear_physical(&self, u: &[Complex64]) -> Vec<Complex64> {
        let DS2Params { gamma, lambda, .. } = self.params;
        if lambda == 0.0 {
            return u.iter().map(|v| gamma * v.norm_sqr() * v).collect();
        }
        let phi_x = self.phi_x_physical(u);
        u.iter()
            .zip(&phi_x)
            .map(|(v, px)| gamma * v.norm_sqr() * v + lambda * v * px)
            .collect()
    }

    pub(crate) fn nonlinear_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let shape = self.grid.shape();
        let u = match &self.mask {
            Some(mask) => {
                let mut c = coeffs.to_vec();
                apply_mask(&mut c, mask);
                inverse_nd(&c, &shape)
            }
            None => inverse_nd(coeffs, &shape),
        };
        let mut out = forward_nd(&self.nonlinear_physical(&u), &shape);
        if let Some(mask) = &self.mask {
            apply_mask(&mut out, mask);
        }
        out
    }

    pub fn nonlinear(&self, u_hat: &SpectralField) -> SpectralField {
        SpectralField::from_parts(self.grid, self.nonlinear_coeffs(u_hat.coeffs()))
    }
}

impl Dynamics for Ds2Model {
    fn grid(&self) -> &GridN {
        &self.grid_nd
    }

    fn dispersion(&self) -> &[f64] {
        &self.dispersion
    }

    fn nonlinear(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.nonlinear_coeffs(coeffs)
    }
}

/// Transform of `gamma |u|^2 u + lambda u phi_x`, evaluated pseudospectrally.
pub fn nonlinear_n(u_hat: &SpectralField, params: &DS2Params) -> SpectralField {
    Ds2Model::new(*u_hat.grid(), *params).nonlinear(u_hat)
}

const ORACLE_MAX_SIDE: usize = 16;

/// Periodic discrete convolution over the mode lattice.
fn convolve(grid: &Grid2D, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in 0..nx {
        for l in 0..ny {
            let mut acc = Complex64::new(0.0, 0.0);
            for j1 in 0..nx {
                let j2 = (j + nx - j1) % nx;
                for l1 in 0..ny {
                    let l2 = (l + ny - l1) % ny;
                    acc += a[j1 * ny + l1] * b[j2 * ny + l2];
                }
            }
            out[j * ny + l] = acc;
        }
    }
    out
}

/// The nonlinear operator evaluated by literal convolutions of coefficients:
/// `gamma u*u'*u + lambda mu u*[k^2/(k^2+m^2) (u*u')]` where `u'` is the
/// transform of the conjugate field, `u'(k,m) = conj(u(-k,-m))`.
///
/// Cost grows with the square of the mode count, so grids larger than 16x16
/// are refused unless `allow_large` is set. Dealiasing is never applied.
pub fn convolution_oracle_n(
    u_hat: &SpectralField,
    params: &DS2Params,
    allow_large: bool,
) -> Result<SpectralField> {
    let grid = *u_hat.grid();
    if !allow_large && (grid.nx() > ORACLE_MAX_SIDE || grid.ny() > ORACLE_MAX_SIDE) {
        return Err(Error::OracleTooLarge {
            nx: grid.nx(),
            ny: grid.ny(),
        });
    }
    let u = u_hat.coeffs();
    let mut u_conj = vec![Complex64::new(0.0, 0.0); grid.len()];
    for j in 0..grid.nx() {
        for l in 0..grid.ny() {
            let jm = (grid.nx() - j) % grid.nx();
            let lm = (grid.ny() - l) % grid.ny();
            u_conj[grid.index(j, l)] = u[grid.index(jm, lm)].conj();
        }
    }
    let rho = convolve(&grid, u, &u_conj);
    let cubic = convolve(&grid, &rho, u);
    let forced: Vec<Complex64> = rho
        .iter()
        .zip(nonlocal_multiplier(&grid))
        .map(|(r, m)| r * m)
        .collect();
    let coupling = convolve(&grid, u, &forced);
    let coeffs = cubic
        .iter()
        .zip(&coupling)
        .map(|(c, q)| params.gamma * c + params.lambda * params.mu * q)
        .collect();
    Ok(SpectralField::from_parts(grid, coeffs))
}
