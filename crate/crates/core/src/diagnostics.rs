//! Per-step monitoring: mass, `H^p` norm, peak amplitude, boundary leak
//! (the periodic-truncation validity check) and the mean-flow gradient.

use std::io::Write;

use num_complex::Complex64;

use crate::ds2::{DS2Params, Ds2Model};
use crate::general::GeneralModel;
use crate::spectral::{inverse_nd, FieldN, GridN, SobolevExponent, SpectralField};

pub const CSV_HEADER: &str = "t,mass,hp_norm,linf,boundary_leak,phi_x_linf";

/// Default boundary-leak threshold relative to the peak amplitude.
pub const DEFAULT_LEAK_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub mass: f64,
    pub hp_norm: f64,
    pub linf: f64,
    pub boundary_leak: f64,
    pub phi_x_linf: f64,
}

impl DiagnosticsRecord {
    /// One CSV row with 17 significant digits per value.
    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.t, self.mass, self.hp_norm, self.linf, self.boundary_leak, self.phi_x_linf
        )
    }

    /// `boundary_leak <= threshold * linf`.
    pub fn leak_ok(&self, threshold: f64) -> bool {
        self.boundary_leak <= threshold * self.linf
    }
}

fn assemble(
    grid: &GridN,
    coeffs: &[Complex64],
    t: f64,
    p: SobolevExponent,
    phi_x: Option<Vec<Complex64>>,
) -> DiagnosticsRecord {
    let field = FieldN::from_parts(grid.clone(), coeffs.to_vec());
    let u = inverse_nd(coeffs, grid.shape());
    let mut linf: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for (flat, v) in u.iter().enumerate() {
        let a = v.norm();
        linf = linf.max(a);
        if grid.on_boundary(flat) {
            leak = leak.max(a);
        }
    }
    let phi_x_linf = phi_x
        .map(|v| v.iter().map(|c| c.norm()).fold(0.0, f64::max))
        .unwrap_or(0.0);
    DiagnosticsRecord {
        t,
        mass: field.mass(),
        hp_norm: field.sobolev_norm(p),
        linf,
        boundary_leak: leak,
        phi_x_linf,
    }
}

pub fn compute_diagnostics(
    u_hat: &SpectralField,
    t: f64,
    params: &DS2Params,
    p: SobolevExponent,
) -> DiagnosticsRecord {
    let model = Ds2Model::new(*u_hat.grid(), *params);
    let phi_x = model.phi_x_physical(&u_hat.to_physical());
    assemble(&u_hat.grid().to_nd(), u_hat.coeffs(), t, p, Some(phi_x))
}

/// Diagnostics for a general system; `phi_x_linf` reports the first
/// gradient component.
pub fn general_diagnostics(
    u: &FieldN,
    t: f64,
    model: &GeneralModel,
    p: SobolevExponent,
) -> DiagnosticsRecord {
    let grid = u.grid();
    let phys = u.to_physical();
    let conj: Vec<Complex64> = phys.iter().map(|v| v.conj()).collect();
    let forcing: Vec<Vec<Complex64>> = model
        .spec()
        .f_bar
        .iter()
        .map(|s| {
            crate::spectral::forward_nd(&crate::general::series_eval(s, &phys, &conj), grid.shape())
        })
        .collect();
    let grad = model.solve_p_coeffs(&forcing);
    let phi_x = inverse_nd(&grad[0], grid.shape());
    assemble(grid, u.coeffs(), t, p, Some(phi_x))
}

/// Streams records as CSV with the fixed header.
pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{CSV_HEADER}")?;
        Ok(CsvWriter { out })
    }

    pub fn write(&mut self, record: &DiagnosticsRecord) -> std::io::Result<()> {
        writeln!(self.out, "{}", record.csv_row())
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
