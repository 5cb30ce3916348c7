//! Pseudospectral simulation of the Davey-Stewartson-II system.
//!
//! The solver works on the Fourier-space integral (Duhamel) form of the
//! equation. Each time step is a Picard fixed-point iteration whose measured
//! contraction ratio doubles as an empirical local-existence test.
//!
//! - [`spectral`]: grids, transforms, the weighted `H^p` norm.
//! - [`ds2`]: dispersion phase, the nonlocal `phi_x` multiplier and the
//!   nonlinear operator (pseudospectral plus a direct-convolution oracle).
//! - [`stepper`]: Picard steps, trajectories, existence-time estimation and
//!   a split-step reference integrator.
//! - [`general`]: polynomial-dispersion systems with power-series
//!   nonlinearities, of which DS-II is one instance.
//! - [`diagnostics`], [`snapshot`], [`image`], [`config`], [`cli`]: I/O.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod ds2;
pub mod error;
pub mod general;
pub mod image;
pub mod snapshot;
pub mod spectral;
pub mod stepper;

pub use num_complex::Complex64;

pub use ds2::{
    convolution_oracle_n, free_evolve, nonlinear_n, phi_x_from_u, DS2Params, DispersionPhase,
    Ds2Model,
};
pub use error::{Error, Result};
pub use general::{
    general_evolve, general_existence_time, general_free_evolve, general_rhs, series_eval, solve_p,
    GeneralModel, GeneralSystemSpec, Polynomial, PowerSeries, SecondOrderOperator,
};
pub use spectral::{
    algebra_check, forward_transform, inverse_transform, sobolev_norm, FieldN, Grid2D, GridN,
    SobolevExponent, SpectralField,
};
pub use stepper::{
    duhamel_rhs, evolve, existence_time_estimate, picard_nodes, picard_step, split_step_reference,
    DiagnosticsSink, ExistenceReport, NullSink, PicardConfig, StepReport, Trajectory,
};
