//! Picard iteration on the Duhamel form of the equation.
//!
//! For a system `i u_t = omega(k) u + N(u)` in Fourier variables,
//!
//! `u(t) = exp(-i omega t) u0 - i integral_0^t exp(-i omega (t - s)) N(u(s)) ds`.
//!
//! One step of length `dt` places `M` uniform nodes on `[0, dt]`, starts
//! from the free evolution at every node and repeatedly re-evaluates the
//! right-hand side with the composite trapezoid rule. The ratio of
//! successive update norms is the empirical contraction constant.

use std::fmt;

use num_complex::Complex64;

use crate::ds2::{DS2Params, Ds2Model};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_weights, weighted_norm, GridN, SobolevExponent, SpectralField};

/// A dispersive system `i u_t = omega(k) u + N(u)` on a fixed grid.
pub trait Dynamics {
    fn grid(&self) -> &GridN;

    /// `omega` per mode; the free flow multiplies coefficients by `exp(-i omega t)`.
    fn dispersion(&self) -> &[f64];

    /// Transform of the nonlinear term for the given coefficients.
    fn nonlinear(&self, coeffs: &[Complex64]) -> Vec<Complex64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    /// Uniform trapezoid nodes per step, endpoints included.
    pub quad_nodes: usize,
    /// Stop once the sup-over-nodes `H^p` update falls below this.
    pub tol: f64,
    /// Contraction threshold used by the existence-time estimator.
    pub theta: f64,
    pub max_iters: usize,
    pub p: SobolevExponent,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            quad_nodes: 8,
            tol: 1e-11,
            theta: 0.5,
            max_iters: 50,
            p: SobolevExponent::new(1.5).expect("constant exponent"),
        }
    }
}

impl PicardConfig {
    pub fn validate(&self) -> Result<()> {
        if self.quad_nodes < 2 {
            return Err(Error::config("picard.quad_nodes", "need at least 2 nodes"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::config("picard.tol", "must be positive and finite"));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::config("picard.theta", "must lie in (0, 1)"));
        }
        if self.max_iters == 0 {
            return Err(Error::config("picard.max_iters", "must be positive"));
        }
        Ok(())
    }
}

/// Outcome of one Picard step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub iters: usize,
    pub final_residual: f64,
    /// `r_n = |d_{n+1}| / |d_n|` for successive updates.
    pub contraction_ratios: Vec<f64>,
    pub accepted: bool,
}

impl StepReport {
    /// Largest observed ratio, 0 when fewer than two updates were needed.
    pub fn max_ratio(&self) -> f64 {
        self.contraction_ratios.iter().copied().fold(0.0, f64::max)
    }
}

impl fmt::Display for StepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} after {} iterations, residual {:e}, max contraction ratio {:.6}",
            if self.accepted {
                "accepted"
            } else {
                "rejected"
            },
            self.iters,
            self.final_residual,
            self.max_ratio()
        )
    }
}

/// Node values of one converged (or abandoned) step.
#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub times: Vec<f64>,
    pub nodes: Vec<Vec<Complex64>>,
    pub report: StepReport,
}

impl PicardSolution {
    pub fn last(&self) -> &[Complex64] {
        self.nodes.last().expect("at least two nodes")
    }
}

fn free_phase(dispersion: &[f64], t: f64) -> Vec<Complex64> {
    dispersion
        .iter()
        .map(|w| Complex64::from_polar(1.0, -w * t))
        .collect()
}

fn ensure_finite(values: &[Complex64], iteration: usize, context: &str) -> Result<()> {
    if values.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            iteration,
            context: context.to_string(),
        })
    }
}

/// Generic Picard step. `weights` are the squared `H^p` weights of the grid.
pub(crate) fn picard_solve<D: Dynamics + ?Sized>(
    model: &D,
    weights: &[f64],
    u0: &[Complex64],
    dt: f64,
    cfg: &PicardConfig,
) -> Result<PicardSolution> {
    cfg.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::config(
            "time.dt",
            format!("must be positive, got {dt}"),
        ));
    }
    let m = cfg.quad_nodes;
    let h = dt / (m - 1) as f64;
    let times: Vec<f64> = (0..m).map(|i| i as f64 * h).collect();
    let omega = model.dispersion();
    let step_phase = free_phase(omega, h);

    let free: Vec<Vec<Complex64>> = times
        .iter()
        .map(|&t| {
            free_phase(omega, t)
                .iter()
                .zip(u0)
                .map(|(e, c)| e * c)
                .collect()
        })
        .collect();
    let n0 = model.nonlinear(u0);
    ensure_finite(&n0, 0, "nonlinear term of the initial data")?;

    let mut current = free.clone();
    let mut ratios = Vec::new();
    let mut previous: Option<f64> = None;
    let mut residual = f64::INFINITY;
    let mut iters = 0;
    let mut converged = false;
    let mut diverging = false;

    let half_h = Complex64::new(0.5 * h, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);

    while iters < cfg.max_iters {
        iters += 1;
        let mut nonlinear = Vec::with_capacity(m);
        nonlinear.push(n0.clone());
        for node in &current[1..] {
            nonlinear.push(model.nonlinear(node));
        }

        let mut next = Vec::with_capacity(m);
        next.push(u0.to_vec());
        let mut quad = vec![Complex64::new(0.0, 0.0); u0.len()];
        for i in 1..m {
            for (idx, q) in quad.iter_mut().enumerate() {
                let e = step_phase[idx];
                *q = e * (*q + half_h * nonlinear[i - 1][idx]) + half_h * nonlinear[i][idx];
            }
            let node: Vec<Complex64> = free[i]
                .iter()
                .zip(&quad)
                .map(|(f, q)| f + minus_i * q)
                .collect();
            ensure_finite(&node, iters, "Picard iterate")?;
            next.push(node);
        }

        let mut delta: f64 = 0.0;
        let mut diff = vec![Complex64::new(0.0, 0.0); u0.len()];
        for (a, b) in next.iter().zip(&current).skip(1) {
            for ((d, x), y) in diff.iter_mut().zip(a).zip(b) {
                *d = x - y;
            }
            delta = delta.max(weighted_norm(&diff, weights));
        }
        if !delta.is_finite() {
            return Err(Error::NonFinite {
                iteration: iters,
                context: "update norm".to_string(),
            });
        }
        current = next;
        residual = delta;
        if let Some(prev) = previous {
            let r = delta / prev;
            ratios.push(r);
            if r >= 1.0 && delta > cfg.tol {
                diverging = true;
                break;
            }
        }
        if delta <= cfg.tol {
            converged = true;
            break;
        }
        previous = Some(delta);
    }

    let accepted = converged && !diverging && ratios.iter().all(|&r| r < 1.0);
    Ok(PicardSolution {
        times,
        nodes: current,
        report: StepReport {
            iters,
            final_residual: residual,
            contraction_ratios: ratios,
            accepted,
        },
    })
}

/// Receives the state after every accepted step.
pub trait DiagnosticsSink<F> {
    fn record(&mut self, t: f64, state: &F, report: &StepReport) -> Result<()>;
}

impl<F, C> DiagnosticsSink<F> for C
where
    C: FnMut(f64, &F, &StepReport) -> Result<()>,
{
    fn record(&mut self, t: f64, state: &F, report: &StepReport) -> Result<()> {
        self(t, state, report)
    }
}

/// Sink that discards everything.
pub struct NullSink;

impl<F> DiagnosticsSink<F> for NullSink {
    fn record(&mut self, _t: f64, _state: &F, _report: &StepReport) -> Result<()> {
        Ok(())
    }
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct Trajectory<F> {
    pub t_final: f64,
    pub state: F,
    pub reports: Vec<StepReport>,
}

/// Uniform step times for `[0, t_end]`; the last step may be shorter.
pub(crate) fn step_times(t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::config(
            "time.t_end",
            format!("must be positive, got {t_end}"),
        ));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::config(
            "time.dt",
            format!("must be positive, got {dt}"),
        ));
    }
    let ratio = t_end / dt;
    let rounded = ratio.round();
    let full = if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        rounded as usize
    } else {
        ratio.floor() as usize
    };
    let mut times: Vec<f64> = (1..=full).map(|i| i as f64 * dt).collect();
    match times.last_mut() {
        Some(last) if (t_end - *last).abs() <= 1e-9 * dt => *last = t_end,
        _ => times.push(t_end),
    }
    Ok(times)
}

/// Chain Picard steps from `u0` to `t_end`. `wrap` turns coefficients into
/// the caller's field type for the sink.
pub(crate) fn evolve_generic<D, F, W>(
    model: &D,
    u0: &[Complex64],
    t_end: f64,
    dt: f64,
    cfg: &PicardConfig,
    wrap: W,
    sink: &mut dyn DiagnosticsSink<F>,
) -> Result<Trajectory<F>>
where
    D: Dynamics + ?Sized,
    W: Fn(Vec<Complex64>) -> F,
{
    cfg.validate()?;
    let weights = sobolev_weights(model.grid(), cfg.p);
    let times = step_times(t_end, dt)?;
    let mut state = u0.to_vec();
    let mut t = 0.0;
    let mut reports = Vec::with_capacity(times.len());
    for &t_next in &times {
        let sol = picard_solve(model, &weights, &state, t_next - t, cfg)?;
        if !sol.report.accepted {
            return Err(Error::Rejected {
                t_last: t,
                report: Box::new(sol.report),
            });
        }
        state = sol.nodes.into_iter().last().expect("nodes");
        t = t_next;
        let field = wrap(state.clone());
        sink.record(t, &field, &sol.report)?;
        reports.push(sol.report);
    }
    Ok(Trajectory {
        t_final: t,
        state: wrap(state),
        reports,
    })
}

/// One contraction probe of the existence-time search.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionProbe {
    pub t: f64,
    pub max_ratio: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    /// Probes in the order they were run.
    pub probes: Vec<ContractionProbe>,
}

impl ExistenceReport {
    /// Probes sorted by interval length.
    pub fn ratio_curve(&self) -> Vec<ContractionProbe> {
        let mut curve = self.probes.clone();
        curve.sort_by(|a, b| a.t.total_cmp(&b.t));
        curve
    }
}

pub(crate) const BISECTION_ROUNDS: usize = 20;

pub(crate) fn existence_time_generic<D: Dynamics + ?Sized>(
    model: &D,
    u0: &[Complex64],
    cfg: &PicardConfig,
    t_max: f64,
) -> Result<(f64, ExistenceReport)> {
    cfg.validate()?;
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::config(
            "estimate.t_max",
            format!("must be positive, got {t_max}"),
        ));
    }
    let weights = sobolev_weights(model.grid(), cfg.p);
    let mut probes = Vec::new();
    let mut probe = |t: f64| -> bool {
        let (max_ratio, accepted) = match picard_solve(model, &weights, u0, t, cfg) {
            Ok(sol) => (sol.report.max_ratio(), sol.report.accepted),
            Err(_) => (f64::INFINITY, false),
        };
        let ok = accepted && max_ratio <= cfg.theta;
        probes.push(ContractionProbe {
            t,
            max_ratio,
            accepted: ok,
        });
        ok
    };

    if probe(t_max) {
        return Ok((t_max, ExistenceReport { probes }));
    }
    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..BISECTION_ROUNDS {
        let mid = 0.5 * (lo + hi);
        if probe(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::NoContraction { probe: hi });
    }
    Ok((lo, ExistenceReport { probes }))
}

// --- DS-II entry points -------------------------------------------------

fn ds2_checked(u: &SpectralField, params: &DS2Params) -> Ds2Model {
    Ds2Model::new(*u.grid(), *params)
}

/// Evaluate the Duhamel right-hand side at time `t` from nonlinear-term
/// history `(tau_j, N_j)`, using the trapezoid rule on the given nodes.
///
/// Nodes must be sorted and span `[0, t]`.
pub fn duhamel_rhs(
    u0_hat: &SpectralField,
    history: &[(f64, SpectralField)],
    t: f64,
) -> Result<SpectralField> {
    let grid = *u0_hat.grid();
    let first = history
        .first()
        .ok_or_else(|| Error::config("history", "empty node history"))?;
    let span_tol = 1e-12 * t.abs().max(1.0);
    if first.0.abs() > span_tol {
        return Err(Error::config("history", "first node must be at 0"));
    }
    let last = history.last().expect("nonempty");
    if (last.0 - t).abs() > span_tol {
        return Err(Error::config("history", "last node must be at t"));
    }
    if history.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::config("history", "nodes must be sorted"));
    }
    for (_, n) in history {
        crate::spectral::ensure_compatible(&grid, n.grid())?;
    }

    let omega: Vec<f64> = crate::ds2::DispersionPhase::new(grid)
        .exponent()
        .iter()
        .map(|e| -e)
        .collect();
    let mut coeffs: Vec<Complex64> = free_phase(&omega, t)
        .iter()
        .zip(u0_hat.coeffs())
        .map(|(e, c)| e * c)
        .collect();
    let minus_i = Complex64::new(0.0, -1.0);
    for pair in history.windows(2) {
        let (ta, na) = (&pair[0].0, &pair[0].1);
        let (tb, nb) = (&pair[1].0, &pair[1].1);
        let half = 0.5 * (tb - ta);
        if half == 0.0 {
            continue;
        }
        let pa = free_phase(&omega, t - ta);
        let pb = free_phase(&omega, t - tb);
        for (idx, c) in coeffs.iter_mut().enumerate() {
            *c += minus_i * half * (pa[idx] * na.coeffs()[idx] + pb[idx] * nb.coeffs()[idx]);
        }
    }
    SpectralField::new(grid, coeffs)
}

/// One Picard step over `[0, dt]` for DS-II; returns `u(dt)` and the report.
pub fn picard_step(
    u_hat: &SpectralField,
    dt: f64,
    params: &DS2Params,
    cfg: &PicardConfig,
) -> Result<(SpectralField, StepReport)> {
    let sol = picard_nodes(u_hat, dt, params, cfg)?;
    let last = sol.last().to_vec();
    Ok((SpectralField::from_parts(*u_hat.grid(), last), sol.report))
}

/// Like [`picard_step`] but keeps every quadrature node.
pub fn picard_nodes(
    u_hat: &SpectralField,
    dt: f64,
    params: &DS2Params,
    cfg: &PicardConfig,
) -> Result<PicardSolution> {
    let model = ds2_checked(u_hat, params);
    let weights = sobolev_weights(Dynamics::grid(&model), cfg.p);
    picard_solve(&model, &weights, u_hat.coeffs(), dt, cfg)
}

/// Evolve DS-II data to `t_end` with uniform Picard steps.
pub fn evolve(
    u0_hat: &SpectralField,
    t_end: f64,
    dt: f64,
    params: &DS2Params,
    cfg: &PicardConfig,
    sink: &mut dyn DiagnosticsSink<SpectralField>,
) -> Result<Trajectory<SpectralField>> {
    let model = ds2_checked(u0_hat, params);
    let grid = *u0_hat.grid();
    evolve_generic(
        &model,
        u0_hat.coeffs(),
        t_end,
        dt,
        cfg,
        |c| SpectralField::from_parts(grid, c),
        sink,
    )
}

/// Strang splitting reference: half free step, one RK4 step of
/// `i u_t = N(u)` in physical space, half free step.
///
/// `phi_x` is recomputed at every RK stage. Dealiasing is not applied.
pub fn split_step_reference(
    u0_hat: &SpectralField,
    t_end: f64,
    dt: f64,
    params: &DS2Params,
) -> Result<SpectralField> {
    let grid = *u0_hat.grid();
    let model = Ds2Model::new(grid, params.with_dealias(false));
    let phase = model.phase().clone();
    let times = step_times(t_end, dt)?;
    let minus_i = Complex64::new(0.0, -1.0);
    let rhs = |u: &[Complex64]| -> Vec<Complex64> {
        model
            .nonlinear_physical(u)
            .into_iter()
            .map(|n| minus_i * n)
            .collect()
    };
    let axpy = |u: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        u.iter().zip(k).map(|(a, b)| a + s * b).collect()
    };

    let mut state = u0_hat.clone();
    let mut t = 0.0;
    for &t_next in &times {
        let h = t_next - t;
        let half = phase.apply(&state, 0.5 * h);
        let u = half.to_physical();
        let k1 = rhs(&u);
        let k2 = rhs(&axpy(&u, &k1, 0.5 * h));
        let k3 = rhs(&axpy(&u, &k2, 0.5 * h));
        let k4 = rhs(&axpy(&u, &k3, h));
        let stepped: Vec<Complex64> = u
            .iter()
            .enumerate()
            .map(|(i, v)| v + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        let mid =
            crate::spectral::forward_transform(&grid, &stepped).map_err(|_| Error::NonFinite {
                iteration: 0,
                context: format!("split-step reference at t = {t_next}"),
            })?;
        state = phase.apply(&mid, 0.5 * h);
        t = t_next;
    }
    Ok(state)
}

/// Largest `T <= t_max` (found by 20 rounds of bisection) on which a single
/// Picard step contracts with every ratio at most `cfg.theta`.
pub fn existence_time_estimate(
    u0_hat: &SpectralField,
    params: &DS2Params,
    cfg: &PicardConfig,
    t_max: f64,
) -> Result<(f64, ExistenceReport)> {
    let model = ds2_checked(u0_hat, params);
    existence_time_generic(&model, u0_hat.coeffs(), cfg, t_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ds2::{free_evolve, nonlinear_n};
    use crate::spectral::{sobolev_norm, Grid2D};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(gamma: f64, lambda: f64, mu: f64) -> DS2Params {
        DS2Params::new(gamma, lambda, mu, 1.5).unwrap()
    }

    fn gaussian(grid: Grid2D, amp: f64) -> SpectralField {
        let vals = grid.sample(|x, y| c(amp * (-(x * x + y * y)).exp(), 0.0));
        crate::spectral::forward_transform(&grid, &vals).unwrap()
    }

    fn l2_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        a.sub(b).unwrap().mass().sqrt()
    }

    #[test]
    fn config_validation() {
        let mut cfg = PicardConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.quad_nodes = 1;
        assert!(cfg.validate().is_err());
        cfg = PicardConfig {
            theta: 1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg = PicardConfig {
            tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn step_times_handle_partial_final_step() {
        assert_eq!(step_times(0.1, 0.005).unwrap().len(), 20);
        let t = step_times(1.0, 0.3).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert!(step_times(0.0, 0.1).is_err());
        assert!(step_times(1.0, -0.1).is_err());
    }

    #[test]
    fn duhamel_rhs_trivial_cases() {
        let g = Grid2D::unit_periodic(8).unwrap();
        let zero = SpectralField::zeros(g);
        let hist = vec![(0.0, zero.clone()), (0.5, zero.clone())];
        assert_eq!(duhamel_rhs(&zero, &hist, 0.5).unwrap(), zero);

        let u0 = gaussian(g, 1.0);
        let n0 = nonlinear_n(&u0, &params(1.0, 0.0, 1.0));
        assert_eq!(duhamel_rhs(&u0, &[(0.0, n0)], 0.0).unwrap(), u0);

        let wave = SpectralField::single_mode(g, 2, 1, c(0.5, 0.0));
        let out = duhamel_rhs(&wave, &hist, 0.5).unwrap();
        assert_eq!(out, free_evolve(&wave, 0.5));
    }

    #[test]
    fn duhamel_rhs_rejects_bad_history() {
        let g = Grid2D::unit_periodic(8).unwrap();
        let z = SpectralField::zeros(g);
        assert!(duhamel_rhs(&z, &[], 1.0).is_err());
        assert!(duhamel_rhs(&z, &[(0.1, z.clone()), (1.0, z.clone())], 1.0).is_err());
        assert!(duhamel_rhs(&z, &[(0.0, z.clone()), (0.9, z.clone())], 1.0).is_err());
        let unsorted = vec![
            (0.0, z.clone()),
            (0.7, z.clone()),
            (0.3, z.clone()),
            (1.0, z.clone()),
        ];
        assert!(duhamel_rhs(&z, &unsorted, 1.0).is_err());
    }

    #[test]
    fn recursive_quadrature_matches_duhamel_rhs() {
        let g = Grid2D::new(16, 16, 8.0, 8.0).unwrap();
        let p = params(-1.0, 0.5, 1.0);
        let u0 = gaussian(g, 1.0);
        let sol = picard_nodes(&u0, 0.05, &p, &PicardConfig::default()).unwrap();
        let hist: Vec<(f64, SpectralField)> = sol
            .times
            .iter()
            .zip(&sol.nodes)
            .map(|(&t, n)| {
                let f = SpectralField::new(g, n.clone()).unwrap();
                (t, nonlinear_n(&f, &p))
            })
            .collect();
        let again = duhamel_rhs(&u0, &hist, 0.05).unwrap();
        let last = SpectralField::new(g, sol.last().to_vec()).unwrap();
        let change = sobolev_norm(&again.sub(&last).unwrap(), PicardConfig::default().p);
        assert!(sol.report.accepted);
        assert!(
            change <= 10.0 * PicardConfig::default().tol,
            "change {change}"
        );
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let g = Grid2D::unit_periodic(8).unwrap();
        let (u, report) = picard_step(
            &SpectralField::zeros(g),
            0.1,
            &params(1.0, 1.0, 1.0),
            &Default::default(),
        )
        .unwrap();
        assert!(u.coeffs().iter().all(|v| *v == c(0.0, 0.0)));
        assert_eq!(report.iters, 1);
        assert!(report.accepted);
    }

    #[test]
    fn plane_wave_phase_after_one_step() {
        let g = Grid2D::unit_periodic(16).unwrap();
        let a = 0.5;
        let cfg = PicardConfig::default();
        for (lambda, mu) in [(0.0, 0.0), (3.0, 1.0)] {
            let u = SpectralField::single_mode(g, 1, 0, c(a, 0.0));
            let (out, report) = picard_step(&u, 0.01, &params(2.0, lambda, mu), &cfg).unwrap();
            assert!(report.accepted);
            let omega = 1.0 + 2.0 * a * a;
            let expect = Complex64::from_polar(a, -omega * 0.01);
            assert!((out.mode(1, 0) - expect).norm() < 1e-8);
        }
    }

    #[test]
    fn rejected_step_becomes_error() {
        let g = Grid2D::new(16, 16, 8.0, 8.0).unwrap();
        let u0 = gaussian(g, 6.0);
        let cfg = PicardConfig::default();
        let err = evolve(&u0, 2.0, 1.0, &params(-2.0, 1.0, 1.0), &cfg, &mut NullSink).unwrap_err();
        match err {
            Error::Rejected { t_last, report } => {
                assert_eq!(t_last, 0.0);
                assert!(!report.accepted);
            }
            Error::NonFinite { .. } => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn linear_evolution_is_free_flow() {
        let g = Grid2D::new(16, 16, 10.0, 10.0).unwrap();
        let u0 = gaussian(g, 1.0);
        let traj = evolve(
            &u0,
            1.0,
            0.1,
            &params(0.0, 0.0, 1.0),
            &Default::default(),
            &mut NullSink,
        )
        .unwrap();
        assert_eq!(traj.reports.len(), 10);
        assert!(l2_diff(&traj.state, &free_evolve(&u0, 1.0)) < 1e-10);
        let split = split_step_reference(&u0, 1.0, 0.1, &params(0.0, 0.0, 1.0)).unwrap();
        assert!(l2_diff(&split, &free_evolve(&u0, 1.0)) < 1e-12);
    }

    #[test]
    fn sink_sees_every_step_in_order() {
        let g = Grid2D::new(16, 16, 10.0, 10.0).unwrap();
        let u0 = gaussian(g, 0.5);
        let mut seen = Vec::new();
        let mut sink = |t: f64, _: &SpectralField, r: &StepReport| -> Result<()> {
            assert!(r.accepted);
            seen.push(t);
            Ok(())
        };
        evolve(
            &u0,
            0.25,
            0.1,
            &params(1.0, 0.5, 1.0),
            &Default::default(),
            &mut sink,
        )
        .unwrap();
        assert_eq!(seen.len(), 3);
        assert_eq!(seen[2], 0.25);
        assert!(seen.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn existence_time_trivial_cases() {
        let g = Grid2D::new(16, 16, 8.0, 8.0).unwrap();
        let cfg = PicardConfig::default();
        let (t, _) =
            existence_time_estimate(&SpectralField::zeros(g), &params(1.0, 1.0, 1.0), &cfg, 2.0)
                .unwrap();
        assert_eq!(t, 2.0);
        let (t, report) =
            existence_time_estimate(&gaussian(g, 3.0), &params(0.0, 0.0, 1.0), &cfg, 2.0).unwrap();
        assert_eq!(t, 2.0);
        assert_eq!(report.probes[0].max_ratio, 0.0);
    }

    #[test]
    fn existence_time_shrinks_with_amplitude() {
        let g = Grid2D::new(16, 16, 8.0, 8.0).unwrap();
        let cfg = PicardConfig::default();
        let p = params(-2.0, 1.0, 1.0);
        let (t1, _) = existence_time_estimate(&gaussian(g, 1.0), &p, &cfg, 1.0).unwrap();
        let (t2, _) = existence_time_estimate(&gaussian(g, 2.0), &p, &cfg, 1.0).unwrap();
        assert!(t2 <= t1, "{t2} > {t1}");
        assert!(t2 < 1.0);
    }
}
