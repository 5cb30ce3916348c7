//! General dispersive systems in 1 to 3 dimensions:
//!
//! `i u_t = omega(-i grad) u + g(u, u*) + h(u, u*) . grad phi`,
//! `P phi = div f(u, u*)`,
//!
//! with `omega` a real polynomial (the dispersion relation, so the free flow
//! is `exp(-i omega(k) t)`), `P` a constant-coefficient second-order
//! operator and `g`, `h`, `f` truncated power series in `(u, u*)` without
//! constant term. DS-II is the instance built by [`GeneralSystemSpec::ds2`].

use num_complex::Complex64;

use crate::ds2::DS2Params;
use crate::error::{Error, Result};
use crate::spectral::{forward_nd, inverse_nd, FieldN, GridN, SobolevExponent, AXIS_NAMES};
use crate::stepper::{
    evolve_generic, existence_time_generic, DiagnosticsSink, Dynamics, ExistenceReport,
    PicardConfig, Trajectory,
};

pub const DEFAULT_MAX_DEGREE: u32 = 5;

/// Real polynomial in the wavevector components.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: Vec<(Vec<u32>, f64)>,
}

impl Polynomial {
    pub fn new(terms: Vec<(Vec<u32>, f64)>) -> Self {
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn eval(&self, k: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exps, coef)| {
                exps.iter()
                    .zip(k)
                    .fold(*coef, |acc, (&e, &ki)| acc * ki.powi(e as i32))
            })
            .sum()
    }
}

/// Truncated power series `sum c_ab u^a (u*)^b`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSeries {
    terms: Vec<((u32, u32), Complex64)>,
}

impl PowerSeries {
    pub fn new(terms: Vec<((u32, u32), Complex64)>) -> Self {
        PowerSeries { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Single term `coef u^a (u*)^b`.
    pub fn monomial(a: u32, b: u32, coef: Complex64) -> Self {
        PowerSeries {
            terms: vec![((a, b), coef)],
        }
    }

    pub fn terms(&self) -> &[((u32, u32), Complex64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, c)| *c == Complex64::new(0.0, 0.0))
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|((a, b), _)| a + b)
            .max()
            .unwrap_or(0)
    }

    fn validate(&self, key: &str, max_degree: u32) -> Result<()> {
        for ((a, b), c) in &self.terms {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::config(key, "coefficients must be finite"));
            }
            if *a == 0 && *b == 0 && *c != Complex64::new(0.0, 0.0) {
                return Err(Error::config(key, "constant term must vanish"));
            }
            if a + b > max_degree {
                return Err(Error::config(
                    key,
                    format!("term u^{a} (u*)^{b} exceeds maximum degree {max_degree}"),
                ));
            }
        }
        Ok(())
    }
}

/// Pointwise `sum c_ab u^a (u*)^b`.
pub fn series_eval(series: &PowerSeries, u: &[Complex64], conj: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(u.len(), conj.len());
    let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
    for ((a, b), coef) in &series.terms {
        for ((o, x), y) in out.iter_mut().zip(u).zip(conj) {
            *o += coef * x.powu(*a) * y.powu(*b);
        }
    }
    out
}

/// `P = sum a_ij d_i d_j + sum b_i d_i + c` with real constant coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SecondOrderOperator {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub c: f64,
}

impl SecondOrderOperator {
    /// Laplacian in `n` dimensions.
    pub fn laplacian(n: usize) -> Self {
        let mut op = Self::default();
        for i in 0..n {
            op.a[i][i] = 1.0;
        }
        op
    }

    /// Fourier symbol `-sum a_ij k_i k_j + i sum b_i k_i + c` (`d_j -> i k_j`).
    pub fn symbol(&self, k: &[f64; 3]) -> Complex64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        for i in 0..3 {
            lin += self.b[i] * k[i];
            for j in 0..3 {
                quad += self.a[i][j] * k[i] * k[j];
            }
        }
        Complex64::new(self.c - quad, lin)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSystemSpec {
    pub n: usize,
    pub omega: Polynomial,
    pub p_op: SecondOrderOperator,
    pub g: PowerSeries,
    pub f_bar: Vec<PowerSeries>,
    pub h_bar: Vec<PowerSeries>,
    pub p: SobolevExponent,
    pub max_degree: u32,
}

impl GeneralSystemSpec {
    /// Pure dispersion `omega` with no nonlinearity.
    pub fn linear(n: usize, omega: Polynomial, p: SobolevExponent) -> Self {
        GeneralSystemSpec {
            n,
            omega,
            p_op: SecondOrderOperator::laplacian(n),
            g: PowerSeries::zero(),
            f_bar: vec![PowerSeries::zero(); n],
            h_bar: vec![PowerSeries::zero(); n],
            p,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }

    /// DS-II: `omega = k^2 - m^2`, `P` the Laplacian, `g = gamma u^2 u*`,
    /// `f = (mu u u*, 0)`, `h = (lambda u, 0)`.
    pub fn ds2(params: &DS2Params) -> Self {
        let re = |x: f64| Complex64::new(x, 0.0);
        GeneralSystemSpec {
            n: 2,
            omega: Polynomial::new(vec![(vec![2, 0], 1.0), (vec![0, 2], -1.0)]),
            p_op: SecondOrderOperator::laplacian(2),
            g: PowerSeries::monomial(2, 1, re(params.gamma)),
            f_bar: vec![
                PowerSeries::monomial(1, 1, re(params.mu)),
                PowerSeries::zero(),
            ],
            h_bar: vec![
                PowerSeries::monomial(1, 0, re(params.lambda)),
                PowerSeries::zero(),
            ],
            p: params.p,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }

    /// One-dimensional cubic NLS `i u_t = -u_xx + gamma |u|^2 u`.
    pub fn cubic_nls_1d(gamma: f64, p: SobolevExponent) -> Self {
        let mut spec = Self::linear(1, Polynomial::new(vec![(vec![2], 1.0)]), p);
        spec.g = PowerSeries::monomial(2, 1, Complex64::new(gamma, 0.0));
        spec
    }

    /// Grid-independent checks.
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(Error::config(
                "general.n",
                format!("dimension must be 1, 2 or 3, got {}", self.n),
            ));
        }
        self.p.require_above(self.n as f64 / 2.0, "params.p")?;
        for (exps, coef) in self.omega.terms() {
            if exps.len() != self.n {
                return Err(Error::config(
                    "omega",
                    format!("exponent tuple {exps:?} does not have {} entries", self.n),
                ));
            }
            if !coef.is_finite() {
                return Err(Error::config("omega", "coefficients must be finite"));
            }
        }
        if self.f_bar.len() != self.n || self.h_bar.len() != self.n {
            return Err(Error::config(
                "f_bar",
                format!("f_bar and h_bar need {} components", self.n),
            ));
        }
        self.g.validate("g", self.max_degree)?;
        for axis in 0..self.n {
            let name = AXIS_NAMES[axis];
            self.f_bar[axis].validate(&format!("f_bar.{name}"), self.max_degree)?;
            self.h_bar[axis].validate(&format!("h_bar.{name}"), self.max_degree)?;
        }
        let op = &self.p_op;
        let all =
            op.a.iter()
                .flatten()
                .chain(&op.b)
                .chain(std::iter::once(&op.c));
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::config("p_op", "coefficients must be finite"));
        }
        Ok(())
    }

    fn has_mean_flow(&self) -> bool {
        self.f_bar.iter().any(|s| !s.is_zero()) && self.h_bar.iter().any(|s| !s.is_zero())
    }
}

/// A validated spec bound to a grid, with symbols precomputed.
#[derive(Debug, Clone)]
pub struct GeneralModel {
    spec: GeneralSystemSpec,
    grid: GridN,
    dispersion: Vec<f64>,
    wavevectors: Vec<[f64; 3]>,
    /// `1 / P(k)`, zero at the origin.
    inv_symbol: Vec<Complex64>,
}

impl GeneralModel {
    pub fn new(spec: GeneralSystemSpec, grid: GridN) -> Result<Self> {
        spec.validate()?;
        if grid.dim() != spec.n {
            return Err(Error::config(
                "general.n",
                format!(
                    "grid has {} axes but the system has n = {}",
                    grid.dim(),
                    spec.n
                ),
            ));
        }
        let wavevectors = grid.wavevectors();
        let dispersion: Vec<f64> = wavevectors
            .iter()
            .map(|k| spec.omega.eval(&k[..spec.n]))
            .collect();
        if dispersion.iter().any(|w| !w.is_finite()) {
            return Err(Error::config("omega", "not finite on the lattice"));
        }
        let op = &spec.p_op;
        let scale =
            op.a.iter()
                .flatten()
                .chain(&op.b)
                .chain(std::iter::once(&op.c))
                .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut inv_symbol = Vec::with_capacity(wavevectors.len());
        for (flat, k) in wavevectors.iter().enumerate() {
            if flat == 0 {
                inv_symbol.push(Complex64::new(0.0, 0.0));
                continue;
            }
            let s = op.symbol(k);
            let k2 = k.iter().map(|x| x * x).sum::<f64>();
            if s.norm() <= 1e-12 * scale * (1.0 + k2) || scale == 0.0 {
                return Err(Error::config(
                    "p_op",
                    format!(
                        "symbol of P vanishes at lattice mode k = {:?}",
                        &k[..spec.n]
                    ),
                ));
            }
            inv_symbol.push(1.0 / s);
        }
        Ok(GeneralModel {
            spec,
            grid,
            dispersion,
            wavevectors,
            inv_symbol,
        })
    }

    pub fn spec(&self) -> &GeneralSystemSpec {
        &self.spec
    }

    /// Gradient components `(d_j phi)^` for forcing transforms `(f_j)^`.
    pub fn solve_p_coeffs(&self, forcing: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = self.spec.n;
        let phi: Vec<Complex64> = (0..self.grid.len())
            .map(|idx| {
                let k = &self.wavevectors[idx];
                let div: Complex64 = (0..n)
                    .map(|j| Complex64::new(0.0, k[j]) * forcing[j][idx])
                    .sum();
                div * self.inv_symbol[idx]
            })
            .collect();
        (0..n)
            .map(|j| {
                phi.iter()
                    .zip(&self.wavevectors)
                    .map(|(f, k)| Complex64::new(0.0, k[j]) * f)
                    .collect()
            })
            .collect()
    }

    fn nonlinear_coeffs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let shape = self.grid.shape();
        let u = inverse_nd(coeffs, shape);
        let conj: Vec<Complex64> = u.iter().map(|v| v.conj()).collect();
        let mut total = series_eval(&self.spec.g, &u, &conj);
        if self.spec.has_mean_flow() {
            let forcing: Vec<Vec<Complex64>> = self
                .spec
                .f_bar
                .iter()
                .map(|s| forward_nd(&series_eval(s, &u, &conj), shape))
                .collect();
            let grad = self.solve_p_coeffs(&forcing);
            for (h, g_hat) in self.spec.h_bar.iter().zip(&grad) {
                if h.is_zero() {
                    continue;
                }
                let hv = series_eval(h, &u, &conj);
                let gv = inverse_nd(g_hat, shape);
                for ((t, a), b) in total.iter_mut().zip(&hv).zip(&gv) {
                    *t += a * b;
                }
            }
        }
        forward_nd(&total, shape)
    }
}

impl Dynamics for GeneralModel {
    fn grid(&self) -> &GridN {
        &self.grid
    }

    fn dispersion(&self) -> &[f64] {
        &self.dispersion
    }

    fn nonlinear(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        self.nonlinear_coeffs(coeffs)
    }
}

/// Transform of `grad phi` for `P phi = div f`, one field per axis.
///
/// `forcing_hat` holds the transforms of the components of `f`.
pub fn solve_p(forcing_hat: &[FieldN], spec: &GeneralSystemSpec) -> Result<Vec<FieldN>> {
    let grid = forcing_hat
        .first()
        .ok_or_else(|| Error::config("f_bar", "no forcing components"))?
        .grid()
        .clone();
    if forcing_hat.len() != spec.n || forcing_hat.iter().any(|f| f.grid() != &grid) {
        return Err(Error::config(
            "f_bar",
            format!("need {} forcing components on one grid", spec.n),
        ));
    }
    let model = GeneralModel::new(spec.clone(), grid.clone())?;
    let forcing: Vec<Vec<Complex64>> = forcing_hat.iter().map(|f| f.coeffs().to_vec()).collect();
    Ok(model
        .solve_p_coeffs(&forcing)
        .into_iter()
        .map(|c| FieldN::from_parts(grid.clone(), c))
        .collect())
}

/// Transform of `g(u, u*) + h(u, u*) . grad phi`.
pub fn general_rhs(u_hat: &FieldN, spec: &GeneralSystemSpec) -> Result<FieldN> {
    let model = GeneralModel::new(spec.clone(), u_hat.grid().clone())?;
    Ok(FieldN::from_parts(
        u_hat.grid().clone(),
        model.nonlinear_coeffs(u_hat.coeffs()),
    ))
}

/// Free flow `exp(-i omega(k) t)` of a general system.
pub fn general_free_evolve(u_hat: &FieldN, spec: &GeneralSystemSpec, t: f64) -> Result<FieldN> {
    let model = GeneralModel::new(spec.clone(), u_hat.grid().clone())?;
    let coeffs = u_hat
        .coeffs()
        .iter()
        .zip(&model.dispersion)
        .map(|(c, w)| c * Complex64::from_polar(1.0, -w * t))
        .collect();
    Ok(FieldN::from_parts(u_hat.grid().clone(), coeffs))
}

pub fn general_evolve(
    u0: &FieldN,
    spec: &GeneralSystemSpec,
    t_end: f64,
    dt: f64,
    cfg: &PicardConfig,
    sink: &mut dyn DiagnosticsSink<FieldN>,
) -> Result<Trajectory<FieldN>> {
    let model = GeneralModel::new(spec.clone(), u0.grid().clone())?;
    let grid = u0.grid().clone();
    evolve_generic(
        &model,
        u0.coeffs(),
        t_end,
        dt,
        cfg,
        |c| FieldN::from_parts(grid.clone(), c),
        sink,
    )
}

pub fn general_existence_time(
    u0: &FieldN,
    spec: &GeneralSystemSpec,
    cfg: &PicardConfig,
    t_max: f64,
) -> Result<(f64, ExistenceReport)> {
    let model = GeneralModel::new(spec.clone(), u0.grid().clone())?;
    existence_time_generic(&model, u0.coeffs(), cfg, t_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ds2::{nonlinear_n, phi_x_from_u};
    use crate::spectral::{Grid2D, SpectralField};
    use crate::stepper::NullSink;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exponent(p: f64) -> SobolevExponent {
        SobolevExponent::new(p).unwrap()
    }

    fn grid1(n: usize) -> GridN {
        GridN::new(vec![n], vec![2.0 * PI]).unwrap()
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut s = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(7);
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        (0..n).map(|_| c(next(), next())).collect()
    }

    #[test]
    fn series_eval_cases() {
        let u = vec![c(3.0, 4.0); 5];
        let conj: Vec<Complex64> = u.iter().map(|v| v.conj()).collect();
        assert!(series_eval(&PowerSeries::zero(), &u, &conj)
            .iter()
            .all(|v| *v == c(0.0, 0.0)));
        let modsq = PowerSeries::monomial(1, 1, c(1.0, 0.0));
        assert!(series_eval(&modsq, &u, &conj)
            .iter()
            .all(|v| *v == c(25.0, 0.0)));

        let u = pseudo_random(64, 3);
        let conj: Vec<Complex64> = u.iter().map(|v| v.conj()).collect();
        let g = PowerSeries::monomial(2, 1, c(-1.7, 0.0));
        for (got, v) in series_eval(&g, &u, &conj).iter().zip(&u) {
            assert!((got - (-1.7) * v.norm_sqr() * v).norm() < 1e-13);
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = GeneralSystemSpec::cubic_nls_1d(1.0, exponent(0.75));
        assert!(spec.validate().is_ok());
        spec.g = PowerSeries::monomial(0, 0, c(1.0, 0.0));
        assert!(spec.validate().is_err());
        spec.g = PowerSeries::monomial(4, 3, c(1.0, 0.0));
        assert!(spec.validate().is_err());
        let spec = GeneralSystemSpec::cubic_nls_1d(1.0, exponent(0.5));
        assert!(spec.validate().is_err());
        let spec = GeneralSystemSpec::ds2(&DS2Params::new(1.0, 1.0, 1.0, 1.5).unwrap());
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn degenerate_operator_rejected_at_setup() {
        let g = Grid2D::unit_periodic(8).unwrap().to_nd();
        let mut spec = GeneralSystemSpec::ds2(&DS2Params::new(1.0, 1.0, 1.0, 1.5).unwrap());
        // d_xx alone vanishes on every k = 0 mode
        spec.p_op.a[1][1] = 0.0;
        let err = GeneralModel::new(spec.clone(), g.clone()).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "p_op"));
        // wave operator d_xx - d_yy vanishes on the diagonal
        spec.p_op.a[1][1] = -1.0;
        assert!(GeneralModel::new(spec, g).is_err());
    }

    #[test]
    fn solve_p_zero_forcing() {
        let g = grid1(8);
        let spec = GeneralSystemSpec::cubic_nls_1d(1.0, exponent(1.0));
        let out = solve_p(&[FieldN::zeros(g)], &spec).unwrap();
        assert!(out[0].coeffs().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn solve_p_single_mode_1d() {
        let g = grid1(8);
        let spec = GeneralSystemSpec::cubic_nls_1d(1.0, exponent(1.0));
        let amp = c(0.3, -0.8);
        let mut coeffs = vec![c(0.0, 0.0); 8];
        coeffs[1] = amp;
        let out = solve_p(&[FieldN::new(g, coeffs).unwrap()], &spec).unwrap();
        // (i k)(i k c) / (-k^2) = c at k = 1
        assert!((out[0].coeffs()[1] - amp).norm() < 1e-15);
        assert_eq!(out[0].coeffs()[0], c(0.0, 0.0));
    }

    #[test]
    fn solve_p_matches_ds2_phi_x() {
        let grid = Grid2D::new(8, 8, 5.0, 7.0).unwrap();
        let params = DS2Params::new(1.0, 0.5, 1.3, 1.5).unwrap();
        let spec = GeneralSystemSpec::ds2(&params);
        let u = SpectralField::new(grid, pseudo_random(64, 1)).unwrap();
        let phys = u.to_physical();
        let rho: Vec<Complex64> = phys
            .iter()
            .map(|v| c(params.mu * v.norm_sqr(), 0.0))
            .collect();
        let nd = grid.to_nd();
        let forcing = vec![
            FieldN::from_physical(nd.clone(), &rho).unwrap(),
            FieldN::zeros(nd.clone()),
        ];
        let grad = solve_p(&forcing, &spec).unwrap();
        let expect = phi_x_from_u(&u, params.mu);
        for (a, b) in grad[0].coeffs().iter().zip(expect.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        for g in &grad {
            assert_eq!(g.coeffs()[0], c(0.0, 0.0));
        }
    }

    #[test]
    fn general_rhs_cases() {
        let params = DS2Params::new(1.0, 0.5, 1.0, 1.5).unwrap();
        let spec = GeneralSystemSpec::ds2(&params);
        let grid = Grid2D::new(8, 8, 6.0, 4.0).unwrap();
        let zero = general_rhs(&FieldN::zeros(grid.to_nd()), &spec).unwrap();
        assert!(zero.coeffs().iter().all(|v| *v == c(0.0, 0.0)));

        let u = SpectralField::new(grid, pseudo_random(64, 9)).unwrap();
        let a = general_rhs(&u.to_nd(), &spec).unwrap();
        let b = nonlinear_n(&u, &params);
        let num: f64 = a
            .coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let den: f64 = b.coeffs().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        assert!(num / den < 1e-10);

        let spec = GeneralSystemSpec::cubic_nls_1d(1.0, exponent(1.0));
        let amp = c(0.4, 0.3);
        let mut coeffs = vec![c(0.0, 0.0); 8];
        coeffs[2] = amp;
        let out = general_rhs(&FieldN::new(grid1(8), coeffs).unwrap(), &spec).unwrap();
        for (i, v) in out.coeffs().iter().enumerate() {
            let expect = if i == 2 {
                amp.norm_sqr() * amp
            } else {
                c(0.0, 0.0)
            };
            assert!((v - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn linear_spec_is_free_flow_and_unitary() {
        let g = GridN::new(vec![8, 8], vec![4.0, 5.0]).unwrap();
        let omega = Polynomial::new(vec![
            (vec![2, 0], 1.0),
            (vec![1, 1], 0.5),
            (vec![0, 3], 0.1),
        ]);
        let spec = GeneralSystemSpec::linear(2, omega, exponent(1.5));
        let u0 = FieldN::new(g, pseudo_random(64, 4)).unwrap();
        let traj = general_evolve(
            &u0,
            &spec,
            0.5,
            0.1,
            &PicardConfig::default(),
            &mut NullSink,
        )
        .unwrap();
        let free = general_free_evolve(&u0, &spec, 0.5).unwrap();
        for (a, b) in traj.state.coeffs().iter().zip(free.coeffs()) {
            assert!((a - b).norm() < 1e-10);
        }
        for p in [0.0, 1.5, 3.0] {
            let (a, b) = (u0.sobolev_norm(exponent(p)), free.sobolev_norm(exponent(p)));
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn zero_is_fixed_point_of_general_flow() {
        let spec = GeneralSystemSpec::ds2(&DS2Params::new(-2.0, 1.0, 1.0, 1.5).unwrap());
        let g = GridN::new(vec![8, 8], vec![4.0, 4.0]).unwrap();
        let traj = general_evolve(
            &FieldN::zeros(g),
            &spec,
            0.2,
            0.05,
            &Default::default(),
            &mut NullSink,
        )
        .unwrap();
        assert!(traj.state.coeffs().iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn nls_plane_wave_phase_1d() {
        let g = GridN::new(vec![16], vec![2.0 * PI]).unwrap();
        let (amp, gamma) = (0.5, 1.5);
        let spec = GeneralSystemSpec::cubic_nls_1d(gamma, exponent(1.0));
        let mut coeffs = vec![c(0.0, 0.0); 16];
        coeffs[2] = c(amp, 0.0);
        let u0 = FieldN::new(g, coeffs).unwrap();
        let t = 0.2;
        let traj = general_evolve(&u0, &spec, t, 0.01, &Default::default(), &mut NullSink).unwrap();
        let omega = 4.0 + gamma * amp * amp;
        let got = traj.state.mode(&[2]);
        assert!((got - Complex64::from_polar(amp, -omega * t)).norm() < 1e-8);
    }

    /// Central differences of a sampled plane wave reproduce the symbols
    /// `d_j -> i k_j` and `sum a_ij d_i d_j -> -sum a_ij k_i k_j`.
    #[test]
    fn symbol_sign_conventions_by_finite_differences() {
        let k = [1.3, -0.7, 0.0];
        let wave = |x: f64, y: f64| Complex64::from_polar(1.0, k[0] * x + k[1] * y);
        let h = 1e-4;
        let (x0, y0) = (0.37, -1.1);
        let u0 = wave(x0, y0);

        let dx = (wave(x0 + h, y0) - wave(x0 - h, y0)) / (2.0 * h);
        let first = SecondOrderOperator {
            b: [1.0, 0.0, 0.0],
            ..Default::default()
        };
        assert!((dx - first.symbol(&k) * u0).norm() < 1e-6);

        let op = SecondOrderOperator {
            a: [[2.0, 0.5, 0.0], [0.5, -1.0, 0.0], [0.0; 3]],
            ..Default::default()
        };
        let dxx = (wave(x0 + h, y0) - 2.0 * u0 + wave(x0 - h, y0)) / (h * h);
        let dyy = (wave(x0, y0 + h) - 2.0 * u0 + wave(x0, y0 - h)) / (h * h);
        let dxy = (wave(x0 + h, y0 + h) - wave(x0 + h, y0 - h) - wave(x0 - h, y0 + h)
            + wave(x0 - h, y0 - h))
            / (4.0 * h * h);
        let applied = 2.0 * dxx + 2.0 * 0.5 * dxy - dyy;
        assert!((applied - op.symbol(&k) * u0).norm() < 1e-6);
    }
}
