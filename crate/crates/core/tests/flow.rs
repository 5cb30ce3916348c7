mod common;

use std::f64::consts::PI;

use common::*;
use ds2sim::{
    duhamel_rhs, evolve, general_evolve, general_free_evolve, nonlinear_n, picard_nodes, solve_p,
    Complex64, DS2Params, FieldN, GeneralSystemSpec, Grid2D, GridN, NullSink, PicardConfig,
    Polynomial, SobolevExponent, SpectralField,
};

fn params() -> DS2Params {
    DS2Params::new(-2.0, 1.0, 1.0, 1.5).unwrap()
}

fn smooth(seed: u64, grid: Grid2D) -> SpectralField {
    SmoothBumps::random(&mut rng(seed), 3, (0.9, 1.4), 1.0).field(grid)
}

#[test]
fn flow_is_gauge_covariant() {
    let grid = Grid2D::new(32, 32, 12.0, 12.0).unwrap();
    let u0 = smooth(11, grid);
    let cfg = PicardConfig::default();
    let phase = Complex64::from_polar(1.0, 0.7);
    let a = evolve(&u0.scale(phase), 0.1, 0.01, &params(), &cfg, &mut NullSink)
        .unwrap()
        .state;
    let b = evolve(&u0, 0.1, 0.01, &params(), &cfg, &mut NullSink)
        .unwrap()
        .state
        .scale(phase);
    assert!(field_l2_diff(&a, &b) <= 5e-10);
}

#[test]
fn flow_is_deterministic() {
    let grid = Grid2D::new(32, 32, 12.0, 12.0).unwrap();
    let u0 = smooth(12, grid);
    let cfg = PicardConfig::default();
    let run = || evolve(&u0, 0.05, 0.01, &params(), &cfg, &mut NullSink).unwrap();
    let (a, b) = (run(), run());
    let bits = |f: &SpectralField| -> Vec<u64> {
        f.coeffs()
            .iter()
            .flat_map(|c| [c.re.to_bits(), c.im.to_bits()])
            .collect()
    };
    assert_eq!(bits(&a.state), bits(&b.state));
    assert_eq!(a.reports, b.reports);
}

#[test]
fn converged_nodes_are_a_fixed_point() {
    let grid = Grid2D::new(16, 16, 12.0, 12.0).unwrap();
    let u0 = smooth(13, grid);
    let cfg = PicardConfig::default();
    let dt = 0.02;
    let sol = picard_nodes(&u0, dt, &params(), &cfg).unwrap();
    assert!(sol.report.accepted);
    let history: Vec<(f64, SpectralField)> = sol
        .times
        .iter()
        .zip(&sol.nodes)
        .map(|(&t, c)| {
            (
                t,
                nonlinear_n(&SpectralField::new(grid, c.clone()).unwrap(), &params()),
            )
        })
        .collect();
    let again = duhamel_rhs(&u0, &history, dt).unwrap();
    let last = SpectralField::new(grid, sol.nodes.last().unwrap().clone()).unwrap();
    let change = again.sub(&last).unwrap();
    assert!(ds2sim::sobolev_norm(&change, cfg.p) <= 10.0 * cfg.tol);
}

#[test]
fn split_step_error_is_second_order() {
    let grid = Grid2D::new(32, 32, 12.0, 12.0).unwrap();
    let u0 = smooth(14, grid);
    let cfg = PicardConfig::default();
    let err = |dt: f64| {
        let a = evolve(&u0, 0.1, dt, &params(), &cfg, &mut NullSink)
            .unwrap()
            .state;
        let b = ds2sim::split_step_reference(&u0, 0.1, dt, &params()).unwrap();
        field_l2_diff(&a, &b)
    };
    let ratio = err(0.02) / err(0.01);
    assert!(ratio >= 3.5, "ratio {ratio}");
}

fn general_specs() -> Vec<(GeneralSystemSpec, GridN)> {
    let p2 = SobolevExponent::new(1.5).unwrap();
    let p1 = SobolevExponent::new(1.0).unwrap();
    vec![
        (
            GeneralSystemSpec::ds2(&params()),
            GridN::new(vec![16, 16], vec![10.0, 10.0]).unwrap(),
        ),
        (
            GeneralSystemSpec::cubic_nls_1d(-1.0, p1),
            GridN::new(vec![32], vec![2.0 * PI]).unwrap(),
        ),
        (
            GeneralSystemSpec::linear(
                2,
                Polynomial::new(vec![(vec![2, 0], 1.0), (vec![0, 2], 2.0)]),
                p2,
            ),
            GridN::new(vec![16, 8], vec![6.0, 4.0]).unwrap(),
        ),
    ]
}

#[test]
fn zero_is_a_fixed_point_of_every_system() {
    for (spec, grid) in general_specs() {
        let out = general_evolve(
            &FieldN::zeros(grid),
            &spec,
            0.05,
            0.01,
            &PicardConfig::default(),
            &mut NullSink,
        )
        .unwrap();
        assert!(out
            .state
            .coeffs()
            .iter()
            .all(|c| *c == Complex64::new(0.0, 0.0)));
    }
}

#[test]
fn linear_general_flow_conserves_every_norm() {
    let (spec, grid) = general_specs().pop().unwrap();
    let u = FieldN::new(grid.clone(), random_values(&mut rng(15), grid.len())).unwrap();
    for p in [0.0, 1.0, 2.5] {
        let p = SobolevExponent::new(p).unwrap();
        let after = general_free_evolve(&u, &spec, 0.37).unwrap();
        assert!((after.sobolev_norm(p) - u.sobolev_norm(p)).abs() <= 1e-12 * u.sobolev_norm(p));
    }
}

#[test]
fn elliptic_solve_has_no_mean() {
    let spec = GeneralSystemSpec::ds2(&params());
    let grid = GridN::new(vec![8, 8], vec![5.0, 7.0]).unwrap();
    let mut r = rng(16);
    let forcing: Vec<FieldN> = (0..2)
        .map(|_| FieldN::new(grid.clone(), random_values(&mut r, grid.len())).unwrap())
        .collect();
    for grad in solve_p(&forcing, &spec).unwrap() {
        assert_eq!(grad.mode(&[0, 0]), Complex64::new(0.0, 0.0));
    }
}
