use helmbem::linalg::{
    extreme_singular_values, extreme_singular_values_of, fit_loglog_slope, gmres,
    jacobi_singular_values, mass_inverse_times, LuFactors,
};
use helmbem::{
    build_mesh, make_geometry, BemError, Complex64, DenseComplexMatrix, GeometryId, GeometryParams,
    QuadratureOrders, RegularizerChoice, SvdOptions, SystemComponents,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(n: usize, seed: u64) -> DenseComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    DenseComplexMatrix::from_vec(n, data).unwrap()
}

fn random_vector(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let scale: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (diff / scale).sqrt()
}

fn system(id: GeometryId, k: f64) -> SystemComponents {
    let m = build_mesh(
        &make_geometry(id, &GeometryParams::default()).unwrap(),
        k,
        10.0,
    )
    .unwrap();
    SystemComponents::assemble(&m, k, RegularizerChoice::Sik, &QuadratureOrders::default()).unwrap()
}

#[test]
fn lu_recovers_known_solution() {
    let a = random_matrix(50, 1);
    let x = random_vector(50, 2);
    let b = a.matvec(&x);
    let got = LuFactors::factor(&a).unwrap().solve(&b).unwrap();
    assert!(rel_err(&got, &x) <= 1e-10);
}

#[test]
fn lu_is_backward_stable() {
    let n = 200;
    let a = random_matrix(n, 3);
    let lu = LuFactors::factor(&a).unwrap();
    let prod = lu.l_matrix().matmul(&lu.u_matrix()).unwrap();
    let pa = DenseComplexMatrix::from_fn(n, |i, j| a[(lu.permutation()[i], j)]);
    let defect = pa.sub(&prod).unwrap().frobenius_norm() / a.frobenius_norm();
    assert!(defect <= 1e-12, "{defect:e}");
    assert!(lu.pivot_growth() >= 1.0);
}

#[test]
fn lu_pivoting_and_singularity() {
    let swap =
        DenseComplexMatrix::from_vec(2, vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
    let x = LuFactors::factor(&swap)
        .unwrap()
        .solve(&[c(1.0, 1.0), c(2.0, 0.0)])
        .unwrap();
    assert_eq!(x, vec![c(2.0, 0.0), c(1.0, 1.0)]);
    let id = LuFactors::factor(&DenseComplexMatrix::identity(5)).unwrap();
    let b = random_vector(5, 4);
    assert_eq!(id.solve(&b).unwrap(), b);
    assert!(matches!(
        LuFactors::factor(&DenseComplexMatrix::zeros(3)),
        Err(BemError::Singular { .. })
    ));
}

#[test]
fn mass_operand_gives_unit_singular_values() {
    let s = system(GeometryId::Ellipse, 5.0);
    let e = extreme_singular_values(&s.mass.data, &s.mass_tri, &SvdOptions::default()).unwrap();
    assert!((e.sigma_max - 1.0).abs() <= 1e-6);
    assert!((e.sigma_min - 1.0).abs() <= 1e-6);
}

#[test]
fn diagonal_operator_through_actions() {
    let d = [1.0, 2.0, 3.0];
    let scale = |f: fn(f64) -> f64| {
        move |x: &[Complex64]| -> helmbem::Result<Vec<Complex64>> {
            Ok(x.iter().zip(d).map(|(v, di)| v * f(di)).collect())
        }
    };
    let e = extreme_singular_values_of(
        3,
        scale(|v| v),
        scale(|v| v),
        scale(|v| 1.0 / v),
        scale(|v| 1.0 / v),
        &SvdOptions::default(),
    )
    .unwrap();
    assert!((e.sigma_max - 3.0).abs() <= 1e-6 * 3.0);
    assert!((e.sigma_min - 1.0).abs() <= 1e-6);
    assert!(e.cond() >= 1.0);
}

#[test]
fn lanczos_agrees_with_dense_jacobi() {
    for id in [GeometryId::Circle, GeometryId::Kite, GeometryId::Square] {
        let s = system(id, 5.0);
        let b = s.b(0.5).unwrap().data;
        let e = extreme_singular_values(&b, &s.mass_tri, &SvdOptions::default()).unwrap();
        let all = jacobi_singular_values(&mass_inverse_times(&b, &s.mass_tri)).unwrap();
        let dense_cond = all[0] / all[all.len() - 1];
        assert!(
            (e.cond() - dense_cond).abs() <= 1e-4 * dense_cond,
            "{id:?}: {} vs {dense_cond}",
            e.cond()
        );
        assert!(e.sigma_max >= e.sigma_min);
    }
}

#[test]
fn singular_values_are_deterministic() {
    let run = || {
        let s = system(GeometryId::Circle, 5.0);
        extreme_singular_values(&s.b(0.5).unwrap().data, &s.mass_tri, &SvdOptions::default())
            .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.sigma_max.to_bits(), b.sigma_max.to_bits());
    assert_eq!(a.sigma_min.to_bits(), b.sigma_min.to_bits());
    assert_eq!(
        (a.iterations_max, a.iterations_min),
        (b.iterations_max, b.iterations_min)
    );
}

#[test]
fn lanczos_budget_exhaustion_is_an_error() {
    let s = system(GeometryId::Kite, 5.0);
    let opts = SvdOptions {
        tol: 1e-14,
        max_iter: 2,
    };
    let r = extreme_singular_values(&s.b(0.5).unwrap().data, &s.mass_tri, &opts);
    assert!(matches!(r, Err(BemError::NoConvergence { .. })), "{r:?}");
}

#[test]
fn gmres_small_cases() {
    let b = random_vector(6, 5);
    let out = gmres(|x| Ok(x.to_vec()), &b, 1e-12, 10).unwrap();
    assert!(out.converged);
    assert_eq!(out.iterations, 1);
    assert!(rel_err(&out.x, &b) <= 1e-14);

    let d = [c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
    let b = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
    let out = gmres(
        |x| Ok(x.iter().zip(&d).map(|(v, di)| v * di).collect()),
        &b,
        1e-12,
        10,
    )
    .unwrap();
    assert!(out.converged);
    assert!(out.iterations <= 2);
    assert!(rel_err(&out.x, &[c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.0)]) <= 1e-12);
}

#[test]
fn gmres_history_is_monotone_and_terminates() {
    let n = 100;
    let a = random_matrix(n, 6);
    let b = random_vector(n, 7);
    let out = gmres(|x| Ok(a.matvec(x)), &b, 1e-12, n + 2).unwrap();
    assert!(
        out.converged,
        "final residual {}",
        out.final_relative_residual()
    );
    assert!(out.iterations <= n + 2);
    assert_eq!(out.residual_history.len(), out.iterations + 1);
    for w in out.residual_history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
    let r: Vec<Complex64> = a
        .matvec(&out.x)
        .iter()
        .zip(&b)
        .map(|(u, v)| u - v)
        .collect();
    let true_res = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        / b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(true_res <= 1e-10, "{true_res:e}");
}

#[test]
fn gmres_on_the_preconditioned_system() {
    let s = system(GeometryId::Circle, 10.0);
    let b = s.b(0.5).unwrap().data;
    let rhs = s.mass_tri.solve(&random_vector(s.n(), 8));
    let out = gmres(
        |x| Ok(s.mass_tri.solve(&b.matvec(x))),
        &rhs,
        1e-6,
        s.n() + 2,
    )
    .unwrap();
    assert!(out.converged);
    assert!(out.iterations < s.n() / 2);
}

#[test]
fn slope_fits() {
    let ks = [5.0, 10.0, 20.0, 40.0, 80.0];
    let exact: Vec<f64> = ks.iter().map(|k: &f64| 2.5 * k.powf(0.34)).collect();
    let fit = fit_loglog_slope(&ks, &exact).unwrap();
    assert!((fit.slope - 0.34).abs() <= 1e-12);
    assert!((fit.intercept - 2.5f64.ln()).abs() <= 1e-12);
    assert!(fit.residual <= 1e-12);
    let flat = fit_loglog_slope(&ks, &[3.0; 5]).unwrap();
    assert!(flat.slope.abs() <= 1e-12);
    assert!(fit_loglog_slope(&ks[..2], &exact[..2]).is_err());
    assert!(fit_loglog_slope(&ks, &[1.0, 2.0, 0.0, 3.0, 4.0]).is_err());
}

fn noisy_slope(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ks: Vec<f64> = (0..9).map(|i| 5.0 * 2f64.powi(i)).collect();
    let values: Vec<f64> = ks
        .iter()
        .map(|k| k.powf(0.94) * (1.0 + rng.gen_range(-0.01..0.01)))
        .collect();
    fit_loglog_slope(&ks, &values).unwrap().slope
}

#[test]
fn noisy_slope_fit() {
    assert!((noisy_slope(0) - 0.94).abs() <= 0.02);
}

proptest! {
    #[test]
    fn noisy_slope_fit_for_any_seed(seed in any::<u64>()) {
        prop_assert!((noisy_slope(seed) - 0.94).abs() <= 0.02);
    }

    #[test]
    fn power_laws_are_fitted_exactly(a in -3.0f64..3.0, c0 in 1e-3f64..1e3) {
        let ks = [3.0, 7.0, 19.0, 50.0];
        let values: Vec<f64> = ks.iter().map(|k: &f64| c0 * k.powf(a)).collect();
        prop_assert!((fit_loglog_slope(&ks, &values).unwrap().slope - a).abs() <= 1e-10);
    }

    #[test]
    fn lu_solves_diagonally_dominant_systems(n in 1usize..40, seed in any::<u64>()) {
        let mut a = random_matrix(n, seed);
        for i in 0..n {
            a[(i, i)] += c(2.0 * n as f64, 0.0);
        }
        let x = random_vector(n, seed ^ 0xff);
        let lu = LuFactors::factor(&a).unwrap();
        prop_assert!(rel_err(&lu.solve(&a.matvec(&x)).unwrap(), &x) <= 1e-12);
        prop_assert!(rel_err(&lu.solve_adjoint(&a.matvec_adjoint(&x)).unwrap(), &x) <= 1e-12);
    }
}
