use helmbem::assembly::{assemble_hyp, assemble_mass, assemble_slp, mass_tridiagonal, SlpMode};
use helmbem::geometry::build_mesh_with_counts;
use helmbem::linalg::eigen::symmetric_eigenvalues;
use helmbem::linalg::{extreme_singular_values, mass_inverse_times};
use helmbem::{
    build_mesh, make_geometry, BoundaryMesh, Complex64, DenseComplexMatrix, GeometryId,
    GeometryParams, QuadratureOrders, RegularizerChoice, SvdOptions, SystemComponents,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn mesh(id: GeometryId, k: f64, ppw: f64) -> BoundaryMesh {
    build_mesh(
        &make_geometry(id, &GeometryParams::default()).unwrap(),
        k,
        ppw,
    )
    .unwrap()
}

fn components(m: &BoundaryMesh, k: f64, reg: RegularizerChoice) -> SystemComponents {
    SystemComponents::assemble(m, k, reg, &QuadratureOrders::default()).unwrap()
}

fn min_real_eigenvalue(a: &DenseComplexMatrix) -> f64 {
    let re: Vec<f64> = a.as_slice().iter().map(|z| z.re).collect();
    symmetric_eigenvalues(&re, a.n()).unwrap()[0]
}

const REGS: [RegularizerChoice; 3] = [
    RegularizerChoice::Sik,
    RegularizerChoice::S0 {
        a: RegularizerChoice::DEFAULT_S0_A,
    },
    RegularizerChoice::None,
];

#[test]
fn mass_entries_and_sums() {
    let m = mesh(GeometryId::Circle, 5.0, 10.0);
    let h = m.panel_length[0];
    let mass = assemble_mass(&m).unwrap().data;
    let n = m.n_dof;
    assert!((mass[(3, 3)].re - 2.0 * h / 3.0).abs() < 1e-15);
    assert!((mass[(3, 4)].re - h / 6.0).abs() < 1e-15);
    assert!((mass[(0, n - 1)].re - h / 6.0).abs() < 1e-15);
    assert_eq!(mass[(0, 2)], Complex64::new(0.0, 0.0));
    for id in GeometryId::ALL {
        let m = mesh(id, 5.0, 10.0);
        let mass = assemble_mass(&m).unwrap().data;
        let n = m.n_dof;
        for j in 0..n {
            let row: f64 = mass.row(j).iter().map(|z| z.re).sum();
            let half = 0.5 * (m.panel_length[(j + n - 1) % n] + m.panel_length[j]);
            assert!((row - half).abs() < 1e-14, "{id:?} row {j}");
        }
        let total: f64 = mass.as_slice().iter().map(|z| z.re).sum();
        assert!((total - m.perimeter()).abs() < 1e-12 * m.perimeter());
        assert_eq!(mass.symmetry_defect(), 0.0);
    }
}

#[test]
fn symmetric_operators_are_symmetric() {
    for id in GeometryId::ALL {
        let m = mesh(id, 5.0, 10.0);
        let c = components(&m, 5.0, RegularizerChoice::Sik);
        let s = &c.ops.s.data;
        let h = &c.ops.h.data;
        assert!(s.symmetry_defect() <= 1e-12 * s.max_abs(), "{id:?} S");
        assert!(h.symmetry_defect() <= 1e-12 * h.max_abs(), "{id:?} H");
        let kt = c.ops.k.data.transpose();
        assert!(
            kt.sub(&c.ops.kp.data).unwrap().max_abs() <= 1e-12 * kt.max_abs(),
            "{id:?} K"
        );
    }
}

#[test]
fn modified_single_layer_is_real_spd_on_every_geometry() {
    for id in GeometryId::ALL {
        for k in [5.0, 10.0, 20.0] {
            let m = mesh(id, k, 10.0);
            let s = assemble_slp(&m, SlpMode::Modified(k), &QuadratureOrders::default())
                .unwrap()
                .data;
            assert!(s.as_slice().iter().all(|z| z.im == 0.0));
            assert!(s.symmetry_defect() <= 1e-13 * s.max_abs());
            let lam = min_real_eigenvalue(&s);
            assert!(lam > 0.0, "{id:?} k = {k}: min eigenvalue {lam:e}");
        }
    }
}

#[test]
fn laplace_single_layer_is_spd_with_large_constant() {
    for id in GeometryId::ALL {
        let m = mesh(id, 5.0, 10.0);
        let s = assemble_slp(
            &m,
            SlpMode::Laplace(RegularizerChoice::DEFAULT_S0_A),
            &QuadratureOrders::default(),
        )
        .unwrap()
        .data;
        assert!(min_real_eigenvalue(&s) > 0.0, "{id:?}");
    }
}

#[test]
fn hypersingular_nearly_annihilates_constants_at_small_k() {
    let c = make_geometry(GeometryId::Ellipse, &GeometryParams::default()).unwrap();
    let m = build_mesh_with_counts(&c, &[48]).unwrap();
    let ones = vec![Complex64::new(1.0, 0.0); m.n_dof];
    let ratio = |k: f64| {
        let h = assemble_hyp(&m, k, &QuadratureOrders::default())
            .unwrap()
            .data;
        let image = h.matvec(&ones).iter().map(|z| z.norm()).fold(0.0, f64::max);
        image / h.max_abs()
    };
    let small = ratio(1e-3);
    assert!(small < 1e-4, "{small:e}");
    assert!(ratio(1.0) > 100.0 * small);
}

#[test]
fn b_entry_matches_its_definition() {
    let m = mesh(GeometryId::Kite, 4.0, 10.0);
    let c = components(&m, 4.0, RegularizerChoice::Sik);
    let eta = 0.7;
    let b = c.b(eta).unwrap().data;
    let minv_h = mass_inverse_times(&c.ops.h.data, &c.mass_tri);
    let r = &c.regularizer.as_ref().unwrap().data;
    for (i, j) in [(0, 0), (2, 7), (11, 3)] {
        let composed: Complex64 = (0..m.n_dof).map(|l| r[(i, l)] * minv_h[(l, j)]).sum();
        let want = I * eta * (0.5 * c.mass.data[(i, j)] - c.ops.k.data[(i, j)]) + composed;
        assert!(
            (b[(i, j)] - want).norm() <= 1e-12 * want.norm().max(1.0),
            "({i}, {j})"
        );
    }
}

#[test]
fn zero_coupling_is_rejected() {
    let m = mesh(GeometryId::Circle, 3.0, 10.0);
    let c = components(&m, 3.0, RegularizerChoice::Sik);
    assert!(c.b(0.0).is_err());
    assert!(c.bprime(f64::NAN).is_err());
    assert!(c.b_impedance(0.5, -1.0).is_err());
    assert!(c.planewave_rhs(&m, 0.0, 0.0).is_err());
}

#[test]
fn transposed_pairs() {
    for id in GeometryId::ALL {
        let m = mesh(id, 5.0, 10.0);
        for reg in REGS {
            let c = components(&m, 5.0, reg);
            let b = c.b(0.5).unwrap().data;
            let bp = c.bprime(0.5).unwrap().data;
            let scale = b.max_abs();
            assert!(
                b.transpose().sub(&bp).unwrap().max_abs() <= 1e-11 * scale,
                "{id:?} {reg:?}"
            );
            let bi = c.b_impedance(0.5, 5.0).unwrap().data;
            let bpi = c.bprime_impedance(0.5, 5.0).unwrap().data;
            assert!(
                bi.transpose().sub(&bpi).unwrap().max_abs() <= 1e-11 * bi.max_abs(),
                "{id:?} {reg:?}"
            );
            assert_eq!(c.b_impedance(0.5, 0.0).unwrap().data, b);
            assert_eq!(c.bprime_impedance(0.5, 0.0).unwrap().data, bp);
        }
    }
}

#[test]
fn unregularized_bprime_is_the_classic_operator() {
    let m = mesh(GeometryId::Square, 3.0, 10.0);
    let c = components(&m, 3.0, RegularizerChoice::None);
    let eta = 1.5;
    let bp = c.bprime(eta).unwrap().data;
    let want = DenseComplexMatrix::from_fn(m.n_dof, |i, j| {
        I * eta * (0.5 * c.mass.data[(i, j)] - c.ops.kp.data[(i, j)]) + c.ops.h.data[(i, j)]
    });
    assert_eq!(bp, want);
}

#[test]
fn circle_b_and_bprime_share_singular_values() {
    let m = mesh(GeometryId::Circle, 8.0, 10.0);
    let opts = SvdOptions {
        tol: 1e-12,
        max_iter: 5000,
    };
    for reg in REGS {
        let c = components(&m, 8.0, reg);
        let a = extreme_singular_values(&c.b(0.5).unwrap().data, &c.mass_tri, &opts).unwrap();
        let b = extreme_singular_values(&c.bprime(0.5).unwrap().data, &c.mass_tri, &opts).unwrap();
        assert!(
            (a.sigma_max - b.sigma_max).abs() <= 10.0 * opts.tol.sqrt() * a.sigma_max,
            "{reg:?}"
        );
        assert!(
            (a.sigma_min - b.sigma_min).abs() <= 10.0 * opts.tol.sqrt() * a.sigma_min,
            "{reg:?}"
        );
    }
}

#[test]
fn planewave_rhs_norm_converges_under_refinement() {
    let k = 5.0;
    for id in [GeometryId::Circle, GeometryId::Ellipse, GeometryId::Kite] {
        let scaled = |ppw: f64| {
            let m = mesh(id, k, ppw);
            let c = components(&m, k, RegularizerChoice::Sik);
            let rhs = c.planewave_rhs(&m, 0.5, std::f64::consts::PI).unwrap();
            rhs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / m.h_max.sqrt()
        };
        let (coarse, mid, fine) = (scaled(10.0), scaled(20.0), scaled(40.0));
        assert!((mid - fine).abs() < 0.01 * fine, "{id:?}: {mid} vs {fine}");
        let order = ((coarse - mid) / (mid - fine)).abs().log2();
        assert!(order > 1.8, "{id:?}: observed order {order}");
    }
}

#[test]
fn planewave_rhs_at_small_k_is_the_dirichlet_moment() {
    let c = make_geometry(GeometryId::Kite, &GeometryParams::default()).unwrap();
    let m = build_mesh_with_counts(&c, &[40]).unwrap();
    let k = 1e-8;
    let comp = components(&m, k, RegularizerChoice::Sik);
    let rhs = comp.planewave_rhs(&m, 1.0, 0.0).unwrap();
    let ones = vec![Complex64::new(1.0, 0.0); m.n_dof];
    let rows = mass_tridiagonal(&m).unwrap().apply(&ones);
    for (got, row) in rhs.iter().zip(&rows) {
        assert!((got - I * row).norm() < 1e-6 * row.norm());
    }
    let wrong = mesh(GeometryId::Kite, 3.0, 10.0);
    assert!(comp.planewave_rhs(&wrong, 1.0, 0.0).is_err());
}

#[test]
fn assembly_is_bit_identical_across_thread_counts() {
    let m = mesh(GeometryId::Moon, 6.0, 10.0);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                components(&m, 6.0, RegularizerChoice::Sik)
                    .b(0.5)
                    .unwrap()
                    .data
            })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}
