use std::collections::HashMap;
use std::f64::consts::PI;

use helmbem::specfun::*;
use proptest::prelude::*;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");

fn table(name: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(format!("{DATA}/{name}")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect()
}

fn scalars() -> HashMap<String, f64> {
    std::fs::read_to_string(format!("{DATA}/scalars.txt"))
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once(' ').unwrap();
            (k.to_string(), v.trim().parse().unwrap())
        })
        .collect()
}

fn check(name: &str, x: f64, got: f64, want: f64) {
    let rel = (got - want).abs() / want.abs();
    let abs = (got - want).abs();
    assert!(
        rel <= 1e-12 || abs <= 1e-12,
        "{name}({x}) = {got:e}, reference {want:e}, relative {rel:e}"
    );
}

#[test]
fn bessel_matches_reference_table() {
    let rows = table("bessel_reference.csv");
    assert!(rows.len() > 500);
    for r in rows {
        let x = r[0];
        check("J0", x, bessel_j0(x).unwrap(), r[1]);
        check("J1", x, bessel_j1(x).unwrap(), r[2]);
        check("Y0", x, bessel_y0(x).unwrap(), r[3]);
        check("Y1", x, bessel_y1(x).unwrap(), r[4]);
    }
}

#[test]
fn modified_bessel_matches_reference_table() {
    let rows = table("modified_bessel_reference.csv");
    assert!(rows.len() > 500);
    for r in rows {
        let x = r[0];
        check("I0", x, mod_bessel_i0(x).unwrap(), r[1]);
        check("I1", x, mod_bessel_i1(x).unwrap(), r[2]);
        check("K0", x, mod_bessel_k0(x).unwrap(), r[3]);
        check("K1", x, mod_bessel_k1(x).unwrap(), r[4]);
    }
}

#[test]
fn k0_at_one_matches_integral_representation() {
    let want = scalars()["k0_at_1_integral"];
    let got = mod_bessel_k0(1.0).unwrap();
    assert!(((got - want) / want).abs() <= 1e-12, "{got} vs {want}");
}

#[test]
fn hankel_at_imaginary_argument_is_k0() {
    let s = scalars();
    let want = s["k0_at_2_over_2pi"];
    assert!(((mod_bessel_k0(2.0).unwrap() / (2.0 * PI) - want) / want).abs() <= 1e-12);
    assert!(((s["hankel_i2_re"] - want) / want).abs() <= 1e-12);
    assert_eq!(s["hankel_i2_im"], 0.0);
}

#[test]
fn hankel_large_argument_magnitude() {
    let h = hankel1_0(500.0).unwrap();
    let want = scalars()["abs_h0_at_500"];
    assert!(((h.norm() - want) / want).abs() <= 1e-12);
    let asym = (2.0 / (PI * 500.0)).sqrt();
    assert!(((h.norm() - asym) / asym).abs() <= 2e-3);
}

#[test]
fn hankel_parts() {
    let h0 = hankel1_0(2.5).unwrap();
    assert_eq!(h0.re, bessel_j0(2.5).unwrap());
    assert_eq!(h0.im, bessel_y0(2.5).unwrap());
    let h1 = hankel1_1(2.5).unwrap();
    assert_eq!(h1.re, bessel_j1(2.5).unwrap());
    assert_eq!(h1.im, bessel_y1(2.5).unwrap());
}

#[test]
fn small_argument_expansions() {
    let x = 1e-6;
    let y0_reg = bessel_y0(x).unwrap() - 2.0 / PI * (x / 2.0).ln() * bessel_j0(x).unwrap();
    assert!((y0_reg - 2.0 * EULER_GAMMA / PI).abs() <= 1e-8);
    let k0_reg = mod_bessel_k0(x).unwrap() + (x / 2.0).ln() * mod_bessel_i0(x).unwrap();
    assert!((k0_reg + EULER_GAMMA).abs() <= 1e-8);
    assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
    assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    assert_eq!(mod_bessel_i0(0.0).unwrap(), 1.0);
}

fn log_grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| 10f64.powf(-3.0 + 6.0 * i as f64 / (n - 1) as f64))
}

#[test]
fn wronskians_on_log_grid() {
    for x in log_grid(1000) {
        let want = 2.0 / (PI * x);
        let w = bessel_j1(x).unwrap() * bessel_y0(x).unwrap()
            - bessel_j0(x).unwrap() * bessel_y1(x).unwrap();
        assert!(
            ((w - want) / want).abs() <= 1e-10,
            "J/Y Wronskian at {x}: {w} vs {want}"
        );
        if x <= 700.0 {
            let want = 1.0 / x;
            let w = mod_bessel_i0(x).unwrap() * mod_bessel_k1(x).unwrap()
                + mod_bessel_i1(x).unwrap() * mod_bessel_k0(x).unwrap();
            assert!(
                ((w - want) / want).abs() <= 1e-10,
                "I/K Wronskian at {x}: {w} vs {want}"
            );
        }
    }
}

#[test]
fn derivative_identities_by_central_differences() {
    for x in log_grid(200) {
        let h = 1e-6 * x.max(1.0);
        if x - h <= 0.0 {
            continue;
        }
        let d = |f: fn(f64) -> Result<f64, helmbem::BemError>| {
            (f(x + h).unwrap() - f(x - h).unwrap()) / (2.0 * h)
        };
        assert!(
            (d(bessel_j0) + bessel_j1(x).unwrap()).abs() <= 1e-6,
            "J0' at {x}"
        );
        if x >= 0.1 {
            let scale = bessel_y1(x).unwrap().abs().max(1.0);
            assert!(
                (d(bessel_y0) + bessel_y1(x).unwrap()).abs() <= 1e-6 * scale,
                "Y0' at {x}"
            );
        }
        if x <= 50.0 {
            assert!(
                (d(mod_bessel_i0) - mod_bessel_i1(x).unwrap()).abs()
                    <= 1e-6 * mod_bessel_i1(x).unwrap().max(1.0)
            );
        }
        if x >= 0.1 {
            let k1 = mod_bessel_k1(x).unwrap();
            assert!(
                (d(mod_bessel_k0) + k1).abs() <= 1e-6 * k1.max(1.0),
                "K0' at {x}"
            );
        }
    }
}

#[test]
fn switchovers_are_continuous() {
    for c in [2.0, 4.0, 20.0, 25.0] {
        for f in [
            bessel_j0,
            bessel_j1,
            bessel_y0,
            bessel_y1,
            mod_bessel_i0,
            mod_bessel_k0,
            mod_bessel_k1,
        ] {
            let (a, b) = (f(c * (1.0 - 1e-14)).unwrap(), f(c * (1.0 + 1e-14)).unwrap());
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                "jump at {c}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn domain_errors() {
    assert!(bessel_y0(0.0).is_err());
    assert!(mod_bessel_k1(-1.0).is_err());
    assert!(bessel_j0(f64::NAN).is_err());
    assert!(hankel1_0(0.0).is_err());
}

proptest! {
    #[test]
    fn k_functions_decrease(x in 1e-4f64..600.0, step in 1e-3f64..1.0) {
        prop_assert!(mod_bessel_k0(x + step).unwrap() < mod_bessel_k0(x).unwrap());
        prop_assert!(mod_bessel_k1(x + step).unwrap() < mod_bessel_k1(x).unwrap());
    }

    #[test]
    fn integer_orders_satisfy_wronskian(x in 0.5f64..150.0) {
        let n_max = (x as usize) + 20;
        let (j, y) = integer_orders(x, n_max).unwrap();
        for n in 0..n_max {
            let w = j[n + 1] * y[n] - j[n] * y[n + 1];
            let want = 2.0 / (PI * x);
            prop_assert!(((w - want) / want).abs() <= 1e-9, "n = {}: {} vs {}", n, w, want);
        }
    }
}
