//! Fundamental solutions and their normal derivatives, split as
//! `total = log_coeff · ln r + smooth`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{BemError, Result};
use crate::geometry::Point;
use crate::specfun::{cylinder, cylinder_split, modified_k, modified_k0_split};

const INV_2PI: f64 = 1.0 / (2.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub total: Complex64,
    /// Factor multiplying `ln |x - y|`.
    pub log_coeff: Complex64,
    pub smooth: Complex64,
}

fn separation(x: Point, y: Point) -> Result<([f64; 2], f64)> {
    let d = [x[0] - y[0], x[1] - y[1]];
    let r = d[0].hypot(d[1]);
    if r == 0.0 {
        return Err(BemError::CoincidentPoints);
    }
    Ok((d, r))
}

fn check_wavenumber(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(BemError::InvalidArgument(format!(
            "wavenumber must be positive, got {k}"
        )))
    }
}

/// `Φ_k(x, y) = (i/4) H₀⁽¹⁾(k|x - y|)`.
pub fn phi_helmholtz(k: f64, x: Point, y: Point) -> Result<KernelValue> {
    check_wavenumber(k)?;
    let (_, r) = separation(x, y)?;
    let (total, _) = helmholtz_total(k, r);
    let ([c, _], [b, _]) = helmholtz_split(k, r);
    Ok(KernelValue {
        total,
        log_coeff: c,
        smooth: b,
    })
}

/// `Φ_{ik}(x, y) = K₀(k|x - y|) / 2π`.
pub fn phi_modified(k: f64, x: Point, y: Point) -> Result<KernelValue> {
    check_wavenumber(k)?;
    let (_, r) = separation(x, y)?;
    let total = modified_total(k, r);
    let (c, b) = modified_split(k, r);
    Ok(KernelValue {
        total: Complex64::new(total, 0.0),
        log_coeff: Complex64::new(c, 0.0),
        smooth: Complex64::new(b, 0.0),
    })
}

/// `Φ₀(x, y) = ln(a / |x - y|) / 2π`.
pub fn phi_laplace(a: f64, x: Point, y: Point) -> Result<KernelValue> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "Laplace constant must be positive, got {a}"
        )));
    }
    let (_, r) = separation(x, y)?;
    Ok(KernelValue {
        total: Complex64::new(laplace_total(a, r), 0.0),
        log_coeff: Complex64::new(-INV_2PI, 0.0),
        smooth: Complex64::new(a.ln() * INV_2PI, 0.0),
    })
}

/// `∂Φ_k(x, y)/∂n(y) = (ik/4) H₁⁽¹⁾(kr) (x - y)·n_y / r`.
pub fn phi_helmholtz_dny(k: f64, x: Point, y: Point, n_y: Point) -> Result<KernelValue> {
    check_wavenumber(k)?;
    let (d, r) = separation(x, y)?;
    let q = d[0] * n_y[0] + d[1] * n_y[1];
    let (_, g) = helmholtz_total(k, r);
    let ([_, cg], [_, bg]) = helmholtz_split(k, r);
    Ok(KernelValue {
        total: g * q,
        log_coeff: cg * q,
        smooth: bg * q,
    })
}

/// `∂Φ_k(x, y)/∂n(x) = (ik/4) H₁⁽¹⁾(kr) (y - x)·n_x / r`.
pub fn phi_helmholtz_dnx(k: f64, x: Point, y: Point, n_x: Point) -> Result<KernelValue> {
    phi_helmholtz_dny(k, y, x, n_x)
}

/// `(Φ, g)` with `g = (ik/4) H₁⁽¹⁾(kr) / r`, so `∂Φ/∂n(y) = g (x - y)·n_y`.
#[inline]
pub(crate) fn helmholtz_total(k: f64, r: f64) -> (Complex64, Complex64) {
    let c = cylinder(k * r);
    let phi = Complex64::new(-0.25 * c.y0, 0.25 * c.j0);
    let s = 0.25 * k / r;
    let g = Complex64::new(-s * c.y1, s * c.j1);
    (phi, g)
}

/// Log coefficients and smooth parts of `(Φ, g)`.
#[inline]
pub(crate) fn helmholtz_split(k: f64, r: f64) -> ([Complex64; 2], [Complex64; 2]) {
    let s = cylinder_split(k * r);
    let ln_half_k = (0.5 * k).ln();
    let c_phi = -INV_2PI * s.j0;
    let b_phi = Complex64::new(-INV_2PI * ln_half_k * s.j0 - 0.25 * s.y0_reg, 0.25 * s.j0);
    let inv_r = 1.0 / r;
    let c_g = -k * INV_2PI * s.j1 * inv_r;
    let b_g = Complex64::new(
        (-k * INV_2PI * ln_half_k * s.j1 - 0.25 * k * s.y1_reg) * inv_r,
        0.25 * k * s.j1 * inv_r,
    );
    (
        [Complex64::new(c_phi, 0.0), Complex64::new(c_g, 0.0)],
        [b_phi, b_g],
    )
}

#[inline]
pub(crate) fn modified_total(k: f64, r: f64) -> f64 {
    modified_k(k * r).0 * INV_2PI
}

#[inline]
pub(crate) fn modified_split(k: f64, r: f64) -> (f64, f64) {
    let (i0, k0_reg) = modified_k0_split(k * r);
    (-INV_2PI * i0, INV_2PI * (k0_reg - (0.5 * k).ln() * i0))
}

#[inline]
pub(crate) fn laplace_total(a: f64, r: f64) -> f64 {
    INV_2PI * (a / r).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coincident_points() {
        assert!(phi_helmholtz(1.0, [0.0, 0.0], [0.0, 0.0]).is_err());
        assert!(phi_modified(1.0, [1.0, 0.0], [1.0, 0.0]).is_err());
        assert!(phi_laplace(4.0, [1.0, 0.0], [1.0, 0.0]).is_err());
        assert!(phi_helmholtz(0.0, [0.0, 0.0], [1.0, 0.0]).is_err());
    }

    #[test]
    fn laplace_examples() {
        let v = phi_laplace(1.0, [0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(v.total.re, 0.0);
        let v = phi_laplace(4.0, [0.0, 0.0], [4.0, 0.0]).unwrap();
        assert_eq!(v.total.re, 0.0);
        let v = phi_laplace(4.0, [0.0, 0.0], [0.0, 1.0]).unwrap();
        assert!((v.total.re - 4f64.ln() / (2.0 * PI)).abs() < 1e-16);
    }

    #[test]
    fn perpendicular_normal_gives_zero() {
        let v = phi_helmholtz_dny(3.0, [0.0, 0.0], [0.5, 0.0], [0.0, 1.0]).unwrap();
        assert_eq!(v.total, Complex64::new(0.0, 0.0));
        assert_eq!(v.log_coeff, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn swap_relations() {
        let x = [0.3, -0.2];
        let y = [1.1, 0.7];
        let n = [0.6, 0.8];
        assert_eq!(
            phi_helmholtz_dny(7.0, x, y, n).unwrap(),
            phi_helmholtz_dnx(7.0, y, x, n).unwrap()
        );
        assert_eq!(
            phi_helmholtz(7.0, x, y).unwrap().total,
            phi_helmholtz(7.0, y, x).unwrap().total
        );
    }
}
