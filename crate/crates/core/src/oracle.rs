//! Analytic circle spectra and the operator-identity checks used as ground
//! truth for the assembled matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::assembly::{
    assemble_slp, QuadratureOrders, RegularizerChoice, SlpMode, SystemComponents,
};
use crate::error::{BemError, Result};
use crate::geometry::BoundaryMesh;
use crate::linalg::eigen::symmetric_eigenvalues;
use crate::linalg::{dot, mass_inverse_times, CyclicTridiagonal, DenseComplexMatrix};
use crate::specfun::{integer_orders, modified_integer_orders};

pub const MAX_CIRCLE_MODE: usize = 200;
/// Bound on `|s_n h_n + 1/4 - d_n²|` for an accepted mode.
pub const MODE_CALDERON_TOL: f64 = 1e-10;
/// Relative bound on the exact transpose and symmetry identities.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Eigenvalues of `S_k`, `K_k` (equal to those of `K'_k`) and `H_k` on `e^{inθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleMode {
    pub n: i32,
    #[serde(serialize_with = "ser_complex")]
    pub s: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub d: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub h: Complex64,
}

impl CircleMode {
    pub fn calderon_defect(&self) -> f64 {
        (self.s * self.h + 0.25 - self.d * self.d).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleSpectrum {
    pub k: f64,
    pub radius: f64,
    /// Modes `-n_max..=n_max` that passed the consistency check, ascending.
    pub modes: Vec<CircleMode>,
    /// Modes lost to recurrence overflow or a failed consistency check.
    pub dropped: Vec<i32>,
}

impl CircleSpectrum {
    pub fn mode(&self, n: i32) -> Option<&CircleMode> {
        self.modes.iter().find(|m| m.n == n)
    }
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Circle of radius `radius` centred at the origin:
/// `s_n = (iπa/2) J_n H_n`, `d_n = (iπz/4)(J_n' H_n + J_n H_n')`,
/// `h_n = (iπzk/2) J_n' H_n'` with `z = ka` and `H_n = H_n⁽¹⁾(z)`.
pub fn circle_spectrum(k: f64, radius: f64, n_max: usize) -> Result<CircleSpectrum> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if n_max > MAX_CIRCLE_MODE {
        return Err(BemError::InvalidArgument(format!(
            "mode count {n_max} exceeds {MAX_CIRCLE_MODE}"
        )));
    }
    let positive = nonnegative_modes(k, radius, n_max);
    let mut modes = Vec::new();
    let mut dropped = Vec::new();
    for n in -(n_max as i32)..=(n_max as i32) {
        match positive[n.unsigned_abs() as usize] {
            Some(m) => modes.push(CircleMode { n, ..m }),
            None => dropped.push(n),
        }
    }
    Ok(CircleSpectrum {
        k,
        radius,
        modes,
        dropped,
    })
}

/// Modes `0..=n_max`; `None` where the recurrences overflow or the
/// consistency check fails.
fn nonnegative_modes(k: f64, radius: f64, n_max: usize) -> Vec<Option<CircleMode>> {
    let z = k * radius;
    let i = Complex64::new(0.0, 1.0);
    let mut positive: Vec<Option<CircleMode>> = vec![None; n_max + 1];
    // one extra order for the derivative recurrence
    if let Some((j, y)) = integer_orders(z, n_max + 1) {
        for n in 0..=n_max {
            let h = Complex64::new(j[n], y[n]);
            let (jd, yd) = if n == 0 {
                (-j[1], -y[1])
            } else {
                let f = n as f64 / z;
                (j[n - 1] - f * j[n], y[n - 1] - f * y[n])
            };
            let hd = Complex64::new(jd, yd);
            let mode = CircleMode {
                n: n as i32,
                s: i * (PI * radius / 2.0) * j[n] * h,
                d: i * (PI * z / 4.0) * (jd * h + j[n] * hd),
                h: i * (PI * z * k / 2.0) * jd * hd,
            };
            let finite = [mode.s, mode.d, mode.h]
                .iter()
                .all(|v| v.re.is_finite() && v.im.is_finite());
            if finite && mode.calderon_defect() <= MODE_CALDERON_TOL {
                positive[n] = Some(mode);
            }
        }
    }
    positive
}

/// Norms of the continuous operator `B = iη(½ − K) + R H` on a circle, where
/// every operator is diagonal in the Fourier basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleNorms {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Modes `|n| ≤ modes` were scanned.
    pub modes: usize,
}

/// `max |b_n|` and `min |b_n|` over the modes of the circle, with
/// `b_n = iη(½ − d_n) + r_n h_n` and `r_n` the regularizer eigenvalue
/// (`a I_n(ka) K_n(ka)` for `S_ik`, `a ln(A/a)` and `a/2|n|` for `S_0`).
pub fn circle_b_norms(
    k: f64,
    radius: f64,
    eta: f64,
    reg: RegularizerChoice,
) -> Result<CircleNorms> {
    if !(k > 0.0) || !k.is_finite() || !(radius > 0.0) || !radius.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "need k > 0 and radius > 0, got {k} and {radius}"
        )));
    }
    if eta == 0.0 || !eta.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "coupling parameter eta must be finite and nonzero, got {eta}"
        )));
    }
    let z = k * radius;
    let n_max = (2.0 * z).ceil() as usize + 60;
    let modes = nonnegative_modes(k, radius, n_max);
    let reg_values: Vec<f64> = match reg {
        RegularizerChoice::Sik => {
            let (i, kk) = modified_integer_orders(z, n_max).ok_or_else(|| {
                BemError::InvalidArgument(format!("modified Bessel recurrence overflow at k = {k}"))
            })?;
            i.iter().zip(&kk).map(|(a, b)| radius * a * b).collect()
        }
        RegularizerChoice::S0 { a } => (0..=n_max)
            .map(|n| {
                if n == 0 {
                    radius * (a / radius).ln()
                } else {
                    radius / (2.0 * n as f64)
                }
            })
            .collect(),
        RegularizerChoice::None => {
            return Err(BemError::InvalidArgument(
                "the unregularized operator is unbounded on L²; no norm to report".into(),
            ))
        }
    };
    let i = Complex64::new(0.0, 1.0);
    let mut sigma_max: f64 = 0.0;
    let mut sigma_min = f64::INFINITY;
    for (n, m) in modes.iter().enumerate() {
        let m = m.ok_or_else(|| {
            BemError::InvalidArgument(format!("circle mode {n} unavailable at k = {k}"))
        })?;
        let b = (i * eta * (0.5 - m.d) + m.h * reg_values[n]).norm();
        sigma_max = sigma_max.max(b);
        sigma_min = sigma_min.min(b);
    }
    Ok(CircleNorms {
        sigma_max,
        sigma_min,
        modes: n_max,
    })
}

/// `(e^{inθ_j})_j` at the mesh nodes, `θ_j` the polar angle of node `j`.
pub fn fourier_vector(mesh: &BoundaryMesh, n: i32) -> Vec<Complex64> {
    mesh.nodes
        .iter()
        .map(|p| Complex64::from_polar(1.0, n as f64 * p[1].atan2(p[0])))
        .collect()
}

/// `vᴴAv / vᴴMv`
pub fn rayleigh_quotient(
    a: &DenseComplexMatrix,
    mass: &CyclicTridiagonal,
    v: &[Complex64],
) -> Complex64 {
    dot(v, &a.matvec(v)) / dot(v, &mass.apply(v))
}

/// Galerkin Rayleigh quotients against the analytic eigenvalues for one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeComparison {
    pub n: i32,
    pub s_rel_err: f64,
    pub d_rel_err: f64,
    pub dp_rel_err: f64,
    pub h_rel_err: f64,
}

impl ModeComparison {
    pub fn worst(&self) -> f64 {
        self.s_rel_err
            .max(self.d_rel_err)
            .max(self.dp_rel_err)
            .max(self.h_rel_err)
    }
}

/// Compares `S_k`, `K_k`, `K'_k` and `H_k` from `comp` with `spectrum` on the
/// Fourier modes `|n| ≤ n_max`.
pub fn compare_with_circle(
    mesh: &BoundaryMesh,
    comp: &SystemComponents,
    spectrum: &CircleSpectrum,
    n_max: i32,
) -> Result<Vec<ModeComparison>> {
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    let mut out = Vec::new();
    for n in -n_max..=n_max {
        let m = spectrum.mode(n).ok_or_else(|| {
            BemError::InvalidArgument(format!("mode {n} missing from the circle spectrum"))
        })?;
        let v = fourier_vector(mesh, n);
        out.push(ModeComparison {
            n,
            s_rel_err: rel(rayleigh_quotient(&comp.ops.s.data, &comp.mass_tri, &v), m.s),
            d_rel_err: rel(rayleigh_quotient(&comp.ops.k.data, &comp.mass_tri, &v), m.d),
            dp_rel_err: rel(
                rayleigh_quotient(&comp.ops.kp.data, &comp.mass_tri, &v),
                m.d,
            ),
            h_rel_err: rel(rayleigh_quotient(&comp.ops.h.data, &comp.mass_tri, &v), m.h),
        });
    }
    Ok(out)
}

/// `‖M⁻¹(S M⁻¹H + ¼M − K M⁻¹K)‖₂`
pub fn calderon_residual(comp: &SystemComponents) -> Result<f64> {
    let minv_h = mass_inverse_times(&comp.ops.h.data, &comp.mass_tri);
    let minv_k = mass_inverse_times(&comp.ops.k.data, &comp.mass_tri);
    let sh = comp.ops.s.data.matmul(&minv_h)?;
    let kk = comp.ops.k.data.matmul(&minv_k)?;
    let mut r = sh
        .sub(&kk)?
        .add_scaled(Complex64::new(0.25, 0.0), &comp.mass.data)?;
    comp.mass_tri.solve_rows(r.as_mut_slice());
    Ok(r.spectral_norm())
}

/// `‖A − B‖₂ / ‖A‖₂`
fn relative_defect(a: &DenseComplexMatrix, b: &DenseComplexMatrix) -> Result<f64> {
    let scale = a.spectral_norm();
    let diff = a.sub(b)?.spectral_norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

fn real_part_min_eigenvalue(a: &DenseComplexMatrix) -> Result<f64> {
    let re: Vec<f64> = a.as_slice().iter().map(|z| z.re).collect();
    let vals = symmetric_eigenvalues(&re, a.n())?;
    Ok(vals.first().copied().unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// `true` when `value` must stay below `threshold`, `false` when above.
    pub upper_bound: bool,
    pub passed: bool,
}

impl Check {
    fn below(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            upper_bound: true,
            passed: value <= threshold,
        }
    }

    fn above(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            upper_bound: false,
            passed: value > threshold,
        }
    }
}

/// Measured identity residuals for one assembled system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub geometry: String,
    pub k: f64,
    pub eta: f64,
    pub regularizer: String,
    pub n_dof: usize,
    pub calderon_residual: f64,
    pub transpose_b: f64,
    pub transpose_k: f64,
    pub symmetry_m: f64,
    pub symmetry_s: f64,
    pub symmetry_h: f64,
    pub m_min_eigenvalue: f64,
    pub sik_max_imag: f64,
    pub sik_symmetry: f64,
    pub sik_min_eigenvalue: f64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Assembles the system for `(mesh, k, η, reg)` and measures every identity.
/// A Calderón threshold, when given, becomes a hard check.
pub fn verify_identities(
    mesh: &BoundaryMesh,
    k: f64,
    eta: f64,
    reg: RegularizerChoice,
    orders: &QuadratureOrders,
    calderon_threshold: Option<f64>,
) -> Result<IdentityReport> {
    let comp = SystemComponents::assemble(mesh, k, reg, orders)?;
    verify_components(mesh, &comp, eta, orders, calderon_threshold)
}

pub fn verify_components(
    mesh: &BoundaryMesh,
    comp: &SystemComponents,
    eta: f64,
    orders: &QuadratureOrders,
    calderon_threshold: Option<f64>,
) -> Result<IdentityReport> {
    let b = comp.b(eta)?;
    let bp = comp.bprime(eta)?;
    let sik = match (&comp.reg, &comp.regularizer) {
        (RegularizerChoice::Sik, Some(r)) => r.clone(),
        _ => assemble_slp(mesh, SlpMode::Modified(comp.k), orders)?,
    };
    let sym = |a: &DenseComplexMatrix| relative_defect(a, &a.transpose());
    let calderon = calderon_residual(comp)?;
    let transpose_b = relative_defect(&b.data.transpose(), &bp.data)?;
    let transpose_k = relative_defect(&comp.ops.k.data.transpose(), &comp.ops.kp.data)?;
    let symmetry_m = sym(&comp.mass.data)?;
    let symmetry_s = sym(&comp.ops.s.data)?;
    let symmetry_h = sym(&comp.ops.h.data)?;
    let sik_symmetry = sym(&sik.data)?;
    let m_min = real_part_min_eigenvalue(&comp.mass.data)?;
    let sik_max_imag = sik
        .data
        .as_slice()
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    let sik_min = real_part_min_eigenvalue(&sik.data)?;

    let mut checks = vec![
        Check::below("transpose B^T = B'", transpose_b, ALGEBRAIC_TOL),
        Check::below("transpose K^T = K'", transpose_k, ALGEBRAIC_TOL),
        Check::below("symmetry M", symmetry_m, ALGEBRAIC_TOL),
        Check::below("symmetry S_k", symmetry_s, ALGEBRAIC_TOL),
        Check::below("symmetry H_k", symmetry_h, ALGEBRAIC_TOL),
        Check::above("M positive definite", m_min, 0.0),
        Check::below("S_ik real", sik_max_imag, 0.0),
        Check::below("symmetry S_ik", sik_symmetry, ALGEBRAIC_TOL),
        Check::above("S_ik positive definite", sik_min, 0.0),
    ];
    if let Some(t) = calderon_threshold {
        checks.push(Check::below("Calderon residual", calderon, t));
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(IdentityReport {
        geometry: mesh.geometry.to_string(),
        k: comp.k,
        eta,
        regularizer: comp.reg.to_string(),
        n_dof: mesh.n_dof,
        calderon_residual: calderon,
        transpose_b,
        transpose_k,
        symmetry_m,
        symmetry_s,
        symmetry_h,
        m_min_eigenvalue: m_min,
        sik_max_imag,
        sik_symmetry,
        sik_min_eigenvalue: sik_min,
        checks,
        passed,
    })
}
