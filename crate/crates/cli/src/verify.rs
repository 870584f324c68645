//! Verification report and circle-oracle comparisons.

use helmbem::assembly::mass_tridiagonal;
use helmbem::geometry::{build_mesh_capped, Classification};
use helmbem::linalg::eigen::symmetric_eigenvalues;
use helmbem::oracle::{
    circle_b_norms, circle_spectrum, compare_with_circle, verify_components, CircleNorms,
    CircleSpectrum, IdentityReport, ModeComparison,
};
use helmbem::{
    make_geometry, BoundaryMesh, GeometryId, ParametricCurve, RegularizerChoice, SystemComponents,
};
use serde::Serialize;

use crate::{OperatorSpec, Result};

/// Hard Calderón bound on smooth boundaries. Corner geometries report the
/// residual without a bound.
pub const CALDERON_SMOOTH_THRESHOLD: f64 = 0.05;
/// Largest allowed change of `cond(M)` when the mesh is refined twofold.
pub const MASS_COND_RATIO: f64 = 2.0;
/// Largest allowed ratio of circle-oracle errors after a twofold refinement.
pub const ORACLE_REFINEMENT_RATIO: f64 = 0.5;
pub const ORACLE_MODES: i32 = 5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassConditioning {
    pub ppw: f64,
    pub cond_coarse: f64,
    pub cond_fine: f64,
    /// Larger over smaller condition number.
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleCrossCheck {
    pub k: f64,
    pub ppw: f64,
    pub worst_coarse: f64,
    pub worst_fine: f64,
    pub ratio: f64,
    pub passed: bool,
    pub modes: Vec<ModeComparison>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub geometry: String,
    pub ppw: f64,
    pub identities: Vec<IdentityReport>,
    pub mass_conditioning: MassConditioning,
    pub circle: Option<CircleCrossCheck>,
    pub passed: bool,
}

pub fn calderon_threshold(curve: &ParametricCurve) -> Option<f64> {
    match curve.classification {
        Classification::SmoothCurved | Classification::Smooth => Some(CALDERON_SMOOTH_THRESHOLD),
        _ => None,
    }
}

/// `λ_max / λ_min` of the mass matrix.
pub fn mass_condition_number(mesh: &BoundaryMesh) -> Result<f64> {
    let tri = mass_tridiagonal(mesh)?;
    let eig = symmetric_eigenvalues(&tri.to_dense(), tri.n())?;
    Ok(eig[eig.len() - 1] / eig[0])
}

fn mass_conditioning(
    curve: &ParametricCurve,
    spec: &OperatorSpec,
    k: f64,
) -> Result<MassConditioning> {
    let coarse = mass_condition_number(&build_mesh_capped(curve, k, spec.ppw, spec.dof_cap)?)?;
    let fine = mass_condition_number(&build_mesh_capped(curve, k, 2.0 * spec.ppw, spec.dof_cap)?)?;
    let ratio = coarse.max(fine) / coarse.min(fine);
    Ok(MassConditioning {
        ppw: spec.ppw,
        cond_coarse: coarse,
        cond_fine: fine,
        ratio,
        passed: ratio < MASS_COND_RATIO,
    })
}

/// Rayleigh quotients of the Galerkin operators against the analytic circle
/// eigenvalues for `|n| ≤ n_max`.
pub fn circle_mode_errors(
    curve: &ParametricCurve,
    spec: &OperatorSpec,
    k: f64,
    ppw: f64,
    n_max: i32,
) -> Result<Vec<ModeComparison>> {
    let radius = spec.params.radius.unwrap_or(1.0);
    let mesh = build_mesh_capped(curve, k, ppw, spec.dof_cap)?;
    let comp = SystemComponents::assemble(&mesh, k, RegularizerChoice::None, &spec.quadrature)?;
    let spectrum = circle_spectrum(k, radius, n_max.unsigned_abs() as usize)?;
    Ok(compare_with_circle(&mesh, &comp, &spectrum, n_max)?)
}

fn worst(modes: &[ModeComparison]) -> f64 {
    modes.iter().map(ModeComparison::worst).fold(0.0, f64::max)
}

fn circle_cross_check(
    curve: &ParametricCurve,
    spec: &OperatorSpec,
    k: f64,
) -> Result<CircleCrossCheck> {
    let coarse = circle_mode_errors(curve, spec, k, spec.ppw, ORACLE_MODES)?;
    let fine = circle_mode_errors(curve, spec, k, 2.0 * spec.ppw, ORACLE_MODES)?;
    let (worst_coarse, worst_fine) = (worst(&coarse), worst(&fine));
    let ratio = worst_fine / worst_coarse;
    Ok(CircleCrossCheck {
        k,
        ppw: spec.ppw,
        worst_coarse,
        worst_fine,
        ratio,
        passed: ratio <= ORACLE_REFINEMENT_RATIO,
        modes: coarse,
    })
}

/// Identity checks at every `k` of the `OperatorSpec` (with `η` at the first exponent),
/// mass conditioning under refinement and, on the circle, the Fourier-mode
/// cross-check against the analytic spectrum.
pub fn run_verify(spec: &OperatorSpec) -> Result<VerifyReport> {
    let curve = make_geometry(spec.geometry, &spec.params)?;
    let alpha = spec.eta.alphas.first().copied().unwrap_or(0.0);
    let threshold = calderon_threshold(&curve);
    let mut identities = Vec::new();
    for &k in &spec.k_list {
        let mesh = build_mesh_capped(&curve, k, spec.ppw, spec.dof_cap)?;
        let comp = SystemComponents::assemble(&mesh, k, spec.regularizer, &spec.quadrature)?;
        identities.push(verify_components(
            &mesh,
            &comp,
            spec.eta.eta(alpha, k),
            &spec.quadrature,
            threshold,
        )?);
    }
    let k0 = spec.k_list[0];
    let mass_conditioning = mass_conditioning(&curve, spec, k0)?;
    let circle = match spec.geometry {
        GeometryId::Circle => Some(circle_cross_check(&curve, spec, k0)?),
        _ => None,
    };
    let passed = identities.iter().all(|r| r.passed)
        && mass_conditioning.passed
        && circle.as_ref().is_none_or(|c| c.passed);
    Ok(VerifyReport {
        geometry: spec.geometry.to_string(),
        ppw: spec.ppw,
        identities,
        mass_conditioning,
        circle,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircleOracleReport {
    pub spectrum: CircleSpectrum,
    /// Norms of the continuous `B` at the first `η`, absent without a regularizer.
    pub norms: Option<CircleNorms>,
    /// Galerkin comparison on a circle mesh at the resolution of the `OperatorSpec`.
    pub galerkin: Vec<ModeComparison>,
    pub worst_rel_err: f64,
}

/// Analytic circle spectra at every `k` of the `OperatorSpec`, compared with the
/// Galerkin matrices on modes `|n| ≤ min(n_max, 5)`.
pub fn run_oracle_circle(spec: &OperatorSpec, n_max: usize) -> Result<Vec<CircleOracleReport>> {
    let curve = make_geometry(GeometryId::Circle, &spec.params)?;
    let radius = spec.params.radius.unwrap_or(1.0);
    let alpha = spec.eta.alphas.first().copied().unwrap_or(0.0);
    let mut out = Vec::new();
    for &k in &spec.k_list {
        let spectrum = circle_spectrum(k, radius, n_max)?;
        let norms = match spec.regularizer {
            RegularizerChoice::None => None,
            reg => Some(circle_b_norms(k, radius, spec.eta.eta(alpha, k), reg)?),
        };
        let galerkin =
            circle_mode_errors(&curve, spec, k, spec.ppw, (n_max as i32).min(ORACLE_MODES))?;
        out.push(CircleOracleReport {
            spectrum,
            norms,
            worst_rel_err: worst(&galerkin),
            galerkin,
        });
    }
    Ok(out)
}
