//! Galerkin matrices for continuous piecewise-linear elements and the
//! regularized combined-field systems built from them.

mod compose;
mod dump;
mod engine;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::{BoundaryMesh, Point};
use crate::kernels::{
    helmholtz_split, helmholtz_total, laplace_total, modified_split, modified_total,
};
use crate::linalg::{CyclicTridiagonal, DenseComplexMatrix};
use engine::{for_each_pair, PairKernel};

pub use compose::{
    assemble_b, assemble_b_impedance, assemble_bprime, assemble_bprime_impedance,
    assemble_planewave_rhs, SystemComponents,
};
pub use dump::{read_matrix, write_matrix, MATRIX_MAGIC};

/// Global sign of the hypersingular bilinear form, fixed by the Calderón check.
pub const HYPERSINGULAR_SIGN: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorTag {
    M,
    Sk,
    Kk,
    KkPrime,
    Hk,
    Sik,
    S0,
    B,
    BPrime,
    BImp,
    BPrimeImp,
}

impl OperatorTag {
    pub const ALL: [OperatorTag; 11] = [
        OperatorTag::M,
        OperatorTag::Sk,
        OperatorTag::Kk,
        OperatorTag::KkPrime,
        OperatorTag::Hk,
        OperatorTag::Sik,
        OperatorTag::S0,
        OperatorTag::B,
        OperatorTag::BPrime,
        OperatorTag::BImp,
        OperatorTag::BPrimeImp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorTag::M => "M",
            OperatorTag::Sk => "S_k",
            OperatorTag::Kk => "K_k",
            OperatorTag::KkPrime => "K'_k",
            OperatorTag::Hk => "H_k",
            OperatorTag::Sik => "S_ik",
            OperatorTag::S0 => "S_0",
            OperatorTag::B => "B",
            OperatorTag::BPrime => "B'",
            OperatorTag::BImp => "B_imp",
            OperatorTag::BPrimeImp => "B'_imp",
        }
    }

    /// Stable numeric code used in binary dumps.
    pub fn code(self) -> u32 {
        OperatorTag::ALL.iter().position(|&t| t == self).unwrap() as u32
    }

    pub fn from_code(code: u32) -> Option<Self> {
        OperatorTag::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for OperatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An assembled operator matrix together with what produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinMatrix {
    pub data: DenseComplexMatrix,
    pub op: OperatorTag,
    pub k: Option<f64>,
    pub mesh_id: u64,
}

impl GalerkinMatrix {
    pub fn n(&self) -> usize {
        self.data.n()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegularizerChoice {
    /// Single layer at wavenumber `ik`.
    Sik,
    /// Laplace single layer with kernel `ln(a/r)/2π`.
    S0 { a: f64 },
    /// No regularizer: the classic combined-field operators.
    None,
}

impl RegularizerChoice {
    pub const DEFAULT_S0_A: f64 = 4.0;

    pub fn name(&self) -> &'static str {
        match self {
            RegularizerChoice::Sik => "sik",
            RegularizerChoice::S0 { .. } => "s0",
            RegularizerChoice::None => "none",
        }
    }

    /// A warning when the Laplace constant does not exceed the mesh diameter.
    pub fn diameter_warning(&self, mesh: &BoundaryMesh) -> Option<String> {
        if let RegularizerChoice::S0 { a } = self {
            let mut diam: f64 = 0.0;
            for p in &mesh.nodes {
                for q in &mesh.nodes {
                    diam = diam.max((p[0] - q[0]).hypot(p[1] - q[1]));
                }
            }
            if *a <= diam {
                return Some(format!(
                    "Laplace constant a = {a} does not exceed the boundary diameter {diam:.4}; S_0 may fail to be coercive"
                ));
            }
        }
        None
    }
}

impl fmt::Display for RegularizerChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RegularizerChoice {
    type Err = BemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sik" => Ok(RegularizerChoice::Sik),
            "s0" => Ok(RegularizerChoice::S0 {
                a: RegularizerChoice::DEFAULT_S0_A,
            }),
            "none" => Ok(RegularizerChoice::None),
            other => Err(BemError::InvalidArgument(format!(
                "unknown regularizer `{other}`"
            ))),
        }
    }
}

/// Gauss orders per dimension for the three kinds of panel pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOrders {
    pub separated: usize,
    /// Separated pairs closer than the longer panel.
    pub near: usize,
    /// Adjacent and coincident pairs.
    pub singular: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self {
            separated: 8,
            near: 16,
            singular: 12,
        }
    }
}

impl QuadratureOrders {
    pub fn validate(&self) -> Result<()> {
        for (name, v, max) in [
            (
                "separated",
                self.separated,
                crate::quadrature::MAX_GAUSS_LEGENDRE,
            ),
            ("near", self.near, crate::quadrature::MAX_GAUSS_LEGENDRE),
            ("singular", self.singular, crate::quadrature::MAX_LOG_GAUSS),
        ] {
            if v == 0 || v > max {
                return Err(BemError::InvalidArgument(format!(
                    "{name} quadrature order {v} outside 1..={max}"
                )));
            }
        }
        Ok(())
    }
}

/// Kernel used by [`assemble_slp`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlpMode {
    Helmholtz(f64),
    Modified(f64),
    Laplace(f64),
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(BemError::InvalidArgument(format!(
            "wavenumber must be positive, got {k}"
        )))
    }
}

#[inline]
fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Channels `[Φ, ∂Φ/∂n(y), ∂Φ/∂n(x)]` of the Helmholtz kernel.
struct HelmholtzKernel {
    k: f64,
}

impl PairKernel<3> for HelmholtzKernel {
    #[inline]
    fn total(&self, r: f64, d: Point, n_x: Point, n_y: Point) -> [Complex64; 3] {
        let (phi, g) = helmholtz_total(self.k, r);
        [phi, g * dot(d, n_y), -g * dot(d, n_x)]
    }

    #[inline]
    fn split(&self, r: f64, d: Point, n_x: Point, n_y: Point) -> ([Complex64; 3], [Complex64; 3]) {
        let ([cp, cg], [bp, bg]) = helmholtz_split(self.k, r);
        let qy = dot(d, n_y);
        let qx = -dot(d, n_x);
        ([cp, cg * qy, cg * qx], [bp, bg * qy, bg * qx])
    }

    fn zero_on_self(&self) -> [bool; 3] {
        [false, true, true]
    }

    fn mirror(&self) -> [usize; 3] {
        [0, 2, 1]
    }
}

struct ModifiedKernel {
    k: f64,
}

impl PairKernel<1> for ModifiedKernel {
    #[inline]
    fn total(&self, r: f64, _: Point, _: Point, _: Point) -> [Complex64; 1] {
        [Complex64::new(modified_total(self.k, r), 0.0)]
    }

    #[inline]
    fn split(&self, r: f64, _: Point, _: Point, _: Point) -> ([Complex64; 1], [Complex64; 1]) {
        let (c, b) = modified_split(self.k, r);
        ([Complex64::new(c, 0.0)], [Complex64::new(b, 0.0)])
    }

    fn zero_on_self(&self) -> [bool; 1] {
        [false]
    }

    fn mirror(&self) -> [usize; 1] {
        [0]
    }
}

struct LaplaceKernel {
    a: f64,
}

impl PairKernel<1> for LaplaceKernel {
    #[inline]
    fn total(&self, r: f64, _: Point, _: Point, _: Point) -> [Complex64; 1] {
        [Complex64::new(laplace_total(self.a, r), 0.0)]
    }

    #[inline]
    fn split(&self, _: f64, _: Point, _: Point, _: Point) -> ([Complex64; 1], [Complex64; 1]) {
        (
            [Complex64::new(-0.5 / PI, 0.0)],
            [Complex64::new(self.a.ln() * 0.5 / PI, 0.0)],
        )
    }

    fn zero_on_self(&self) -> [bool; 1] {
        [false]
    }

    fn mirror(&self) -> [usize; 1] {
        [0]
    }
}

#[inline]
fn panel_nodes(n: usize, p: usize) -> [usize; 2] {
    [p, (p + 1) % n]
}

/// `S_k`, `K_k`, `K'_k` and `H_k` from one sweep over the panel pairs.
#[derive(Debug, Clone)]
pub struct HelmholtzOperators {
    pub s: GalerkinMatrix,
    pub k: GalerkinMatrix,
    pub kp: GalerkinMatrix,
    pub h: GalerkinMatrix,
}

pub fn assemble_helmholtz_family(
    mesh: &BoundaryMesh,
    k: f64,
    orders: &QuadratureOrders,
) -> Result<HelmholtzOperators> {
    check_k(k)?;
    orders.validate()?;
    let n = mesh.n_dof;
    let mut s = DenseComplexMatrix::zeros(n);
    let mut dl = DenseComplexMatrix::zeros(n);
    let mut adl = DenseComplexMatrix::zeros(n);
    let mut hyp = DenseComplexMatrix::zeros(n);
    let k2 = k * k;
    for_each_pair(mesh, &HelmholtzKernel { k }, orders, |p, q, blk| {
        let ip = panel_nodes(n, p);
        let iq = panel_nodes(n, q);
        let dp = [-1.0 / mesh.panel_length[p], 1.0 / mesh.panel_length[p]];
        let dq = [-1.0 / mesh.panel_length[q], 1.0 / mesh.panel_length[q]];
        let nn = dot(mesh.outward_normal[p], mesh.outward_normal[q]);
        let total = blk[0][0][0] + blk[0][0][1] + blk[0][1][0] + blk[0][1][1];
        for a in 0..2 {
            for b in 0..2 {
                let (i, j) = (ip[a], iq[b]);
                s[(i, j)] += blk[0][a][b];
                dl[(i, j)] += blk[1][a][b];
                adl[(i, j)] += blk[2][a][b];
                hyp[(i, j)] +=
                    (total * (dp[a] * dq[b]) - blk[0][a][b] * (k2 * nn)) * HYPERSINGULAR_SIGN;
            }
        }
    })?;
    let id = mesh.mesh_id();
    let wrap = |data, op| GalerkinMatrix {
        data,
        op,
        k: Some(k),
        mesh_id: id,
    };
    Ok(HelmholtzOperators {
        s: wrap(s, OperatorTag::Sk),
        k: wrap(dl, OperatorTag::Kk),
        kp: wrap(adl, OperatorTag::KkPrime),
        h: wrap(hyp, OperatorTag::Hk),
    })
}

fn assemble_scalar<K: PairKernel<1>>(
    mesh: &BoundaryMesh,
    kernel: &K,
    orders: &QuadratureOrders,
) -> Result<DenseComplexMatrix> {
    orders.validate()?;
    let n = mesh.n_dof;
    let mut m = DenseComplexMatrix::zeros(n);
    for_each_pair(mesh, kernel, orders, |p, q, blk| {
        let ip = panel_nodes(n, p);
        let iq = panel_nodes(n, q);
        for a in 0..2 {
            for b in 0..2 {
                m[(ip[a], iq[b])] += blk[0][a][b];
            }
        }
    })?;
    Ok(m)
}

/// Single-layer matrix `∫∫ Φ(x, y) φ_ℓ(y) φ_j(x)`.
pub fn assemble_slp(
    mesh: &BoundaryMesh,
    mode: SlpMode,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    let id = mesh.mesh_id();
    match mode {
        SlpMode::Helmholtz(k) => Ok(assemble_helmholtz_family(mesh, k, orders)?.s),
        SlpMode::Modified(k) => {
            check_k(k)?;
            Ok(GalerkinMatrix {
                data: assemble_scalar(mesh, &ModifiedKernel { k }, orders)?,
                op: OperatorTag::Sik,
                k: Some(k),
                mesh_id: id,
            })
        }
        SlpMode::Laplace(a) => {
            if !(a > 0.0) || !a.is_finite() {
                return Err(BemError::InvalidArgument(format!(
                    "Laplace constant must be positive, got {a}"
                )));
            }
            Ok(GalerkinMatrix {
                data: assemble_scalar(mesh, &LaplaceKernel { a }, orders)?,
                op: OperatorTag::S0,
                k: None,
                mesh_id: id,
            })
        }
    }
}

/// Double-layer matrix `∫∫ ∂Φ_k/∂n(y) φ_ℓ(y) φ_j(x)`.
pub fn assemble_dlp(
    mesh: &BoundaryMesh,
    k: f64,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    Ok(assemble_helmholtz_family(mesh, k, orders)?.k)
}

/// Adjoint double-layer matrix `∫∫ ∂Φ_k/∂n(x) φ_ℓ(y) φ_j(x)`.
pub fn assemble_adlp(
    mesh: &BoundaryMesh,
    k: f64,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    Ok(assemble_helmholtz_family(mesh, k, orders)?.kp)
}

/// Hypersingular matrix through the integration-by-parts form.
pub fn assemble_hyp(
    mesh: &BoundaryMesh,
    k: f64,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    Ok(assemble_helmholtz_family(mesh, k, orders)?.h)
}

/// Regularizer matrix for a choice (`None` for the unregularized operators).
pub fn assemble_regularizer(
    mesh: &BoundaryMesh,
    k: f64,
    reg: RegularizerChoice,
    orders: &QuadratureOrders,
) -> Result<Option<GalerkinMatrix>> {
    match reg {
        RegularizerChoice::Sik => assemble_slp(mesh, SlpMode::Modified(k), orders).map(Some),
        RegularizerChoice::S0 { a } => assemble_slp(mesh, SlpMode::Laplace(a), orders).map(Some),
        RegularizerChoice::None => Ok(None),
    }
}

/// Entries of the P1 mass matrix in cyclic tridiagonal form.
pub fn mass_tridiagonal(mesh: &BoundaryMesh) -> Result<CyclicTridiagonal> {
    let n = mesh.n_dof;
    let diag = (0..n)
        .map(|j| (mesh.panel_length[(j + n - 1) % n] + mesh.panel_length[j]) / 3.0)
        .collect();
    let upper = mesh.panel_length.iter().map(|l| l / 6.0).collect();
    CyclicTridiagonal::new(diag, upper)
}

/// Mass matrix `∫ φ_ℓ φ_j ds` as a dense Galerkin matrix.
pub fn assemble_mass(mesh: &BoundaryMesh) -> Result<GalerkinMatrix> {
    let tri = mass_tridiagonal(mesh)?;
    let n = mesh.n_dof;
    let data = tri
        .to_dense()
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    Ok(GalerkinMatrix {
        data: DenseComplexMatrix::from_vec(n, data)?,
        op: OperatorTag::M,
        k: None,
        mesh_id: mesh.mesh_id(),
    })
}
