use num_complex::Complex64;

use super::{
    assemble_helmholtz_family, assemble_mass, assemble_regularizer, check_k, mass_tridiagonal,
    GalerkinMatrix, HelmholtzOperators, OperatorTag, QuadratureOrders, RegularizerChoice,
};
use crate::error::{BemError, Result};
use crate::geometry::BoundaryMesh;
use crate::linalg::{mass_inverse_times, CyclicTridiagonal, DenseComplexMatrix};
use crate::quadrature::unit_gauss_legendre;

const I: Complex64 = Complex64::new(0.0, 1.0);
const RHS_GAUSS_ORDER: usize = 8;

/// All Galerkin matrices needed for the regularized systems at one
/// wavenumber, assembled once and combined for any `η` and `β`.
#[derive(Debug, Clone)]
pub struct SystemComponents {
    pub k: f64,
    pub reg: RegularizerChoice,
    pub mesh_id: u64,
    pub mass: GalerkinMatrix,
    pub mass_tri: CyclicTridiagonal,
    pub ops: HelmholtzOperators,
    pub regularizer: Option<GalerkinMatrix>,
    /// `M⁻¹H`
    minv_h: DenseComplexMatrix,
    /// `M⁻¹R`, absent without a regularizer.
    minv_r: Option<DenseComplexMatrix>,
}

fn check_eta(eta: f64) -> Result<()> {
    if eta == 0.0 || !eta.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "coupling parameter eta must be finite and nonzero, got {eta}"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(BemError::InvalidArgument(format!(
            "impedance beta must be finite and nonnegative, got {beta}"
        )));
    }
    Ok(())
}

impl SystemComponents {
    pub fn assemble(
        mesh: &BoundaryMesh,
        k: f64,
        reg: RegularizerChoice,
        orders: &QuadratureOrders,
    ) -> Result<Self> {
        check_k(k)?;
        let mass = assemble_mass(mesh)?;
        let mass_tri = mass_tridiagonal(mesh)?;
        let ops = assemble_helmholtz_family(mesh, k, orders)?;
        let regularizer = assemble_regularizer(mesh, k, reg, orders)?;
        let minv_h = mass_inverse_times(&ops.h.data, &mass_tri);
        let minv_r = regularizer
            .as_ref()
            .map(|r| mass_inverse_times(&r.data, &mass_tri));
        Ok(Self {
            k,
            reg,
            mesh_id: mesh.mesh_id(),
            mass,
            mass_tri,
            ops,
            regularizer,
            minv_h,
            minv_r,
        })
    }

    pub fn n(&self) -> usize {
        self.mass.n()
    }

    fn wrap(&self, data: DenseComplexMatrix, op: OperatorTag) -> GalerkinMatrix {
        GalerkinMatrix {
            data,
            op,
            k: Some(self.k),
            mesh_id: self.mesh_id,
        }
    }

    /// `iη(½M − D) + composed`
    fn combine(
        &self,
        eta: f64,
        d: &DenseComplexMatrix,
        composed: &DenseComplexMatrix,
    ) -> Result<DenseComplexMatrix> {
        let ie = I * eta;
        let m = self.mass.data.as_slice();
        let d = d.as_slice();
        let c = composed.as_slice();
        let data = (0..m.len())
            .map(|i| ie * (m[i] * 0.5 - d[i]) + c[i])
            .collect();
        DenseComplexMatrix::from_vec(self.n(), data)
    }

    /// `R M⁻¹ H`, or `H` without a regularizer.
    fn r_minv_h(&self) -> Result<DenseComplexMatrix> {
        match &self.regularizer {
            Some(r) => r.data.matmul(&self.minv_h),
            None => Ok(self.ops.h.data.clone()),
        }
    }

    /// `H M⁻¹ R`, or `H` without a regularizer.
    fn h_minv_r(&self) -> Result<DenseComplexMatrix> {
        match &self.minv_r {
            Some(mr) => self.ops.h.data.matmul(mr),
            None => Ok(self.ops.h.data.clone()),
        }
    }

    /// `B = iη(½M − K) + R M⁻¹ H`
    pub fn b(&self, eta: f64) -> Result<GalerkinMatrix> {
        check_eta(eta)?;
        let data = self.combine(eta, &self.ops.k.data, &self.r_minv_h()?)?;
        Ok(self.wrap(data, OperatorTag::B))
    }

    /// `B' = iη(½M − K') + H M⁻¹ R`
    pub fn bprime(&self, eta: f64) -> Result<GalerkinMatrix> {
        check_eta(eta)?;
        let data = self.combine(eta, &self.ops.kp.data, &self.h_minv_r()?)?;
        Ok(self.wrap(data, OperatorTag::BPrime))
    }

    /// `B + iβ(R M⁻¹(½M + K') − iηS)`
    pub fn b_impedance(&self, eta: f64, beta: f64) -> Result<GalerkinMatrix> {
        check_beta(beta)?;
        let mut out = self.b(eta)?;
        out.op = OperatorTag::BImp;
        if beta == 0.0 {
            return Ok(out);
        }
        let coupling = match &self.regularizer {
            Some(r) => {
                let minv_kp = mass_inverse_times(&self.ops.kp.data, &self.mass_tri);
                r.data
                    .matmul(&minv_kp)?
                    .add_scaled(Complex64::new(0.5, 0.0), &r.data)?
            }
            None => self
                .ops
                .kp
                .data
                .add_scaled(Complex64::new(0.5, 0.0), &self.mass.data)?,
        };
        self.add_impedance(&mut out.data, eta, beta, &coupling)?;
        Ok(out)
    }

    /// `B' + iβ((½M + K) M⁻¹R − iηS)`
    pub fn bprime_impedance(&self, eta: f64, beta: f64) -> Result<GalerkinMatrix> {
        check_beta(beta)?;
        let mut out = self.bprime(eta)?;
        out.op = OperatorTag::BPrimeImp;
        if beta == 0.0 {
            return Ok(out);
        }
        let coupling = match (&self.regularizer, &self.minv_r) {
            (Some(r), Some(mr)) => self
                .ops
                .k
                .data
                .matmul(mr)?
                .add_scaled(Complex64::new(0.5, 0.0), &r.data)?,
            _ => self
                .ops
                .k
                .data
                .add_scaled(Complex64::new(0.5, 0.0), &self.mass.data)?,
        };
        self.add_impedance(&mut out.data, eta, beta, &coupling)?;
        Ok(out)
    }

    fn add_impedance(
        &self,
        target: &mut DenseComplexMatrix,
        eta: f64,
        beta: f64,
        coupling: &DenseComplexMatrix,
    ) -> Result<()> {
        let ib = I * beta;
        let ie = I * eta;
        let s = self.ops.s.data.as_slice();
        let c = coupling.as_slice();
        for (i, t) in target.as_mut_slice().iter_mut().enumerate() {
            *t += ib * (c[i] - ie * s[i]);
        }
        Ok(())
    }

    /// Right-hand side `iη b_D − R M⁻¹ b_N` for the incident wave
    /// `exp(ik x·â)`, `â = (cos θ, sin θ)`.
    pub fn planewave_rhs(
        &self,
        mesh: &BoundaryMesh,
        eta: f64,
        incidence_angle: f64,
    ) -> Result<Vec<Complex64>> {
        check_eta(eta)?;
        if mesh.mesh_id() != self.mesh_id {
            return Err(BemError::InvalidArgument(
                "mesh does not match the assembled components".into(),
            ));
        }
        let (b_d, b_n) = planewave_moments(mesh, self.k, incidence_angle);
        let neumann_part = match &self.regularizer {
            Some(r) => r.data.matvec(&self.mass_tri.solve(&b_n)),
            None => b_n,
        };
        Ok(b_d
            .iter()
            .zip(&neumann_part)
            .map(|(d, nn)| I * eta * d - nn)
            .collect())
    }
}

/// `(b_D, b_N)` with `(b_D)_j = ∫ u φ_j` and `(b_N)_j = ∫ ∂u/∂n φ_j` for
/// `u = exp(ik x·â)`.
pub(crate) fn planewave_moments(
    mesh: &BoundaryMesh,
    k: f64,
    angle: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = mesh.n_dof;
    let dir = [angle.cos(), angle.sin()];
    let (xs, ws) = unit_gauss_legendre(RHS_GAUSS_ORDER);
    let mut b_d = vec![Complex64::new(0.0, 0.0); n];
    let mut b_n = vec![Complex64::new(0.0, 0.0); n];
    for p in 0..n {
        let panel = mesh.panel(p);
        let len = mesh.panel_length[p];
        let nrm = mesh.outward_normal[p];
        let dn = I * k * (dir[0] * nrm[0] + dir[1] * nrm[1]);
        let next = (p + 1) % n;
        for (&s, &w) in xs.iter().zip(ws) {
            let x = panel.point(s);
            let u = Complex64::from_polar(1.0, k * (x[0] * dir[0] + x[1] * dir[1])) * (w * len);
            b_d[p] += u * (1.0 - s);
            b_d[next] += u * s;
            b_n[p] += u * dn * (1.0 - s);
            b_n[next] += u * dn * s;
        }
    }
    (b_d, b_n)
}

pub fn assemble_b(
    mesh: &BoundaryMesh,
    k: f64,
    eta: f64,
    reg: RegularizerChoice,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    check_eta(eta)?;
    SystemComponents::assemble(mesh, k, reg, orders)?.b(eta)
}

pub fn assemble_bprime(
    mesh: &BoundaryMesh,
    k: f64,
    eta: f64,
    reg: RegularizerChoice,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    check_eta(eta)?;
    SystemComponents::assemble(mesh, k, reg, orders)?.bprime(eta)
}

pub fn assemble_b_impedance(
    mesh: &BoundaryMesh,
    k: f64,
    eta: f64,
    beta: f64,
    reg: RegularizerChoice,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    check_eta(eta)?;
    check_beta(beta)?;
    SystemComponents::assemble(mesh, k, reg, orders)?.b_impedance(eta, beta)
}

pub fn assemble_bprime_impedance(
    mesh: &BoundaryMesh,
    k: f64,
    eta: f64,
    beta: f64,
    reg: RegularizerChoice,
    orders: &QuadratureOrders,
) -> Result<GalerkinMatrix> {
    check_eta(eta)?;
    check_beta(beta)?;
    SystemComponents::assemble(mesh, k, reg, orders)?.bprime_impedance(eta, beta)
}

pub fn assemble_planewave_rhs(
    mesh: &BoundaryMesh,
    k: f64,
    eta: f64,
    reg: RegularizerChoice,
    incidence_angle: f64,
    orders: &QuadratureOrders,
) -> Result<Vec<Complex64>> {
    check_eta(eta)?;
    check_k(k)?;
    let (b_d, b_n) = planewave_moments(mesh, k, incidence_angle);
    let neumann_part = match super::assemble_regularizer(mesh, k, reg, orders)? {
        Some(r) => r.data.matvec(&mass_tridiagonal(mesh)?.solve(&b_n)),
        None => b_n,
    };
    Ok(b_d
        .iter()
        .zip(&neumann_part)
        .map(|(d, nn)| I * eta * d - nn)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, make_geometry, GeometryId, GeometryParams};

    fn mesh(id: GeometryId, k: f64) -> BoundaryMesh {
        build_mesh(
            &make_geometry(id, &GeometryParams::default()).unwrap(),
            k,
            10.0,
        )
        .unwrap()
    }

    #[test]
    fn eta_zero_rejected() {
        let m = mesh(GeometryId::Circle, 2.0);
        let q = QuadratureOrders::default();
        assert!(assemble_b(&m, 2.0, 0.0, RegularizerChoice::Sik, &q).is_err());
        assert!(assemble_bprime(&m, 2.0, 0.0, RegularizerChoice::None, &q).is_err());
    }

    #[test]
    fn transposes_and_beta_zero() {
        let m = mesh(GeometryId::Kite, 3.0);
        let c = SystemComponents::assemble(
            &m,
            3.0,
            RegularizerChoice::Sik,
            &QuadratureOrders::default(),
        )
        .unwrap();
        let b = c.b(0.5).unwrap();
        let bp = c.bprime(0.5).unwrap();
        let scale = b.data.frobenius_norm();
        assert!(b.data.transpose().sub(&bp.data).unwrap().max_abs() <= 1e-12 * scale);
        let bi = c.b_impedance(0.5, 0.0).unwrap();
        assert_eq!(bi.data, b.data);
        let bi = c.b_impedance(0.5, 3.0).unwrap();
        let bpi = c.bprime_impedance(0.5, 3.0).unwrap();
        assert!(
            bi.data.transpose().sub(&bpi.data).unwrap().max_abs()
                <= 1e-12 * bi.data.frobenius_norm()
        );
    }

    #[test]
    fn unregularized_is_classic_combination() {
        let m = mesh(GeometryId::Circle, 2.0);
        let c = SystemComponents::assemble(
            &m,
            2.0,
            RegularizerChoice::None,
            &QuadratureOrders::default(),
        )
        .unwrap();
        let b = c.b(2.0).unwrap();
        let (i, j) = (3, 5);
        let expect =
            I * 2.0 * (c.mass.data[(i, j)] * 0.5 - c.ops.k.data[(i, j)]) + c.ops.h.data[(i, j)];
        assert_eq!(b.data[(i, j)], expect);
    }

    #[test]
    fn rhs_at_small_k_matches_mass_row_sums() {
        let m = mesh(GeometryId::Ellipse, 1.0);
        let (b_d, _) = planewave_moments(&m, 1e-9, 0.3);
        let ones = vec![Complex64::new(1.0, 0.0); m.n_dof];
        let mass = mass_tridiagonal(&m).unwrap().apply(&ones);
        for (a, b) in b_d.iter().zip(&mass) {
            assert!((a - b).norm() < 1e-8 * b.norm());
        }
    }
}
