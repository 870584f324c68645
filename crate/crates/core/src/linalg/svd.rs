use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::symmetric_tridiagonal_eigen;
use super::{dot, norm2, CyclicTridiagonal, DenseComplexMatrix, LuFactors};
use crate::error::{BemError, Result};

const START_SEED: u64 = 0x5eed_0f1a_2c05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdOptions {
    /// Stop once the Ritz residual is below `tol` times the Ritz value.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SvdOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeSingularValues {
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub iterations_max: usize,
    pub iterations_min: usize,
    /// Largest relative Ritz residual at termination (of `σ²` for the maximum,
    /// of `σ⁻²` for the minimum).
    pub tol: f64,
}

impl ExtremeSingularValues {
    pub fn cond(&self) -> f64 {
        self.sigma_max / self.sigma_min
    }
}

struct RitzOutcome {
    theta: f64,
    iterations: usize,
    residual: f64,
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator by
/// Lanczos with full reorthogonalization.
fn lanczos_largest(
    n: usize,
    mut apply: impl FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
    opts: &SvdOptions,
) -> Result<RitzOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut q: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nq = norm2(&q);
    q.iter_mut().for_each(|z| *z /= nq);

    let limit = opts.max_iter.min(n).max(1);
    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = RitzOutcome {
        theta: 0.0,
        iterations: 0,
        residual: f64::INFINITY,
    };
    for j in 0..limit {
        let mut w = apply(&basis[j])?;
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let b = norm2(&w);
        let (theta, tail) = largest_ritz(&alpha, &beta)?;
        let residual = b * tail;
        last = RitzOutcome {
            theta,
            iterations: j + 1,
            residual: if theta > 0.0 {
                residual / theta
            } else {
                f64::INFINITY
            },
        };
        let breakdown = b <= 1e-14 * theta.abs().max(f64::MIN_POSITIVE);
        if residual <= opts.tol * theta || breakdown || j + 1 == n {
            if breakdown || j + 1 == n {
                last.residual = last.residual.min(opts.tol);
            }
            return Ok(last);
        }
        beta.push(b);
        w.iter_mut().for_each(|z| *z /= b);
        basis.push(w);
    }
    if last.residual <= opts.tol {
        Ok(last)
    } else {
        Err(BemError::NoConvergence {
            what: "Lanczos singular value iteration",
            iterations: last.iterations,
        })
    }
}

/// Largest eigenvalue of the Lanczos matrix and the magnitude of the last
/// component of its unit eigenvector.
fn largest_ritz(alpha: &[f64], beta: &[f64]) -> Result<(f64, f64)> {
    let m = alpha.len();
    if m == 1 {
        return Ok((alpha[0], 1.0));
    }
    let (vals, _) = symmetric_tridiagonal_eigen(alpha, beta, false)?;
    let theta = vals[m - 1];
    // inverse iteration on T - (θ + δ) for the eigenvector
    let scale = vals[m - 1].abs().max(vals[0].abs()).max(f64::MIN_POSITIVE);
    let shift = theta + 1e-13 * scale;
    let mut x = vec![1.0; m];
    for _ in 0..3 {
        x = tridiagonal_shifted_solve(alpha, beta, shift, &x);
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !nx.is_finite() || nx == 0.0 {
            return Ok((theta, 1.0));
        }
        x.iter_mut().for_each(|v| *v /= nx);
    }
    Ok((theta, x[m - 1].abs()))
}

/// Solves `(T - shift) x = rhs` for a shift above the spectrum of `T`, where
/// the shifted matrix is negative definite and needs no pivoting.
fn tridiagonal_shifted_solve(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let mut d: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut x = rhs.to_vec();
    for i in 1..m {
        let f = beta[i - 1] / d[i - 1];
        d[i] -= f * beta[i - 1];
        x[i] -= f * x[i - 1];
    }
    x[m - 1] /= d[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (x[i] - beta[i] * x[i + 1]) / d[i];
    }
    x
}

/// Extreme singular values of `G = M⁻¹A` without forming `G`.
///
/// `σ_max²` is the top eigenvalue of `GᴴG`, `σ_min⁻²` the top eigenvalue of
/// `(GᴴG)⁻¹ = A⁻¹ M² A⁻ᴴ`; both come from Lanczos runs with a fixed
/// pseudo-random start vector.
pub fn extreme_singular_values(
    a: &DenseComplexMatrix,
    mass: &CyclicTridiagonal,
    opts: &SvdOptions,
) -> Result<ExtremeSingularValues> {
    let n = a.n();
    if mass.n() != n {
        return Err(BemError::Dimension {
            expected: n,
            got: mass.n(),
        });
    }
    let lu = LuFactors::factor(a)?;
    extreme_singular_values_of(
        n,
        |x| Ok(mass.solve(&a.matvec(x))),
        |x| Ok(a.matvec_adjoint(&mass.solve(x))),
        |x| lu.solve(&mass.apply(x)),
        |x| Ok(mass.apply(&lu.solve_adjoint(x)?)),
        opts,
    )
}

/// Operator form of [`extreme_singular_values`]: callers supply `G`, `Gᴴ`,
/// `G⁻¹` and `G⁻ᴴ` as actions.
pub fn extreme_singular_values_of(
    n: usize,
    g: impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    g_adj: impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    g_inv: impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    g_inv_adj: impl Fn(&[Complex64]) -> Result<Vec<Complex64>>,
    opts: &SvdOptions,
) -> Result<ExtremeSingularValues> {
    let top = lanczos_largest(n, |x| g_adj(&g(x)?), opts)?;
    let bottom = lanczos_largest(n, |x| g_inv(&g_inv_adj(x)?), opts)?;
    if !(top.theta > 0.0) || !(bottom.theta > 0.0) {
        return Err(BemError::Singular {
            column: 0,
            pivot: 0.0,
        });
    }
    Ok(ExtremeSingularValues {
        sigma_max: top.theta.sqrt(),
        sigma_min: 1.0 / bottom.theta.sqrt(),
        iterations_max: top.iterations,
        iterations_min: bottom.iterations,
        tol: top.residual.max(bottom.residual),
    })
}

pub(crate) fn spectral_norm_of(
    n: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    apply_adj: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let opts = SvdOptions {
        tol: 1e-10,
        max_iter: n,
    };
    match lanczos_largest(n, |x| Ok(apply_adj(&apply(x))), &opts) {
        Ok(r) => r.theta.max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

/// All singular values (descending) by one-sided Jacobi on the columns.
pub fn jacobi_singular_values(a: &DenseComplexMatrix) -> Result<Vec<f64>> {
    let n = a.n();
    // column-major copy
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)]).collect())
        .collect();
    let eps = 1e-15;
    for sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = cols[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let beta = cols[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = (xp * s + yq * c) * phase;
                }
            }
        }
        if !rotated {
            let mut sv: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
            sv.sort_by(|a, b| b.total_cmp(a));
            return Ok(sv);
        }
        if sweep == 59 {
            break;
        }
    }
    Err(BemError::NoConvergence {
        what: "one-sided Jacobi SVD",
        iterations: 60,
    })
}

/// `G = M⁻¹A` formed explicitly (for cross-checks at small `n`).
pub fn mass_inverse_times(a: &DenseComplexMatrix, mass: &CyclicTridiagonal) -> DenseComplexMatrix {
    let mut g = a.clone();
    mass.solve_rows(g.as_mut_slice());
    g
}
