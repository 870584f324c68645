use num_complex::Complex64;

use super::{dot, norm2, ZERO};
use crate::error::{BemError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖b - A x_j‖ / ‖b‖` for `j = 0..=iterations`, from the Givens recurrence.
    pub residual_history: Vec<f64>,
}

impl GmresOutcome {
    pub fn final_relative_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }
}

/// Full (unrestarted) GMRES from a zero initial guess.
///
/// Arnoldi with modified Gram–Schmidt, least squares by Givens rotations. An
/// exhausted iteration budget is not an error: the best iterate is returned with
/// `converged = false`.
pub fn gmres(
    mut apply: impl FnMut(&[Complex64]) -> Result<Vec<Complex64>>,
    b: &[Complex64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let beta = norm2(b);
    if beta == 0.0 || !beta.is_finite() {
        return Err(BemError::InvalidArgument(
            "GMRES right-hand side must be nonzero and finite".into(),
        ));
    }
    let mut v: Vec<Vec<Complex64>> = vec![b.iter().map(|z| z / beta).collect()];
    // column j of the Hessenberg matrix, rotated in place
    let mut h: Vec<Vec<Complex64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<Complex64> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut converged = false;
    let mut steps = 0;

    for j in 0..max_iter {
        let mut w = apply(&v[j])?;
        if w.len() != n {
            return Err(BemError::Dimension {
                expected: n,
                got: w.len(),
            });
        }
        let applied_norm = norm2(&w);
        let mut col = vec![ZERO; j + 2];
        for (i, vi) in v.iter().enumerate() {
            let hij = dot(vi, &w);
            col[i] = hij;
            for (wk, &vk) in w.iter_mut().zip(vi) {
                *wk -= hij * vk;
            }
        }
        let hnext = norm2(&w);
        col[j + 1] = Complex64::new(hnext, 0.0);

        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i].conj() * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        // rotation annihilating col[j+1]
        let a = col[j];
        let bb = col[j + 1];
        let (c, s, r) = givens(a, bb);
        cs.push(c);
        sn.push(s);
        col[j] = r;
        col[j + 1] = ZERO;
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s.conj() * gj);
        h.push(col);
        steps = j + 1;

        let rel = g[j + 1].norm() / beta;
        history.push(rel);
        // happy breakdown: the Krylov space is invariant, the iterate is exact
        let breakdown = hnext <= 4.0 * f64::EPSILON * applied_norm;
        if rel <= rel_tol || breakdown {
            converged = true;
            break;
        }
        v.push(w.iter().map(|z| z / hnext).collect());
    }

    // back substitution for y, x = V y
    let m = steps;
    let mut y = vec![ZERO; m];
    for i in (0..m).rev() {
        let mut s = g[i];
        for k in i + 1..m {
            s -= h[k][i] * y[k];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![ZERO; n];
    for (vk, &yk) in v.iter().zip(&y) {
        for (xi, &vi) in x.iter_mut().zip(vk) {
            *xi += yk * vi;
        }
    }
    Ok(GmresOutcome {
        x,
        iterations: m,
        converged,
        residual_history: history,
    })
}

/// `(c, s, r)` with `[c s; -s̄ c] [a; b] = [r; 0]`, `c` real.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO, a);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn, Complex64::new(bn, 0.0));
    }
    let norm = an.hypot(bn);
    let c = an / norm;
    let phase = a / an;
    let s = phase * b.conj() / norm;
    (c, s, phase * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseComplexMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_in_one_step() {
        let b = vec![c(1.0, 2.0), c(3.0, -1.0)];
        let out = gmres(|x| Ok(x.to_vec()), &b, 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        for (u, v) in out.x.iter().zip(&b) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn two_eigenvalues_two_steps() {
        let d = [1.0, 1.0, 2.0];
        let b = vec![c(1.0, 0.0), c(0.5, 0.5), c(-1.0, 2.0)];
        let out = gmres(
            |x| Ok(x.iter().zip(&d).map(|(z, di)| z * di).collect()),
            &b,
            1e-12,
            10,
        )
        .unwrap();
        assert!(out.converged);
        assert!(out.iterations <= 2);
    }

    #[test]
    fn zero_rhs_rejected() {
        assert!(gmres(|x| Ok(x.to_vec()), &[ZERO; 3], 1e-6, 3).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let n = 20;
        let a = DenseComplexMatrix::from_fn(
            n,
            |i, j| if (i + 1) % n == j { c(1.0, 0.0) } else { ZERO },
        );
        let mut b = vec![ZERO; n];
        b[0] = c(1.0, 0.0);
        let out = gmres(|x| Ok(a.matvec(x)), &b, 1e-10, 5).unwrap();
        assert!(!out.converged);
        assert_eq!(out.iterations, 5);
    }
}
