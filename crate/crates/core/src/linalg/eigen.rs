//! Real symmetric eigenvalue problems.

use crate::error::{BemError, Result};

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off.len() == diag.len() - 1`) by implicit QL.
///
/// Eigenvalues come back ascending. With `vectors` set, the second element is
/// the row-major `n × n` matrix whose column `j` is the eigenvector of value `j`.
pub fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    off: &[f64],
    vectors: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let n = diag.len();
    if n == 0 || off.len() + 1 != n {
        return Err(BemError::Dimension {
            expected: n.saturating_sub(1),
            got: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut v = if vectors {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        Some(v)
    } else {
        None
    };

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 200 {
                    return Err(BemError::NoConvergence {
                        what: "tridiagonal QL",
                        iterations: iter,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_mut() {
                        for k in 0..n {
                            let h = v[k * n + i + 1];
                            v[k * n + i + 1] = s * v[k * n + i] + c * h;
                            v[k * n + i] = c * v[k * n + i] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let vals = order.iter().map(|&i| d[i]).collect();
    let vecs = v.map(|v| {
        let mut out = vec![0.0; n * n];
        for (j, &src) in order.iter().enumerate() {
            for k in 0..n {
                out[k * n + j] = v[k * n + src];
            }
        }
        out
    });
    Ok((vals, vecs))
}

/// Eigenvalues (ascending) of a dense real symmetric matrix given row-major.
///
/// Householder reduction to tridiagonal form followed by implicit QL. Only the
/// lower triangle is read.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n || n == 0 {
        return Err(BemError::Dimension {
            expected: n * n,
            got: a.len(),
        });
    }
    let mut w = a.to_vec();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        // annihilate column k below the subdiagonal
        let mut alpha = 0.0;
        for i in k + 1..n {
            alpha += w[i * n + k] * w[i * n + k];
        }
        let alpha = alpha.sqrt();
        let x0 = w[(k + 1) * n + k];
        if alpha == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let beta = if x0 > 0.0 { -alpha } else { alpha };
        off[k] = beta;
        for i in 0..n {
            u[i] = 0.0;
        }
        u[k + 1] = x0 - beta;
        for i in k + 2..n {
            u[i] = w[i * n + k];
        }
        let unorm2: f64 = u[k + 1..].iter().map(|x| x * x).sum();
        if unorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / unorm2;
        // p = tau * A u on the trailing block
        for i in k + 1..n {
            let mut s = 0.0;
            for j in k + 1..n {
                let aij = if i >= j { w[i * n + j] } else { w[j * n + i] };
                s += aij * u[j];
            }
            p[i] = tau * s;
        }
        let pu: f64 = (k + 1..n).map(|i| p[i] * u[i]).sum();
        let kfac = 0.5 * tau * pu;
        for i in k + 1..n {
            p[i] -= kfac * u[i];
        }
        for i in k + 1..n {
            for j in k + 1..=i {
                w[i * n + j] -= u[i] * p[j] + p[i] * u[j];
            }
        }
    }
    for i in 0..n {
        diag[i] = w[i * n + i];
    }
    if n >= 2 {
        off[n - 2] = w[(n - 1) * n + n - 2];
    }
    symmetric_tridiagonal_eigen(&diag, &off, false).map(|(v, _)| v)
}
