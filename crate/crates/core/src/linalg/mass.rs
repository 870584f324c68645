use num_complex::Complex64;

use crate::error::{BemError, Result};

/// Real symmetric cyclic tridiagonal matrix and its factorization.
///
/// Row `i` couples `i - 1`, `i`, `i + 1` cyclically; `upper[i]` is the
/// `(i, i + 1 mod n)` entry. Solves eliminate the leading `n - 1` block with
/// the Thomas algorithm and close the cycle with a scalar Schur complement.
#[derive(Debug, Clone)]
pub struct CyclicTridiagonal {
    n: usize,
    diag: Vec<f64>,
    upper: Vec<f64>,
    // factorization of the leading (n-1) block
    c_prime: Vec<f64>,
    denom: Vec<f64>,
    // solution of the leading block against the border column
    border: Vec<f64>,
    schur: f64,
}

impl CyclicTridiagonal {
    pub fn new(diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if upper.len() != n {
            return Err(BemError::Dimension {
                expected: n,
                got: upper.len(),
            });
        }
        if n < 3 {
            return Err(BemError::InvalidArgument(
                "cyclic tridiagonal systems need at least 3 unknowns".into(),
            ));
        }
        let m = n - 1;
        let mut c_prime = vec![0.0; m];
        let mut denom = vec![0.0; m];
        for i in 0..m {
            let lower = if i == 0 { 0.0 } else { upper[i - 1] };
            let d = diag[i] - lower * if i == 0 { 0.0 } else { c_prime[i - 1] };
            if d.abs() < 1e-300 {
                return Err(BemError::Singular {
                    column: i,
                    pivot: d,
                });
            }
            denom[i] = d;
            c_prime[i] = if i + 1 < m { upper[i] / d } else { 0.0 };
        }
        let mut this = Self {
            n,
            diag,
            upper,
            c_prime,
            denom,
            border: Vec::new(),
            schur: 0.0,
        };
        // border column u: u_0 = A[0][n-1], u_{m-1} = A[m-1][n-1]
        let mut u = vec![0.0; m];
        u[0] += this.upper[n - 1];
        u[m - 1] += this.upper[m - 1];
        this.thomas(&mut u);
        // Schur complement: A[n-1][n-1] - vᵀ A₁₁⁻¹ u with v = u (symmetric)
        let v0 = this.upper[n - 1];
        let vm = this.upper[m - 1];
        let s = this.diag[n - 1] - v0 * u[0] - vm * u[m - 1];
        if s.abs() < 1e-300 {
            return Err(BemError::Singular {
                column: n - 1,
                pivot: s,
            });
        }
        this.border = u;
        this.schur = s;
        Ok(this)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn thomas<T>(&self, x: &mut [T])
    where
        T: Copy
            + std::ops::Sub<Output = T>
            + std::ops::Mul<f64, Output = T>
            + std::ops::Div<f64, Output = T>,
    {
        let m = self.n - 1;
        for i in 0..m {
            if i > 0 {
                x[i] = x[i] - x[i - 1] * self.upper[i - 1];
            }
            x[i] = x[i] / self.denom[i];
        }
        for i in (0..m - 1).rev() {
            x[i] = x[i] - x[i + 1] * self.c_prime[i];
        }
    }

    /// `A x`
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let prev = (i + n - 1) % n;
                let next = (i + 1) % n;
                x[i] * self.diag[i] + x[prev] * self.upper[prev] + x[next] * self.upper[i]
            })
            .collect()
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        assert_eq!(b.len(), n, "cyclic solve dimension");
        let m = n - 1;
        let mut y = b[..m].to_vec();
        self.thomas(&mut y);
        let v0 = self.upper[n - 1];
        let vm = self.upper[m - 1];
        let last = (b[m] - y[0] * v0 - y[m - 1] * vm) / self.schur;
        let mut x = y;
        for (xi, &ui) in x.iter_mut().zip(&self.border) {
            *xi -= last * ui;
        }
        x.push(last);
        x
    }

    /// Solves `A X = B` for a row-major `n × n` right-hand side in place,
    /// treating each row of `B` as one vector entry.
    pub fn solve_rows(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n * n, "cyclic solve dimension");
        let m = n - 1;
        // forward sweep on rows 0..m
        for i in 0..m {
            if i > 0 {
                let f = self.upper[i - 1];
                let (prev, cur) = b.split_at_mut(i * n);
                let prev = &prev[(i - 1) * n..];
                for (c, &p) in cur[..n].iter_mut().zip(prev) {
                    *c -= p * f;
                }
            }
            let d = self.denom[i];
            for c in b[i * n..(i + 1) * n].iter_mut() {
                *c /= d;
            }
        }
        for i in (0..m - 1).rev() {
            let f = self.c_prime[i];
            let (cur, next) = b.split_at_mut((i + 1) * n);
            for (c, &p) in cur[i * n..].iter_mut().zip(&next[..n]) {
                *c -= p * f;
            }
        }
        let v0 = self.upper[n - 1];
        let vm = self.upper[m - 1];
        let (head, last) = b.split_at_mut(m * n);
        for j in 0..n {
            last[j] = (last[j] - head[j] * v0 - head[(m - 1) * n + j] * vm) / self.schur;
        }
        for (i, &u) in self.border.iter().enumerate() {
            for j in 0..n {
                head[i * n + j] -= last[j] * u;
            }
        }
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            let next = (i + 1) % n;
            a[i * n + i] += self.diag[i];
            a[i * n + next] += self.upper[i];
            a[next * n + i] += self.upper[i];
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_roundtrip() {
        let n = 11;
        let diag: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| 0.2 + 0.01 * i as f64).collect();
        let a = CyclicTridiagonal::new(diag, upper).unwrap();
        let b: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(i as f64, 1.0 - i as f64))
            .collect();
        let x = a.solve(&b);
        let r = a.apply(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).norm() < 1e-13);
        }
        let mut rows: Vec<Complex64> = (0..n * n)
            .map(|k| Complex64::new((k % 7) as f64, (k % 3) as f64))
            .collect();
        let orig = rows.clone();
        a.solve_rows(&mut rows);
        for j in 0..n {
            let col: Vec<Complex64> = (0..n).map(|i| rows[i * n + j]).collect();
            let r = a.apply(&col);
            for i in 0..n {
                assert!((r[i] - orig[i * n + j]).norm() < 1e-12);
            }
        }
    }
}
