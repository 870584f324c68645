use num_complex::Complex64;
use rayon::prelude::*;

use super::{DenseComplexMatrix, ZERO};
use crate::error::{BemError, Result};

const PIVOT_FLOOR: f64 = 1e-300;

/// `PA = LU` with partial pivoting; `L` unit lower and `U` upper share storage.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    /// Row `i` of `PA` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    growth: f64,
}

impl LuFactors {
    pub fn factor(a: &DenseComplexMatrix) -> Result<Self> {
        let n = a.n();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let max_a = a.max_abs();
        let mut max_u: f64 = 0.0;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best < PIVOT_FLOOR {
                return Err(BemError::Singular {
                    column: k,
                    pivot: best,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let (head, tail) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            let inv = pivot_row[k].inv();
            let eliminate = |row: &mut [Complex64]| {
                let l = row[k] * inv;
                row[k] = l;
                if l != ZERO {
                    for (r, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                        *r -= l * u;
                    }
                }
            };
            if (n - k) * (n - k) > 64 * 64 {
                tail.par_chunks_mut(n).for_each(eliminate);
            } else {
                tail.chunks_mut(n).for_each(eliminate);
            }
            for j in k..n {
                max_u = max_u.max(lu[k * n + j].norm());
            }
        }
        let growth = if max_a > 0.0 { max_u / max_a } else { 1.0 };
        Ok(Self {
            n,
            lu,
            perm,
            growth,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `max |U| / max |A|`
    pub fn pivot_growth(&self) -> f64 {
        self.growth
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn l_matrix(&self) -> DenseComplexMatrix {
        let n = self.n;
        DenseComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else if i > j {
                self.lu[i * n + j]
            } else {
                ZERO
            }
        })
    }

    pub fn u_matrix(&self) -> DenseComplexMatrix {
        let n = self.n;
        DenseComplexMatrix::from_fn(n, |i, j| if i <= j { self.lu[i * n + j] } else { ZERO })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(BemError::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s = super::dot_unconj(row, &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s = super::dot_unconj(row, &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        Ok(x)
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(BemError::Dimension {
                expected: n,
                got: b.len(),
            });
        }
        // Uᴴ z = b, column-oriented sweeps over the rows of U
        let mut z = b.to_vec();
        for i in 0..n {
            z[i] /= self.lu[i * n + i].conj();
            let zi = z[i];
            for j in i + 1..n {
                z[j] -= self.lu[i * n + j].conj() * zi;
            }
        }
        // Lᴴ w = z
        for i in (0..n).rev() {
            let wi = z[i];
            for j in 0..i {
                z[j] -= self.lu[i * n + j].conj() * wi;
            }
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        Ok(x)
    }
}
