//! Dense complex linear algebra.

pub mod eigen;
mod fit;
mod gmres;
mod lu;
mod mass;
mod svd;

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{BemError, Result};

pub use fit::{fit_loglog_slope, SlopeFit};
pub use gmres::{gmres, GmresOutcome};
pub use lu::LuFactors;
pub use mass::CyclicTridiagonal;
pub use svd::{
    extreme_singular_values, extreme_singular_values_of, jacobi_singular_values,
    mass_inverse_times, ExtremeSingularValues, SvdOptions,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(BemError::Dimension {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        let n = self.n;
        &mut self.data[i * n..(i + 1) * n]
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.data[j * n + i] = self.data[i * n + j];
            }
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        for z in t.data.iter_mut() {
            *z = z.conj();
        }
        t
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: Complex64, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + s * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(BemError::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "matvec dimension");
        let n = self.n;
        if n >= 256 {
            self.data
                .par_chunks(n)
                .map(|row| dot_unconj(row, x))
                .collect()
        } else {
            self.data.chunks(n).map(|row| dot_unconj(row, x)).collect()
        }
    }

    /// `Aᴴ x`
    pub fn matvec_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n, "matvec dimension");
        let n = self.n;
        let mut y = vec![ZERO; n];
        for (row, &xi) in self.data.chunks(n).zip(x) {
            for (yj, &a) in y.iter_mut().zip(row) {
                *yj += a.conj() * xi;
            }
        }
        y
    }

    /// `self · other`, blocked over the inner dimension; rows run in parallel.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        const BLOCK: usize = 64;
        let mut out = vec![ZERO; n * n];
        out.par_chunks_mut(n).enumerate().for_each(|(i, orow)| {
            let arow = &self.data[i * n..(i + 1) * n];
            for kb in (0..n).step_by(BLOCK) {
                let ke = (kb + BLOCK).min(n);
                for k in kb..ke {
                    let a = arow[k];
                    if a == ZERO {
                        continue;
                    }
                    let brow = &other.data[k * n..(k + 1) * n];
                    for (o, &b) in orow.iter_mut().zip(brow) {
                        *o += a * b;
                    }
                }
            }
        });
        Ok(Self { n, data: out })
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - Aᵀ|` (no conjugation).
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i]).norm());
            }
        }
        worst
    }

    /// Largest singular value by Lanczos on `AᴴA`.
    pub fn spectral_norm(&self) -> f64 {
        svd::spectral_norm_of(self.n, |x| self.matvec(x), |x| self.matvec_adjoint(x))
    }
}

impl Index<(usize, usize)> for DenseComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[inline]
pub(crate) fn dot_unconj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re - x.im * y.im;
        im += x.re * y.im + x.im * y.re;
    }
    Complex64::new(re, im)
}

/// `Σ conj(a_i) b_i`
#[inline]
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matmul_against_naive() {
        let n = 70;
        let a = DenseComplexMatrix::from_fn(n, |i, j| {
            c((i * 3 + j) as f64 * 0.01, (i as f64 - j as f64) * 0.02)
        });
        let b = DenseComplexMatrix::from_fn(n, |i, j| {
            c(((i + 2 * j) % 7) as f64, 1.0 / (1.0 + i as f64 + j as f64))
        });
        let p = a.matmul(&b).unwrap();
        for i in [0, 13, 69] {
            for j in [0, 40, 69] {
                let mut s = c(0.0, 0.0);
                for k in 0..n {
                    s += a[(i, k)] * b[(k, j)];
                }
                assert!((s - p[(i, j)]).norm() < 1e-12 * s.norm().max(1.0));
            }
        }
    }

    #[test]
    fn adjoint_matvec_is_consistent() {
        let n = 9;
        let a = DenseComplexMatrix::from_fn(n, |i, j| {
            c(i as f64 - 2.0 * j as f64, (i * j) as f64 * 0.1)
        });
        let x: Vec<_> = (0..n)
            .map(|i| c(1.0 / (1.0 + i as f64), i as f64))
            .collect();
        let y1 = a.matvec_adjoint(&x);
        let y2 = a.adjoint().matvec(&x);
        for (u, v) in y1.iter().zip(&y2) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d: Vec<_> = (1..=20).map(|i| c(i as f64, 0.0)).collect();
        let a = DenseComplexMatrix::from_diagonal(&d);
        assert!((a.spectral_norm() - 20.0).abs() < 1e-8);
    }
}
