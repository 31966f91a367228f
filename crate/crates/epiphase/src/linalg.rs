//! Small dense complex matrices.
//!
//! Everything in this crate works with d x d matrices for d <= 11, so the
//! representation is a plain row-major `Vec` and the eigensolver is a cyclic
//! Jacobi iteration; at these sizes that is both fast and accurate to
//! machine precision.

use alloc::vec::Vec;

use num_complex::Complex;
// f64 math methods come from the Float trait in no_std builds
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;

/// A square complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: alloc::vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert-Schmidt inner product `tr(self^dagger rhs)`.
    pub fn hs_inner(&self, rhs: &Self) -> C64 {
        self.data.iter().zip(&rhs.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// Real part of `tr(self rhs)`.
    pub fn trace_product_re(&self, rhs: &Self) -> f64 {
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * rhs[(k, i)];
            }
        }
        acc.re
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending, by cyclic Jacobi
    /// rotations. The caller is responsible for `self` being Hermitian;
    /// only the lower triangle and real diagonal are trusted.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.clone();
        // symmetrize defensively so roundoff in construction cannot bias
        for i in 0..n {
            for j in 0..i {
                let avg = (a[(i, j)] + a[(j, i)].conj()) * C64::new(0.5, 0.0);
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
            a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        }

        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, p, q);
                }
            }
        }

        let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        eig
    }
}

/// One complex Jacobi rotation zeroing the (p, q) off-diagonal entry of a
/// Hermitian matrix, applied two-sided.
fn jacobi_rotate(a: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    // With a_pq = r e^{i phi}, the plane rotation
    //   J_pp = cos t, J_pq = -sin t e^{i phi}, J_qp = sin t e^{-i phi},
    //   J_qq = cos t,  tan 2t = 2r / (a_pp - a_qq)
    // makes (J^dagger A J)_pq vanish.
    let phase = apq / C64::new(mag, 0.0);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
    let (s, c) = theta.sin_cos();
    let (s, c) = (C64::new(s, 0.0), C64::new(c, 0.0));

    let n = a.dim();
    // A <- A J
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * c + aiq * s * phase.conj();
        a[(i, q)] = aiq * c - aip * s * phase;
    }
    // A <- J^dagger A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * c + aqj * s * phase;
        a[(q, j)] = aqj * c - apj * s * phase.conj();
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}
