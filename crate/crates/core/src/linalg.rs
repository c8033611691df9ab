//! Small dense linear algebra.
//!
//! The model lives on a 3-dimensional Hilbert space, so its Liouvillian is
//! 9×9. Everything here is stack-allocated through const generics except the
//! real Jacobi kernels, which work on the `2N` real embedding of a complex
//! matrix.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::{One, Zero};

use crate::scalar::{c, lit, Cplx, Real};

/// Dense `N×N` complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareMatrix<T: Real, const N: usize> {
    data: [[Cplx<T>; N]; N],
}

pub type Mat3<T> = SquareMatrix<T, 3>;
pub type Mat9<T> = SquareMatrix<T, 9>;

impl<T: Real, const N: usize> Default for SquareMatrix<T, N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real, const N: usize> SquareMatrix<T, N> {
    pub fn zeros() -> Self {
        Self {
            data: [[Cplx::zero(); N]; N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = Cplx::one();
        }
        m
    }

    pub fn from_rows(data: [[Cplx<T>; N]; N]) -> Self {
        Self { data }
    }

    /// Outer product `|i⟩⟨j|` scaled by `value`.
    pub fn unit(i: usize, j: usize, value: Cplx<T>) -> Self {
        let mut m = Self::zeros();
        m.data[i][j] = value;
        m
    }

    pub fn rows(&self) -> &[[Cplx<T>; N]; N] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.data[j][i] = self.data[i][j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                out.data[j][i] = self.data[i][j];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Cplx<T>) -> Cplx<T>) -> Self {
        let mut out = *self;
        for row in out.data.iter_mut() {
            for z in row.iter_mut() {
                *z = f(*z);
            }
        }
        out
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..N).fold(Cplx::zero(), |acc, i| acc + self.data[i][i])
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .flatten()
            .fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// `max |A_ij − conj(A_ji)|`.
    pub fn hermiticity_deviation(&self) -> T {
        let mut dev = T::zero();
        for i in 0..N {
            for j in 0..N {
                dev = dev.max((self.data[i][j] - self.data[j][i].conj()).norm());
            }
        }
        dev
    }

    pub fn matvec(&self, v: &[Cplx<T>; N]) -> [Cplx<T>; N] {
        let mut out = [Cplx::zero(); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.data[i]
                .iter()
                .zip(v.iter())
                .fold(Cplx::zero(), |acc, (a, b)| acc + *a * *b);
        }
        out
    }

    /// Column-major vectorization: element `(i, j)` lands at `i + N·j`.
    pub fn vectorize(&self) -> Vec<Cplx<T>> {
        let mut v = Vec::with_capacity(N * N);
        for j in 0..N {
            for i in 0..N {
                v.push(self.data[i][j]);
            }
        }
        v
    }

    /// Inverse of [`vectorize`](Self::vectorize).
    pub fn unvectorize(v: &[Cplx<T>]) -> Self {
        assert_eq!(v.len(), N * N, "vector length must be N²");
        let mut m = Self::zeros();
        for j in 0..N {
            for i in 0..N {
                m.data[i][j] = v[i + N * j];
            }
        }
        m
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> T {
        (0..N)
            .map(|j| (0..N).fold(T::zero(), |s, i| s + self.data[i][j].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .flatten()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt()
    }

    /// LU factorization with partial pivoting. `None` when a pivot is exactly
    /// zero.
    pub fn lu(&self) -> Option<Lu<T, N>> {
        let mut a = self.data;
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        for k in 0..N {
            let (piv, mag) = (k..N)
                .map(|r| (r, a[r][k].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag == T::zero() {
                return None;
            }
            a.swap(k, piv);
            perm.swap(k, piv);
            let pivot = a[k][k];
            for r in (k + 1)..N {
                let f = a[r][k] / pivot;
                a[r][k] = f;
                for col in (k + 1)..N {
                    let akc = a[k][col];
                    a[r][col] = a[r][col] - f * akc;
                }
            }
        }
        Some(Lu { lu: a, perm })
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu()?;
        let mut inv = Self::zeros();
        for j in 0..N {
            let mut e = [Cplx::zero(); N];
            e[j] = Cplx::one();
            let col = lu.solve(&e);
            for i in 0..N {
                inv.data[i][j] = col[i];
            }
        }
        Some(inv)
    }

    /// 1-norm condition number; infinite for singular matrices.
    pub fn condition_number(&self) -> T {
        match self.inverse() {
            Some(inv) => self.norm1() * inv.norm1(),
            None => T::infinity(),
        }
    }

    /// Real `2N×2N` embedding `[[Re A, −Im A], [Im A, Re A]]`.
    pub fn real_embedding(&self) -> RealMatrix<T> {
        let mut out = RealMatrix::zeros(2 * N, 2 * N);
        for i in 0..N {
            for j in 0..N {
                let z = self.data[i][j];
                out[(i, j)] = z.re;
                out[(i, j + N)] = -z.im;
                out[(i + N, j)] = z.im;
                out[(i + N, j + N)] = z.re;
            }
        }
        out
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part is used; callers should check
    /// [`hermiticity_deviation`](Self::hermiticity_deviation) first.
    pub fn hermitian_eigenvalues(&self) -> [T; N] {
        let half = lit::<T>(0.5);
        let herm = (*self + self.adjoint()).scale(c(half, T::zero()));
        let doubled = herm.real_embedding().symmetric_eigenvalues();
        // Each eigenvalue of a Hermitian matrix appears twice in its real embedding.
        let mut out = [T::zero(); N];
        for (k, o) in out.iter_mut().enumerate() {
            *o = doubled[2 * k];
        }
        out
    }
}

/// Kronecker product of two 3×3 matrices.
pub fn kron3<T: Real>(a: &Mat3<T>, b: &Mat3<T>) -> Mat9<T> {
    let mut out = Mat9::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let aij = a.data[i][j];
            for k in 0..3 {
                for l in 0..3 {
                    out.data[3 * i + k][3 * j + l] = aij * b.data[k][l];
                }
            }
        }
    }
    out
}

/// Packed LU factors from [`SquareMatrix::lu`].
#[derive(Clone, Copy, Debug)]
pub struct Lu<T: Real, const N: usize> {
    lu: [[Cplx<T>; N]; N],
    perm: [usize; N],
}

impl<T: Real, const N: usize> Lu<T, N> {
    pub fn solve(&self, b: &[Cplx<T>; N]) -> [Cplx<T>; N] {
        let mut y = [Cplx::zero(); N];
        for i in 0..N {
            let mut s = b[self.perm[i]];
            for k in 0..i {
                s = s - self.lu[i][k] * y[k];
            }
            y[i] = s;
        }
        let mut x = [Cplx::zero(); N];
        for i in (0..N).rev() {
            let mut s = y[i];
            for k in (i + 1)..N {
                s = s - self.lu[i][k] * x[k];
            }
            x[i] = s / self.lu[i][i];
        }
        x
    }
}

impl<T: Real, const N: usize> Index<(usize, usize)> for SquareMatrix<T, N> {
    type Output = Cplx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.data[i][j]
    }
}

impl<T: Real, const N: usize> IndexMut<(usize, usize)> for SquareMatrix<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[i][j]
    }
}

impl<T: Real, const N: usize> Add for SquareMatrix<T, N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] = self.data[i][j] + rhs.data[i][j];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Sub for SquareMatrix<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.data[i][j] = self.data[i][j] - rhs.data[i][j];
            }
        }
        self
    }
}

impl<T: Real, const N: usize> Mul for SquareMatrix<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.data[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    out.data[i][j] = out.data[i][j] + a * rhs.data[k][j];
                }
            }
        }
        out
    }
}

/// Heap-allocated dense real matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> RealMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        assert_eq!(self.rows, self.cols, "matrix must be square");
        let n = self.rows;
        let mut a = self.clone();
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .fold(T::zero(), |s, (i, j)| s + a[(i, j)] * a[(i, j)]);
            let diag: T = (0..n).fold(T::zero(), |s, i| s + a[(i, i)] * a[(i, i)]);
            if off <= eps * eps * diag || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (lit::<T>(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt());
                    let cs = T::one() / (T::one() + t * t).sqrt();
                    let sn = t * cs;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = cs * akp - sn * akq;
                        a[(k, q)] = sn * akp + cs * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = cs * apk - sn * aqk;
                        a[(q, k)] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// One-sided Jacobi SVD. Returns singular values in ascending order and
    /// the matching right singular vectors as columns.
    pub fn svd_right(&self) -> (Vec<T>, RealMatrix<T>) {
        let (m, n) = (self.rows, self.cols);
        let mut a = self.clone();
        let mut v = RealMatrix::zeros(n, n);
        for i in 0..n {
            v[(i, i)] = T::one();
        }
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                    for i in 0..m {
                        let (ap, aq) = (a[(i, p)], a[(i, q)]);
                        alpha = alpha + ap * ap;
                        beta = beta + aq * aq;
                        gamma = gamma + ap * aq;
                    }
                    if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
                    let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    let cs = T::one() / (T::one() + t * t).sqrt();
                    let sn = cs * t;
                    for i in 0..m {
                        let (ap, aq) = (a[(i, p)], a[(i, q)]);
                        a[(i, p)] = cs * ap - sn * aq;
                        a[(i, q)] = sn * ap + cs * aq;
                    }
                    for i in 0..n {
                        let (vp, vq) = (v[(i, p)], v[(i, q)]);
                        v[(i, p)] = cs * vp - sn * vq;
                        v[(i, q)] = sn * vp + cs * vq;
                    }
                }
            }
            if !rotated {
                break;
            }
        }
        let sigma: Vec<T> = (0..n)
            .map(|j| (0..m).fold(T::zero(), |s, i| s + a[(i, j)] * a[(i, j)]).sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| {
            sigma[x]
                .partial_cmp(&sigma[y])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut sorted_v = RealMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for i in 0..n {
                sorted_v[(i, dst)] = v[(i, src)];
            }
        }
        (order.iter().map(|&k| sigma[k]).collect(), sorted_v)
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.rows, self.cols, "matrix must be square");
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n).max_by(|&r, &s| {
                a[(r, k)]
                    .abs()
                    .partial_cmp(&a[(s, k)].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
            if a[(piv, k)] == T::zero() || !a[(piv, k)].is_finite() {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(piv, j)];
                    a[(piv, j)] = tmp;
                }
                x.swap(k, piv);
            }
            for r in (k + 1)..n {
                let f = a[(r, k)] / a[(k, k)];
                for j in k..n {
                    let akj = a[(k, j)];
                    a[(r, j)] = a[(r, j)] - f * akj;
                }
                let xk = x[k];
                x[r] = x[r] - f * xk;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s = s - a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        Some(x)
    }
}

impl<T: Real> Index<(usize, usize)> for RealMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for RealMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    fn sample() -> Mat3<f64> {
        Mat3::from_rows([
            [c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            [c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            [c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ])
    }

    #[test]
    fn vectorize_is_column_major() {
        let m = sample();
        let v = m.vectorize();
        assert_eq!(v[1], m[(1, 0)]);
        assert_eq!(v[3], m[(0, 1)]);
        assert_eq!(Mat3::unvectorize(&v), m);
    }

    #[test]
    fn kron_matches_vec_identity() {
        // vec(A X B) = (Bᵀ ⊗ A) vec(X)
        let a = sample();
        let b = sample().scale(c(0.0, 1.0)) + Mat3::identity();
        let x = Mat3::from_rows([
            [c(0.1, 0.2), c(0.3, 0.0), c(0.0, 1.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(-0.2, 0.1)],
            [c(0.5, 0.5), c(0.7, -0.3), c(0.0, 0.0)],
        ]);
        let lhs = (a * x * b).vectorize();
        let k = kron3(&b.transpose(), &a);
        let v: [Cplx<f64>; 9] = x.vectorize().try_into().unwrap();
        let rhs = k.matvec(&v);
        for (l, r) in lhs.iter().zip(rhs.iter()) {
            assert!((l - r).norm() < 1e-14);
        }
    }

    #[test]
    fn lu_solves_and_inverts() {
        let a = sample() + Mat3::identity().scale(re(3.0));
        let inv = a.inverse().unwrap();
        let prod = a * inv;
        assert!((prod - Mat3::identity()).max_abs() < 1e-14);
        assert!(Mat3::<f64>::zeros().lu().is_none());
        assert!(Mat3::<f64>::zeros().condition_number().is_infinite());
    }

    #[test]
    fn hermitian_eigenvalues_of_known_matrix() {
        // Pauli-y in the upper block plus a diagonal entry
        let m: Mat3<f64> = Mat3::from_rows([
            [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)],
            [c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0), c(0.25, 0.0)],
        ]);
        let ev = m.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14);
        assert!((ev[1] - 0.25).abs() < 1e-14);
        assert!((ev[2] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_finds_null_vector() {
        let mut a = RealMatrix::<f64>::zeros(3, 3);
        // rank-2: third column = first + second
        let cols = [[1.0, 2.0, 0.5], [0.0, 1.0, -1.0]];
        for i in 0..3 {
            a[(i, 0)] = cols[0][i];
            a[(i, 1)] = cols[1][i];
            a[(i, 2)] = cols[0][i] + cols[1][i];
        }
        let (s, v) = a.svd_right();
        assert!(s[0] < 1e-14);
        assert!(s[1] > 0.1);
        let null = v.column(0);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[(i, j)] * null[j]).sum();
            assert!(r.abs() < 1e-14);
        }
    }

    #[test]
    fn real_solve() {
        let mut a = RealMatrix::<f64>::zeros(2, 2);
        a[(0, 0)] = 0.0;
        a[(0, 1)] = 2.0;
        a[(1, 0)] = 1.0;
        a[(1, 1)] = 1.0;
        let x = a.solve(&[4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }
}
