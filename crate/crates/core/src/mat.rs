//! Complex symmetric matrices with the half-trace pairing, plus the
//! branch-tracked log-determinant both characteristic functions need.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex symmetric n x n matrix stored as its upper triangle (j <= k).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSymMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexSymMatrix {
    pub fn zeros(n: usize) -> Self {
        ComplexSymMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            m.set(j, j, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Hollow matrix with value `v` in the (j,k) and (k,j) entries.
    pub fn single_pair(n: usize, j: usize, k: usize, v: Complex64) -> Result<Self> {
        if j == k || j >= n || k >= n {
            return Err(Error::param("single_pair: need distinct indices below n"));
        }
        let mut m = Self::zeros(n);
        m.set(j, k, v);
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn idx(&self, j: usize, k: usize) -> usize {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        j * self.n - j * (j + 1) / 2 + k
    }

    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.data[self.idx(j, k)]
    }

    /// Sets both (j,k) and (k,j).
    pub fn set(&mut self, j: usize, k: usize, v: Complex64) {
        let i = self.idx(j, k);
        self.data[i] = v;
    }

    /// True when the diagonal is exactly zero.
    pub fn is_hollow(&self) -> bool {
        (0..self.n).all(|j| self.get(j, j) == Complex64::new(0.0, 0.0))
    }

    /// The pairing <M, N> = tr(MN + diag M diag N) / 2. For symmetric
    /// matrices this is sum_j M_jj N_jj + sum_{j<k} M_jk N_jk, so a hollow
    /// N with a single off-diagonal pair theta at (j,k) pairs to M_jk theta.
    pub fn pairing(&self, other: &ComplexSymMatrix) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::param("pairing: dimension mismatch"));
        }
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..self.n {
            s += self.get(j, j) * other.get(j, j);
            for k in (j + 1)..self.n {
                s += self.get(j, k) * other.get(j, k);
            }
        }
        Ok(s)
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.n {
            s += self.get(j, j).norm_sqr();
            for k in (j + 1)..self.n {
                s += 2.0 * self.get(j, k).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Largest singular value, by power iteration on A^H A with a fixed
    /// deterministic start vector. The matrices here are tiny (n <= ~10),
    /// so the cost is negligible.
    pub fn op_norm(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let a = self.to_dense();
        let matvec = |x: &[Complex64], out: &mut [Complex64]| {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += a[j * n + k] * x[k];
                }
                out[j] = s;
            }
        };
        // y = A^H (A x); A symmetric, so A^H = conj(A)
        let matvec_h = |x: &[Complex64], out: &mut [Complex64]| {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += a[j * n + k].conj() * x[k];
                }
                out[j] = s;
            }
        };
        let mut v: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 + (j as f64) * 0.5, 0.25 * (j as f64 + 1.0)))
            .collect();
        let mut av = vec![Complex64::new(0.0, 0.0); n];
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let mut lambda = 0.0f64;
        for _ in 0..500 {
            matvec(&v, &mut av);
            matvec_h(&av, &mut w);
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
            let prev = lambda;
            lambda = norm;
            if (lambda - prev).abs() <= 1e-13 * lambda.max(1.0) {
                break;
            }
        }
        // lambda approximates the largest eigenvalue of A^H A
        lambda.sqrt()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            for k in 0..n {
                out[j * n + k] = self.get(j, k);
            }
        }
        out
    }
}

/// Log-determinant of a dense complex matrix whose Hermitian part is
/// positive definite, by LU elimination without pivoting.
///
/// For such matrices every Schur complement again has positive-definite
/// Hermitian part, so each pivot lies strictly in the right half-plane and
/// the sum of principal-branch pivot logs is the unique continuous branch
/// of log det that vanishes at the identity. A pivot outside the right
/// half-plane means the caller's precondition failed and the -d/2 power
/// would be on a wrong branch, so it is reported as an error rather than
/// silently wrapped.
pub fn logdet_dense_rhp(a: &mut [Complex64], n: usize) -> Result<Complex64> {
    debug_assert_eq!(a.len(), n * n);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let pivot = a[k * n + k];
        if !(pivot.re > 0.0) || !pivot.is_finite() {
            return Err(Error::domain(format!(
                "log-determinant pivot {k} has non-positive real part ({pivot})"
            )));
        }
        acc += pivot.ln();
        for i in (k + 1)..n {
            let f = a[i * n + k] / pivot;
            if f != Complex64::new(0.0, 0.0) {
                for j in (k + 1)..n {
                    let s = a[k * n + j];
                    a[i * n + j] -= f * s;
                }
            }
        }
    }
    Ok(acc)
}

/// Cholesky-based positive-definiteness test for a real symmetric matrix
/// given in row-major dense form.
pub fn real_sym_is_pd(a: &[f64], n: usize) -> bool {
    let mut m = a.to_vec();
    for k in 0..n {
        let mut s = m[k * n + k];
        for j in 0..k {
            s -= m[k * n + j] * m[k * n + j];
        }
        if s <= 0.0 || !s.is_finite() {
            return false;
        }
        let l = s.sqrt();
        m[k * n + k] = l;
        for i in (k + 1)..n {
            let mut v = m[i * n + k];
            for j in 0..k {
                v -= m[i * n + j] * m[k * n + j];
            }
            m[i * n + k] = v / l;
        }
    }
    true
}

/// Log-determinant of a real symmetric positive definite matrix.
pub fn real_sym_ln_det(a: &[f64], n: usize) -> Result<f64> {
    let mut m = a.to_vec();
    let mut acc = 0.0;
    for k in 0..n {
        let mut s = m[k * n + k];
        for j in 0..k {
            s -= m[k * n + j] * m[k * n + j];
        }
        if s <= 0.0 || !s.is_finite() {
            return Err(Error::domain("matrix is not positive definite"));
        }
        let l = s.sqrt();
        acc += l.ln();
        m[k * n + k] = l;
        for i in (k + 1)..n {
            let mut v = m[i * n + k];
            for j in 0..k {
                v -= m[i * n + j] * m[k * n + j];
            }
            m[i * n + k] = v / l;
        }
    }
    Ok(2.0 * acc)
}
