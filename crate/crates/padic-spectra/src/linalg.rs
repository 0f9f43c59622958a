//! Small dense complex matrices: just enough for the n x n interaction
//! matrices of the spectral problem. Determinants and solves go through LU
//! with partial pivoting; singular values come from a Jacobi eigensolve of
//! the real symmetric embedding of A^H A.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix must be square".into()));
        }
        let mut m = CMat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.n, v.len());
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &CMat) -> CMat {
        debug_assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn conj_transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Determinant via LU with partial pivoting.
    pub fn det(&self) -> Complex64 {
        let n = self.n;
        if n == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let mut a = self.data.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm();
            for row in col + 1..n {
                let mag = a[row * n + col].norm();
                if mag > best {
                    best = mag;
                    pivot = row;
                }
            }
            if best == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let diag = a[col * n + col];
            det *= diag;
            for row in col + 1..n {
                let factor = a[row * n + col] / diag;
                for j in col..n {
                    let sub = factor * a[col * n + j];
                    a[row * n + j] -= sub;
                }
            }
        }
        det
    }

    /// Solves self * x = b. Fails when a pivot falls below a relative floor.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::Dimension("rhs length".into()));
        }
        let scale = self.max_abs().max(1e-300);
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm();
            for row in col + 1..n {
                let mag = a[row * n + col].norm();
                if mag > best {
                    best = mag;
                    pivot = row;
                }
            }
            if best < 1e-13 * scale {
                return Err(Error::SingularSystem);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                x.swap(col, pivot);
            }
            let diag = a[col * n + col];
            for row in col + 1..n {
                let factor = a[row * n + col] / diag;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let sub = factor * a[col * n + j];
                    a[row * n + j] -= sub;
                }
                let sub = factor * x[col];
                x[row] -= sub;
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for j in col + 1..n {
                acc -= a[col * n + j] * x[j];
            }
            x[col] = acc / a[col * n + col];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMat> {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for col in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[col] = Complex64::new(1.0, 0.0);
            let x = self.solve(&e)?;
            for row in 0..n {
                out[(row, col)] = x[row];
            }
        }
        Ok(out)
    }

    /// Singular values in descending order, plus the right singular vector of
    /// the smallest one. Computed from the eigen-decomposition of the real
    /// symmetric embedding of A^H A, where each complex eigenpair appears as
    /// a doubled real pair.
    pub fn singular_values(&self) -> (Vec<f64>, Vec<Complex64>) {
        let n = self.n;
        let h = self.conj_transpose().mul(self);
        // real embedding S = [[X, -Y], [Y, X]] for H = X + iY
        let m = 2 * n;
        let mut s = vec![0.0f64; m * m];
        for i in 0..n {
            for j in 0..n {
                s[i * m + j] = h[(i, j)].re;
                s[i * m + (j + n)] = -h[(i, j)].im;
                s[(i + n) * m + j] = h[(i, j)].im;
                s[(i + n) * m + (j + n)] = h[(i, j)].re;
            }
        }
        let (eigs, vecs) = jacobi_symmetric(&mut s, m);
        // pair up doubled eigenvalues: sort descending, keep every other one
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eigs[b].partial_cmp(&eigs[a]).unwrap());
        let mut sigmas = Vec::with_capacity(n);
        for k in 0..n {
            sigmas.push(eigs[order[2 * k]].max(0.0).sqrt());
        }
        // eigenvector of the smallest eigenvalue -> complex null direction
        let col = order[m - 1];
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(vecs[i * m + col], vecs[(i + n) * m + col]))
            .collect();
        let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in v.iter_mut() {
                *c /= norm;
            }
        }
        (sigmas, v)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Cyclic Jacobi for a real symmetric matrix stored row-major; returns
/// (eigenvalues, column eigenvectors).
fn jacobi_symmetric(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a[i * n + j] * a[i * n + j];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(a, n)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigs = (0..n).map(|i| a[i * n + i]).collect();
    (eigs, v)
}

fn frobenius(a: &[f64], n: usize) -> f64 {
    a.iter().take(n * n).map(|x| x * x).sum::<f64>().sqrt()
}
