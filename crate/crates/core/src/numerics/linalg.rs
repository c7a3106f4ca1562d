use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

use super::tridiag::SymmetricTridiagonal;

/// Symmetric positive definite system `A x = b`, stored densely row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdSystem<T = f64> {
    order: usize,
    matrix: Vec<T>,
}

impl<T: Real> SpdSystem<T> {
    /// Wraps a dense matrix, checking symmetry to 1e-12 relative to the
    /// largest entry.
    pub fn new(order: usize, matrix: Vec<T>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("order must be positive".into()));
        }
        if matrix.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                got: matrix.len(),
            });
        }
        let scale = matrix.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tol = T::of(1e-12) * scale.max(T::min_positive_value());
        for i in 0..order {
            for j in (i + 1)..order {
                if (matrix[i * order + j] - matrix[j * order + i]).abs() > tol {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { order, matrix })
    }

    /// `ridge * I + gram`.
    pub fn ridge(order: usize, gram: &[T], ridge: T) -> Result<Self> {
        if gram.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                got: gram.len(),
            });
        }
        let mut m = gram.to_vec();
        for i in 0..order {
            m[i * order + i] += ridge;
        }
        Self::new(order, m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &[T] {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.matrix[i * self.order + j]
    }

    /// `A x` for the stored matrix.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.order;
        (0..n)
            .map(|i| dot(&self.matrix[i * n..(i + 1) * n], x))
            .collect()
    }

    pub fn factor(&self) -> Result<CholeskyFactor<T>> {
        CholeskyFactor::new(self)
    }
}

/// Lower Cholesky factor `A = L L^T`, row-major with zeros above the diagonal.
#[derive(Debug, Clone)]
pub struct CholeskyFactor<T = f64> {
    order: usize,
    lower: Vec<T>,
}

const BLOCK: usize = 64;

impl<T: Real> CholeskyFactor<T> {
    pub fn new(system: &SpdSystem<T>) -> Result<Self> {
        let n = system.order;
        let mut l = system.matrix.clone();
        let mut start = 0;
        while start < n {
            let end = (start + BLOCK).min(n);
            {
                // Columns left of the block: every row in the block sees the
                // finished rows above it.
                let (done, block) = l.split_at_mut(start * n);
                for j in 0..start {
                    let row_j = &done[j * n..j * n + j];
                    let pivot = done[j * n + j];
                    for i in start..end {
                        let row_i = &mut block[(i - start) * n..(i - start + 1) * n];
                        let s = row_i[j] - dot(&row_i[..j], row_j);
                        row_i[j] = s / pivot;
                    }
                }
            }
            for i in start..end {
                let (above, rest) = l.split_at_mut(i * n);
                let row_i = &mut rest[..n];
                for j in start..i {
                    let row_j = &above[j * n..j * n + j];
                    let s = row_i[j] - dot(&row_i[..j], row_j);
                    row_i[j] = s / above[j * n + j];
                }
                let s = row_i[i] - dot(&row_i[..i], &row_i[..i]);
                if !(s > T::zero()) || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite {
                        index: i,
                        value: s.to_f64().unwrap_or(f64::NAN),
                    });
                }
                row_i[i] = s.sqrt();
                for v in row_i[i + 1..].iter_mut() {
                    *v = T::zero();
                }
            }
            start = end;
        }
        Ok(Self { order: n, lower: l })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.order;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let l = &self.lower;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let s = y[i] - dot(&l[i * n..i * n + i], &y[..i]);
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let xi = y[i] / l[i * n + i];
            y[i] = xi;
            let row = &l[i * n..i * n + i];
            for (yk, lik) in y[..i].iter_mut().zip(row) {
                *yk -= *lik * xi;
            }
        }
        Ok(y)
    }

    /// `Tr(A^{-1}) = ||L^{-1}||_F^2`, one forward substitution per column.
    pub fn trace_inverse(&self) -> T {
        let n = self.order;
        let l = &self.lower;
        let mut z = vec![T::zero(); n];
        let mut total = T::zero();
        for j in 0..n {
            let mut col = T::zero();
            z[j] = T::one() / l[j * n + j];
            col += z[j] * z[j];
            for i in (j + 1)..n {
                let s = dot(&l[i * n + j..i * n + i], &z[j..i]);
                z[i] = -s / l[i * n + i];
                col += z[i] * z[i];
            }
            total += col;
        }
        total
    }

    /// `log det A`.
    pub fn log_det(&self) -> T {
        let n = self.order;
        (0..n)
            .map(|i| self.lower[i * n + i].ln())
            .sum::<T>()
            * T::of(2.0)
    }
}

/// Solves `A x = rhs` via Cholesky.
pub fn spd_solve<T: Real>(system: &SpdSystem<T>, rhs: &[T]) -> Result<Vec<T>> {
    if rhs.len() != system.order {
        return Err(Error::DimensionMismatch {
            expected: system.order,
            got: rhs.len(),
        });
    }
    system.factor()?.solve(rhs)
}

/// `Tr(A^{-1})` via Cholesky.
pub fn spd_trace_inverse<T: Real>(system: &SpdSystem<T>) -> Result<T> {
    Ok(system.factor()?.trace_inverse())
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form.
pub fn tridiagonalize<T: Real>(order: usize, matrix: &[T]) -> Result<SymmetricTridiagonal<T>> {
    let n = order;
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: matrix.len(),
        });
    }
    let mut a = matrix.to_vec();
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let two = T::of(2.0);
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let mut v: Vec<T> = (0..m).map(|r| a[(k + 1 + r) * n + k]).collect();
        let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if norm == T::zero() {
            off[k] = T::zero();
            continue;
        }
        let alpha = if v[0] > T::zero() { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        off[k] = alpha;
        if vnorm == T::zero() {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // p = A_sub v ; q = p - (v.p) v ; A_sub -= 2 (v q^T + q v^T)
        let p: Vec<T> = (0..m)
            .map(|r| {
                let row = (k + 1 + r) * n + k + 1;
                dot(&a[row..row + m], &v)
            })
            .collect();
        let kappa = dot(&v, &p);
        let q: Vec<T> = p.iter().zip(&v).map(|(pi, vi)| *pi - kappa * *vi).collect();
        for r in 0..m {
            let row = (k + 1 + r) * n + k + 1;
            for c in 0..m {
                a[row + c] -= two * (v[r] * q[c] + q[r] * v[c]);
            }
        }
        for r in 0..m {
            a[(k + 1 + r) * n + k] = T::zero();
            a[k * n + k + 1 + r] = T::zero();
        }
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    SymmetricTridiagonal::new(diag, off)
}

/// Eigenvalues of a dense symmetric matrix in ascending order.
pub fn symmetric_eigenvalues<T: Real>(order: usize, matrix: &[T]) -> Result<Vec<T>> {
    let t = tridiagonalize(order, matrix)?;
    Ok(super::tridiag::symtri_eigen(&t)?.0)
}
