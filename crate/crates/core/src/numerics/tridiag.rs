use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetric tridiagonal matrix given by its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonal<T = f64> {
    diagonal: Vec<T>,
    off_diagonal: Vec<T>,
}

impl<T: Real> SymmetricTridiagonal<T> {
    pub fn new(diagonal: Vec<T>, off_diagonal: Vec<T>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::DimensionMismatch {
                expected: diagonal.len() - 1,
                got: off_diagonal.len(),
            });
        }
        Ok(Self {
            diagonal,
            off_diagonal,
        })
    }

    pub fn order(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[T] {
        &self.off_diagonal
    }

    pub fn trace(&self) -> T {
        self.diagonal.iter().copied().sum()
    }
}

/// Implicit-shift QL iteration. `rows` are rows of the accumulated
/// transformation that the caller wants to track: one row `e_0^T` yields the
/// first component of every eigenvector, the identity yields all of them.
fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T], rows: &mut [Vec<T>]) -> Result<()> {
    let m = d.len();
    if m == 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    let two = T::of(2.0);
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= eps * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::InvalidArgument(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let signed = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[mm] - d[l] + e[l] / (g + signed);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = mm;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[mm] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in rows.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = T::zero();
        }
    }
    Ok(())
}

fn run_ql<T: Real>(t: &SymmetricTridiagonal<T>, mut rows: Vec<Vec<T>>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let m = t.order();
    let mut d = t.diagonal.clone();
    let mut e = t.off_diagonal.clone();
    e.push(T::zero());
    implicit_ql(&mut d, &mut e, &mut rows)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let rows = rows
        .into_iter()
        .map(|row| order.iter().map(|&i| row[i]).collect())
        .collect();
    Ok((values, rows))
}

/// Eigenvalues (ascending) and the first component of each orthonormal
/// eigenvector.
pub fn symtri_eigen<T: Real>(t: &SymmetricTridiagonal<T>) -> Result<(Vec<T>, Vec<T>)> {
    let m = t.order();
    let mut first = vec![T::zero(); m];
    first[0] = T::one();
    let (values, mut rows) = run_ql(t, vec![first])?;
    let mut first = rows.pop().expect("one tracked row");
    // sign convention: first components non-negative
    for v in first.iter_mut() {
        *v = v.abs();
    }
    Ok((values, first))
}

/// Eigenvalues (ascending) and full eigenvectors; `vectors[i]` belongs to
/// `values[i]`.
pub fn symtri_eigen_full<T: Real>(t: &SymmetricTridiagonal<T>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let m = t.order();
    let identity: Vec<Vec<T>> = (0..m)
        .map(|r| (0..m).map(|c| if r == c { T::one() } else { T::zero() }).collect())
        .collect();
    let (values, rows) = run_ql(t, identity)?;
    // rows[k][i] is component k of eigenvector i
    let vectors = (0..m).map(|i| (0..m).map(|k| rows[k][i]).collect()).collect();
    Ok((values, vectors))
}
