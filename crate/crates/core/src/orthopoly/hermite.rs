use crate::scalar::Real;

/// Orthonormal probabilists' Hermite polynomial `H_k(x)`,
/// `x H_k = sqrt(k+1) H_{k+1} + sqrt(k) H_{k-1}`.
pub fn hermite_eval<T: Real>(k: usize, x: T) -> T {
    let mut prev = T::zero();
    let mut cur = T::one();
    for j in 0..k {
        let next = (x * cur - T::of_usize(j).sqrt() * prev) / T::of_usize(j + 1).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_0(x), ..., H_L(x)`.
pub fn hermite_eval_all<T: Real>(max_degree: usize, x: T) -> Vec<T> {
    let mut out = Vec::with_capacity(max_degree + 1);
    let mut prev = T::zero();
    let mut cur = T::one();
    out.push(cur);
    for j in 0..max_degree {
        let next = (x * cur - T::of_usize(j).sqrt() * prev) / T::of_usize(j + 1).sqrt();
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Hermite system truncated at degree `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermiteBasis {
    pub max_degree: usize,
}

impl HermiteBasis {
    pub fn new(max_degree: usize) -> Self {
        Self { max_degree }
    }

    pub fn eval<T: Real>(&self, k: usize, x: T) -> Option<T> {
        (k <= self.max_degree).then(|| hermite_eval(k, x))
    }

    pub fn eval_all<T: Real>(&self, x: T) -> Vec<T> {
        hermite_eval_all(self.max_degree, x)
    }
}
