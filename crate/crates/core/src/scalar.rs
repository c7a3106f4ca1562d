use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar used by the linear algebra, polynomial and
/// fixed-point code: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize is representable in every Real")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Dot product with eight independent accumulators.
///
/// The fixed lane structure lets the compiler vectorize the loop while the
/// summation order stays identical on every platform.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [T::zero(); 8];
    let chunks_a = a.chunks_exact(8);
    let chunks_b = b.chunks_exact(8);
    let rem_a = chunks_a.remainder();
    let rem_b = chunks_b.remainder();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        for l in 0..8 {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut tail = T::zero();
    for (x, y) in rem_a.iter().zip(rem_b) {
        tail += *x * *y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Dot product accurate to about twice the working precision (the `Dot2`
/// scheme: error-free products and sums feeding a correction term).
///
/// Used where a residual of nearly cancelling terms has to be trusted.
pub fn dot_compensated<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut p = T::zero();
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let h = x * y;
        let r = x.mul_add(y, -h);
        let sum = p + h;
        let z = sum - p;
        let q = (p - (sum - z)) + (h - z);
        p = sum;
        s += q + r;
    }
    p + s
}
