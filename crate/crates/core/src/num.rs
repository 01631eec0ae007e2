//! Small dense-vector helpers used across the solvers.

use crate::scalar::Real;

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    neumaier(a.iter().zip(b).map(|(x, y)| *x * *y))
}

#[inline]
pub fn norm2_sq<T: Real>(a: &[T]) -> T {
    neumaier(a.iter().map(|x| *x * *x))
}

#[inline]
pub fn norm2<T: Real>(a: &[T]) -> T {
    norm2_sq(a).sqrt()
}

#[inline]
pub fn norm_inf<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

#[inline]
pub fn dist2<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    neumaier(a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y))).sqrt()
}

pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|x| *x * s).collect()
}

pub fn all_finite<T: Real>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Neumaier compensated summation. The solvers certify duality gaps many
/// orders below the magnitude of the summands, so plain accumulation is not
/// accurate enough on image-scale data.
pub fn neumaier<T: Real, I: IntoIterator<Item = T>>(iter: I) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    for v in iter {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancellation() {
        // 1 + 1e100 - 1e100 == 1 under compensation, 0 under naive summation
        let s = neumaier([1.0f64, 1e100, -1e100]);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn basic_ops() {
        let a = [3.0f64, 4.0];
        assert_eq!(norm2(&a), 5.0);
        assert_eq!(dot(&a, &a), 25.0);
        assert_eq!(norm_inf(&[-7.0f64, 2.0]), 7.0);
    }
}
