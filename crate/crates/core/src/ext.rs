//! Extended real values: finite scalars together with +∞.
//!
//! Proper convex functions take values in R ∪ {+∞}. Arithmetic saturates at
//! +∞; −∞ and NaN are rejected at construction.

use std::cmp::Ordering;
use std::ops::Add;

use crate::scalar::Real;

/// A value in R ∪ {+∞}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal<T> {
    Finite(T),
    PosInf,
}

impl<T: Real> ExtReal<T> {
    /// Wraps a scalar, mapping +∞ to `PosInf`. Panics on NaN or −∞.
    pub fn new(v: T) -> Self {
        assert!(!v.is_nan(), "extended real cannot be NaN");
        if v == T::infinity() {
            ExtReal::PosInf
        } else {
            assert!(v > T::neg_infinity(), "extended real cannot be -inf");
            ExtReal::Finite(v)
        }
    }

    pub fn zero() -> Self {
        ExtReal::Finite(T::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite value, if any.
    pub fn finite(&self) -> Option<T> {
        match self {
            ExtReal::Finite(v) => Some(*v),
            ExtReal::PosInf => None,
        }
    }

    /// The finite value, or panic. For contexts where finiteness was checked.
    pub fn unwrap_finite(&self) -> T {
        self.finite().expect("expected finite extended real")
    }

    /// Collapses to a plain scalar, with +∞ mapped to `T::infinity()`.
    pub fn to_float(&self) -> T {
        match self {
            ExtReal::Finite(v) => *v,
            ExtReal::PosInf => T::infinity(),
        }
    }

    pub fn map<F: FnOnce(T) -> T>(self, f: F) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::new(f(v)),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl<T: Real> Add for ExtReal<T> {
    type Output = ExtReal<T>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::new(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl<T: Real> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl<T: Real> From<T> for ExtReal<T> {
    fn from(v: T) -> Self {
        ExtReal::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_addition() {
        let a: ExtReal<f64> = ExtReal::new(1.5);
        let b = ExtReal::PosInf;
        assert_eq!(a + a, ExtReal::Finite(3.0));
        assert!(!(a + b).is_finite());
        assert!(!(b + b).is_finite());
    }

    #[test]
    fn plus_infinity_collapses() {
        assert_eq!(ExtReal::new(f64::INFINITY), ExtReal::PosInf);
    }

    #[test]
    #[should_panic]
    fn neg_infinity_rejected() {
        let _ = ExtReal::new(f64::NEG_INFINITY);
    }

    #[test]
    fn ordering() {
        let a: ExtReal<f64> = ExtReal::new(2.0);
        assert!(a < ExtReal::PosInf);
        assert!(ExtReal::<f64>::PosInf >= ExtReal::PosInf);
    }
}
