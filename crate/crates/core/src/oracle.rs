//! Brute-force grid solvers used to generate ground truth in tests.
//!
//! These deliberately share no code with the main solvers: independent
//! loops, independent evaluations. Grid sweeps are deterministic; the
//! coordinate-descent polish shrinks its step by a fixed factor each round.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::scalar::{cst, Real};

const GRID_GUARD: u128 = 100_000_000;

/// Box bounds, grid resolution, and polish controls for a brute-force sweep.
#[derive(Debug, Clone)]
pub struct OracleConfig<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
    /// Requested grid step per axis; actual step divides the box evenly.
    pub step: T,
    /// Coordinate-descent rounds from the best grid point (0 disables).
    pub polish_rounds: usize,
}

impl<T: Real> OracleConfig<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>, step: T) -> Self {
        OracleConfig {
            lo,
            hi,
            step,
            polish_rounds: 40,
        }
    }

    /// Symmetric box [−r, r]^dim.
    pub fn symmetric(r: T, dim: usize, step: T) -> Self {
        OracleConfig::new(vec![-r; dim], vec![r; dim], step)
    }

    pub fn without_polish(mut self) -> Self {
        self.polish_rounds = 0;
        self
    }

    fn validate(&self) -> Result<(Vec<usize>, Vec<T>)> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Err(Error::InvalidInput("oracle box dimension mismatch".into()));
        }
        if !(self.step > T::zero()) {
            return Err(Error::InvalidInput("oracle step must be positive".into()));
        }
        let mut counts = Vec::with_capacity(self.lo.len());
        let mut steps = Vec::with_capacity(self.lo.len());
        let mut total: u128 = 1;
        for (lo, hi) in self.lo.iter().zip(&self.hi) {
            let width = *hi - *lo;
            if !(width > T::zero()) {
                return Err(Error::InvalidInput("degenerate oracle box".into()));
            }
            let n = (width / self.step).round().to_f64().unwrap().max(1.0) as usize;
            total = total.saturating_mul(n as u128);
            counts.push(n);
            steps.push(width / cst(n as f64));
        }
        if total > GRID_GUARD {
            return Err(Error::GridGuard {
                points: total,
                limit: GRID_GUARD,
            });
        }
        Ok((counts, steps))
    }
}

/// Iterates cell centers of the configured grid in row-major order.
fn sweep<T: Real>(
    cfg: &OracleConfig<T>,
    counts: &[usize],
    steps: &[T],
    mut visit: impl FnMut(&[T]),
) {
    let dim = counts.len();
    let mut idx = vec![0usize; dim];
    let mut point = vec![T::zero(); dim];
    let half = cst::<T>(0.5);
    loop {
        for d in 0..dim {
            point[d] = cfg.lo[d] + (cst::<T>(idx[d] as f64) + half) * steps[d];
        }
        visit(&point);
        // odometer increment
        let mut d = dim;
        loop {
            if d == 0 {
                return;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// Grid minimum refined by shrinking-step coordinate descent.
pub fn brute_min<T: Real>(
    objective: impl Fn(&[T]) -> ExtReal<T>,
    cfg: &OracleConfig<T>,
) -> Result<(ExtReal<T>, Vec<T>)> {
    let (counts, steps) = cfg.validate()?;
    let mut best = ExtReal::PosInf;
    let mut arg = cfg.lo.clone();
    sweep(cfg, &counts, &steps, |point| {
        let v = objective(point);
        if v < best {
            best = v;
            arg.copy_from_slice(point);
        }
    });
    if !best.is_finite() {
        return Ok((best, arg));
    }
    // coordinate descent polish, unconstrained, deterministic
    let mut value = best.unwrap_finite();
    let mut radius = steps.iter().fold(T::zero(), |m, s| m.max(*s));
    for _ in 0..cfg.polish_rounds {
        for d in 0..arg.len() {
            for dir in [T::one(), -T::one()] {
                loop {
                    let mut cand = arg.clone();
                    cand[d] = cand[d] + dir * radius;
                    match objective(&cand) {
                        ExtReal::Finite(v) if v < value => {
                            value = v;
                            arg = cand;
                        }
                        _ => break,
                    }
                }
            }
        }
        radius = radius * cst(0.5);
    }
    Ok((ExtReal::Finite(value), arg))
}

/// Grid maximum of a concave objective over the box, refined by projected
/// coordinate ascent (mirror of [`brute_min`] with clamping onto the box).
pub fn brute_max_over_box<T: Real>(
    objective: impl Fn(&[T]) -> ExtReal<T>,
    cfg: &OracleConfig<T>,
) -> Result<(ExtReal<T>, Vec<T>)> {
    let (counts, steps) = cfg.validate()?;
    let mut best: Option<T> = None;
    let mut arg = cfg.lo.clone();
    sweep(cfg, &counts, &steps, |point| {
        if let ExtReal::Finite(v) = objective(point) {
            if best.map_or(true, |b| v > b) {
                best = Some(v);
                arg.copy_from_slice(point);
            }
        }
    });
    let mut value = match best {
        Some(v) => v,
        None => {
            return Err(Error::Infeasible(
                "objective is -inf on the whole oracle box".into(),
            ))
        }
    };
    let mut radius = steps.iter().fold(T::zero(), |m, s| m.max(*s));
    for _ in 0..cfg.polish_rounds {
        for d in 0..arg.len() {
            for dir in [T::one(), -T::one()] {
                loop {
                    let mut cand = arg.clone();
                    cand[d] = (cand[d] + dir * radius).max(cfg.lo[d]).min(cfg.hi[d]);
                    if cand[d] == arg[d] {
                        break;
                    }
                    match objective(&cand) {
                        ExtReal::Finite(v) if v > value => {
                            value = v;
                            arg = cand;
                        }
                        _ => break,
                    }
                }
            }
        }
        radius = radius * cst(0.5);
    }
    Ok((ExtReal::Finite(value), arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num;

    #[test]
    fn recovers_quadratic_minimum() {
        let z = [0.37, -1.21];
        let cfg = OracleConfig::symmetric(3.0, 2, 0.25);
        let (val, arg) = brute_min(|u| ExtReal::new(num::dist2(u, &z).powi(2)), &cfg).unwrap();
        assert!(num::dist2(&arg, &z) < 1e-9, "arg {arg:?}");
        assert!(val.unwrap_finite() < 1e-17);
    }

    #[test]
    fn max_of_concave_over_box_hits_interior_and_vertex() {
        // 2q − q²/2 over [−1,1]: increasing, max at the vertex q = 1, value 1.5
        let cfg = OracleConfig::symmetric(1.0, 1, 0.05);
        let (val, arg) = brute_max_over_box(|q| ExtReal::new(2.0 * q[0] - q[0] * q[0] / 2.0), &cfg).unwrap();
        assert!((val.unwrap_finite() - 1.5).abs() < 1e-12);
        assert!((arg[0] - 1.0).abs() < 1e-12);

        // linear objective picks a vertex
        let (_, arg) = brute_max_over_box(|q| ExtReal::new(-3.0 * q[0]), &cfg).unwrap();
        assert!((arg[0] + 1.0).abs() < 1e-12);

        // zero objective: value 0
        let (val, _) = brute_max_over_box(|_| ExtReal::new(0.0), &cfg).unwrap();
        assert_eq!(val.unwrap_finite(), 0.0);
    }

    #[test]
    fn polish_never_increases_minimum() {
        let obj = |u: &[f64]| ExtReal::new((u[0] - 0.123).powi(2) + (u[0] - 0.123).abs());
        let coarse = OracleConfig::symmetric(2.0, 1, 0.5).without_polish();
        let polished = OracleConfig::symmetric(2.0, 1, 0.5);
        let (v0, _) = brute_min(obj, &coarse).unwrap();
        let (v1, _) = brute_min(obj, &polished).unwrap();
        assert!(v1 <= v0);
    }

    #[test]
    fn grid_guard_trips() {
        let cfg = OracleConfig::symmetric(1.0, 8, 1e-3);
        assert!(matches!(
            brute_min(|_| ExtReal::new(0.0), &cfg),
            Err(Error::GridGuard { .. })
        ));
    }

    #[test]
    fn determinism() {
        let cfg = OracleConfig::symmetric(1.5, 2, 0.1);
        let obj = |u: &[f64]| ExtReal::new(u[0].abs() + (u[1] - 0.3).powi(2));
        let a = brute_min(obj, &cfg).unwrap();
        let b = brute_min(obj, &cfg).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }
}
