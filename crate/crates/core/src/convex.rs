//! Grid-based conjugacy tools: numerical Legendre transform and
//! inf-convolution on low-dimensional boxes.
//!
//! Both sweep cell-centered uniform grids. The Legendre transform flags +∞
//! when the supremum keeps growing toward the box boundary: the grid maximum
//! restricted to the boundary layer strictly exceeding the interior maximum
//! indicates divergence, and a boundary value exceeding the interior by more
//! than the absolute threshold 1e6 is reported as divergent outright.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::functional::Convex;
use crate::num;
use crate::scalar::{cst, Real};

const MAX_GRID_DIM: usize = 3;
const GRID_GUARD: u128 = 100_000_000;

/// Axis-aligned box for grid sweeps.
#[derive(Debug, Clone)]
pub struct GridBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> GridBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Self {
        GridBox { lo, hi }
    }

    pub fn symmetric(r: T, dim: usize) -> Self {
        GridBox {
            lo: vec![-r; dim],
            hi: vec![r; dim],
        }
    }

    fn layout(&self, step: T) -> Result<(Vec<usize>, Vec<T>)> {
        if self.lo.len() != self.hi.len() || self.lo.is_empty() {
            return Err(Error::InvalidInput("grid box dimension mismatch".into()));
        }
        if self.lo.len() > MAX_GRID_DIM {
            return Err(Error::Unsupported(format!(
                "grid sweeps support at most {MAX_GRID_DIM} dimensions"
            )));
        }
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::InvalidInput("grid resolution must be positive".into()));
        }
        let mut counts = Vec::new();
        let mut steps = Vec::new();
        let mut total: u128 = 1;
        for (lo, hi) in self.lo.iter().zip(&self.hi) {
            let width = *hi - *lo;
            if !(width > T::zero()) {
                return Err(Error::InvalidInput("degenerate grid box".into()));
            }
            let n = ((width / step).round().to_f64().unwrap() as usize).max(2);
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

struct SweepMax<T> {
    interior: Option<T>,
    boundary: Option<T>,
}

/// Sweeps cell centers, tracking the max of finite values separately over
/// the boundary layer and the interior. `value_at` returns `None` for points
/// outside the domain (they never attain the supremum).
fn sweep_max<T: Real>(
    bx: &GridBox<T>,
    counts: &[usize],
    steps: &[T],
    mut value_at: impl FnMut(&[T]) -> Option<T>,
) -> SweepMax<T> {
    let dim = counts.len();
    let mut idx = vec![0usize; dim];
    let mut point = vec![T::zero(); dim];
    let half = cst::<T>(0.5);
    let mut out = SweepMax {
        interior: None,
        boundary: None,
    };
    loop {
        let mut on_boundary = false;
        for d in 0..dim {
            point[d] = bx.lo[d] + (cst::<T>(idx[d] as f64) + half) * steps[d];
            on_boundary |= idx[d] == 0 || idx[d] + 1 == counts[d];
        }
        if let Some(v) = value_at(&point) {
            let slot = if on_boundary {
                &mut out.boundary
            } else {
                &mut out.interior
            };
            if slot.map_or(true, |m| v > m) {
                *slot = Some(v);
            }
        }
        let mut d = dim;
        loop {
            if d == 0 {
                return out;
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

/// Numerical Legendre transform f*(p) = sup_x ⟨p,x⟩ − f(x) over a grid.
///
/// Returns +∞ when the supremum is attained only on the boundary layer of
/// the grid (the values grow toward the boundary, so the true supremum lies
/// outside the box).
pub fn legendre_numeric<T: Real>(
    f: &dyn Convex<T>,
    p: &[T],
    bx: &GridBox<T>,
    step: T,
) -> Result<ExtReal<T>> {
    if p.len() != bx.lo.len() {
        return Err(Error::InvalidInput(
            "legendre_numeric: point/box dimension mismatch".into(),
        ));
    }
    if !num::all_finite(p) {
        return Err(Error::InvalidInput("legendre_numeric: non-finite p".into()));
    }
    let (counts, steps) = bx.layout(step)?;
    let m = sweep_max(bx, &counts, &steps, |x| {
        f.eval(x).finite().map(|fx| num::dot(p, x) - fx)
    });
    Ok(classify_sup(m, steps_tol(&steps)))
}

fn steps_tol<T: Real>(steps: &[T]) -> T {
    let h = steps.iter().fold(T::zero(), |m, s| m.max(*s));
    (h * cst(1e-9)).max(cst(1e-14))
}

fn classify_sup<T: Real>(m: SweepMax<T>, growth_tol: T) -> ExtReal<T> {
    match (m.interior, m.boundary) {
        (None, None) => ExtReal::PosInf,
        (Some(i), None) => ExtReal::Finite(i),
        (None, Some(_)) => ExtReal::PosInf,
        (Some(i), Some(b)) => {
            if b > i + growth_tol {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(i.max(b))
            }
        }
    }
}

/// Numerical inf-convolution (f □ g)(x) = inf_u f(u) + g(x−u) over a grid,
/// returning the value and the minimizing grid point.
pub fn infconv_numeric<T: Real>(
    f: &dyn Convex<T>,
    g: &dyn Convex<T>,
    x: &[T],
    bx: &GridBox<T>,
    step: T,
) -> Result<(ExtReal<T>, Vec<T>)> {
    if x.len() != bx.lo.len() {
        return Err(Error::InvalidInput(
            "infconv_numeric: point/box dimension mismatch".into(),
        ));
    }
    if !num::all_finite(x) {
        return Err(Error::InvalidInput("infconv_numeric: non-finite x".into()));
    }
    let (counts, steps) = bx.layout(step)?;
    let dim = counts.len();
    let mut idx = vec![0usize; dim];
    let mut u = vec![T::zero(); dim];
    let mut shifted = vec![T::zero(); dim];
    let half = cst::<T>(0.5);
    let mut best = ExtReal::PosInf;
    let mut arg = bx.lo.clone();
    loop {
        for d in 0..dim {
            u[d] = bx.lo[d] + (cst::<T>(idx[d] as f64) + half) * steps[d];
            shifted[d] = x[d] - u[d];
        }
        let v = f.eval(&u) + g.eval(&shifted);
        if v < best {
            best = v;
            arg.copy_from_slice(&u);
        }
        let mut d = dim;
        loop {
            if d == 0 {
                return Ok((best, arg));
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{CustomFunctional, Flags, PointIndicator, Quadratic, WeightedL1};

    fn finite_flags() -> Flags {
        Flags {
            finite_valued: true,
            ..Flags::default()
        }
    }

    #[test]
    fn quadratic_is_self_conjugate() {
        let f = Quadratic::new(1.0);
        let bx = GridBox::symmetric(10.0, 1);
        let v = legendre_numeric(&f, &[3.0], &bx, 1e-3).unwrap();
        assert!((v.unwrap_finite() - 4.5).abs() < 1e-2, "{v:?}");
    }

    #[test]
    fn conjugate_of_abs_is_unit_interval_indicator() {
        let f = WeightedL1::uniform(1);
        let bx = GridBox::symmetric(10.0, 1);
        let inside = legendre_numeric(&f, &[0.5], &bx, 1e-3).unwrap();
        assert!(inside.unwrap_finite().abs() < 1e-2);
        let outside = legendre_numeric(&f, &[2.0], &bx, 1e-3).unwrap();
        assert!(!outside.is_finite(), "expected divergence flag");
    }

    #[test]
    fn huber_conjugate_value() {
        // Huber = |x| □ x²/2; its conjugate is p²/2 on |p| ≤ 1.
        let huber = CustomFunctional::new(
            "huber",
            |x: &[f64]| {
                let a = x[0].abs();
                ExtReal::new(if a <= 1.0 { a * a / 2.0 } else { a - 0.5 })
            },
            finite_flags(),
        );
        let bx = GridBox::symmetric(10.0, 1);
        let v = legendre_numeric(&huber, &[0.5], &bx, 1e-3).unwrap();
        assert!((v.unwrap_finite() - 0.125).abs() < 1e-2, "{v:?}");
    }

    #[test]
    fn infconv_identity_at_origin_indicator() {
        let f = PointIndicator::origin();
        let g = Quadratic::new(1.0);
        // box chosen so a cell center hits the origin exactly
        let bx = GridBox::new(vec![-2.0005], vec![1.9995]);
        let (v, arg) = infconv_numeric(&f, &g, &[1.2], &bx, 1e-3).unwrap();
        assert!((v.unwrap_finite() - 0.72).abs() < 1e-12);
        assert!(arg[0].abs() < 1e-12);
    }

    #[test]
    fn infconv_huber_from_abs_and_quadratic() {
        let f = WeightedL1::uniform(1);
        let g = Quadratic::new(1.0);
        let bx = GridBox::symmetric(8.0, 1);
        let (v, arg) = infconv_numeric(&f, &g, &[2.0], &bx, 1e-3).unwrap();
        assert!((v.unwrap_finite() - 1.5).abs() < 1e-3, "{v:?}");
        assert!((arg[0] - 1.0).abs() < 2e-3, "{arg:?}");
    }

    #[test]
    fn infconv_of_two_quadratics_halves_curvature() {
        let f = Quadratic::new(1.0);
        let g = Quadratic::new(1.0);
        let bx = GridBox::symmetric(8.0, 1);
        let (v, arg) = infconv_numeric(&f, &g, &[2.0], &bx, 1e-3).unwrap();
        assert!((v.unwrap_finite() - 1.0).abs() < 1e-3);
        assert!((arg[0] - 1.0).abs() < 2e-3);
    }

    #[test]
    fn rejects_bad_resolution_and_degenerate_box() {
        let f = Quadratic::new(1.0);
        let bx = GridBox::symmetric(1.0, 1);
        assert!(legendre_numeric(&f, &[0.0], &bx, 0.0).is_err());
        let degenerate = GridBox::new(vec![1.0], vec![1.0]);
        assert!(legendre_numeric(&f, &[0.0], &degenerate, 0.1).is_err());
    }
}
