//! The dual norm of the discrete total variation, its ball projection, and
//! the functional wrappers used by the Hamilton-Jacobi solvers.
//!
//! The norm is computed operationally through duality: v lies in the μ-ball
//! exactly when prox_{μTV}(v) = 0, and the ball projection follows from the
//! Moreau identity proj(z) = z − prox_{μTV}(z). It is finite only on the
//! orthogonal complement of the semi-norm's null space (mean-zero fields for
//! the full variant; the truncated variant additionally requires a zero
//! trailing-corner pixel, which sits on no retained difference).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::functional::{Convex, Flags, Functional};
use crate::grid::ImageGrid;
use crate::num;
use crate::scalar::{cst, Real};
use crate::tv::{tv_eval, tv_prox, TvVariant};

/// Relative tolerance for detecting a component in the null space of TV
/// (which makes the dual norm infinite).
const NULL_COMPONENT_RTOL: f64 = 1e-9;

/// Orthonormal basis of the null space of the semi-norm.
fn null_basis<T: Real>(rows: usize, cols: usize, variant: TvVariant) -> Vec<Vec<T>> {
    let n = rows * cols;
    match variant {
        TvVariant::Full => {
            let c = T::one() / cst::<T>(n as f64).sqrt();
            vec![vec![c; n]]
        }
        TvVariant::Truncated => {
            if rows == 1 || cols == 1 {
                let c = T::one() / cst::<T>(n as f64).sqrt();
                vec![vec![c; n]]
            } else {
                // all pixels except the trailing corner are connected by
                // retained differences; the corner is isolated
                let corner = n - 1;
                let c = T::one() / cst::<T>((n - 1) as f64).sqrt();
                let mut core = vec![c; n];
                core[corner] = T::zero();
                let mut e = vec![T::zero(); n];
                e[corner] = T::one();
                vec![core, e]
            }
        }
    }
}

/// True when v has no component along the null space of TV (so its dual
/// norm is finite).
pub fn g_norm_finite<T: Real>(v: &ImageGrid<T>, variant: TvVariant) -> bool {
    let scale = num::norm2(v.values());
    if scale == T::zero() {
        return true;
    }
    let tol = cst::<T>(NULL_COMPONENT_RTOL) * scale;
    null_basis(v.rows(), v.cols(), variant)
        .iter()
        .all(|b| num::dot(v.values(), b).abs() <= tol)
}

/// Projection of z onto {v : ‖v‖_G ≤ μ}, computed as z − prox_{μTV}(z).
pub fn gball_project<T: Real>(
    z: &ImageGrid<T>,
    mu: T,
    tol: T,
    variant: TvVariant,
) -> Result<ImageGrid<T>> {
    if !(mu > T::zero()) {
        return Err(Error::InvalidInput("gball_project: radius must be positive".into()));
    }
    let u = tv_prox(z, mu, tol, variant)?;
    let vals = z
        .values()
        .iter()
        .zip(u.values())
        .map(|(a, b)| *a - *b)
        .collect();
    ImageGrid::from_vec(z.rows(), z.cols(), vals)
}

/// The dual norm ‖v‖_G, located by bisection on the fixed-point test
/// gball_project(v, μ) = v. Returns +∞ when v has a null-space component.
pub fn g_norm<T: Real>(v: &ImageGrid<T>, tol: T, variant: TvVariant) -> Result<ExtReal<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("g_norm: tolerance must be positive".into()));
    }
    let scale = num::norm2(v.values());
    if scale == T::zero() {
        return Ok(ExtReal::zero());
    }
    if !g_norm_finite(v, variant) {
        return Ok(ExtReal::PosInf);
    }

    let member_tol = (cst::<T>(1e-10) * scale).max(cst(1e-13));
    let is_member = |mu: T| -> Result<bool> {
        let prox = tv_prox(v, mu, member_tol / cst(2.0), variant)?;
        Ok(num::norm2(prox.values()) <= member_tol)
    };

    let mut lo = T::zero();
    let mut hi = cst::<T>(2.0)
        * scale
        * cst::<T>(v.rows().max(v.cols()) as f64);
    let mut grow = 0;
    while !is_member(hi)? {
        hi = hi * cst(2.0);
        grow += 1;
        if grow > 8 {
            return Err(Error::Inconclusive(
                "g_norm: membership not reached at bracket upper bound".into(),
            ));
        }
    }
    while hi - lo > tol {
        let mid = (lo + hi) / cst(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if is_member(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ExtReal::Finite((lo + hi) / cst(2.0)))
}

// ---------------------------------------------------------------------------
// Functional wrappers over a fixed grid shape
// ---------------------------------------------------------------------------

/// weight·TV on a fixed grid shape, as a [`Convex`] functional on R^n.
#[derive(Debug, Clone)]
pub struct TotalVariation<T> {
    rows: usize,
    cols: usize,
    variant: TvVariant,
    weight: T,
}

impl<T: Real> TotalVariation<T> {
    pub fn new(rows: usize, cols: usize, variant: TvVariant) -> Self {
        TotalVariation {
            rows,
            cols,
            variant,
            weight: T::one(),
        }
    }

    pub fn weighted(rows: usize, cols: usize, variant: TvVariant, weight: T) -> Self {
        assert!(weight > T::zero());
        TotalVariation {
            rows,
            cols,
            variant,
            weight,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn variant(&self) -> TvVariant {
        self.variant
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    fn grid(&self, x: &[T]) -> Result<ImageGrid<T>> {
        ImageGrid::from_vec(self.rows, self.cols, x.to_vec())
    }
}

impl<T: Real> Convex<T> for TotalVariation<T> {
    fn name(&self) -> &str {
        "total-variation"
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        let g = self.grid(x).expect("TV eval: wrong dimension");
        ExtReal::new(self.weight * tv_eval(&g, self.variant))
    }

    fn prox(&self, z: &[T], step: T, tol: T) -> Result<Vec<T>> {
        let g = self.grid(z)?;
        let u = tv_prox(&g, step * self.weight, tol, self.variant)?;
        Ok(u.into_values())
    }

    fn conjugate(&self) -> Option<Functional<T>> {
        Some(Arc::new(GBallIndicator::new(
            self.rows,
            self.cols,
            self.variant,
            self.weight,
        )))
    }

    fn conjugate_feasible_point(&self, p: &[T], tol: T) -> Option<Result<Vec<T>>> {
        let run = || -> Result<Vec<T>> {
            let g = self.grid(p)?;
            let proj = gball_project(&g, self.weight, tol, self.variant)?;
            Ok(proj.into_values())
        };
        Some(run())
    }

    fn flags(&self) -> Flags {
        Flags {
            differentiable: false,
            strictly_convex: false,
            one_coercive: false,
            finite_valued: true,
        }
    }
}

/// Indicator of {v : ‖v‖_G ≤ radius} on a fixed grid shape; the conjugate
/// of radius·TV. Its prox (any step) is the ball projection.
#[derive(Debug, Clone)]
pub struct GBallIndicator<T> {
    rows: usize,
    cols: usize,
    variant: TvVariant,
    radius: T,
}

impl<T: Real> GBallIndicator<T> {
    pub fn new(rows: usize, cols: usize, variant: TvVariant, radius: T) -> Self {
        assert!(radius > T::zero());
        GBallIndicator {
            rows,
            cols,
            variant,
            radius,
        }
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Membership test with an explicit certificate tolerance: v is accepted
    /// when ‖prox_{rTV}(v)‖₂ ≤ tol·(1 + ‖v‖₂).
    pub fn contains(&self, v: &ImageGrid<T>, tol: T) -> Result<bool> {
        let prox = tv_prox(v, self.radius, tol / cst(2.0), self.variant)?;
        let thresh = tol * (T::one() + num::norm2(v.values()));
        Ok(num::norm2(prox.values()) <= thresh)
    }
}

impl<T: Real> Convex<T> for GBallIndicator<T> {
    fn name(&self) -> &str {
        "g-ball-indicator"
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        let g = ImageGrid::from_vec(self.rows, self.cols, x.to_vec())
            .expect("G-ball eval: wrong dimension");
        match self.contains(&g, cst(1e-7)) {
            Ok(true) => ExtReal::zero(),
            _ => ExtReal::PosInf,
        }
    }

    fn prox(&self, z: &[T], _step: T, tol: T) -> Result<Vec<T>> {
        let g = ImageGrid::from_vec(self.rows, self.cols, z.to_vec())?;
        let proj = gball_project(&g, self.radius, tol, self.variant)?;
        Ok(proj.into_values())
    }

    fn conjugate(&self) -> Option<Functional<T>> {
        Some(Arc::new(TotalVariation::weighted(
            self.rows,
            self.cols,
            self.variant,
            self.radius,
        )))
    }

    fn flags(&self) -> Flags {
        Flags::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(rows: usize, cols: usize, v: &[f64]) -> ImageGrid<f64> {
        ImageGrid::new(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn zero_projects_to_zero_and_has_zero_norm() {
        let z = ImageGrid::zeros(3, 3);
        let p = gball_project(&z, 0.5, 1e-10, TvVariant::Truncated).unwrap();
        assert!(num::norm2(p.values()) < 1e-12);
        let n = g_norm(&z, 1e-8, TvVariant::Truncated).unwrap();
        assert_eq!(n.unwrap_finite(), 0.0);
    }

    #[test]
    fn projection_of_step_residual() {
        let z = grid(1, 4, &[0.0, 0.0, 1.0, 1.0]);
        let v = gball_project(&z, 0.1, 1e-10, TvVariant::Truncated).unwrap();
        let want = [-0.05, -0.05, 0.05, 0.05];
        for (a, b) in v.values().iter().zip(&want) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn g_norm_of_two_pixel_dipole() {
        let v = grid(1, 2, &[-0.5, 0.5]);
        let n = g_norm(&v, 1e-7, TvVariant::Truncated).unwrap();
        assert!((n.unwrap_finite() - 0.5).abs() < 1e-5, "{n:?}");
    }

    #[test]
    fn nonzero_mean_has_infinite_norm() {
        let v = grid(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let n = g_norm(&v, 1e-7, TvVariant::Full).unwrap();
        assert!(!n.is_finite());
    }

    #[test]
    fn truncated_corner_component_has_infinite_norm() {
        // mean-zero but supported partly on the isolated trailing corner
        let v = grid(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert!(!g_norm_finite(&v, TvVariant::Truncated));
        let n = g_norm(&v, 1e-7, TvVariant::Truncated).unwrap();
        assert!(!n.is_finite());
        // same field is fine for the full variant
        assert!(g_norm_finite(&v, TvVariant::Full));
    }

    #[test]
    fn member_is_fixed_point_of_projection() {
        let v = grid(1, 2, &[-0.3, 0.3]);
        // ‖v‖_G = 0.3 ≤ 0.5
        let p = gball_project(&v, 0.5, 1e-10, TvVariant::Truncated).unwrap();
        for (a, b) in p.values().iter().zip(v.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
