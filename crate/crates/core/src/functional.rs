//! Proper convex l.s.c. functions: the abstraction every solver consumes.
//!
//! A [`Convex`] object exposes its value, its proximal map, and optionally a
//! gradient and closed-form conjugate, plus capability flags. Iterative
//! proximal maps take an explicit tolerance (ℓ² distance to the true prox)
//! so callers can budget certified accuracy; closed-form maps ignore it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::num;
use crate::scalar::{cst, Real};

/// Structural properties a functional declares about itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub differentiable: bool,
    pub strictly_convex: bool,
    pub one_coercive: bool,
    pub finite_valued: bool,
}

/// Default ℓ² tolerance for iterative proximal maps.
pub fn default_prox_tol<T: Real>() -> T {
    cst(1e-8)
}

/// A proper convex lower semi-continuous function on R^n.
pub trait Convex<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn eval(&self, x: &[T]) -> ExtReal<T>;

    /// argmin_u f(u) + ‖u − z‖²/(2 step), to ℓ² accuracy `tol` when iterative.
    fn prox(&self, z: &[T], step: T, tol: T) -> Result<Vec<T>>;

    fn flags(&self) -> Flags;

    /// Gradient where defined; present iff `flags().differentiable`.
    fn gradient(&self, _x: &[T]) -> Option<Vec<T>> {
        None
    }

    /// Closed-form conjugate f*, when known.
    fn conjugate(&self) -> Option<Functional<T>> {
        None
    }

    /// `Some(a)` when f = (a/2)‖·‖².
    fn quadratic_coeff(&self) -> Option<T> {
        None
    }

    /// Axis-aligned box `[lo, hi]` equal to ∂f(x), when representable.
    fn subdifferential_box(&self, _x: &[T]) -> Option<(Vec<T>, Vec<T>)> {
        None
    }

    /// Maps `p` to a nearby point where f* is finite (dual feasibility
    /// repair). Identity when f* is finite-valued; `None` when unknown.
    fn conjugate_feasible_point(&self, p: &[T], _tol: T) -> Option<Result<Vec<T>>> {
        match self.conjugate() {
            Some(c) if c.flags().finite_valued => Some(Ok(p.to_vec())),
            _ => None,
        }
    }
}

/// Shared handle to a convex functional.
pub type Functional<T> = Arc<dyn Convex<T>>;

fn check_finite<T: Real>(z: &[T], who: &str) -> Result<()> {
    if !num::all_finite(z) {
        return Err(Error::InvalidInput(format!(
            "{who}: non-finite input coordinate"
        )));
    }
    Ok(())
}

fn check_step<T: Real>(step: T, who: &str) -> Result<()> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidInput(format!(
            "{who}: prox step must be positive and finite"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Stock functionals
// ---------------------------------------------------------------------------

/// The zero functional.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl<T: Real> Convex<T> for Zero {
    fn name(&self) -> &str {
        "zero"
    }

    fn eval(&self, _x: &[T]) -> ExtReal<T> {
        ExtReal::zero()
    }

    fn prox(&self, z: &[T], step: T, _tol: T) -> Result<Vec<T>> {
        check_finite(z, "zero prox")?;
        check_step(step, "zero prox")?;
        Ok(z.to_vec())
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        Some(vec![T::zero(); x.len()])
    }

    fn conjugate(&self) -> Option<Functional<T>> {
        Some(Arc::new(PointIndicator::origin()))
    }

    fn flags(&self) -> Flags {
        Flags {
            differentiable: true,
            strictly_convex: false,
            one_coercive: false,
            finite_valued: true,
        }
    }
}

/// f = (a/2)‖·‖², a > 0.
#[derive(Debug, Clone, Copy)]
pub struct Quadratic<T> {
    pub coeff: T,
}

impl<T: Real> Quadratic<T> {
    pub fn new(coeff: T) -> Self {
        assert!(coeff > T::zero(), "quadratic coefficient must be positive");
        Quadratic { coeff }
    }

    pub fn unit() -> Self {
        Quadratic::new(T::one())
    }
}

impl<T: Real> Convex<T> for Quadratic<T> {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        ExtReal::new(self.coeff * num::norm2_sq(x) / cst(2.0))
    }

    fn prox(&self, z: &[T], step: T, _tol: T) -> Result<Vec<T>> {
        check_finite(z, "quadratic prox")?;
        check_step(step, "quadratic prox")?;
        let s = T::one() / (T::one() + step * self.coeff);
        Ok(num::scale(z, s))
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        Some(num::scale(x, self.coeff))
    }

    fn conjugate(&self) -> Option<Functional<T>> {
        Some(Arc::new(Quadratic::new(T::one() / self.coeff)))
    }

    fn quadratic_coeff(&self) -> Option<T> {
        Some(self.coeff)
    }

    fn subdifferential_box(&self, x: &[T]) -> Option<(Vec<T>, Vec<T>)> {
        let g = num::scale(x, self.coeff);
        Some((g.clone(), g))
    }

    fn flags(&self) -> Flags {
        Flags {
            differentiable: true,
            strictly_convex: true,
            one_coercive: true,
            finite_valued: true,
        }
    }
}

/// f(x) = Σ w_i |x_i| with positive weights (w ≡ 1 gives the ℓ¹ norm).
#[derive(Debug, Clone)]
pub struct WeightedL1<T> {
    pub weights: Vec<T>,
}

impl<T: Real> WeightedL1<T> {
    pub fn new(weights: Vec<T>) -> Self {
        assert!(
            weights.iter().all(|w| *w > T::zero()),
            "ℓ¹ weights must be positive"
        );
        WeightedL1 { weights }
    }

    pub fn uniform(dim: usize) -> Self {
        WeightedL1::new(vec![T::one(); dim])
    }
}

impl<T: Real> Convex<T> for WeightedL1<T> {
    fn name(&self) -> &str {
        "weighted-l1"
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        debug_assert_eq!(x.len(), self.weights.len());
        ExtReal::new(num::neumaier(
            x.iter().zip(&self.weights).map(|(v, w)| v.abs() * *w),
        ))
    }

    fn prox(&self, z: &[T], step: T, _tol: T) -> Result<Vec<T>> {
        check_finite(z, "l1 prox")?;
        check_step(step, "l1 prox")?;
        Ok(z.iter()
            .zip(&self.weights)
            .map(|(v, w)| soft_threshold(*v, step * *w))
            .collect())
    }

    fn conjugate(&self) -> Option<Functional<T>> {
        Some(Arc::new(BoxIndicator::symmetric(self.weights.clone())))
    }

    fn subdifferential_box(&self, x: &[T]) -> Option<(Vec<T>, Vec<T>)> {
        let mut lo = Vec::with_capacity(x.len());
        let mut hi = Vec::with_capacity(x.len());
        for (v, w) in x.iter().zip(&self.weights) {
            if *v > T::zero() {
                lo.push(*w);
                hi.push(*w);
            } else if *v < T::zero() {
                lo.push(-*w);
                hi.push(-*w);
            } else {
                lo.push(-*w);
                hi.push(*w);
            }
        }
        Some((lo, hi))
    }

    fn conjugate_feasible_point(&self, p: &[T], _tol: T) -> Option<Result<Vec<T>>> {
        Some(Ok(p
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| num_clamp(*v, -*w, *w))
            .collect()))
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

/// Indicator of the axis-aligned box [lo, hi]; prox is the clamp.
#[derive(Debug, Clone)]
pub struct BoxIndicator<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> BoxIndicator<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(a, b)| a <= b), "empty box");
        BoxIndicator { lo, hi }
    }

    /// [−r_i, r_i] per coordinate.
    pub fn symmetric(radii: Vec<T>) -> Self {
        let lo = radii.iter().map(|r| -*r).collect();
        BoxIndicator { lo, hi: radii }
    }

    /// The ℓ∞ ball of radius r in R^dim.
    pub fn linf_ball(r: T, dim: usize) -> Self {
        BoxIndicator::symmetric(vec![r; dim])
    }

    pub fn project(&self, z: &[T]) -> Vec<T> {
        z.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(v, (lo, hi))| num_clamp(*v, *lo, *hi))
            .collect()
    }

    fn membership_tol(&self) -> T {
        cst(1e-12)
    }
}

impl<T: Real> Convex<T> for BoxIndicator<T> {
    fn name(&self) -> &str {
        "box-indicator"
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        let tol = self.membership_tol();
        let inside = x
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (lo, hi))| *v >= *lo - tol && *v <= *hi + tol);
        if inside {
            ExtReal::zero()
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, z: &[T], step: T, _tol: T) -> Result<Vec<T>> {
        check_finite(z, "box projection")?;
        check_step(step, "box projection")?;
        Ok(self.project(z))
    }

    fn flags(&self) -> Flags {
        Flags::default()
    }
}

/// Indicator of a single point.
#[derive(Debug, Clone)]
pub struct PointIndicator<T> {
    pub point: Vec<T>,
    anchor_dim: Option<usize>,
}

impl<T: Real> PointIndicator<T> {
    pub fn new(point: Vec<T>) -> Self {
        PointIndicator {
            point,
            anchor_dim: None,
        }
    }

    /// Indicator of the origin in any dimension.
    pub fn origin() -> Self {
        PointIndicator {
            point: Vec::new(),
            anchor_dim: Some(0),
        }
    }

    fn point_at(&self, dim: usize) -> Vec<T> {
        if self.anchor_dim.is_some() {
            vec![T::zero(); dim]
        } else {
            self.point.clone()
        }
    }
}

impl<T: Real> Convex<T> for PointIndicator<T> {
    fn name(&self) -> &str {
        "point-indicator"
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        let p = self.point_at(x.len());
        let scale = T::one() + num::norm2(&p);
        if num::dist2(x, &p) <= cst::<T>(1e-9) * scale {
            ExtReal::zero()
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, z: &[T], step: T, _tol: T) -> Result<Vec<T>> {
        check_finite(z, "point projection")?;
        check_step(step, "point projection")?;
        Ok(self.point_at(z.len()))
    }

    fn flags(&self) -> Flags {
        Flags::default()
    }
}

/// Functional assembled from closures; used by tests, oracles and
/// compositions. Fields not supplied fall back to errors / `None`.
pub struct CustomFunctional<T: Real> {
    name: String,
    eval: Arc<dyn Fn(&[T]) -> ExtReal<T> + Send + Sync>,
    prox: Option<Arc<dyn Fn(&[T], T, T) -> Result<Vec<T>> + Send + Sync>>,
    grad: Option<Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>>,
    conjugate: Option<Functional<T>>,
    flags: Flags,
}

impl<T: Real> CustomFunctional<T> {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&[T]) -> ExtReal<T> + Send + Sync + 'static,
        flags: Flags,
    ) -> Self {
        CustomFunctional {
            name: name.into(),
            eval: Arc::new(eval),
            prox: None,
            grad: None,
            conjugate: None,
            flags,
        }
    }

    pub fn with_prox(
        mut self,
        prox: impl Fn(&[T], T, T) -> Result<Vec<T>> + Send + Sync + 'static,
    ) -> Self {
        self.prox = Some(Arc::new(prox));
        self
    }

    pub fn with_gradient(mut self, grad: impl Fn(&[T]) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.grad = Some(Arc::new(grad));
        self
    }

    pub fn with_conjugate(mut self, conjugate: Functional<T>) -> Self {
        self.conjugate = Some(conjugate);
        self
    }
}

impl<T: Real> Convex<T> for CustomFunctional<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn eval(&self, x: &[T]) -> ExtReal<T> {
        (self.eval)(x)
    }

    fn prox(&self, z: &[T], step: T, tol: T) -> Result<Vec<T>> {
        check_finite(z, "custom prox")?;
        check_step(step, "custom prox")?;
        match &self.prox {
            Some(p) => p(z, step, tol),
            None => Err(Error::Unsupported(format!(
                "functional '{}' has no proximal map",
                self.name
            ))),
        }
    }

    fn gradient(&self, x: &[T]) -> Option<Vec<T>> {
        self.grad.as_ref().map(|g| g(x))
    }

    fn conjugate(&self) -> Option<Functional<T>> {
        self.conjugate.clone()
    }

    fn flags(&self) -> Flags {
        self.flags
    }
}

// ---------------------------------------------------------------------------
// Componentwise closed forms
// ---------------------------------------------------------------------------

#[inline]
pub fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

#[inline]
fn num_clamp<T: Real>(v: T, lo: T, hi: T) -> T {
    v.max(lo).min(hi)
}

/// prox of τ‖·‖₁: componentwise soft-threshold.
pub fn l1_prox<T: Real>(z: &[T], step: T) -> Result<Vec<T>> {
    check_finite(z, "l1_prox")?;
    check_step(step, "l1_prox")?;
    Ok(z.iter().map(|v| soft_threshold(*v, step)).collect())
}

/// prox of τ(½‖·‖²): scaling by 1/(1+τ).
pub fn quad_prox<T: Real>(z: &[T], step: T) -> Result<Vec<T>> {
    check_finite(z, "quad_prox")?;
    check_step(step, "quad_prox")?;
    let s = T::one() / (T::one() + step);
    Ok(num::scale(z, s))
}

/// Projection onto the ℓ∞ ball of radius r: componentwise clamp.
pub fn linf_ball_project<T: Real>(z: &[T], r: T) -> Result<Vec<T>> {
    check_finite(z, "linf_ball_project")?;
    if !(r >= T::zero()) {
        return Err(Error::InvalidInput(
            "linf_ball_project: radius must be nonnegative".into(),
        ));
    }
    Ok(z.iter().map(|v| num_clamp(*v, -r, r)).collect())
}

/// Moreau decomposition: z = prox_{τf}(z) + τ·prox_{τ⁻¹f*}(z/τ).
///
/// Returns `(prox_{τf}(z), prox_{τ⁻¹f*}(z/τ))`; the second component is
/// computed as `(z − first)/τ`, so the identity holds exactly.
pub fn moreau_decompose<T: Real>(
    f: &dyn Convex<T>,
    z: &[T],
    step: T,
    tol: T,
) -> Result<(Vec<T>, Vec<T>)> {
    check_finite(z, "moreau_decompose")?;
    check_step(step, "moreau_decompose")?;
    let pf = f.prox(z, step, tol)?;
    let pfstar = pf
        .iter()
        .zip(z)
        .map(|(u, zv)| (*zv - *u) / step)
        .collect();
    Ok((pf, pfstar))
}

/// prox of τf* from the prox of f, through the Moreau identity:
/// prox_{τf*}(z) = z − τ·prox_{τ⁻¹f}(z/τ).
pub fn conjugate_prox<T: Real>(f: &dyn Convex<T>, z: &[T], step: T, tol: T) -> Result<Vec<T>> {
    check_finite(z, "conjugate_prox")?;
    check_step(step, "conjugate_prox")?;
    let scaled: Vec<T> = z.iter().map(|v| *v / step).collect();
    let inner = f.prox(&scaled, T::one() / step, tol / step)?;
    Ok(z.iter().zip(&inner).map(|(zv, u)| *zv - step * *u).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_prox_scales() {
        let q = Quadratic::new(1.0);
        let p = q.prox(&[2.0, 2.0], 1.0, 1e-12).unwrap();
        assert_eq!(p, vec![1.0, 1.0]);
    }

    #[test]
    fn soft_threshold_cases() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
    }

    #[test]
    fn componentwise_closed_forms() {
        assert_eq!(l1_prox(&[3.0, -0.5], 1.0).unwrap(), vec![2.0, 0.0]);
        assert_eq!(quad_prox(&[2.0, 2.0], 1.0).unwrap(), vec![1.0, 1.0]);
        assert_eq!(
            linf_ball_project(&[2.0, -0.3], 1.0).unwrap(),
            vec![1.0, -0.3]
        );
    }

    #[test]
    fn moreau_identity_exact() {
        let f = WeightedL1::uniform(2);
        let z = [3.0, -0.5];
        let tau = 1.0;
        let (pf, pfstar) = moreau_decompose(&f, &z, tau, 1e-12).unwrap();
        assert_eq!(pf, vec![2.0, 0.0]);
        assert_eq!(pfstar, vec![1.0, -0.5]);
        for i in 0..2 {
            assert_eq!(pf[i] + tau * pfstar[i], z[i]);
        }
    }

    #[test]
    fn moreau_quadratic_example() {
        let f = Quadratic::new(1.0);
        let (pf, pfstar) = moreau_decompose(&f, &[2.0, 0.0], 1.0, 1e-12).unwrap();
        assert_eq!(pf, vec![1.0, 0.0]);
        assert_eq!(pfstar, vec![1.0, 0.0]);
    }

    #[test]
    fn moreau_zero_functional() {
        let f = Zero;
        let (pf, pfstar) = moreau_decompose(&f, &[1.5, -2.0], 0.7, 1e-12).unwrap();
        assert_eq!(pf, vec![1.5, -2.0]);
        assert_eq!(pfstar, vec![0.0, 0.0]);
    }

    #[test]
    fn moreau_rejects_non_finite() {
        let f = Zero;
        assert!(moreau_decompose(&f, &[f64::NAN], 1.0, 1e-12).is_err());
    }

    #[test]
    fn conjugate_prox_matches_clamp_for_l1() {
        // (‖·‖₁)* is the ℓ∞-ball indicator, whose prox is the clamp.
        let f = WeightedL1::uniform(3);
        let z = [2.0, -0.25, -7.0];
        for tau in [0.3, 1.0, 2.5] {
            let got = conjugate_prox(&f, &z, tau, 1e-12).unwrap();
            let want = linf_ball_project(&z, 1.0).unwrap();
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-14, "tau={tau}: {got:?} vs {want:?}");
            }
        }
    }
}
