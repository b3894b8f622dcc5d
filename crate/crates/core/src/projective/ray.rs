//! Rays of a finite-dimensional Hilbert space with the Fubini-Study metric.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex;

use super::linalg::{canonical_phase, inner, norm_sqr, CVector};
use super::ProjectiveError;
use crate::scalar::{lit, unit_clamp, Real};

/// A point of projective space, stored as a unit representative with
/// canonical phase.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray<T> {
    v: CVector<T>,
}

impl<T: Real> Ray<T> {
    pub fn new(mut v: CVector<T>) -> Result<Self, ProjectiveError> {
        let n = norm_sqr(&v).sqrt();
        if !(n > T::zero()) || !n.is_finite() {
            return Err(ProjectiveError::ZeroVector);
        }
        for z in v.iter_mut() {
            *z /= n;
        }
        canonical_phase(&mut v);
        Ok(Ray { v })
    }

    pub fn from_real(v: &[T]) -> Result<Self, ProjectiveError> {
        Self::new(v.iter().map(|x| Complex::new(*x, T::zero())).collect())
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Ray { v: super::linalg::unit(n, i) }
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn vector(&self) -> &[Complex<T>] {
        &self.v
    }

    /// Rays are equal when their representatives differ by a phase.
    pub fn same_as(&self, other: &Self, tol: T) -> bool {
        self.dim() == other.dim() && (T::one() - inner(&self.v, &other.v).norm()).abs() <= tol
    }
}

fn check_dims<T: Real>(a: &Ray<T>, b: &Ray<T>) -> Result<(), ProjectiveError> {
    if a.dim() != b.dim() {
        return Err(ProjectiveError::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// `⟨x,y⟩⟨y,x⟩ / (⟨x,x⟩⟨y,y⟩)`.
pub fn projection_p<T: Real>(a: &Ray<T>, b: &Ray<T>) -> Result<T, ProjectiveError> {
    check_dims(a, b)?;
    Ok(unit_clamp(projection_unchecked(&a.v, &b.v)))
}

pub(crate) fn projection_unchecked<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> T {
    inner(x, y).norm_sqr() / (norm_sqr(x) * norm_sqr(y))
}

/// Fubini-Study distance scaled to diameter 1: `(2/π) acos √P`.
pub fn fubini_study<T: Real>(a: &Ray<T>, b: &Ray<T>) -> Result<T, ProjectiveError> {
    Ok(distance_from_p(projection_p(a, b)?))
}

pub(crate) fn distance_from_p<T: Real>(p: T) -> T {
    unit_clamp(lit::<T>(FRAC_2_PI) * unit_clamp(p).sqrt().acos())
}
