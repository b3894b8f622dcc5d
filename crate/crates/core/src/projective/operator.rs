//! Hermitian operators acting on rays.

use num_complex::Complex;

use super::linalg::{hermitian_eigen, inner, norm_sqr, CMatrix, CVector};
use super::ray::Ray;
use super::ProjectiveError;
use crate::scalar::{lit, unit_clamp, Real};

/// A Hermitian matrix with its sorted eigenpairs and auxiliary operators.
#[derive(Debug, Clone)]
pub struct OperatorContext<T> {
    pub matrix: CMatrix<T>,
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<CVector<T>>,
    /// Named operators with trivial kernel.
    pub aux: Vec<(String, CMatrix<T>)>,
}

impl<T: Real> OperatorContext<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self, ProjectiveError> {
        if matrix.n == 0 {
            return Err(ProjectiveError::Invalid("empty matrix".into()));
        }
        if !matrix.is_hermitian(lit(1e-12)) {
            return Err(ProjectiveError::NotHermitian);
        }
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
        Ok(OperatorContext { matrix, eigenvalues, eigenvectors, aux: Vec::new() })
    }

    pub fn diagonal(values: &[T]) -> Result<Self, ProjectiveError> {
        Self::new(CMatrix::from_diag(values))
    }

    /// Adds an auxiliary operator after checking its kernel is trivial.
    pub fn with_aux(mut self, name: &str, k: CMatrix<T>) -> Result<Self, ProjectiveError> {
        if k.n != self.dim() {
            return Err(ProjectiveError::DimensionMismatch(self.dim(), k.n));
        }
        let gram = k.adjoint().mul(&k);
        let (vals, _) = hermitian_eigen(&gram);
        let scale = vals.last().copied().unwrap_or(T::zero()).max(T::min_positive_value());
        if vals[0] <= scale * lit(1e-12) {
            return Err(ProjectiveError::NontrivialKernel(name.to_string()));
        }
        self.aux.push((name.to_string(), k));
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn norm(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, l| m.max(l.abs()))
    }

    /// Numerical range `[λ_min, λ_max]`.
    pub fn numerical_range(&self) -> (T, T) {
        (self.eigenvalues[0], *self.eigenvalues.last().expect("non-empty spectrum"))
    }

    /// `⟨Ax, x⟩ / ⟨x, x⟩`.
    pub fn expected_value(&self, r: &Ray<T>) -> Result<T, ProjectiveError> {
        self.check(r)?;
        Ok(expected_unchecked(&self.matrix, r.vector()))
    }

    /// The ray of `Ax`.
    pub fn apply_operator(&self, r: &Ray<T>) -> Result<Ray<T>, ProjectiveError> {
        self.check(r)?;
        apply_matrix(&self.matrix, r.vector())
    }

    pub fn apply_aux(&self, name: &str, r: &Ray<T>) -> Result<Ray<T>, ProjectiveError> {
        self.check(r)?;
        let (_, k) = self
            .aux
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| ProjectiveError::Invalid(format!("no auxiliary operator `{name}`")))?;
        apply_matrix(k, r.vector())
    }

    /// `(δ, Δ_E)` with `δ = √(1 + ε/‖A‖) − 1` and `Δ_E = acos(1 − δ²/2)`.
    /// `Δ_E` saturates at π once `ε ≥ 8‖A‖`.
    pub fn uniform_moduli(&self, eps: T) -> Result<(T, T), ProjectiveError> {
        uniform_moduli(self.norm(), eps)
    }

    fn check(&self, r: &Ray<T>) -> Result<(), ProjectiveError> {
        if r.dim() != self.dim() {
            return Err(ProjectiveError::DimensionMismatch(self.dim(), r.dim()));
        }
        Ok(())
    }
}

pub fn uniform_moduli<T: Real>(norm: T, eps: T) -> Result<(T, T), ProjectiveError> {
    if !(norm > T::zero()) {
        return Err(ProjectiveError::ZeroOperator);
    }
    if !(eps > T::zero()) {
        return Err(ProjectiveError::Invalid(format!("ε must be positive, got {eps}")));
    }
    let delta = (T::one() + eps / norm).sqrt() - T::one();
    let arg = (T::one() - delta * delta / lit(2.0)).max(-T::one());
    Ok((delta, arg.acos()))
}

pub(crate) fn expected_unchecked<T: Real>(a: &CMatrix<T>, x: &[Complex<T>]) -> T {
    inner(x, &a.mul_vec(x)).re / norm_sqr(x)
}

pub(crate) fn apply_matrix<T: Real>(a: &CMatrix<T>, x: &[Complex<T>]) -> Result<Ray<T>, ProjectiveError> {
    let y = a.mul_vec(x);
    let scale = a.max_abs() * norm_sqr(x).sqrt();
    if norm_sqr(&y).sqrt() <= scale * lit(1e-12) {
        return Err(ProjectiveError::ZeroImage);
    }
    Ray::new(y)
}

/// Affine map of a sheaf-wide value interval onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueScale<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> ValueScale<T> {
    /// Smallest scale containing zero and every listed value.
    pub fn covering(values: impl IntoIterator<Item = T>) -> Self {
        let (mut lo, mut hi) = (T::zero(), T::zero());
        for v in values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if hi <= lo {
            hi = lo + T::one();
        }
        ValueScale { lo, hi }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn rescale(&self, v: T) -> T {
        unit_clamp((v - self.lo) / self.width())
    }

    pub fn distance(&self, a: T, b: T) -> T {
        unit_clamp((a - b).abs() / self.width())
    }
}
