//! Sheaves of projective Hilbert spaces carrying a Hermitian operator.

pub mod fiber;
pub mod lattice;
pub mod linalg;
pub mod operator;
pub mod parametric;
pub mod ray;
pub mod sentences;

use std::path::Path;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{lit, Real};
use crate::sheaf::SheafError;

pub use fiber::{coefficient_sample, projective_signature, CoefficientSample, ProjElem, ProjectiveFiber};
pub use lattice::LatticeSheaf;
pub use linalg::{hermitian_eigen, CMatrix, CVector};
pub use operator::{uniform_moduli, OperatorContext, ValueScale};
pub use parametric::ParametricSheaf;
pub use ray::{fubini_study, projection_p, Ray};
pub use sentences::{
    dimension_lemma, orthogonality_condition, orthogonality_forcing, phi_dim2, phi_dim_greater, phi_norm,
    sentence_forcing_at, LemmaReport,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectiveError {
    #[error("zero vector has no ray")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operator maps the ray to zero")]
    ZeroImage,
    #[error("operator norm is zero")]
    ZeroOperator,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("auxiliary operator `{0}` has a non-trivial kernel")]
    NontrivialKernel(String),
    #[error("basis vector {0} is not an eigenvector, so the restrictions disagree")]
    InconsistentRestriction(usize),
    #[error("need {needed} eigenvectors, universe has {size}")]
    InsufficientUniverse { needed: usize, size: usize },
    #[error("matrix file: {0}")]
    Parse(String),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error("{0}")]
    Invalid(String),
}

/// Parses `n` followed by `n²` whitespace-separated `re im` pairs, row-major.
pub fn parse_matrix<T: Real>(text: &str) -> Result<CMatrix<T>, ProjectiveError> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| ProjectiveError::Parse("empty input".into()))?
        .parse()
        .map_err(|e| ProjectiveError::Parse(format!("dimension: {e}")))?;
    let nums = tokens
        .map(|t| t.parse::<f64>().map_err(|e| ProjectiveError::Parse(format!("`{t}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if nums.len() != 2 * n * n {
        return Err(ProjectiveError::Parse(format!(
            "expected {} numbers after n = {n}, found {}",
            2 * n * n,
            nums.len()
        )));
    }
    let data = nums.chunks(2).map(|p| Complex::new(lit(p[0]), lit(p[1]))).collect();
    Ok(CMatrix { n, data })
}

pub fn read_matrix<T: Real>(path: &Path) -> Result<CMatrix<T>, ProjectiveError> {
    let text = std::fs::read_to_string(path).map_err(|e| ProjectiveError::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}
