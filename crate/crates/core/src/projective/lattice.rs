//! The sheaf over the lattice of finite subsets of an eigenbasis.
//!
//! The fiber over `l_I` is the projective space of `V_I = span{x_i : i ∈ I}`
//! with `A` restricted to it. Opens are cones `[l_I)`, so a section defined at
//! `l_I` is defined on every larger subset.

use std::borrow::Cow;

use num_complex::Complex;

use super::fiber::{
    coefficients, combine, flatten, projective_signature, weighted_level, ProjElem, ProjectiveFiber, SampleCache,
};
use super::linalg::{inner, norm_sqr, CMatrix, CVector};
use super::operator::{OperatorContext, ValueScale};
use super::ray::Ray;
use super::ProjectiveError;
use crate::logic::Signature;
use crate::scalar::{lit, Real};
use crate::sheaf::{BasePoint, BaseSpace, IndexSet, MetricSheaf, OpenSet, Section, SectionSample, SheafError};

#[derive(Debug)]
pub struct LatticeSheaf<T> {
    base: BaseSpace<T>,
    sig: Signature,
    op: OperatorContext<T>,
    scale: ValueScale<T>,
    samples: SampleCache<T>,
}

fn members(set: IndexSet, size: usize) -> Vec<usize> {
    (0..size).filter(|i| set & (1u64 << i) != 0).collect()
}

impl<T: Real> LatticeSheaf<T> {
    /// Lattice over the eigenvectors of `op`, labelled in eigenvalue order.
    pub fn new(op: OperatorContext<T>) -> Result<Self, ProjectiveError> {
        let size = op.dim();
        if size > 64 {
            return Err(ProjectiveError::Invalid(format!("index universe of {size} exceeds 64")));
        }
        let names: Vec<String> = op.aux.iter().map(|(n, _)| n.clone()).collect();
        let scale = ValueScale::covering(op.eigenvalues.iter().copied().chain([op.norm()]));
        Ok(LatticeSheaf {
            base: BaseSpace::FiniteSubsetLattice { size },
            sig: projective_signature(&names),
            op,
            scale,
            samples: SampleCache::default(),
        })
    }

    /// `diag(λ)` on the standard basis.
    pub fn diagonal(lambda: &[T]) -> Result<Self, ProjectiveError> {
        Self::new(OperatorContext::diagonal(lambda)?)
    }

    /// Lattice over a caller-chosen labelling of an eigenbasis of `matrix`.
    ///
    /// Each `V_I` must be invariant under the operator for the restrictions to
    /// agree, which holds exactly when every basis vector is an eigenvector.
    pub fn with_eigenbasis(matrix: CMatrix<T>, basis: Vec<CVector<T>>) -> Result<Self, ProjectiveError> {
        let n = matrix.n;
        if basis.len() != n || basis.iter().any(|b| b.len() != n) {
            return Err(ProjectiveError::Invalid("basis must have one vector per dimension".into()));
        }
        let mut ctx = OperatorContext::new(matrix)?;
        let tol: T = lit(1e-9);
        let scale = ctx.matrix.max_abs().max(T::one());
        let mut basis: Vec<CVector<T>> = basis
            .into_iter()
            .map(|b| {
                let nrm = norm_sqr(&b).sqrt();
                b.into_iter().map(|z| z / nrm).collect()
            })
            .collect();
        for i in 0..n {
            for j in i + 1..n {
                if inner(&basis[i], &basis[j]).norm() > tol {
                    return Err(ProjectiveError::Invalid(format!("basis vectors {i} and {j} are not orthogonal")));
                }
            }
        }
        let mut lambda = Vec::with_capacity(n);
        for (i, b) in basis.iter_mut().enumerate() {
            let ab = ctx.matrix.mul_vec(b);
            let l = inner(b, &ab).re;
            let resid: T = ab.iter().zip(b.iter()).map(|(y, x)| (*y - *x * l).norm_sqr()).sum::<T>().sqrt();
            if resid > tol * scale {
                return Err(ProjectiveError::InconsistentRestriction(i));
            }
            lambda.push(l);
        }
        ctx.eigenvalues = lambda;
        ctx.eigenvectors = basis;
        Self::new(ctx)
    }

    pub fn size(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &OperatorContext<T> {
        &self.op
    }

    pub fn scale(&self) -> ValueScale<T> {
        self.scale
    }

    /// `σ_c`, the constant ray `[Σ c_i x_i]` on the cone of its support.
    pub fn sigma(&self, c: &[Complex<T>]) -> Result<Section<T>, ProjectiveError> {
        let support = self.support(c)?;
        Ok(Section::family("sigma", flatten(c), OpenSet::cone(support, self.size())))
    }

    pub fn sigma_eigen(&self, i: usize) -> Section<T> {
        self.sigma(&super::linalg::unit(self.size(), i)).expect("index inside the universe")
    }

    /// `μ_c`, the constant level `Σ|c_i|²λ_i / Σ|c_i|²` on the cone of its
    /// support.
    pub fn mu(&self, c: &[Complex<T>]) -> Result<Section<T>, ProjectiveError> {
        let support = self.support(c)?;
        Ok(Section::family("mu", flatten(c), OpenSet::cone(support, self.size())))
    }

    pub fn mu_eigen(&self, i: usize) -> Section<T> {
        self.mu(&super::linalg::unit(self.size(), i)).expect("index inside the universe")
    }

    fn support(&self, c: &[Complex<T>]) -> Result<IndexSet, ProjectiveError> {
        if c.len() != self.size() {
            return Err(ProjectiveError::DimensionMismatch(self.size(), c.len()));
        }
        let set = c.iter().enumerate().filter(|(_, z)| z.norm_sqr() > T::zero()).fold(0u64, |s, (i, _)| s | (1 << i));
        if set == 0 {
            return Err(ProjectiveError::ZeroVector);
        }
        Ok(set)
    }

    fn subset(&self, x: &BasePoint<T>) -> Result<IndexSet, SheafError> {
        match x {
            BasePoint::Subset(s) if *s != 0 && self.base.contains(x) => Ok(*s),
            other => Err(SheafError::Invalid(format!("{other} is not a non-empty subset of the universe"))),
        }
    }

    /// The ray `[Σ c_i x_i]` of a coefficient vector.
    pub fn ray(&self, c: &[Complex<T>]) -> Result<Ray<T>, ProjectiveError> {
        Ray::new(combine(c, &self.op.eigenvectors))
    }
}

impl<T: Real> MetricSheaf<T> for LatticeSheaf<T> {
    type Elem = ProjElem<T>;
    type Fiber<'a>
        = ProjectiveFiber<'a, T>
    where
        T: 'a;

    fn base(&self) -> &BaseSpace<T> {
        &self.base
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn fiber(&self, x: &BasePoint<T>) -> Result<ProjectiveFiber<'_, T>, SheafError> {
        let idx = members(self.subset(x)?, self.size());
        Ok(ProjectiveFiber {
            sig: &self.sig,
            matrix: Cow::Borrowed(&self.op.matrix),
            aux: &self.op.aux,
            basis: idx.iter().map(|i| self.op.eigenvectors[*i].clone()).collect(),
            eigenvalues: idx.iter().map(|i| self.op.eigenvalues[*i]).collect(),
            scale: self.scale,
            sample: self.samples.get(idx.len()),
        })
    }

    fn family_value(&self, family: &str, params: &[T], x: &BasePoint<T>) -> Result<ProjElem<T>, SheafError> {
        let set = self.subset(x)?;
        let c = coefficients(params)
            .filter(|c| c.len() == self.size())
            .ok_or_else(|| SheafError::Invalid(format!("`{family}` needs {} non-zero coefficients", self.size())))?;
        let support = self.support(&c).map_err(|e| SheafError::Invalid(e.to_string()))?;
        if support & !set != 0 {
            return Err(SheafError::OutsideDomain { section: family.to_string(), point: x.to_string() });
        }
        match family {
            "sigma" => Ok(ProjElem::Ray(self.ray(&c).map_err(|e| SheafError::Invalid(e.to_string()))?)),
            "mu" => Ok(ProjElem::Level(weighted_level(&c, &self.op.eigenvalues))),
            _ => Err(SheafError::UnknownFamily(family.to_string())),
        }
    }

    fn sections_at(&self, u: &OpenSet<T>) -> SectionSample<T> {
        fn root<T>(u: &OpenSet<T>) -> Option<IndexSet> {
            match u {
                OpenSet::Cone { root, .. } => Some(*root),
                OpenSet::Union(parts) => parts.iter().map(root).try_fold(u64::MAX, |acc, r| r.map(|r| acc & r)),
                _ => None,
            }
        }
        let Some(set) = root(u).filter(|s| *s != 0) else {
            return SectionSample { sections: Vec::new(), covering_radius: None };
        };
        let idx = members(set, self.size());
        let sample = self.samples.get(idx.len());
        let zero = Complex::new(T::zero(), T::zero());
        let sections = sample
            .coefficients
            .iter()
            .map(|local| {
                let mut c = vec![zero; self.size()];
                for (k, i) in idx.iter().enumerate() {
                    c[*i] = local[k];
                }
                self.sigma(&c).expect("sampled coefficients are non-zero")
            })
            .collect();
        SectionSample { sections, covering_radius: sample.covering_radius }
    }
}
