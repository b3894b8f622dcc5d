//! The sheaf of a continuously varying operator over an interval.
//!
//! `A_R = W(R) diag(λ_i + κ_i R) W(R)†` with `W(R) = exp(−iRH)`, so the
//! eigenvectors `x_i^R = W(R) e_i` move continuously and keep their order.

use std::borrow::Cow;

use num_complex::Complex;

use super::fiber::{
    coefficients, combine, flatten, projective_signature, weighted_level, ProjElem, ProjectiveFiber, SampleCache,
};
use super::linalg::{hermitian_eigen, CMatrix, CVector};
use super::operator::{OperatorContext, ValueScale};
use super::ray::Ray;
use super::ProjectiveError;
use crate::logic::Signature;
use crate::scalar::{lit, Real};
use crate::sheaf::{BasePoint, BaseSpace, MetricSheaf, OpenSet, Section, SectionSample, SheafError};

#[derive(Debug)]
pub struct ParametricSheaf<T> {
    base: BaseSpace<T>,
    sig: Signature,
    lambda: Vec<T>,
    drift: Vec<T>,
    /// Eigenpairs of the generator `H`.
    generator: (Vec<T>, Vec<CVector<T>>),
    scale: ValueScale<T>,
    samples: SampleCache<T>,
}

impl<T: Real> ParametricSheaf<T> {
    pub fn new(lambda: Vec<T>, drift: Vec<T>, generator: CMatrix<T>, a: T, b: T) -> Result<Self, ProjectiveError> {
        let n = lambda.len();
        if n == 0 || drift.len() != n || generator.n != n {
            return Err(ProjectiveError::Invalid("spectrum, drift and generator sizes differ".into()));
        }
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(ProjectiveError::Invalid(format!("base interval ({a}, {b}) must be finite and non-empty")));
        }
        if !generator.is_hermitian(lit(1e-12)) {
            return Err(ProjectiveError::NotHermitian);
        }
        // linear eigenvalues ordered at both ends stay ordered in between
        let at = |r: T| -> Vec<T> { lambda.iter().zip(&drift).map(|(l, k)| *l + *k * r).collect() };
        let (la, lb) = (at(a), at(b));
        if la.windows(2).chain(lb.windows(2)).any(|w| w[0] > w[1]) {
            return Err(ProjectiveError::Invalid("eigenvalues cross inside the base interval".into()));
        }
        let scale = ValueScale::covering(la.iter().chain(&lb).flat_map(|l| [*l, l.abs()]));
        Ok(ParametricSheaf {
            base: BaseSpace::RealInterval { a, b },
            sig: projective_signature(&[]),
            lambda,
            drift,
            generator: hermitian_eigen(&generator),
            scale,
            samples: SampleCache::default(),
        })
    }

    /// Spectrum `1, 2, .., n` drifting by `R/4` under a fixed tridiagonal
    /// generator, over `(0, 1)`.
    pub fn example(n: usize) -> Self {
        let mut h = CMatrix::zeros(n);
        for i in 0..n {
            h[(i, i)] = Complex::new(lit(0.5 * i as f64), T::zero());
            if i + 1 < n {
                let z = Complex::new(lit(0.8), lit(0.3));
                h[(i, i + 1)] = z;
                h[(i + 1, i)] = z.conj();
            }
        }
        let lambda = (1..=n).map(|i| lit(i as f64)).collect();
        let drift = vec![lit(0.25); n];
        Self::new(lambda, drift, h, T::zero(), T::one()).expect("well-formed example")
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn scale(&self) -> ValueScale<T> {
        self.scale
    }

    fn param(&self, x: &BasePoint<T>) -> Result<T, SheafError> {
        match x {
            BasePoint::Real(r) if self.base.contains(x) => Ok(*r),
            other => Err(SheafError::Invalid(format!("{other} is not a point of {:?}", self.base))),
        }
    }

    pub fn eigenvalues_at(&self, r: T) -> Vec<T> {
        self.lambda.iter().zip(&self.drift).map(|(l, k)| *l + *k * r).collect()
    }

    /// Columns are `x_i^R`.
    pub fn eigenvectors_at(&self, r: T) -> Vec<CVector<T>> {
        let (vals, vecs) = &self.generator;
        let n = self.dim();
        let mut out = vec![vec![Complex::new(T::zero(), T::zero()); n]; n];
        // x_j = Σ_k e^{-iRh_k} v_k conj(v_k[j])
        for (h, v) in vals.iter().zip(vecs) {
            let ph = Complex::new(T::zero(), -r * *h).exp();
            for (j, col) in out.iter_mut().enumerate() {
                let w = ph * v[j].conj();
                for (x, y) in col.iter_mut().zip(v) {
                    *x += w * *y;
                }
            }
        }
        out
    }

    pub fn matrix_at(&self, r: T) -> CMatrix<T> {
        let w = CMatrix::from_columns(&self.eigenvectors_at(r));
        w.mul(&CMatrix::from_diag(&self.eigenvalues_at(r))).mul(&w.adjoint())
    }

    /// `A_R` decomposed from scratch.
    pub fn context_at(&self, r: T) -> Result<OperatorContext<T>, ProjectiveError> {
        OperatorContext::new(self.matrix_at(r))
    }

    pub fn sigma(&self, c: &[Complex<T>]) -> Section<T> {
        self.sigma_on(c, self.base.whole())
    }

    pub fn sigma_on(&self, c: &[Complex<T>], domain: OpenSet<T>) -> Section<T> {
        Section::family("sigma", flatten(c), domain)
    }

    pub fn sigma_eigen(&self, i: usize) -> Section<T> {
        self.sigma(&super::linalg::unit(self.dim(), i))
    }

    pub fn mu(&self, c: &[Complex<T>]) -> Section<T> {
        Section::family("mu", flatten(c), self.base.whole())
    }

    pub fn mu_eigen(&self, i: usize) -> Section<T> {
        self.mu(&super::linalg::unit(self.dim(), i))
    }
}

impl<T: Real> MetricSheaf<T> for ParametricSheaf<T> {
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
        let r = self.param(x)?;
        Ok(ProjectiveFiber {
            sig: &self.sig,
            matrix: Cow::Owned(self.matrix_at(r)),
            aux: &[],
            basis: self.eigenvectors_at(r),
            eigenvalues: self.eigenvalues_at(r),
            scale: self.scale,
            sample: self.samples.get(self.dim()),
        })
    }

    fn family_value(&self, family: &str, params: &[T], x: &BasePoint<T>) -> Result<ProjElem<T>, SheafError> {
        let r = self.param(x)?;
        let c = coefficients(params)
            .filter(|c| c.len() == self.dim())
            .ok_or_else(|| SheafError::Invalid(format!("`{family}` needs {} non-zero coefficients", self.dim())))?;
        match family {
            "sigma" => Ray::new(combine(&c, &self.eigenvectors_at(r)))
                .map(ProjElem::Ray)
                .map_err(|e| SheafError::Invalid(e.to_string())),
            "mu" => Ok(ProjElem::Level(weighted_level(&c, &self.eigenvalues_at(r)))),
            _ => Err(SheafError::UnknownFamily(family.to_string())),
        }
    }

    fn sections_at(&self, _u: &OpenSet<T>) -> SectionSample<T> {
        let sample = self.samples.get(self.dim());
        SectionSample {
            sections: sample.coefficients.iter().map(|c| self.sigma(c)).collect(),
            covering_radius: sample.covering_radius,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_condition_with;
    use crate::sheaf::{bind, force_point, max_principle_witness, Resolution, Status};

    #[test]
    fn decomposition_matches_the_construction() {
        let p = ParametricSheaf::<f64>::example(3);
        for r in [0.0, 0.3, 0.9] {
            let ctx = p.context_at(r).unwrap();
            for (a, b) in ctx.eigenvalues.iter().zip(p.eigenvalues_at(r)) {
                assert!((a - b).abs() < 1e-10);
            }
            for (x, y) in ctx.eigenvectors.iter().zip(p.eigenvectors_at(r)) {
                let rx = Ray::new(x.clone()).unwrap();
                assert!(rx.same_as(&Ray::new(y).unwrap(), 1e-9));
            }
        }
    }

    #[test]
    fn eigen_sections_are_continuous() {
        let p = ParametricSheaf::<f64>::example(3);
        let s = p.sigma_eigen(1);
        let f = p.fiber(&BasePoint::Real(0.5)).unwrap();
        let a = p.section_value(&s, &BasePoint::Real(0.5)).unwrap();
        let b = p.section_value(&s, &BasePoint::Real(0.5 + 1e-7)).unwrap();
        use crate::logic::Structure;
        assert!(f.distance(&a, &b).unwrap() < 1e-5);
    }

    #[test]
    fn rejects_crossing_eigenvalues() {
        let h = CMatrix::<f64>::zeros(2);
        assert!(ParametricSheaf::new(vec![1.0, 1.2], vec![0.0, -1.0], h, 0.0, 1.0).is_err());
    }

    #[test]
    fn norm_sentence_is_forced() {
        let p = ParametricSheaf::<f64>::example(3);
        let res = Resolution::default().with_tol(1e-9);
        for eps in ["0.1", "0.001", "0.00001"] {
            let c = parse_condition_with(&format!("inf s. max(Ea(s) -. nrm, nrm -. Ea(s)) < {eps}"), &p.sig).unwrap();
            let v = force_point(&p, &BasePoint::Real(0.4), &c, &Default::default(), &res).unwrap();
            assert_eq!(v.status, Status::Forced, "eps {eps}");
        }
    }

    #[test]
    fn maximum_principle_finds_the_lowest_eigensection() {
        let p = ParametricSheaf::<f64>::example(2);
        let m = p.mu_eigen(0);
        let b = bind(&[("m", &m)]);
        let c = parse_condition_with("inf s. d(E(s), m) < 0.1", &p.sig).unwrap();
        let w = max_principle_witness(&p, &OpenSet::interval(0.2, 0.6), &c, &b, &Resolution::default()).unwrap();
        assert_eq!(w.section, p.sigma_eigen(0));
        assert!(w.epsilon < 0.01, "{}", w.epsilon);
    }
}
