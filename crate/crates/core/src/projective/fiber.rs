//! Two-sorted projective fibers: rays with the Fubini-Study metric and
//! numerical-range levels.

use std::borrow::Cow;
use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{inner, norm_sqr, CMatrix, CVector};
use super::operator::{apply_matrix, expected_unchecked, ValueScale};
use super::ray::{distance_from_p, projection_unchecked, Ray};
use crate::logic::{ElementSample, EvalError, Signature, Structure};
use crate::scalar::{lit, Real};

/// Element of a projective fiber.
#[derive(Debug, Clone, PartialEq)]
pub enum ProjElem<T> {
    Ray(Ray<T>),
    /// A point of the numerical range, in raw (unscaled) units.
    Level(T),
}

impl<T: Real> fmt::Display for ProjElem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjElem::Ray(r) => {
                let parts: Vec<String> = r.vector().iter().map(|z| format!("{:.4}{:+.4}i", z.re, z.im)).collect();
                write!(f, "[{}]", parts.join(", "))
            }
            ProjElem::Level(v) => write!(f, "{v}"),
        }
    }
}

/// Signature shared by the projective sheaves.
///
/// `P(s,t)` and `Ea(s)` are Lipschitz with constant π/2 in the rescaled metric,
/// `val(m)` is the rescaled level and `nrm` the rescaled operator norm.
pub fn projective_signature(aux: &[String]) -> Signature {
    let mut sig = Signature::new()
        .with_relation("P", 2, Some(FRAC_PI_2))
        .with_relation("Ea", 1, Some(FRAC_PI_2))
        .with_relation("nrm", 0, Some(0.0))
        .with_relation("val", 1, Some(1.0))
        .with_function("A", 1, None)
        .with_function("E", 1, Some(FRAC_PI_2));
    for name in aux {
        sig = sig.with_function(name, 1, None);
    }
    sig
}

/// Bloch-sphere rings used for two-dimensional fibers; the covering radius in
/// the rescaled metric is `1 / BLOCH_RINGS`.
pub const BLOCH_RINGS: usize = 40;
const RANDOM_RAYS: usize = 128;

/// Coefficient vectors (in a fiber's eigenbasis) that quantifiers range over.
#[derive(Debug)]
pub struct CoefficientSample<T> {
    pub coefficients: Vec<CVector<T>>,
    pub covering_radius: Option<T>,
}

/// Eigenvectors first, then their real and imaginary pair superpositions,
/// then a Bloch grid (dimension 2) or seeded random directions.
pub fn coefficient_sample<T: Real>(dim: usize) -> CoefficientSample<T> {
    let c = |re: f64, im: f64| Complex::new(lit::<T>(re), lit::<T>(im));
    let zero = c(0.0, 0.0);
    let mut out: Vec<CVector<T>> = (0..dim).map(|i| super::linalg::unit(dim, i)).collect();
    for i in 0..dim {
        for j in i + 1..dim {
            for w in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
                let mut v = vec![zero; dim];
                v[i] = c(FRAC_1_SQRT_2, 0.0);
                v[j] = w * lit::<T>(FRAC_1_SQRT_2);
                out.push(v);
            }
        }
    }
    let covering_radius = match dim {
        0 | 1 => Some(T::zero()),
        2 => {
            out.extend(bloch_grid(BLOCH_RINGS));
            Some(lit(1.0 / BLOCH_RINGS as f64))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + dim as u64);
            for _ in 0..RANDOM_RAYS {
                let v: CVector<T> = (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                let n = norm_sqr(&v).sqrt();
                if n > lit(1e-3) {
                    out.push(v.into_iter().map(|z| z / n).collect());
                }
            }
            None
        }
    };
    CoefficientSample { coefficients: out, covering_radius }
}

/// Rays `(cos θ/2, e^{iφ} sin θ/2)` on `rings + 1` latitudes.
///
/// A point at Bloch latitude θ is within half a ring spacing of some ring, and
/// each ring has enough azimuths that the move along the parallel costs at most
/// another half spacing, so every ray is within Bloch angle `π / rings`, that
/// is rescaled FS distance `1 / rings`, of a grid ray.
fn bloch_grid<T: Real>(rings: usize) -> Vec<CVector<T>> {
    let m = rings as f64;
    let h = PI / (2.0 * m);
    let mut out = Vec::new();
    for i in 0..=rings {
        let theta = i as f64 * PI / m;
        let count = if i == 0 || i == rings {
            1
        } else {
            let (a, b) = ((theta - h).max(0.0), (theta + h).min(PI));
            let s = if a <= FRAC_PI_2 && FRAC_PI_2 <= b { 1.0 } else { a.sin().max(b.sin()) };
            (2.0 * m * s).ceil() as usize
        };
        for j in 0..count {
            let phi = 2.0 * PI * j as f64 / count as f64;
            let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            out.push(vec![Complex::new(lit(c), T::zero()), Complex::new(lit(s * phi.cos()), lit(s * phi.sin()))]);
        }
    }
    out
}

/// Per-dimension cache of coefficient samples.
#[derive(Debug, Default)]
pub(crate) struct SampleCache<T> {
    inner: Mutex<HashMap<usize, Arc<CoefficientSample<T>>>>,
}

impl<T: Real> SampleCache<T> {
    pub(crate) fn get(&self, dim: usize) -> Arc<CoefficientSample<T>> {
        let mut map = self.inner.lock().expect("sample cache poisoned");
        map.entry(dim).or_insert_with(|| Arc::new(coefficient_sample(dim))).clone()
    }
}

/// `Σ c_i b_i`.
pub(crate) fn combine<T: Real>(coeffs: &[Complex<T>], basis: &[CVector<T>]) -> CVector<T> {
    let n = basis.first().map_or(0, |b| b.len());
    let mut v = vec![Complex::new(T::zero(), T::zero()); n];
    for (c, b) in coeffs.iter().zip(basis) {
        if c.norm_sqr() == T::zero() {
            continue;
        }
        for (x, y) in v.iter_mut().zip(b) {
            *x += *c * *y;
        }
    }
    v
}

/// Reads interleaved `re, im` parameters as complex coefficients.
pub(crate) fn coefficients<T: Real>(params: &[T]) -> Option<CVector<T>> {
    if params.is_empty() || !params.len().is_multiple_of(2) {
        return None;
    }
    let c: CVector<T> = params.chunks(2).map(|p| Complex::new(p[0], p[1])).collect();
    (norm_sqr(&c) > T::zero()).then_some(c)
}

pub(crate) fn flatten<T: Real>(c: &[Complex<T>]) -> Vec<T> {
    c.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// `Σ|c_i|² λ_i / Σ|c_i|²`.
pub(crate) fn weighted_level<T: Real>(c: &[Complex<T>], lambda: &[T]) -> T {
    let w = norm_sqr(c);
    c.iter().zip(lambda).map(|(z, l)| z.norm_sqr() * *l).sum::<T>() / w
}

/// The fiber over one base point.
pub struct ProjectiveFiber<'a, T: Real> {
    pub(crate) sig: &'a Signature,
    pub(crate) matrix: Cow<'a, CMatrix<T>>,
    pub(crate) aux: &'a [(String, CMatrix<T>)],
    /// Orthonormal eigenbasis of the fiber's subspace.
    pub basis: Vec<CVector<T>>,
    pub eigenvalues: Vec<T>,
    pub(crate) scale: ValueScale<T>,
    pub(crate) sample: Arc<CoefficientSample<T>>,
}

impl<'a, T: Real> ProjectiveFiber<'a, T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn norm(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, l| m.max(l.abs()))
    }

    /// Expected value of the fiber operator, in raw units.
    pub fn expected_value(&self, r: &Ray<T>) -> T {
        expected_unchecked(&self.matrix, r.vector())
    }

    pub fn ray(&self, coeffs: &[Complex<T>]) -> Result<Ray<T>, EvalError> {
        Ray::new(combine(coeffs, &self.basis)).map_err(|e| EvalError::Domain(e.to_string()))
    }

    fn in_fiber(&self, r: &Ray<T>) -> bool {
        let captured: T = self.basis.iter().map(|b| inner(b, r.vector()).norm_sqr()).sum();
        captured >= T::one() - lit(1e-9)
    }

    fn image(&self, m: &CMatrix<T>, r: &Ray<T>) -> Result<Ray<T>, EvalError> {
        let img = apply_matrix(m, r.vector()).map_err(|e| EvalError::Domain(e.to_string()))?;
        if !self.in_fiber(&img) {
            return Err(EvalError::Domain("image leaves the fiber".into()));
        }
        Ok(img)
    }
}

fn ray_arg<T: Real>(name: &str, e: &ProjElem<T>) -> Result<Ray<T>, EvalError> {
    match e {
        ProjElem::Ray(r) => Ok(r.clone()),
        ProjElem::Level(_) => Err(EvalError::Sort(format!("`{name}` takes a ray, got a level"))),
    }
}

fn arity(name: &str, expected: usize, got: usize) -> Result<(), EvalError> {
    if expected != got {
        return Err(EvalError::Arity { name: name.to_string(), expected, got });
    }
    Ok(())
}

impl<'a, T: Real> Structure<T> for ProjectiveFiber<'a, T> {
    type Elem = ProjElem<T>;

    fn signature(&self) -> &Signature {
        self.sig
    }

    fn distance(&self, a: &ProjElem<T>, b: &ProjElem<T>) -> Result<T, EvalError> {
        match (a, b) {
            (ProjElem::Ray(x), ProjElem::Ray(y)) => {
                if x.dim() != y.dim() {
                    return Err(EvalError::Domain(format!("rays of dimension {} and {}", x.dim(), y.dim())));
                }
                Ok(distance_from_p(projection_unchecked(x.vector(), y.vector())))
            }
            (ProjElem::Level(x), ProjElem::Level(y)) => Ok(self.scale.distance(*x, *y)),
            _ => Err(EvalError::Sort("distance between a ray and a level".into())),
        }
    }

    fn relation(&self, name: &str, args: &[ProjElem<T>]) -> Result<T, EvalError> {
        match name {
            "P" => {
                arity(name, 2, args.len())?;
                let (x, y) = (ray_arg(name, &args[0])?, ray_arg(name, &args[1])?);
                Ok(projection_unchecked(x.vector(), y.vector()).min(T::one()))
            }
            "Ea" => {
                arity(name, 1, args.len())?;
                Ok(self.scale.rescale(self.expected_value(&ray_arg(name, &args[0])?)))
            }
            "nrm" => {
                arity(name, 0, args.len())?;
                Ok(self.scale.rescale(self.norm()))
            }
            "val" => {
                arity(name, 1, args.len())?;
                match &args[0] {
                    ProjElem::Level(v) => Ok(self.scale.rescale(*v)),
                    ProjElem::Ray(_) => Err(EvalError::Sort("`val` takes a level, got a ray".into())),
                }
            }
            _ => Err(EvalError::UnknownRelation(name.to_string())),
        }
    }

    fn function(&self, name: &str, args: &[ProjElem<T>]) -> Result<ProjElem<T>, EvalError> {
        match name {
            "A" => {
                arity(name, 1, args.len())?;
                Ok(ProjElem::Ray(self.image(&self.matrix, &ray_arg(name, &args[0])?)?))
            }
            "E" => {
                arity(name, 1, args.len())?;
                Ok(ProjElem::Level(self.expected_value(&ray_arg(name, &args[0])?)))
            }
            _ => match self.aux.iter().find(|(n, _)| n == name) {
                Some((_, k)) => {
                    arity(name, 1, args.len())?;
                    Ok(ProjElem::Ray(self.image(k, &ray_arg(name, &args[0])?)?))
                }
                None => Err(EvalError::UnknownFunction(name.to_string())),
            },
        }
    }

    fn sample(&self) -> ElementSample<ProjElem<T>, T> {
        let elements = self.sample.coefficients.iter().filter_map(|c| self.ray(c).ok().map(ProjElem::Ray)).collect();
        ElementSample { elements, covering_radius: self.sample.covering_radius }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bloch_grid_covers_random_rays() {
        let grid: Vec<Ray<f64>> = bloch_grid::<f64>(BLOCH_RINGS).into_iter().map(|v| Ray::new(v).unwrap()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for _ in 0..2000 {
            let v = vec![
                Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ];
            let r = Ray::new(v).unwrap();
            let best = grid
                .iter()
                .map(|g| distance_from_p(projection_unchecked(g.vector(), r.vector())))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        assert!(worst <= 1.0 / BLOCH_RINGS as f64, "worst {worst}");
    }

    #[test]
    fn samples_start_with_eigenvectors() {
        let s = coefficient_sample::<f64>(3);
        assert_eq!(s.coefficients[1], super::super::linalg::unit(3, 1));
        assert_eq!(s.coefficients.len(), 3 + 12 + RANDOM_RAYS);
        assert!(s.covering_radius.is_none());
        assert_eq!(coefficient_sample::<f64>(1).covering_radius, Some(0.0));
    }
}
