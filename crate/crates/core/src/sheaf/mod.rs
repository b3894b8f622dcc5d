//! Sheaves of metric structures and their forcing relations.

pub mod base;
pub mod generic;
pub mod local;
pub mod point;
pub mod section;
pub mod torus;
pub mod verdict;

use std::collections::BTreeMap;
use std::fmt::Debug;

use thiserror::Error;

use crate::logic::{eval_formula, Binding, EvalError, Formula, Signature, Structure, ValueInterval};
use crate::scalar::{lit, Real};

pub use base::{BasePoint, BaseSpace, ChainKind, FilterChain, IndexSet, OpenSet};
pub use generic::{build_generic_model, gmt_crosscheck, pseudometric_rho, Agreement, GenericModel, GmtReport};
pub use local::{force_local, max_principle_witness, MaxPrincipleWitness};
pub use point::{force_point, neighborhood_witness};
pub use section::{Section, SectionKind, SectionSample};
pub use verdict::{Certificate, Status, Verdict};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SheafError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("section `{section}` is not defined at {point}")]
    OutsideDomain { section: String, point: String },
    #[error("section `{section}` is not defined on all of {set}")]
    NotOnSet { section: String, set: String },
    #[error("empty intersection at chain element {0}")]
    EmptyIntersection(usize),
    #[error("no neighbourhood passes at refinement {0}: {1}")]
    NoNeighborhood(usize, String),
    #[error("witness search exhausted: {0}")]
    NoWitness(String),
    #[error("unknown section family `{0}`")]
    UnknownFamily(String),
    #[error("{0}")]
    Invalid(String),
}

/// Sampling density and tolerance for the forcing searches.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution<T> {
    /// Verdicts are conclusive only when `|margin| > tol`.
    pub tol: T,
    /// Base points sampled per open set.
    pub grid: usize,
    /// Neighbourhood halvings tried by point forcing.
    pub max_refinement: usize,
    /// Dyadic depth of cover searches in local forcing.
    pub cover_depth: usize,
    /// Threshold grid size for the truncated-subtraction clauses.
    pub threshold_grid: usize,
    /// Fraction of `U` a maximum-principle witness may leave uncovered.
    pub gap: T,
}

impl<T: Real> Default for Resolution<T> {
    fn default() -> Self {
        Resolution { tol: lit(1e-3), grid: 8, max_refinement: 4, cover_depth: 3, threshold_grid: 16, gap: lit(0.05) }
    }
}

impl<T: Real> Resolution<T> {
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }
}

pub type SectionBinding<T> = BTreeMap<String, Section<T>>;

pub fn bind<T: Real>(pairs: &[(&str, &Section<T>)]) -> SectionBinding<T> {
    pairs.iter().map(|(k, s)| (k.to_string(), (*s).clone())).collect()
}

/// A sheaf of metric structures over a base space.
pub trait MetricSheaf<T: Real> {
    type Elem: Clone + Debug;
    type Fiber<'a>: Structure<T, Elem = Self::Elem>
    where
        Self: 'a;

    fn base(&self) -> &BaseSpace<T>;
    fn signature(&self) -> &Signature;
    fn fiber(&self, x: &BasePoint<T>) -> Result<Self::Fiber<'_>, SheafError>;
    /// Value at `x` of the family member with the given parameters.
    fn family_value(&self, family: &str, params: &[T], x: &BasePoint<T>) -> Result<Self::Elem, SheafError>;
    /// Sections defined on all of `u` that quantifiers range over.
    fn sections_at(&self, u: &OpenSet<T>) -> SectionSample<T>;

    fn section_value(&self, s: &Section<T>, x: &BasePoint<T>) -> Result<Self::Elem, SheafError> {
        if !s.domain.contains(x) {
            return Err(SheafError::OutsideDomain { section: s.to_string(), point: x.to_string() });
        }
        match &s.kind {
            SectionKind::Family { name, params } => self.family_value(name, params, x),
            SectionKind::Apply { function, args } => {
                let vals = args.iter().map(|a| self.section_value(a, x)).collect::<Result<Vec<_>, _>>()?;
                Ok(self.fiber(x)?.function(function, &vals)?)
            }
        }
    }
}

/// Fiber binding at `x` for the free variables of `phi`.
pub(crate) fn fiber_binding<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    x: &BasePoint<T>,
    phi: &Formula,
    binding: &SectionBinding<T>,
) -> Result<Binding<S::Elem>, SheafError> {
    let mut out = Binding::new();
    for v in phi.free_variables() {
        match binding.get(&v) {
            Some(s) => {
                out.insert(v, sheaf.section_value(s, x)?);
            }
            None if sheaf.signature().is_constant(&v) => {}
            None => return Err(EvalError::UnboundVariable(v).into()),
        }
    }
    Ok(out)
}

/// Enclosure of the value of `phi` in the fiber over `x`.
pub fn fiber_value<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    x: &BasePoint<T>,
    phi: &Formula,
    binding: &SectionBinding<T>,
) -> Result<ValueInterval<T>, SheafError> {
    let b = fiber_binding(sheaf, x, phi, binding)?;
    Ok(eval_formula(&sheaf.fiber(x)?, phi, &b)?)
}

/// Bound sections of the free variables of `phi`.
pub(crate) fn used_sections<'b, T: Real>(phi: &Formula, binding: &'b SectionBinding<T>) -> Vec<&'b Section<T>> {
    phi.free_variables().iter().filter_map(|v| binding.get(v)).collect()
}

/// Whether the formula's value can depend on the base point at all.
pub(crate) fn has_atoms(phi: &Formula) -> bool {
    match phi {
        Formula::Const0 | Formula::Const1 => false,
        Formula::AtomDist(..) | Formula::AtomRel(..) => true,
        Formula::Half(f) | Formula::Negation(f) | Formula::Inf(_, f) | Formula::Sup(_, f) => has_atoms(f),
        Formula::TruncSub(a, b) | Formula::Max(a, b) | Formula::Min(a, b) => has_atoms(a) || has_atoms(b),
    }
}
