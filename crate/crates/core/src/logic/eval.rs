//! Fiberwise value semantics with rigorous enclosures.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use thiserror::Error;

use super::formula::{Formula, Term};
use super::signature::Signature;
use crate::scalar::{lit, unit_clamp, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` expects {expected} arguments, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("sort mismatch: {0}")]
    Sort(String),
    #[error("{0}")]
    Domain(String),
}

/// Closed enclosure `[lower, upper] ⊆ [0, 1]` of a formula value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueInterval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> ValueInterval<T> {
    pub fn new(lower: T, upper: T) -> Self {
        let (lo, hi) = (unit_clamp(lower), unit_clamp(upper));
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        ValueInterval { lower: lo, upper: hi }
    }

    pub fn exact(v: T) -> Self {
        Self::new(v, v)
    }

    /// `[0, 1]`: nothing is known.
    pub fn unknown() -> Self {
        ValueInterval { lower: T::zero(), upper: T::one() }
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn mid(&self) -> T {
        (self.lower + self.upper) / lit(2.0)
    }

    pub fn contains(&self, v: T, slack: T) -> bool {
        v >= self.lower - slack && v <= self.upper + slack
    }

    pub fn max(self, o: Self) -> Self {
        ValueInterval { lower: self.lower.max(o.lower), upper: self.upper.max(o.upper) }
    }

    pub fn min(self, o: Self) -> Self {
        ValueInterval { lower: self.lower.min(o.lower), upper: self.upper.min(o.upper) }
    }

    pub fn trunc_sub(self, o: Self) -> Self {
        ValueInterval { lower: (self.lower - o.upper).max(T::zero()), upper: (self.upper - o.lower).max(T::zero()) }
    }

    pub fn negation(self) -> Self {
        ValueInterval { lower: T::one() - self.upper, upper: T::one() - self.lower }
    }

    pub fn half(self) -> Self {
        let two = lit::<T>(2.0);
        ValueInterval { lower: self.lower / two, upper: self.upper / two }
    }
}

/// Finite sample of a fiber together with its covering radius in the fiber
/// metric. `covering_radius == Some(0)` means the sample is exhaustive;
/// `None` means no radius is certified.
#[derive(Debug, Clone)]
pub struct ElementSample<E, T> {
    pub elements: Vec<E>,
    pub covering_radius: Option<T>,
}

impl<E, T: Real> ElementSample<E, T> {
    pub fn exhaustive(elements: Vec<E>) -> Self {
        ElementSample { elements, covering_radius: Some(T::zero()) }
    }

    pub fn uncertified(elements: Vec<E>) -> Self {
        ElementSample { elements, covering_radius: None }
    }
}

/// A single metric structure: the interpretation of a signature in one fiber.
pub trait Structure<T: Real> {
    type Elem: Clone;

    fn signature(&self) -> &Signature;
    fn distance(&self, a: &Self::Elem, b: &Self::Elem) -> Result<T, EvalError>;
    fn relation(&self, name: &str, args: &[Self::Elem]) -> Result<T, EvalError>;
    fn function(&self, name: &str, args: &[Self::Elem]) -> Result<Self::Elem, EvalError>;
    /// Elements that quantifiers range over.
    fn sample(&self) -> ElementSample<Self::Elem, T>;
}

pub type Binding<E> = BTreeMap<String, E>;

pub fn eval_term<T: Real, S: Structure<T>>(
    s: &S,
    term: &Term,
    binding: &Binding<S::Elem>,
) -> Result<S::Elem, EvalError> {
    match term {
        Term::Var(v) => match binding.get(v) {
            Some(e) => Ok(e.clone()),
            None if s.signature().is_constant(v) => s.function(v, &[]),
            None => Err(EvalError::UnboundVariable(v.clone())),
        },
        Term::Apply(f, args) => {
            let sym = s.signature().function(f).ok_or_else(|| EvalError::UnknownFunction(f.clone()))?;
            if sym.arity != args.len() {
                return Err(EvalError::Arity { name: f.clone(), expected: sym.arity, got: args.len() });
            }
            let vals = args.iter().map(|a| eval_term(s, a, binding)).collect::<Result<Vec<_>, _>>()?;
            s.function(f, &vals)
        }
    }
}

/// Encloses the continuous-logic value of `phi` under `binding`.
///
/// Connectives are exact. `inf`/`sup` are enclosed from the structure's
/// element sample: the sampled extremum is one end, and the other end moves by
/// `L · r` where `r` is the covering radius and `L` a Lipschitz bound of the
/// body in the quantified variable. Without a certified radius or bound the
/// far end is 0 (for `inf`) or 1 (for `sup`).
pub fn eval_formula<T: Real, S: Structure<T>>(
    s: &S,
    phi: &Formula,
    binding: &Binding<S::Elem>,
) -> Result<ValueInterval<T>, EvalError> {
    let sample = QuantifierSample(OnceCell::new());
    eval_with(s, phi, binding, &sample)
}

/// Drawn on the first quantifier only.
struct QuantifierSample<E, T>(OnceCell<ElementSample<E, T>>);

fn eval_with<T: Real, S: Structure<T>>(
    s: &S,
    phi: &Formula,
    binding: &Binding<S::Elem>,
    q: &QuantifierSample<S::Elem, T>,
) -> Result<ValueInterval<T>, EvalError> {
    Ok(match phi {
        Formula::Const0 => ValueInterval::exact(T::zero()),
        Formula::Const1 => ValueInterval::exact(T::one()),
        Formula::Half(f) => eval_with(s, f, binding, q)?.half(),
        Formula::Negation(f) => eval_with(s, f, binding, q)?.negation(),
        Formula::TruncSub(a, b) => eval_with(s, a, binding, q)?.trunc_sub(eval_with(s, b, binding, q)?),
        Formula::Max(a, b) => eval_with(s, a, binding, q)?.max(eval_with(s, b, binding, q)?),
        Formula::Min(a, b) => eval_with(s, a, binding, q)?.min(eval_with(s, b, binding, q)?),
        Formula::AtomDist(a, b) => {
            let x = eval_term(s, a, binding)?;
            let y = eval_term(s, b, binding)?;
            ValueInterval::exact(unit_clamp(s.distance(&x, &y)?))
        }
        Formula::AtomRel(r, args) => {
            let sym = s.signature().relation(r).ok_or_else(|| EvalError::UnknownRelation(r.clone()))?;
            if sym.arity != args.len() {
                return Err(EvalError::Arity { name: r.clone(), expected: sym.arity, got: args.len() });
            }
            let vals = args.iter().map(|a| eval_term(s, a, binding)).collect::<Result<Vec<_>, _>>()?;
            ValueInterval::exact(unit_clamp(s.relation(r, &vals)?))
        }
        Formula::Inf(v, body) | Formula::Sup(v, body) => {
            let is_inf = matches!(phi, Formula::Inf(..));
            let sample = q.0.get_or_init(|| s.sample());
            if sample.elements.is_empty() {
                return Ok(ValueInterval::unknown());
            }
            let mut acc: Option<ValueInterval<T>> = None;
            let mut local = binding.clone();
            for e in &sample.elements {
                local.insert(v.clone(), e.clone());
                let val = eval_with(s, body, &local, q)?;
                acc = Some(match acc {
                    None => val,
                    Some(a) if is_inf => a.min(val),
                    Some(a) => a.max(val),
                });
            }
            let got = acc.expect("non-empty sample");
            let slack = match sample.covering_radius {
                Some(r) => {
                    let l = lipschitz(s.signature(), body, v);
                    if l.is_finite() {
                        lit::<T>(l) * r
                    } else {
                        T::one()
                    }
                }
                None => T::one(),
            };
            if is_inf {
                ValueInterval::new(got.lower - slack, got.upper)
            } else {
                ValueInterval::new(got.lower, got.upper + slack)
            }
        }
    })
}

fn term_lipschitz(sig: &Signature, t: &Term, var: &str) -> f64 {
    match t {
        Term::Var(v) => {
            if v == var {
                1.0
            } else {
                0.0
            }
        }
        Term::Apply(f, args) => {
            let inner: f64 = args.iter().map(|a| term_lipschitz(sig, a, var)).sum();
            if inner == 0.0 {
                return 0.0;
            }
            match sig.function(f).and_then(|s| s.lipschitz) {
                Some(l) => l * inner,
                None => f64::INFINITY,
            }
        }
    }
}

/// Lipschitz bound of `phi` as a function of the element bound to `var`.
pub fn lipschitz(sig: &Signature, phi: &Formula, var: &str) -> f64 {
    match phi {
        Formula::Const0 | Formula::Const1 => 0.0,
        Formula::Half(f) => 0.5 * lipschitz(sig, f, var),
        Formula::Negation(f) => lipschitz(sig, f, var),
        Formula::TruncSub(a, b) => lipschitz(sig, a, var) + lipschitz(sig, b, var),
        Formula::Max(a, b) | Formula::Min(a, b) => lipschitz(sig, a, var).max(lipschitz(sig, b, var)),
        Formula::AtomDist(a, b) => term_lipschitz(sig, a, var) + term_lipschitz(sig, b, var),
        Formula::AtomRel(r, args) => {
            let inner: f64 = args.iter().map(|a| term_lipschitz(sig, a, var)).sum();
            if inner == 0.0 {
                return 0.0;
            }
            match sig.relation(r).and_then(|s| s.lipschitz) {
                Some(l) => l * inner,
                None => f64::INFINITY,
            }
        }
        Formula::Inf(v, body) | Formula::Sup(v, body) => {
            if v == var {
                0.0
            } else {
                lipschitz(sig, body, var)
            }
        }
    }
}
