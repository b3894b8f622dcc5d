use std::collections::BTreeSet;
use std::fmt;

use crate::scalar::Real;

/// A term denotes a fiber element: a section variable, a constant, or a
/// function symbol applied to terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Apply(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn apply(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::Apply(name.into(), args)
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Apply(_, args) => args.iter().any(|a| a.mentions(var)),
        }
    }
}

/// F-restricted continuous-logic formula. Values live in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const0,
    Const1,
    Half(Box<Formula>),
    /// Truncated subtraction `φ ∸ ψ = max(φ - ψ, 0)`.
    TruncSub(Box<Formula>, Box<Formula>),
    /// `1 ∸ φ`.
    Negation(Box<Formula>),
    Max(Box<Formula>, Box<Formula>),
    Min(Box<Formula>, Box<Formula>),
    AtomDist(Term, Term),
    AtomRel(String, Vec<Term>),
    Inf(String, Box<Formula>),
    Sup(String, Box<Formula>),
}

impl Formula {
    pub fn half(f: Formula) -> Self {
        Formula::Half(Box::new(f))
    }

    pub fn trunc_sub(a: Formula, b: Formula) -> Self {
        Formula::TruncSub(Box::new(a), Box::new(b))
    }

    pub fn negation(f: Formula) -> Self {
        Formula::Negation(Box::new(f))
    }

    pub fn max(a: Formula, b: Formula) -> Self {
        Formula::Max(Box::new(a), Box::new(b))
    }

    pub fn min(a: Formula, b: Formula) -> Self {
        Formula::Min(Box::new(a), Box::new(b))
    }

    pub fn dist(a: Term, b: Term) -> Self {
        Formula::AtomDist(a, b)
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::AtomRel(name.into(), args)
    }

    pub fn inf(var: impl Into<String>, body: Formula) -> Self {
        Formula::Inf(var.into(), Box::new(body))
    }

    pub fn sup(var: impl Into<String>, body: Formula) -> Self {
        Formula::Sup(var.into(), Box::new(body))
    }

    /// Left-nested `max` over a non-empty list.
    pub fn max_all(items: impl IntoIterator<Item = Formula>) -> Option<Self> {
        items.into_iter().reduce(Formula::max)
    }

    /// Left-nested `min` over a non-empty list.
    pub fn min_all(items: impl IntoIterator<Item = Formula>) -> Option<Self> {
        items.into_iter().reduce(Formula::min)
    }

    /// Absolute difference `|φ - ψ|` spelled with the restricted connectives.
    pub fn abs_diff(a: Formula, b: Formula) -> Self {
        Formula::max(Formula::trunc_sub(a.clone(), b.clone()), Formula::trunc_sub(b, a))
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Const0 | Formula::Const1 => {}
            Formula::Half(f) | Formula::Negation(f) => f.collect_free(out),
            Formula::TruncSub(a, b) | Formula::Max(a, b) | Formula::Min(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::AtomDist(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::AtomRel(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Formula::Inf(v, body) | Formula::Sup(v, body) => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
        }
    }

    /// Quantifier nesting depth plus connective depth.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Const0 | Formula::Const1 | Formula::AtomDist(..) | Formula::AtomRel(..) => 0,
            Formula::Half(f) | Formula::Negation(f) | Formula::Inf(_, f) | Formula::Sup(_, f) => 1 + f.depth(),
            Formula::TruncSub(a, b) | Formula::Max(a, b) | Formula::Min(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// True when no quantifier occurs.
    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Const0 | Formula::Const1 | Formula::AtomDist(..) | Formula::AtomRel(..) => true,
            Formula::Half(f) | Formula::Negation(f) => f.is_quantifier_free(),
            Formula::TruncSub(a, b) | Formula::Max(a, b) | Formula::Min(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Inf(..) | Formula::Sup(..) => false,
        }
    }

    /// Whether the formula uses only connectives and `inf` (`uses_inf`)
    /// or only connectives and `sup` (`!uses_inf`).
    pub fn only_quantifier(&self, uses_inf: bool) -> bool {
        match self {
            Formula::Const0 | Formula::Const1 | Formula::AtomDist(..) | Formula::AtomRel(..) => true,
            Formula::Half(f) | Formula::Negation(f) => f.only_quantifier(uses_inf),
            Formula::TruncSub(a, b) | Formula::Max(a, b) | Formula::Min(a, b) => {
                a.only_quantifier(uses_inf) && b.only_quantifier(uses_inf)
            }
            Formula::Inf(_, f) => uses_inf && f.only_quantifier(uses_inf),
            Formula::Sup(_, f) => !uses_inf && f.only_quantifier(uses_inf),
        }
    }

    /// Substitutes `var` by the term `by` in every free occurrence.
    pub fn substitute(&self, var: &str, by: &Term) -> Formula {
        let st = |t: &Term| substitute_term(t, var, by);
        match self {
            Formula::Const0 => Formula::Const0,
            Formula::Const1 => Formula::Const1,
            Formula::Half(f) => Formula::half(f.substitute(var, by)),
            Formula::Negation(f) => Formula::negation(f.substitute(var, by)),
            Formula::TruncSub(a, b) => Formula::trunc_sub(a.substitute(var, by), b.substitute(var, by)),
            Formula::Max(a, b) => Formula::max(a.substitute(var, by), b.substitute(var, by)),
            Formula::Min(a, b) => Formula::min(a.substitute(var, by), b.substitute(var, by)),
            Formula::AtomDist(a, b) => Formula::AtomDist(st(a), st(b)),
            Formula::AtomRel(r, args) => Formula::AtomRel(r.clone(), args.iter().map(st).collect()),
            Formula::Inf(v, _) | Formula::Sup(v, _) if v == var => self.clone(),
            Formula::Inf(v, body) => Formula::inf(v.clone(), body.substitute(var, by)),
            Formula::Sup(v, body) => Formula::sup(v.clone(), body.substitute(var, by)),
        }
    }
}

fn substitute_term(t: &Term, var: &str, by: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => by.clone(),
        Term::Var(_) => t.clone(),
        Term::Apply(f, args) => Term::Apply(f.clone(), args.iter().map(|a| substitute_term(a, var, by)).collect()),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Apply(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Formula {
    // Operands of `-.` that would otherwise swallow or split the chain get parens.
    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, right: bool) -> fmt::Result {
        let needs = match self {
            Formula::Inf(..) | Formula::Sup(..) => true,
            Formula::TruncSub(..) => right,
            _ => false,
        };
        if needs {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const0 => write!(f, "0"),
            Formula::Const1 => write!(f, "1"),
            Formula::Half(x) => write!(f, "half({x})"),
            Formula::Negation(x) => write!(f, "not({x})"),
            Formula::TruncSub(a, b) => {
                a.fmt_operand(f, false)?;
                write!(f, " -. ")?;
                b.fmt_operand(f, true)
            }
            Formula::Max(a, b) => write!(f, "max({a}, {b})"),
            Formula::Min(a, b) => write!(f, "min({a}, {b})"),
            Formula::AtomDist(a, b) => write!(f, "d({a}, {b})"),
            Formula::AtomRel(r, args) if args.is_empty() => write!(f, "{r}"),
            Formula::AtomRel(r, args) => write!(f, "{}", Term::Apply(r.clone(), args.clone())),
            Formula::Inf(v, body) => write!(f, "inf {v}. {body}"),
            Formula::Sup(v, body) => write!(f, "sup {v}. {body}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparator {
    Lt,
    Gt,
    Le,
    Ge,
}

impl Comparator {
    pub fn is_strict(self) -> bool {
        matches!(self, Comparator::Lt | Comparator::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Lt => "<",
            Comparator::Gt => ">",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
        }
    }
}

/// `φ ⋈ ε`: the unit of satisfaction.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition<T> {
    pub formula: Formula,
    pub comparator: Comparator,
    pub threshold: T,
}

impl<T: Real> Condition<T> {
    pub fn new(formula: Formula, comparator: Comparator, threshold: T) -> Self {
        Condition { formula, comparator, threshold }
    }

    pub fn lt(formula: Formula, threshold: T) -> Self {
        Self::new(formula, Comparator::Lt, threshold)
    }

    pub fn gt(formula: Formula, threshold: T) -> Self {
        Self::new(formula, Comparator::Gt, threshold)
    }

    pub fn with_formula(&self, formula: Formula) -> Self {
        Condition { formula, ..self.clone() }
    }

    pub fn with_threshold(&self, threshold: T) -> Self {
        Condition { threshold, ..self.clone() }
    }
}

impl<T: Real> fmt::Display for Condition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.formula, self.comparator.symbol(), self.threshold)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn free_variables_examples() {
        let f = Formula::inf("s", Formula::dist(v("s"), v("t")));
        assert_eq!(f.free_variables(), ["t".to_string()].into_iter().collect());
        assert!(Formula::Const1.free_variables().is_empty());
        let g = Formula::max(Formula::rel("P", vec![v("s1"), v("s2")]), Formula::dist(v("s1"), v("s3")));
        let want: BTreeSet<String> = ["s1", "s2", "s3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(g.free_variables(), want);
    }

    #[test]
    fn substitution_respects_binders() {
        let f = Formula::max(Formula::dist(v("s"), v("t")), Formula::inf("s", Formula::dist(v("s"), v("t"))));
        let g = f.substitute("s", &v("u"));
        assert_eq!(g, Formula::max(Formula::dist(v("u"), v("t")), Formula::inf("s", Formula::dist(v("s"), v("t")))));
    }

    #[test]
    fn display_parenthesises_right_nested_subtraction() {
        let f = Formula::trunc_sub(Formula::Const0, Formula::trunc_sub(Formula::Const1, Formula::Const0));
        assert_eq!(f.to_string(), "0 -. (1 -. 0)");
        let g = Formula::trunc_sub(Formula::inf("s", Formula::Const0), Formula::Const1);
        assert_eq!(g.to_string(), "(inf s. 0) -. 1");
    }
}
