//! The generic model of a filter chain and its cross-check against forcing.

use crate::logic::{
    eval_formula, Binding, Comparator, Condition, ElementSample, EvalError, Signature, Structure, ValueInterval,
};
use crate::scalar::Real;

use super::base::{FilterChain, OpenSet};
use super::local::force_local;
use super::section::Section;
use super::verdict::Status;
use super::{MetricSheaf, Resolution, SectionBinding, SheafError};

/// Running minimum over the chain of the sampled supremum of `f` over
/// `U_k ∩ dom`, one entry per chain element.
fn inf_sup<T: Real>(
    chain: &FilterChain<T>,
    domain: &OpenSet<T>,
    res: &Resolution<T>,
    mut f: impl FnMut(&super::BasePoint<T>) -> Result<T, SheafError>,
) -> Result<Vec<T>, SheafError> {
    let mut out = Vec::with_capacity(chain.depth());
    let mut running = T::infinity();
    for (k, u) in chain.sets.iter().enumerate() {
        let cell = u.intersect(domain);
        let pts = cell.sample(res.grid);
        if pts.is_empty() {
            return Err(SheafError::EmptyIntersection(k));
        }
        let mut sup = T::neg_infinity();
        for y in &pts {
            sup = sup.max(f(y)?);
        }
        running = running.min(sup);
        out.push(running);
    }
    Ok(out)
}

/// `ρ_F(σ, μ)` truncated at the chain depth.
pub fn pseudometric_rho<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    chain: &FilterChain<T>,
    sigma: &Section<T>,
    mu: &Section<T>,
    res: &Resolution<T>,
) -> Result<T, SheafError> {
    let dom = sigma.domain.intersect(&mu.domain);
    let seq = inf_sup(chain, &dom, res, |y| {
        let (a, b) = (sheaf.section_value(sigma, y)?, sheaf.section_value(mu, y)?);
        Ok(sheaf.fiber(y)?.distance(&a, &b)?)
    })?;
    Ok(*seq.last().expect("non-empty chain"))
}

/// Quotient of sections by `ρ_F < tol`, interpreted as a metric structure.
pub struct GenericModel<'a, T: Real, S: MetricSheaf<T>> {
    sheaf: &'a S,
    chain: FilterChain<T>,
    res: Resolution<T>,
    pub sections: Vec<Section<T>>,
    /// Class index of each listed section.
    pub classes: Vec<usize>,
    quantifier_sample: Vec<Section<T>>,
    covering_radius: Option<T>,
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut j = i;
    while parent[j] != r {
        let next = parent[j];
        parent[j] = r;
        j = next;
    }
    r
}

pub fn build_generic_model<'a, T: Real, S: MetricSheaf<T>>(
    sheaf: &'a S,
    chain: &FilterChain<T>,
    sections: &[Section<T>],
    res: &Resolution<T>,
) -> Result<GenericModel<'a, T, S>, SheafError> {
    for s in sections {
        if !chain.sets.iter().any(|u| u.is_subset(&s.domain)) {
            return Err(SheafError::Invalid(format!("domain of {s} is not in the filter")));
        }
    }
    let n = sections.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if pseudometric_rho(sheaf, chain, &sections[i], &sections[j], res)? < res.tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut ids: Vec<usize> = Vec::new();
    let classes = roots
        .iter()
        .map(|r| match ids.iter().position(|x| x == r) {
            Some(p) => p,
            None => {
                ids.push(*r);
                ids.len() - 1
            }
        })
        .collect();
    let sample = sheaf.sections_at(&chain.sets[0]);
    let mut quantifier_sample = sections.to_vec();
    quantifier_sample.extend(sample.sections);
    Ok(GenericModel {
        sheaf,
        chain: chain.clone(),
        res: res.clone(),
        sections: sections.to_vec(),
        classes,
        quantifier_sample,
        covering_radius: sample.covering_radius,
    })
}

impl<'a, T: Real, S: MetricSheaf<T>> GenericModel<'a, T, S> {
    pub fn class_count(&self) -> usize {
        self.classes.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Inf-sup value of a relation at every chain depth.
    pub fn relation_sequence(&self, name: &str, args: &[Section<T>]) -> Result<Vec<T>, SheafError> {
        let dom = args.iter().fold(self.sheaf.base().whole(), |acc, s| acc.intersect(&s.domain));
        inf_sup(&self.chain, &dom, &self.res, |y| {
            let vals = args.iter().map(|s| self.sheaf.section_value(s, y)).collect::<Result<Vec<_>, _>>()?;
            Ok(self.sheaf.fiber(y)?.relation(name, &vals)?)
        })
    }
}

fn to_eval(e: SheafError) -> EvalError {
    match e {
        SheafError::Eval(inner) => inner,
        other => EvalError::Domain(other.to_string()),
    }
}

impl<'a, T: Real, S: MetricSheaf<T>> Structure<T> for GenericModel<'a, T, S> {
    type Elem = Section<T>;

    fn signature(&self) -> &Signature {
        self.sheaf.signature()
    }

    fn distance(&self, a: &Section<T>, b: &Section<T>) -> Result<T, EvalError> {
        pseudometric_rho(self.sheaf, &self.chain, a, b, &self.res).map_err(to_eval)
    }

    fn relation(&self, name: &str, args: &[Section<T>]) -> Result<T, EvalError> {
        let seq = self.relation_sequence(name, args).map_err(to_eval)?;
        Ok(*seq.last().expect("non-empty chain"))
    }

    fn function(&self, name: &str, args: &[Section<T>]) -> Result<Section<T>, EvalError> {
        Ok(Section::apply(name, args.to_vec(), self.sheaf.base().whole()))
    }

    fn sample(&self) -> ElementSample<Section<T>, T> {
        ElementSample { elements: self.quantifier_sample.clone(), covering_radius: self.covering_radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Agreement {
    Agree,
    Disagree,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct GmtReport<T> {
    /// Satisfaction in the generic model: FORCED for true, REFUTED for false.
    pub generic: Status,
    pub generic_value: ValueInterval<T>,
    /// FORCED if some chain element forces the condition, REFUTED if the
    /// deepest one refutes it.
    pub forcing: Status,
    /// First chain depth that forces the condition.
    pub forced_at: Option<usize>,
    pub agreement: Agreement,
}

/// Evaluates `cond` in the generic model and by local forcing along the chain.
pub fn gmt_crosscheck<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    chain: &FilterChain<T>,
    cond: &Condition<T>,
    binding: &SectionBinding<T>,
    res: &Resolution<T>,
) -> Result<GmtReport<T>, SheafError> {
    let listed: Vec<Section<T>> = binding.values().cloned().collect();
    let model = build_generic_model(sheaf, chain, &listed, res)?;
    let b: Binding<Section<T>> = binding.clone().into_iter().collect();
    let e = eval_formula(&model, &cond.formula, &b)?;
    let (c, tol) = (cond.threshold, res.tol);
    let below = if e.upper < c - tol {
        Some(true)
    } else if e.lower > c + tol {
        Some(false)
    } else {
        None
    };
    let truth = match cond.comparator {
        Comparator::Lt | Comparator::Le => below,
        Comparator::Gt | Comparator::Ge => below.map(|x| !x),
    };
    let generic = match truth {
        Some(true) => Status::Forced,
        Some(false) => Status::Refuted,
        None => Status::Unknown,
    };

    let mut forcing = Status::Unknown;
    let mut forced_at = None;
    for (k, u) in chain.sets.iter().enumerate() {
        let v = force_local(sheaf, u, cond, binding, res)?;
        if v.is_forced() {
            forcing = Status::Forced;
            forced_at = Some(k);
            break;
        }
        if k + 1 == chain.depth() && v.is_refuted() {
            forcing = Status::Refuted;
        }
    }
    let agreement = match (generic, forcing) {
        (Status::Unknown, _) | (_, Status::Unknown) => Agreement::Inconclusive,
        (a, b) if a == b => Agreement::Agree,
        _ => Agreement::Disagree,
    };
    Ok(GmtReport { generic, generic_value: e, forcing, forced_at, agreement })
}
