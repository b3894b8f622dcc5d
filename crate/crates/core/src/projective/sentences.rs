//! Dimension, orthogonality and norm sentences.

use crate::logic::{Comparator, Condition, Formula, Term};
use crate::scalar::{lit, Real};
use crate::sheaf::{
    base::index_set, force_local, force_point, BasePoint, MetricSheaf, OpenSet, Resolution, SectionBinding, SheafError,
    Verdict,
};

use super::lattice::LatticeSheaf;
use super::ProjectiveError;

fn p(a: &str, b: &str) -> Formula {
    Formula::rel("P", vec![Term::var(a), Term::var(b)])
}

fn max_all(fs: Vec<Formula>) -> Formula {
    Formula::max_all(fs).unwrap_or(Formula::Const0)
}

/// Small exactly when the fiber has projective dimension two: some pair of
/// orthogonal rays leaves no room for a third ray orthogonal to both.
pub fn phi_dim2() -> Formula {
    let d = Formula::dist(Term::var("s1"), Term::var("s2"));
    let third = Formula::sup("s3", Formula::trunc_sub(Formula::negation(p("s1", "s3")), p("s2", "s3")));
    Formula::inf("s1", Formula::inf("s2", Formula::max(Formula::max(Formula::negation(d), p("s1", "s2")), third)))
}

/// Small when `k + 1` mutually orthogonal rays exist, with each `inf` pushed
/// past the pairs that do not mention its variable.
pub fn phi_dim_greater(k: usize) -> Formula {
    let names: Vec<String> = (1..=k + 1).map(|i| format!("s{i}")).collect();
    let mut body = Formula::Const0;
    for j in (0..names.len()).rev() {
        let pairs = Formula::max_all((0..j).map(|i| p(&names[i], &names[j])));
        let inner = match pairs {
            Some(pairs) if j + 1 < names.len() => Formula::max(pairs, body),
            Some(pairs) => pairs,
            None => body,
        };
        body = Formula::inf(names[j].clone(), inner);
    }
    body
}

/// `inf s. |Ea(s) − nrm|`.
pub fn phi_norm() -> Formula {
    let ea = Formula::rel("Ea", vec![Term::var("s")]);
    let nrm = Formula::rel("nrm", vec![]);
    Formula::inf("s", Formula::max(Formula::trunc_sub(ea.clone(), nrm.clone()), Formula::trunc_sub(nrm, ea)))
}

/// `max P(s_i, s_j) < ε` over pairs `i < j < n`, bound to eigen-sections.
pub fn orthogonality_condition<T: Real>(
    sheaf: &LatticeSheaf<T>,
    n: usize,
    eps: T,
) -> Result<(Condition<T>, SectionBinding<T>), ProjectiveError> {
    if n + 1 > sheaf.size() {
        return Err(ProjectiveError::InsufficientUniverse { needed: n + 1, size: sheaf.size() });
    }
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut pairs = Vec::new();
    for j in 0..n {
        for i in 0..j {
            pairs.push(p(&names[i], &names[j]));
        }
    }
    let binding = names.iter().enumerate().map(|(i, v)| (v.clone(), sheaf.sigma_eigen(i))).collect();
    Ok((Condition::new(max_all(pairs), Comparator::Lt, eps), binding))
}

/// Forces the orthogonality of the first `n` eigen-sections at `l_{0..=n}`.
pub fn orthogonality_forcing<T: Real>(
    sheaf: &LatticeSheaf<T>,
    n: usize,
    eps: T,
    res: &Resolution<T>,
) -> Result<Verdict<T>, ProjectiveError> {
    let (cond, binding) = orthogonality_condition(sheaf, n, eps)?;
    let x = BasePoint::Subset(index_set(0..=n));
    Ok(force_point(sheaf, &x, &cond, &binding, res)?)
}

/// A sentence `< ε` at a base point.
pub fn sentence_forcing_at<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    x: &BasePoint<T>,
    sentence: Formula,
    eps: T,
    res: &Resolution<T>,
) -> Result<Verdict<T>, SheafError> {
    force_point(sheaf, x, &Condition::new(sentence, Comparator::Lt, eps), &SectionBinding::new(), res)
}

#[derive(Debug, Clone)]
pub struct LemmaReport<T> {
    /// `U_k = [l_{0..=k})` against `φ_dim>k < 2^{-k}`, for `k = 1..`.
    pub verdicts: Vec<Verdict<T>>,
    /// Intersection of the cones, including the first one that leaves the
    /// universe.
    pub intersection: OpenSet<T>,
}

impl<T: Real> LemmaReport<T> {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(|v| v.is_forced()) && self.intersection.is_empty()
    }
}

/// Checks along the cone chain `U_k = [l_{0..=k})` that each `U_k` forces
/// `φ_dim>k < 2^{-k}` and that the chain has empty intersection.
pub fn dimension_lemma<T: Real>(
    sheaf: &LatticeSheaf<T>,
    kmax: usize,
    res: &Resolution<T>,
) -> Result<LemmaReport<T>, SheafError> {
    let size = sheaf.size();
    let cone = |k: usize| OpenSet::cone(index_set(0..=k), size);
    let mut verdicts = Vec::new();
    for k in 1..=kmax.min(size - 1) {
        let u = cone(k);
        let cond = Condition::new(phi_dim_greater(k), Comparator::Lt, lit(0.5f64.powi(k as i32)));
        verdicts.push(force_local(sheaf, &u, &cond, &SectionBinding::new(), res)?);
    }
    let intersection = (2..=kmax + 1).fold(cone(1), |acc, k| acc.intersect(&cone(k)));
    Ok(LemmaReport { verdicts, intersection })
}
