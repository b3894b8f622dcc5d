use std::fmt;

use super::base::OpenSet;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum SectionKind<T> {
    /// Member of a named parametric family provided by the sheaf.
    Family { name: String, params: Vec<T> },
    /// Pointwise application of a function symbol to other sections.
    Apply { function: String, args: Vec<Section<T>> },
}

/// A continuous local section over `domain`.
#[derive(Debug, Clone, PartialEq)]
pub struct Section<T> {
    pub kind: SectionKind<T>,
    pub domain: OpenSet<T>,
}

impl<T: Real> Section<T> {
    pub fn family(name: &str, params: Vec<T>, domain: OpenSet<T>) -> Self {
        Section { kind: SectionKind::Family { name: name.to_string(), params }, domain }
    }

    /// `f(σ_1, .., σ_n)` on the common domain of the arguments.
    pub fn apply(function: &str, args: Vec<Section<T>>, whole: OpenSet<T>) -> Self {
        let domain = args.iter().fold(whole, |acc, s| acc.intersect(&s.domain));
        Section { kind: SectionKind::Apply { function: function.to_string(), args }, domain }
    }

    pub fn restrict(&self, u: &OpenSet<T>) -> Self {
        Section { kind: self.kind.clone(), domain: self.domain.intersect(u) }
    }

    pub fn with_domain(&self, domain: OpenSet<T>) -> Self {
        Section { kind: self.kind.clone(), domain }
    }
}

impl<T: Real> fmt::Display for Section<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SectionKind::Family { name, params } => {
                let p: Vec<String> = params.iter().map(|x| format!("{x}")).collect();
                write!(f, "{name}[{}]", p.join(","))
            }
            SectionKind::Apply { function, args } => {
                let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
                write!(f, "{function}({})", a.join(","))
            }
        }
    }
}

/// Sections defined on a common open set, with the radius (in every fiber
/// metric over that set) within which they approximate every fiber element.
#[derive(Debug, Clone)]
pub struct SectionSample<T> {
    pub sections: Vec<Section<T>>,
    pub covering_radius: Option<T>,
}
