use std::fmt;

use super::base::OpenSet;
use super::section::Section;
use crate::logic::ValueInterval;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Forced,
    Refuted,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Forced => "FORCED",
            Status::Refuted => "REFUTED",
            Status::Unknown => "UNKNOWN",
        })
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T> {
    None,
    /// Fiber value enclosure at a point.
    Value(ValueInterval<T>),
    /// Extremum over a sample grid of an open set.
    Grid {
        points: usize,
        extremum: T,
        spread: T,
    },
    /// Trivially decided by the threshold alone.
    Threshold,
    Witness {
        section: Section<T>,
        inner: Box<Certificate<T>>,
    },
    Neighborhood {
        set: OpenSet<T>,
        delta: T,
        checks: usize,
    },
    Cover {
        cells: Vec<(OpenSet<T>, Certificate<T>)>,
    },
    Case {
        name: &'static str,
        parts: Vec<Certificate<T>>,
    },
}

impl<T: Real> Certificate<T> {
    pub fn summary(&self) -> String {
        match self {
            Certificate::None => "-".into(),
            Certificate::Value(v) => format!("value [{:.6}, {:.6}]", v.lower, v.upper),
            Certificate::Grid { points, extremum, spread } => {
                format!("grid {points} pts, extremum {extremum:.6} +- {spread:.2e}")
            }
            Certificate::Threshold => "threshold".into(),
            Certificate::Witness { section, .. } => format!("witness {section}"),
            Certificate::Neighborhood { set, delta, checks } => {
                format!("nbhd {set}, delta {delta:.3e}, {checks} checks")
            }
            Certificate::Cover { cells } => format!("cover of {} cells", cells.len()),
            Certificate::Case { name, parts } => match parts.first() {
                Some(p) if parts.len() == 1 => format!("{name}: {}", p.summary()),
                _ => (*name).to_string(),
            },
        }
    }
}

/// Three-valued forcing answer. `margin` is signed: positive in favour of the
/// condition, negative against.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T> {
    pub status: Status,
    pub margin: T,
    pub certificate: Certificate<T>,
}

impl<T: Real> Verdict<T> {
    pub fn forced(margin: T, certificate: Certificate<T>) -> Self {
        Verdict { status: Status::Forced, margin, certificate }
    }

    pub fn refuted(margin: T, certificate: Certificate<T>) -> Self {
        Verdict { status: Status::Refuted, margin, certificate }
    }

    pub fn unknown(margin: T) -> Self {
        Verdict { status: Status::Unknown, margin, certificate: Certificate::None }
    }

    /// Classifies a signed margin against the tolerance band.
    pub fn from_margin(margin: T, tol: T, certificate: Certificate<T>) -> Self {
        let status = if margin > tol {
            Status::Forced
        } else if margin < -tol {
            Status::Refuted
        } else {
            Status::Unknown
        };
        Verdict { status, margin, certificate }
    }

    pub fn is_forced(&self) -> bool {
        self.status == Status::Forced
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }

    /// Kleene conjunction.
    pub fn and(self, other: Self) -> Self {
        use Status::*;
        let status = match (self.status, other.status) {
            (Refuted, _) | (_, Refuted) => Refuted,
            (Forced, Forced) => Forced,
            _ => Unknown,
        };
        let margin = self.margin.min(other.margin);
        Verdict {
            status,
            margin,
            certificate: Certificate::Case { name: "and", parts: vec![self.certificate, other.certificate] },
        }
    }

    /// Kleene disjunction.
    pub fn or(self, other: Self) -> Self {
        use Status::*;
        let status = match (self.status, other.status) {
            (Forced, _) | (_, Forced) => Forced,
            (Refuted, Refuted) => Refuted,
            _ => Unknown,
        };
        let margin = self.margin.max(other.margin);
        let parts = match (self.status, other.status) {
            (Forced, _) => vec![self.certificate],
            (_, Forced) => vec![other.certificate],
            _ => vec![self.certificate, other.certificate],
        };
        Verdict { status, margin, certificate: Certificate::Case { name: "or", parts } }
    }

    /// Rescales the margin; the status is kept.
    pub fn scaled(self, k: T) -> Self {
        Verdict { margin: self.margin * k, ..self }
    }

    pub fn tagged(self, name: &'static str) -> Self {
        Verdict { certificate: Certificate::Case { name, parts: vec![self.certificate] }, ..self }
    }

    /// Swaps FORCED and REFUTED and flips the margin.
    pub fn negate(self) -> Self {
        let status = match self.status {
            Status::Forced => Status::Refuted,
            Status::Refuted => Status::Forced,
            Status::Unknown => Status::Unknown,
        };
        Verdict { status, margin: -self.margin, certificate: self.certificate }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: Status, m: f64) -> Verdict<f64> {
        Verdict { status: s, margin: m, certificate: Certificate::None }
    }

    #[test]
    fn kleene_tables() {
        use Status::*;
        let all = [Forced, Refuted, Unknown];
        for a in all {
            for b in all {
                let and = v(a, 0.0).and(v(b, 0.0)).status;
                let or = v(a, 0.0).or(v(b, 0.0)).status;
                assert_eq!(and == Forced, a == Forced && b == Forced);
                assert_eq!(and == Refuted, a == Refuted || b == Refuted);
                assert_eq!(or == Forced, a == Forced || b == Forced);
                assert_eq!(or == Refuted, a == Refuted && b == Refuted);
            }
        }
    }

    #[test]
    fn margin_band() {
        assert_eq!(Verdict::from_margin(0.1, 1e-3, Certificate::None).status, Status::Forced);
        assert_eq!(Verdict::from_margin(-0.1, 1e-3, Certificate::None).status, Status::Refuted);
        assert_eq!(Verdict::from_margin(5e-4, 1e-3, Certificate::None).status, Status::Unknown);
    }
}
