//! Base spaces, their basic open sets and filter chains.

use std::f64::consts::TAU;
use std::fmt;

use crate::scalar::{lit, to_f64, Real};

/// Index subsets of a finite universe, as bit masks. Universes are capped at 64.
pub type IndexSet = u64;

pub fn index_set(indices: impl IntoIterator<Item = usize>) -> IndexSet {
    indices.into_iter().fold(0, |m, i| m | (1u64 << i))
}

pub fn universe_mask(size: usize) -> IndexSet {
    if size >= 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

fn fmt_index_set(f: &mut fmt::Formatter<'_>, s: IndexSet) -> fmt::Result {
    let items: Vec<String> = (0..64).filter(|i| s >> i & 1 == 1).map(|i| i.to_string()).collect();
    write!(f, "{{{}}}", items.join(","))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseSpace<T> {
    /// Open interval `(a, b)`; `b` may be infinite.
    RealInterval {
        a: T,
        b: T,
    },
    Circle,
    /// Subsets of `{0, .., size-1}` ordered by inclusion, with the upward-cone
    /// topology.
    FiniteSubsetLattice {
        size: usize,
    },
    Product(Box<BaseSpace<T>>, Box<BaseSpace<T>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BasePoint<T> {
    Real(T),
    /// Angle in `[0, 2π)`.
    Angle(T),
    Subset(IndexSet),
    Pair(Box<BasePoint<T>>, Box<BasePoint<T>>),
}

impl<T: Real> BasePoint<T> {
    pub fn angle(theta: T) -> Self {
        BasePoint::Angle(wrap(theta))
    }

    pub fn as_real(&self) -> Option<T> {
        match self {
            BasePoint::Real(t) | BasePoint::Angle(t) => Some(*t),
            _ => None,
        }
    }
}

impl<T: Real> fmt::Display for BasePoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Real(t) => write!(f, "{t}"),
            BasePoint::Angle(t) => write!(f, "angle {t}"),
            BasePoint::Subset(s) => fmt_index_set(f, *s),
            BasePoint::Pair(a, b) => write!(f, "({a}, {b})"),
        }
    }
}

fn wrap<T: Real>(theta: T) -> T {
    let tau: T = lit(TAU);
    let r = theta % tau;
    if r < T::zero() {
        r + tau
    } else {
        r
    }
}

/// A basic open set, or a finite union of them.
#[derive(Debug, Clone, PartialEq)]
pub enum OpenSet<T> {
    Empty,
    Interval {
        lo: T,
        hi: T,
    },
    /// Counter-clockwise arc from `start` of length `len`; `len >= 2π` is the
    /// whole circle.
    Arc {
        start: T,
        len: T,
    },
    /// `[root) = { l : root ⊆ l ⊆ universe }`; empty when `root` escapes the
    /// universe.
    Cone {
        root: IndexSet,
        size: usize,
    },
    Product(Box<OpenSet<T>>, Box<OpenSet<T>>),
    Union(Vec<OpenSet<T>>),
}

impl<T: Real> OpenSet<T> {
    pub fn interval(lo: T, hi: T) -> Self {
        if lo < hi {
            OpenSet::Interval { lo, hi }
        } else {
            OpenSet::Empty
        }
    }

    pub fn arc(start: T, len: T) -> Self {
        if len <= T::zero() {
            OpenSet::Empty
        } else if len >= lit(TAU) {
            OpenSet::Arc { start: T::zero(), len: lit(TAU) }
        } else {
            OpenSet::Arc { start: wrap(start), len }
        }
    }

    /// Arc of half-width `h` centred at `theta`.
    pub fn arc_around(theta: T, h: T) -> Self {
        Self::arc(theta - h, h + h)
    }

    pub fn full_circle() -> Self {
        Self::arc(T::zero(), lit(TAU))
    }

    pub fn cone(root: IndexSet, size: usize) -> Self {
        if root & !universe_mask(size) != 0 {
            OpenSet::Empty
        } else {
            OpenSet::Cone { root, size }
        }
    }

    pub fn union(parts: Vec<OpenSet<T>>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                OpenSet::Empty => {}
                OpenSet::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => OpenSet::Empty,
            1 => flat.pop().expect("one part"),
            _ => OpenSet::Union(flat),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            OpenSet::Empty => true,
            OpenSet::Product(a, b) => a.is_empty() || b.is_empty(),
            OpenSet::Union(parts) => parts.iter().all(|p| p.is_empty()),
            _ => false,
        }
    }

    pub fn contains(&self, x: &BasePoint<T>) -> bool {
        match (self, x) {
            (OpenSet::Interval { lo, hi }, BasePoint::Real(t)) => lo < t && t < hi,
            (OpenSet::Arc { start, len }, BasePoint::Angle(t)) => {
                *len >= lit(TAU) || wrap(*t - *start) < *len && wrap(*t - *start) > T::zero()
            }
            (OpenSet::Cone { root, size }, BasePoint::Subset(s)) => s & root == *root && s & !universe_mask(*size) == 0,
            (OpenSet::Product(a, b), BasePoint::Pair(x, y)) => a.contains(x) && b.contains(y),
            (OpenSet::Union(parts), _) => parts.iter().any(|p| p.contains(x)),
            _ => false,
        }
    }

    pub fn intersect(&self, other: &OpenSet<T>) -> OpenSet<T> {
        match (self, other) {
            (OpenSet::Empty, _) | (_, OpenSet::Empty) => OpenSet::Empty,
            (OpenSet::Union(parts), o) | (o, OpenSet::Union(parts)) => {
                OpenSet::union(parts.iter().map(|p| p.intersect(o)).collect())
            }
            (OpenSet::Interval { lo: a, hi: b }, OpenSet::Interval { lo: c, hi: d }) => {
                OpenSet::interval(a.max(*c), b.min(*d))
            }
            (OpenSet::Arc { start: s1, len: l1 }, OpenSet::Arc { start: s2, len: l2 }) => {
                arc_intersect(*s1, *l1, *s2, *l2)
            }
            (OpenSet::Cone { root: r1, size: n1 }, OpenSet::Cone { root: r2, size: n2 }) => {
                OpenSet::cone(r1 | r2, (*n1).min(*n2))
            }
            (OpenSet::Product(a, b), OpenSet::Product(c, d)) => {
                let (x, y) = (a.intersect(c), b.intersect(d));
                if x.is_empty() || y.is_empty() {
                    OpenSet::Empty
                } else {
                    OpenSet::Product(Box::new(x), Box::new(y))
                }
            }
            _ => OpenSet::Empty,
        }
    }

    /// `self ⊆ other`. Exact for basic sets; for unions, every part must sit
    /// inside a single part of `other`.
    pub fn is_subset(&self, other: &OpenSet<T>) -> bool {
        match (self, other) {
            (OpenSet::Empty, _) => true,
            (OpenSet::Union(parts), o) => parts.iter().all(|p| p.is_subset(o)),
            (s, OpenSet::Union(parts)) => parts.iter().any(|p| s.is_subset(p)),
            (OpenSet::Interval { lo: a, hi: b }, OpenSet::Interval { lo: c, hi: d }) => a >= c && b <= d,
            (OpenSet::Arc { start: s1, len: l1 }, OpenSet::Arc { start: s2, len: l2 }) => {
                let slack: T = lit(1e-12);
                let mut off = wrap(*s1 - *s2);
                if off > lit::<T>(TAU) - slack {
                    off -= lit(TAU);
                }
                *l2 >= lit(TAU) || (off >= -slack && off + *l1 <= *l2 + slack && *l1 < lit(TAU))
            }
            (OpenSet::Cone { root: r1, size: n1 }, OpenSet::Cone { root: r2, size: n2 }) => r1 & r2 == *r2 && n1 <= n2,
            (OpenSet::Product(a, b), OpenSet::Product(c, d)) => a.is_subset(c) && b.is_subset(d),
            _ => false,
        }
    }

    /// Sample points of the set; roughly `n` per one-dimensional piece.
    pub fn sample(&self, n: usize) -> Vec<BasePoint<T>> {
        let n = n.max(1);
        match self {
            OpenSet::Empty => vec![],
            OpenSet::Interval { lo, hi } => {
                if hi.is_infinite() {
                    // geometric march away from the finite end
                    let step = if lo.abs() > T::one() { lo.abs() } else { T::one() };
                    (0..n).map(|j| BasePoint::Real(*lo + step * lit::<T>(2f64.powi(j as i32) / 2.0))).collect()
                } else {
                    (0..n).map(|j| BasePoint::Real(*lo + (*hi - *lo) * lit::<T>((j as f64 + 0.5) / n as f64))).collect()
                }
            }
            OpenSet::Arc { start, len } => {
                (0..n).map(|j| BasePoint::angle(*start + *len * lit::<T>((j as f64 + 0.5) / n as f64))).collect()
            }
            OpenSet::Cone { root, size } => {
                let full = universe_mask(*size);
                let mut pts = vec![*root];
                for i in 0..*size {
                    let s = root | (1 << i);
                    if !pts.contains(&s) {
                        pts.push(s);
                    }
                }
                if !pts.contains(&full) {
                    pts.push(full);
                }
                pts.into_iter().map(BasePoint::Subset).collect()
            }
            OpenSet::Product(a, b) => {
                let m = ((n as f64).sqrt().ceil() as usize).max(1);
                let (xs, ys) = (a.sample(m), b.sample(m));
                xs.iter()
                    .flat_map(|x| ys.iter().map(move |y| BasePoint::Pair(Box::new(x.clone()), Box::new(y.clone()))))
                    .collect()
            }
            OpenSet::Union(parts) => parts.iter().flat_map(|p| p.sample(n)).collect(),
        }
    }

    /// Two overlapping open halves whose union is `self`. Cones are minimal
    /// neighbourhoods of their root and do not split.
    pub fn split(&self) -> Vec<OpenSet<T>> {
        let overlap: T = lit(0.01);
        match self {
            OpenSet::Interval { lo, hi } if hi.is_finite() => {
                let mid = (*lo + *hi) / lit(2.0);
                let w = (*hi - *lo) * overlap;
                vec![OpenSet::interval(*lo, mid + w), OpenSet::interval(mid - w, *hi)]
            }
            OpenSet::Interval { lo, hi } => {
                let cut = *lo + if lo.abs() > T::one() { lo.abs() } else { T::one() };
                vec![OpenSet::interval(*lo, cut + overlap), OpenSet::interval(cut - overlap, *hi)]
            }
            OpenSet::Arc { start, len } => {
                let half = *len / lit(2.0);
                let w = *len * overlap;
                vec![OpenSet::arc(*start, half + w), OpenSet::arc(*start + half - w, half + w)]
            }
            OpenSet::Product(a, b) => {
                let pieces = a.split();
                if pieces.len() > 1 {
                    pieces.into_iter().map(|p| OpenSet::Product(Box::new(p), b.clone())).collect()
                } else {
                    b.split().into_iter().map(|q| OpenSet::Product(a.clone(), Box::new(q))).collect()
                }
            }
            OpenSet::Union(parts) => parts.clone(),
            other => vec![other.clone()],
        }
    }

    /// Rough size used to report cover fractions: length, arc length,
    /// product of sizes, or 1 for a cone.
    pub fn measure(&self) -> f64 {
        match self {
            OpenSet::Empty => 0.0,
            OpenSet::Interval { lo, hi } => to_f64(*hi - *lo),
            OpenSet::Arc { len, .. } => to_f64(*len),
            OpenSet::Cone { .. } => 1.0,
            OpenSet::Product(a, b) => a.measure() * b.measure(),
            OpenSet::Union(parts) => parts.iter().map(|p| p.measure()).sum(),
        }
    }
}

fn arc_intersect<T: Real>(s1: T, l1: T, s2: T, l2: T) -> OpenSet<T> {
    let tau: T = lit(TAU);
    if l1 >= tau {
        return OpenSet::arc(s2, l2);
    }
    if l2 >= tau {
        return OpenSet::arc(s1, l1);
    }
    // unroll the second arc relative to the first start
    let off = wrap(s2 - s1);
    let mut parts = Vec::new();
    for shift in [T::zero(), -tau] {
        let a = (off + shift).max(T::zero());
        let b = (off + shift + l2).min(l1);
        if a < b {
            parts.push(OpenSet::arc(s1 + a, b - a));
        }
    }
    OpenSet::union(parts)
}

impl<T: Real> fmt::Display for OpenSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenSet::Empty => write!(f, "empty"),
            OpenSet::Interval { lo, hi } => write!(f, "({lo}, {hi})"),
            OpenSet::Arc { start, len } => write!(f, "arc({start}, +{len})"),
            OpenSet::Cone { root, .. } => {
                write!(f, "[")?;
                fmt_index_set(f, *root)?;
                write!(f, ")")
            }
            OpenSet::Product(a, b) => write!(f, "{a} x {b}"),
            OpenSet::Union(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "{}", s.join(" u "))
            }
        }
    }
}

impl<T: Real> BaseSpace<T> {
    pub fn is_regular(&self) -> bool {
        match self {
            BaseSpace::RealInterval { .. } | BaseSpace::Circle => true,
            BaseSpace::FiniteSubsetLattice { .. } => false,
            BaseSpace::Product(a, b) => a.is_regular() && b.is_regular(),
        }
    }

    pub fn whole(&self) -> OpenSet<T> {
        match self {
            BaseSpace::RealInterval { a, b } => OpenSet::interval(*a, *b),
            BaseSpace::Circle => OpenSet::full_circle(),
            BaseSpace::FiniteSubsetLattice { size } => OpenSet::cone(0, *size),
            BaseSpace::Product(a, b) => OpenSet::Product(Box::new(a.whole()), Box::new(b.whole())),
        }
    }

    pub fn contains(&self, x: &BasePoint<T>) -> bool {
        self.whole().contains(x)
    }

    /// Basic neighbourhood of `x` at refinement `level`; each level halves the
    /// radius. On the lattice the cone of `x` is already the least
    /// neighbourhood.
    pub fn neighborhood(&self, x: &BasePoint<T>, level: usize) -> OpenSet<T> {
        let scale: T = lit(0.5f64.powi(level as i32));
        match (self, x) {
            (BaseSpace::RealInterval { a, b }, BasePoint::Real(t)) => {
                let room = (*t - *a).min(*b - *t);
                let h0 = (room / lit(2.0)).min(T::one());
                OpenSet::interval(*t - h0 * scale, *t + h0 * scale)
            }
            (BaseSpace::Circle, BasePoint::Angle(t)) => OpenSet::arc_around(*t, lit::<T>(TAU / 8.0) * scale),
            (BaseSpace::FiniteSubsetLattice { size }, BasePoint::Subset(s)) => OpenSet::cone(*s, *size),
            (BaseSpace::Product(a, b), BasePoint::Pair(x, y)) => {
                OpenSet::Product(Box::new(a.neighborhood(x, level)), Box::new(b.neighborhood(y, level)))
            }
            _ => OpenSet::Empty,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    ShrinkToZero,
    GrowToInfinity,
    ShrinkingArcs,
    Cones,
    Custom,
}

/// Descending chain `U_1 ⊇ U_2 ⊇ ...` of basic open sets generating a filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterChain<T> {
    pub sets: Vec<OpenSet<T>>,
    pub kind: ChainKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("chain element {0} is empty")]
    Empty(usize),
    #[error("chain element {0} is not contained in its predecessor")]
    NotDescending(usize),
}

impl<T: Real> FilterChain<T> {
    pub fn new(sets: Vec<OpenSet<T>>, kind: ChainKind) -> Result<Self, ChainError> {
        for (k, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(ChainError::Empty(k));
            }
            if k > 0 && !s.is_subset(&sets[k - 1]) {
                return Err(ChainError::NotDescending(k));
            }
        }
        Ok(FilterChain { sets, kind })
    }

    /// `{(0, 1/n) : n = 1..depth}`.
    pub fn shrink_to_zero(depth: usize) -> Self {
        let sets = (1..=depth).map(|n| OpenSet::interval(T::zero(), lit(1.0 / n as f64))).collect();
        FilterChain { sets, kind: ChainKind::ShrinkToZero }
    }

    /// `{(n, ∞) : n = 1..depth}`.
    pub fn grow_to_infinity(depth: usize) -> Self {
        let sets = (1..=depth).map(|n| OpenSet::interval(lit(n as f64), T::infinity())).collect();
        FilterChain { sets, kind: ChainKind::GrowToInfinity }
    }

    /// Arcs around `theta` of half-width `h0 / 2^k`.
    pub fn arcs_around(theta: T, h0: T, depth: usize) -> Self {
        let sets = (0..depth).map(|k| OpenSet::arc_around(theta, h0 * lit(0.5f64.powi(k as i32)))).collect();
        FilterChain { sets, kind: ChainKind::ShrinkingArcs }
    }

    /// `{[l_{I_k}) : k = 1..depth}` with `I_k = {0, .., k}` in a universe of
    /// `size` indices. Stops early once the cone leaves the universe.
    pub fn cones(size: usize, depth: usize) -> Self {
        let sets = (1..=depth).map(|k| OpenSet::cone(index_set(0..=k), size)).take_while(|s| !s.is_empty()).collect();
        FilterChain { sets, kind: ChainKind::Cones }
    }

    pub fn depth(&self) -> usize {
        self.sets.len()
    }

    pub fn deepest(&self) -> &OpenSet<T> {
        self.sets.last().expect("non-empty chain")
    }

    pub fn intersection(&self) -> OpenSet<T> {
        self.sets.iter().skip(1).fold(self.sets[0].clone(), |acc, s| acc.intersect(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_membership_and_intersection() {
        let a: OpenSet<f64> = OpenSet::cone(index_set([0, 1]), 5);
        let b = OpenSet::cone(index_set([2]), 5);
        assert!(a.contains(&BasePoint::Subset(index_set([0, 1, 4]))));
        assert!(!a.contains(&BasePoint::Subset(index_set([0, 4]))));
        assert_eq!(a.intersect(&b), OpenSet::cone(index_set([0, 1, 2]), 5));
        assert!(OpenSet::<f64>::cone(index_set([5]), 5).is_empty());
    }

    #[test]
    fn arc_intersection_across_zero() {
        let a: OpenSet<f64> = OpenSet::arc(6.0, 1.0);
        let b = OpenSet::arc(0.1, 1.0);
        let c = a.intersect(&b);
        assert!(c.contains(&BasePoint::angle(0.2)));
        assert!(!c.contains(&BasePoint::angle(0.05)));
        assert!(!c.contains(&BasePoint::angle(6.1)));
        assert!(c.is_subset(&a) && c.is_subset(&b));
    }

    #[test]
    fn arc_intersection_can_split_in_two() {
        let a: OpenSet<f64> = OpenSet::arc(0.0, 5.0);
        let b = OpenSet::arc(4.0, 3.0);
        match a.intersect(&b) {
            OpenSet::Union(parts) => assert_eq!(parts.len(), 2),
            other => panic!("expected two arcs, got {other}"),
        }
    }

    #[test]
    fn split_covers() {
        let u: OpenSet<f64> = OpenSet::interval(0.0, 1.0);
        let halves = u.split();
        for p in u.sample(40) {
            assert!(halves.iter().any(|h| h.contains(&p)));
        }
        let c: OpenSet<f64> = OpenSet::arc(5.0, 2.0);
        let halves = c.split();
        for p in c.sample(40) {
            assert!(halves.iter().any(|h| h.contains(&p)));
        }
    }

    #[test]
    fn chains_descend() {
        let c = FilterChain::<f64>::shrink_to_zero(6);
        assert!(FilterChain::new(c.sets.clone(), c.kind).is_ok());
        let c = FilterChain::<f64>::arcs_around(1.0, 0.5, 6);
        assert!(FilterChain::new(c.sets.clone(), c.kind).is_ok());
        let c = FilterChain::<f64>::cones(9, 20);
        assert_eq!(c.depth(), 8);
        assert!(FilterChain::new(c.sets.clone(), c.kind).is_ok());
        let bad = vec![OpenSet::interval(0.0, 0.5), OpenSet::interval(0.0, 1.0)];
        assert_eq!(FilterChain::new(bad, ChainKind::Custom), Err(ChainError::NotDescending(1)));
    }

    #[test]
    fn regularity_flags() {
        assert!(BaseSpace::<f64>::Circle.is_regular());
        assert!(!BaseSpace::<f64>::FiniteSubsetLattice { size: 4 }.is_regular());
    }
}
