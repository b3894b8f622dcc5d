//! Forcing at a base point.

use crate::logic::{lipschitz, Comparator, Condition, Formula};
use crate::scalar::{lit, Real};

use super::base::{BasePoint, OpenSet};
use super::section::Section;
use super::verdict::{Certificate, Verdict};
use super::{fiber_value, has_atoms, used_sections, MetricSheaf, Resolution, SectionBinding, SheafError};

/// Strict direction of a forcing sub-goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Dir {
    Lt,
    Gt,
}

impl Dir {
    pub(crate) fn flip(self) -> Dir {
        match self {
            Dir::Lt => Dir::Gt,
            Dir::Gt => Dir::Lt,
        }
    }
}

/// Outcome of the threshold pre-check shared by point and local forcing.
pub(crate) enum Trivial<T> {
    Forced(Verdict<T>),
    /// The goal cannot be forced with a margin above `tol`.
    Hopeless,
    Open,
}

/// Values live in `[0, 1]`, so thresholds outside it decide the goal alone.
pub(crate) fn trivial<T: Real>(dir: Dir, c: T, tol: T) -> Trivial<T> {
    match dir {
        Dir::Lt if c > T::one() + tol => Trivial::Forced(Verdict::forced(c - T::one(), Certificate::Threshold)),
        Dir::Gt if c < -tol => Trivial::Forced(Verdict::forced(-c, Certificate::Threshold)),
        Dir::Lt if c <= tol => Trivial::Hopeless,
        Dir::Gt if c >= T::one() - tol => Trivial::Hopeless,
        _ => Trivial::Open,
    }
}

/// Signed margin of a value enclosure against `dir c`, for refutation.
pub(crate) fn refutation<T: Real>(dir: Dir, c: T, lower: T, upper: T, tol: T) -> Option<T> {
    match dir {
        Dir::Lt if lower >= c + tol => Some(c - lower),
        Dir::Gt if upper <= c - tol => Some(upper - c),
        _ => None,
    }
}

pub(crate) fn extend<T: Real>(b: &SectionBinding<T>, var: &str, s: &super::Section<T>) -> SectionBinding<T> {
    let mut out = b.clone();
    out.insert(var.to_string(), s.clone());
    out
}

struct PointForcer<'a, T: Real, S: MetricSheaf<T>> {
    sheaf: &'a S,
    res: &'a Resolution<T>,
}

impl<'a, T: Real, S: MetricSheaf<T>> PointForcer<'a, T, S> {
    fn fallback(
        &self,
        x: &BasePoint<T>,
        phi: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
    ) -> Result<Verdict<T>, SheafError> {
        if !want_refute {
            return Ok(Verdict::unknown(T::zero()));
        }
        let e = fiber_value(self.sheaf, x, phi, b)?;
        Ok(match refutation(dir, c, e.lower, e.upper, self.res.tol) {
            Some(m) => Verdict::refuted(m, Certificate::Value(e)),
            None => Verdict::unknown(match dir {
                Dir::Lt => c - e.upper,
                Dir::Gt => e.lower - c,
            }),
        })
    }

    /// `need` is the margin the caller must see; witness searches stop at the
    /// first section that clears it.
    #[allow(clippy::too_many_arguments)]
    fn go(
        &self,
        x: &BasePoint<T>,
        phi: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
        need: T,
    ) -> Result<Verdict<T>, SheafError> {
        let tol = self.res.tol;
        match phi {
            Formula::Const0 | Formula::Const1 | Formula::AtomDist(..) | Formula::AtomRel(..) => {
                let e = fiber_value(self.sheaf, x, phi, b)?;
                let m = match dir {
                    Dir::Lt => c - e.upper,
                    Dir::Gt => e.lower - c,
                };
                return Ok(Verdict::from_margin(m, tol, Certificate::Value(e)));
            }
            _ => {}
        }
        match trivial(dir, c, tol) {
            Trivial::Forced(v) => return Ok(v),
            Trivial::Hopeless => return self.fallback(x, phi, dir, c, b, want_refute),
            Trivial::Open => {}
        }
        match phi {
            Formula::Half(f) => Ok(self.go(x, f, dir, c + c, b, want_refute, need + need)?.scaled(lit(0.5))),
            Formula::Negation(f) => self.go(x, f, dir.flip(), T::one() - c, b, want_refute, need),
            Formula::TruncSub(one, f) if **one == Formula::Const1 => {
                self.go(x, f, dir.flip(), T::one() - c, b, want_refute, need)
            }
            Formula::Max(p, q) | Formula::Min(p, q) => {
                let conj = matches!((phi, dir), (Formula::Max(..), Dir::Lt) | (Formula::Min(..), Dir::Gt));
                let first = self.go(x, p, dir, c, b, want_refute, need)?;
                if conj && first.is_refuted() || !conj && first.is_forced() && first.margin > need {
                    return Ok(first);
                }
                let second = self.go(x, q, dir, c, b, want_refute, need)?;
                Ok(if conj { first.and(second) } else { first.or(second) })
            }
            Formula::TruncSub(p, q) => self.trunc_sub(x, phi, p, q, dir, c, b, want_refute),
            Formula::Inf(v, body) | Formula::Sup(v, body) => {
                let is_inf = matches!(phi, Formula::Inf(..));
                if is_inf == (dir == Dir::Lt) {
                    self.witness(x, phi, v, body, dir, c, b, want_refute, need)
                } else {
                    self.uniform(x, phi, v, body, dir, c, b, want_refute, need)
                }
            }
            _ => unreachable!("atoms handled above"),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn trunc_sub(
        &self,
        x: &BasePoint<T>,
        phi: &Formula,
        p: &Formula,
        q: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
    ) -> Result<Verdict<T>, SheafError> {
        let tol = self.res.tol;
        let e = fiber_value(self.sheaf, x, q, b)?;
        if dir == Dir::Lt && e.lower >= T::one() - tol {
            return Ok(Verdict::forced(c, Certificate::Case { name: "psi=1", parts: vec![Certificate::Value(e)] }));
        }
        // "ψ = r" needs a resolved fiber value; otherwise bound ψ by its interval
        if e.width() > tol {
            let v = match dir {
                Dir::Lt => self.go(x, p, Dir::Lt, e.lower + c, b, false, tol)?,
                Dir::Gt => self.go(x, p, Dir::Gt, e.upper + c, b, false, tol)?,
            };
            return if v.is_forced() {
                Ok(v.tagged("interval"))
            } else {
                self.fallback(x, phi, dir, c, b, want_refute)
            };
        }
        let r = e.mid();
        if dir == Dir::Gt {
            let v = self.go(x, p, Dir::Gt, r + c, b, false, self.res.tol)?;
            return if v.is_forced() {
                Ok(v.tagged("phi>r+eps"))
            } else {
                self.fallback(x, phi, dir, c, b, want_refute)
            };
        }
        let below = self.go(x, p, Dir::Lt, r, b, false, self.res.tol)?;
        if below.is_forced() {
            return Ok(Verdict::forced(c, Certificate::Case { name: "(i) phi<r", parts: vec![below.certificate] }));
        }
        let above = self.go(x, p, Dir::Gt, r, b, false, self.res.tol)?;
        if !above.is_forced() {
            let ep = fiber_value(self.sheaf, x, p, b)?;
            if ep.width() <= tol && (ep.mid() - r).abs() <= tol {
                let v = Verdict::from_margin(c - tol - tol, tol, Certificate::Value(ep));
                if v.is_forced() {
                    return Ok(v.tagged("(ii) phi=r"));
                }
            }
        } else {
            let close = self.go(x, p, Dir::Lt, r + c, b, false, self.res.tol)?;
            if close.is_forced() {
                return Ok(close.tagged("(iii) r<phi<r+delta"));
            }
        }
        self.fallback(x, phi, dir, c, b, want_refute)
    }

    /// `inf < c` and `sup > c`: some section at `x` witnesses the body.
    #[allow(clippy::too_many_arguments)]
    fn witness(
        &self,
        x: &BasePoint<T>,
        phi: &Formula,
        v: &str,
        body: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
        need: T,
    ) -> Result<Verdict<T>, SheafError> {
        let u = self.sheaf.base().neighborhood(x, self.res.max_refinement);
        // first section clearing `need`, else the widest margin; either way the
        // choice is monotone in c
        let mut best: Option<(Section<T>, Verdict<T>)> = None;
        for mu in self.sheaf.sections_at(&u).sections {
            if !mu.domain.contains(x) {
                continue;
            }
            let sub = self.go(x, body, dir, c, &extend(b, v, &mu), false, need)?;
            if sub.is_forced() && best.as_ref().is_none_or(|(_, w)| sub.margin > w.margin) {
                let enough = sub.margin > need;
                best = Some((mu, sub));
                if enough {
                    break;
                }
            }
        }
        match best {
            Some((mu, sub)) => {
                Ok(Verdict::forced(sub.margin, Certificate::Witness { section: mu, inner: Box::new(sub.certificate) }))
            }
            None => self.fallback(x, phi, dir, c, b, want_refute),
        }
    }

    /// `inf > c` and `sup < c`: a neighbourhood and a margin δ work for every
    /// sampled point and section.
    #[allow(clippy::too_many_arguments)]
    fn uniform(
        &self,
        x: &BasePoint<T>,
        phi: &Formula,
        v: &str,
        body: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
        need: T,
    ) -> Result<Verdict<T>, SheafError> {
        if want_refute {
            let refuted = self.fallback(x, phi, dir, c, b, true)?;
            if refuted.is_refuted() {
                return Ok(refuted);
            }
        }
        let lip = lipschitz(self.sheaf.signature(), body, v);
        let domains =
            used_sections(phi, b).into_iter().fold(self.sheaf.base().whole(), |acc, s| acc.intersect(&s.domain));
        for level in 0..=self.res.max_refinement {
            let u = self.sheaf.base().neighborhood(x, level).intersect(&domains);
            if !u.contains(x) {
                continue;
            }
            let sample = self.sheaf.sections_at(&u);
            let slack = match sample.covering_radius {
                Some(r) if lip.is_finite() => lit::<T>(lip) * r,
                _ => break,
            };
            let mut ys = u.sample(self.res.grid);
            ys.push(x.clone());
            let mut worst: Option<T> = None;
            let mut checks = 0;
            'points: for y in &ys {
                for mu in &sample.sections {
                    checks += 1;
                    let sub = self.go(y, body, dir, c, &extend(b, v, mu), false, need + slack)?;
                    if !sub.is_forced() {
                        worst = None;
                        break 'points;
                    }
                    worst = Some(worst.map_or(sub.margin, |w: T| w.min(sub.margin)));
                }
            }
            if let Some(m) = worst {
                let m = m - slack;
                if m > self.res.tol {
                    return Ok(Verdict::forced(m, Certificate::Neighborhood { set: u, delta: m / lit(2.0), checks }));
                }
            }
        }
        Ok(Verdict::unknown(T::zero()))
    }
}

fn check_domains<T: Real>(x: &BasePoint<T>, phi: &Formula, binding: &SectionBinding<T>) -> Result<(), SheafError> {
    for s in used_sections(phi, binding) {
        if !s.domain.contains(x) {
            return Err(SheafError::OutsideDomain { section: s.to_string(), point: x.to_string() });
        }
    }
    Ok(())
}

/// Point forcing `A ⊩_x cond` with sections bound to the free variables.
/// Non-strict comparators are the negations of the opposite strict ones.
pub fn force_point<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    x: &BasePoint<T>,
    cond: &Condition<T>,
    binding: &SectionBinding<T>,
    res: &Resolution<T>,
) -> Result<Verdict<T>, SheafError> {
    check_domains(x, &cond.formula, binding)?;
    let f = PointForcer { sheaf, res };
    let phi = &cond.formula;
    let c = cond.threshold;
    match cond.comparator {
        Comparator::Lt => f.go(x, phi, Dir::Lt, c, binding, true, res.tol),
        Comparator::Gt => f.go(x, phi, Dir::Gt, c, binding, true, res.tol),
        Comparator::Le => Ok(f.go(x, phi, Dir::Gt, c, binding, true, res.tol)?.negate()),
        Comparator::Ge => Ok(f.go(x, phi, Dir::Lt, c, binding, true, res.tol)?.negate()),
    }
}

/// Open neighbourhood of `x` on which `cond` is forced at every sampled point.
pub fn neighborhood_witness<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    x: &BasePoint<T>,
    cond: &Condition<T>,
    binding: &SectionBinding<T>,
    res: &Resolution<T>,
) -> Result<OpenSet<T>, SheafError> {
    if !has_atoms(&cond.formula) {
        let v = force_point(sheaf, x, cond, binding, res)?;
        return if v.is_forced() {
            Ok(sheaf.base().whole())
        } else {
            Err(SheafError::NoNeighborhood(0, format!("{cond} is not forced")))
        };
    }
    let domains =
        used_sections(&cond.formula, binding).into_iter().fold(sheaf.base().whole(), |acc, s| acc.intersect(&s.domain));
    let mut last = String::new();
    for level in 0..=res.max_refinement {
        let u = sheaf.base().neighborhood(x, level).intersect(&domains);
        if !u.contains(x) {
            continue;
        }
        let mut ys = u.sample(res.grid);
        ys.push(x.clone());
        let mut ok = true;
        for y in &ys {
            let v = force_point(sheaf, y, cond, binding, res)?;
            if !v.is_forced() {
                last = format!("{} at {y}", v.status);
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(u);
        }
    }
    Err(SheafError::NoNeighborhood(res.max_refinement, last))
}
