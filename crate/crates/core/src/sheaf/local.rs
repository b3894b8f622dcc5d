//! Forcing on an open set.

use crate::logic::{lipschitz, Comparator, Condition, Formula};
use crate::scalar::{lit, Real};

use super::base::OpenSet;
use super::point::{extend, refutation, trivial, Dir, Trivial};
use super::section::Section;
use super::verdict::{Certificate, Status, Verdict};
use super::{fiber_value, used_sections, MetricSheaf, Resolution, SectionBinding, SheafError};

type CellCheck<'a, T> = dyn FnMut(&OpenSet<T>) -> Result<Verdict<T>, SheafError> + 'a;

struct LocalForcer<'a, T: Real, S: MetricSheaf<T>> {
    sheaf: &'a S,
    res: &'a Resolution<T>,
}

impl<'a, T: Real, S: MetricSheaf<T>> LocalForcer<'a, T, S> {
    /// Refutes by a fiber counterexample at a sampled point of `u`.
    fn fallback(
        &self,
        u: &OpenSet<T>,
        phi: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
    ) -> Result<Verdict<T>, SheafError> {
        if !want_refute {
            return Ok(Verdict::unknown(T::zero()));
        }
        for y in u.sample(self.res.grid) {
            let e = fiber_value(self.sheaf, &y, phi, b)?;
            if let Some(m) = refutation(dir, c, e.lower, e.upper, self.res.tol) {
                return Ok(Verdict::refuted(m, Certificate::Value(e)));
            }
        }
        Ok(Verdict::unknown(T::zero()))
    }

    /// Supremum (for `<`) or infimum (for `>`) of an atom over `u`, with the
    /// change under grid refinement as the uncertainty.
    fn atom(
        &self,
        u: &OpenSet<T>,
        phi: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
    ) -> Result<Verdict<T>, SheafError> {
        let extremum = |pts: usize| -> Result<Option<T>, SheafError> {
            let mut acc: Option<T> = None;
            for y in u.sample(pts) {
                let e = fiber_value(self.sheaf, &y, phi, b)?;
                acc = Some(match (acc, dir) {
                    (None, Dir::Lt) => e.upper,
                    (None, Dir::Gt) => e.lower,
                    (Some(a), Dir::Lt) => a.max(e.upper),
                    (Some(a), Dir::Gt) => a.min(e.lower),
                });
            }
            Ok(acc)
        };
        let (Some(coarse), Some(fine)) = (extremum(self.res.grid)?, extremum(2 * self.res.grid)?) else {
            return Ok(Verdict::unknown(T::zero()));
        };
        let (ext, raw) = match dir {
            Dir::Lt => (coarse.max(fine), c - coarse.max(fine)),
            Dir::Gt => (coarse.min(fine), coarse.min(fine) - c),
        };
        let spread = (fine - coarse).abs();
        let cert = Certificate::Grid { points: 3 * self.res.grid, extremum: ext, spread };
        let tol = self.res.tol;
        Ok(if raw - spread > tol {
            Verdict::forced(raw - spread, cert)
        } else if raw < -tol {
            Verdict::refuted(raw, cert)
        } else {
            Verdict { status: Status::Unknown, margin: raw - spread, certificate: cert }
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        &self,
        u: &OpenSet<T>,
        phi: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
        need: T,
    ) -> Result<Verdict<T>, SheafError> {
        if let Formula::Const0 | Formula::Const1 | Formula::AtomDist(..) | Formula::AtomRel(..) = phi {
            return self.atom(u, phi, dir, c, b);
        }
        match trivial(dir, c, self.res.tol) {
            Trivial::Forced(v) => return Ok(v),
            Trivial::Hopeless => return self.fallback(u, phi, dir, c, b, want_refute),
            Trivial::Open => {}
        }
        match phi {
            Formula::Half(f) => Ok(self.go(u, f, dir, c + c, b, want_refute, need + need)?.scaled(lit(0.5))),
            Formula::Negation(f) => self.go(u, f, dir.flip(), T::one() - c, b, want_refute, need),
            Formula::TruncSub(one, f) if **one == Formula::Const1 => {
                self.go(u, f, dir.flip(), T::one() - c, b, want_refute, need)
            }
            Formula::Max(p, q) | Formula::Min(p, q) => {
                let conj = matches!((phi, dir), (Formula::Max(..), Dir::Lt) | (Formula::Min(..), Dir::Gt));
                if conj {
                    let first = self.go(u, p, dir, c, b, want_refute, need)?;
                    if first.is_refuted() {
                        return Ok(first);
                    }
                    Ok(first.and(self.go(u, q, dir, c, b, want_refute, need)?))
                } else {
                    // V ∪ W = U: each dyadic cell forces one side
                    let v = self.cover(u, 0, &mut |cell| {
                        let first = self.go(cell, p, dir, c, b, false, need)?;
                        if first.is_forced() && first.margin > need {
                            return Ok(first);
                        }
                        Ok(first.or(self.go(cell, q, dir, c, b, false, need)?))
                    })?;
                    self.or_fallback(v, u, phi, dir, c, b, want_refute)
                }
            }
            Formula::TruncSub(p, q) => {
                let v = match dir {
                    Dir::Lt => self.trunc_sub_lt(u, p, q, c, b)?,
                    Dir::Gt => self.trunc_sub_gt(u, p, q, c, b)?,
                };
                self.or_fallback(v, u, phi, dir, c, b, want_refute)
            }
            Formula::Inf(var, body) | Formula::Sup(var, body) => {
                let is_inf = matches!(phi, Formula::Inf(..));
                let v = if is_inf == (dir == Dir::Lt) {
                    self.cover(u, 0, &mut |cell| self.cell_witness(cell, var, body, dir, c, b, need))?
                } else {
                    if want_refute {
                        let r = self.fallback(u, phi, dir, c, b, true)?;
                        if r.is_refuted() {
                            return Ok(r);
                        }
                    }
                    self.uniform(u, var, body, dir, c, b, need)?
                };
                self.or_fallback(v, u, phi, dir, c, b, want_refute)
            }
            _ => unreachable!("atoms handled above"),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn or_fallback(
        &self,
        v: Verdict<T>,
        u: &OpenSet<T>,
        phi: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        want_refute: bool,
    ) -> Result<Verdict<T>, SheafError> {
        if v.status != Status::Unknown {
            return Ok(v);
        }
        self.fallback(u, phi, dir, c, b, want_refute)
    }

    /// Dyadic cover search: `u` passes if `check(u)` is forced, or each of its
    /// halves passes, down to the configured depth.
    fn cover(&self, u: &OpenSet<T>, depth: usize, check: &mut CellCheck<'_, T>) -> Result<Verdict<T>, SheafError> {
        let here = check(u)?;
        if here.status != Status::Unknown {
            return Ok(here);
        }
        let cells = u.split();
        if depth >= self.res.cover_depth || cells.len() < 2 {
            return Ok(here);
        }
        let mut margin: Option<T> = None;
        let mut certs = Vec::new();
        for cell in cells {
            let v = self.cover(&cell, depth + 1, check)?;
            match v.status {
                Status::Forced => {
                    margin = Some(margin.map_or(v.margin, |m: T| m.min(v.margin)));
                    certs.push((cell, v.certificate));
                }
                Status::Refuted => return Ok(v),
                Status::Unknown => return Ok(Verdict::unknown(v.margin)),
            }
        }
        Ok(Verdict::forced(margin.expect("at least two cells"), Certificate::Cover { cells: certs }))
    }

    #[allow(clippy::too_many_arguments)]
    fn cell_witness(
        &self,
        cell: &OpenSet<T>,
        var: &str,
        body: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        need: T,
    ) -> Result<Verdict<T>, SheafError> {
        let mut best: Option<(Section<T>, Verdict<T>)> = None;
        for mu in self.sheaf.sections_at(cell).sections {
            let sub = self.go(cell, body, dir, c, &extend(b, var, &mu), false, need)?;
            if sub.is_forced() && best.as_ref().is_none_or(|(_, w)| sub.margin > w.margin) {
                let enough = sub.margin > need;
                best = Some((mu, sub));
                if enough {
                    break;
                }
            }
        }
        Ok(match best {
            Some((mu, sub)) => {
                Verdict::forced(sub.margin, Certificate::Witness { section: mu, inner: Box::new(sub.certificate) })
            }
            None => Verdict::unknown(T::zero()),
        })
    }

    /// `sup < ε` and `inf > ε` over the trivial cover: every sampled section
    /// forces the body with some `ε'` strictly inside `ε`.
    #[allow(clippy::too_many_arguments)]
    fn uniform(
        &self,
        u: &OpenSet<T>,
        var: &str,
        body: &Formula,
        dir: Dir,
        c: T,
        b: &SectionBinding<T>,
        need: T,
    ) -> Result<Verdict<T>, SheafError> {
        let sample = self.sheaf.sections_at(u);
        let lip = lipschitz(self.sheaf.signature(), body, var);
        let slack = match sample.covering_radius {
            Some(r) if lip.is_finite() => lit::<T>(lip) * r,
            _ => return Ok(Verdict::unknown(T::zero())),
        };
        let mut worst: Option<T> = None;
        for mu in &sample.sections {
            let sub = self.go(u, body, dir, c, &extend(b, var, mu), false, need + slack)?;
            if !sub.is_forced() {
                return Ok(Verdict::unknown(sub.margin));
            }
            worst = Some(worst.map_or(sub.margin, |w: T| w.min(sub.margin)));
        }
        let Some(m) = worst else { return Ok(Verdict::unknown(T::zero())) };
        let m = m - slack;
        if m > self.res.tol {
            Ok(Verdict::forced(
                m,
                Certificate::Neighborhood { set: u.clone(), delta: m / lit(2.0), checks: sample.sections.len() },
            ))
        } else {
            Ok(Verdict::unknown(m))
        }
    }

    fn thresholds(&self) -> Vec<T> {
        let n = self.res.threshold_grid.max(2);
        (1..n).map(|j| lit(j as f64 / n as f64)).collect()
    }

    /// The four-case clause for `φ ∸ ψ < ε`.
    fn trunc_sub_lt(
        &self,
        u: &OpenSet<T>,
        p: &Formula,
        q: &Formula,
        c: T,
        b: &SectionBinding<T>,
    ) -> Result<Verdict<T>, SheafError> {
        let tag = |name: &'static str, parts: Vec<Certificate<T>>, m: T| {
            Verdict::forced(m, Certificate::Case { name, parts })
        };
        // nothing can be forced on u if some point of u already fails
        let whole = Formula::trunc_sub(p.clone(), q.clone());
        for y in u.sample(self.res.grid) {
            let e = fiber_value(self.sheaf, &y, &whole, b)?;
            if e.lower >= c - self.res.tol {
                return Ok(Verdict::unknown(c - e.lower));
            }
        }
        // (iii)
        let small = self.go(u, p, Dir::Lt, c, b, false, self.res.tol)?;
        if small.is_forced() {
            return Ok(small.tagged("(iii) phi<eps"));
        }
        let grid = self.thresholds();
        let n = grid.len();
        let mut memo: Vec<Option<Verdict<T>>> = vec![None; 5 * n];
        // slots: 0 φ<r, 1 φ>r, 2 ψ<r, 3 ψ>r, 4 φ<r+ε
        let mut get = |slot: usize, j: usize| -> Result<Verdict<T>, SheafError> {
            if let Some(v) = &memo[slot * n + j] {
                return Ok(v.clone());
            }
            let r = grid[j];
            let v = match slot {
                0 => self.go(u, p, Dir::Lt, r, b, false, self.res.tol)?,
                1 => self.go(u, p, Dir::Gt, r, b, false, self.res.tol)?,
                2 => self.go(u, q, Dir::Lt, r, b, false, self.res.tol)?,
                3 => self.go(u, q, Dir::Gt, r, b, false, self.res.tol)?,
                _ => self.go(u, p, Dir::Lt, r + c, b, false, self.res.tol)?,
            };
            memo[slot * n + j] = Some(v.clone());
            Ok(v)
        };
        // (i)
        for j in 0..n {
            let a = get(0, j)?;
            if a.is_forced() {
                let bq = get(3, j)?;
                if bq.is_forced() {
                    return Ok(tag("(i) phi<r<psi", vec![a.certificate, bq.certificate], c));
                }
            }
        }
        // (iv)
        let mut sep = None;
        for j in 0..n {
            if get(1, j)?.is_forced() && get(2, j)?.is_forced() {
                sep = Some(j);
                break;
            }
        }
        if let Some(jr) = sep {
            for jq in 0..n {
                let a = get(4, jq)?;
                if !a.is_forced() {
                    continue;
                }
                let bq = get(3, jq)?;
                if bq.is_forced() {
                    let parts = vec![get(1, jr)?.certificate, get(2, jr)?.certificate, a.certificate, bq.certificate];
                    return Ok(tag("(iv) r,q", parts, a.margin + bq.margin));
                }
            }
        }
        // (ii) on the threshold grid
        let step = T::one() / lit(self.res.threshold_grid.max(2) as f64);
        if c - step > self.res.tol {
            let mut agree = true;
            for j in 0..n {
                if get(0, j)?.status != get(2, j)?.status {
                    agree = false;
                    break;
                }
            }
            if agree {
                return Ok(tag("(ii) same thresholds", vec![], c - step));
            }
        }
        Ok(Verdict::unknown(T::zero()))
    }

    /// `φ ∸ ψ > ε`: some `q > 0` with `ψ < q` and `φ > q + ε`.
    fn trunc_sub_gt(
        &self,
        u: &OpenSet<T>,
        p: &Formula,
        q: &Formula,
        c: T,
        b: &SectionBinding<T>,
    ) -> Result<Verdict<T>, SheafError> {
        for r in self.thresholds() {
            let bq = self.go(u, q, Dir::Lt, r, b, false, self.res.tol)?;
            if !bq.is_forced() {
                continue;
            }
            let a = self.go(u, p, Dir::Gt, r + c, b, false, self.res.tol)?;
            if a.is_forced() {
                let m = a.margin.min(bq.margin);
                return Ok(Verdict::forced(
                    m,
                    Certificate::Case { name: "psi<q, phi>q+eps", parts: vec![bq.certificate, a.certificate] },
                ));
            }
        }
        Ok(Verdict::unknown(T::zero()))
    }
}

fn check_on_set<T: Real>(u: &OpenSet<T>, phi: &Formula, binding: &SectionBinding<T>) -> Result<(), SheafError> {
    for s in used_sections(phi, binding) {
        if !u.is_subset(&s.domain) {
            return Err(SheafError::NotOnSet { section: s.to_string(), set: u.to_string() });
        }
    }
    Ok(())
}

/// Local forcing `A ⊩_U cond`.
pub fn force_local<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    u: &OpenSet<T>,
    cond: &Condition<T>,
    binding: &SectionBinding<T>,
    res: &Resolution<T>,
) -> Result<Verdict<T>, SheafError> {
    check_on_set(u, &cond.formula, binding)?;
    let f = LocalForcer { sheaf, res };
    let phi = &cond.formula;
    let c = cond.threshold;
    match cond.comparator {
        Comparator::Lt => f.go(u, phi, Dir::Lt, c, binding, true, res.tol),
        Comparator::Gt => f.go(u, phi, Dir::Gt, c, binding, true, res.tol),
        Comparator::Le => Ok(f.go(u, phi, Dir::Gt, c, binding, true, res.tol)?.negate()),
        Comparator::Ge => Ok(f.go(u, phi, Dir::Lt, c, binding, true, res.tol)?.negate()),
    }
}

#[derive(Debug, Clone)]
pub struct MaxPrincipleWitness<T> {
    pub section: Section<T>,
    /// Union of the grid cells where the witness works.
    pub set: OpenSet<T>,
    pub covered: f64,
    pub epsilon: T,
}

/// For `inf_v φ < ε` forced on `u`, a single section forcing `φ < ε'` with
/// `ε' < ε` on a union of grid cells covering all but `res.gap` of `u`.
pub fn max_principle_witness<T: Real, S: MetricSheaf<T>>(
    sheaf: &S,
    u: &OpenSet<T>,
    cond: &Condition<T>,
    binding: &SectionBinding<T>,
    res: &Resolution<T>,
) -> Result<MaxPrincipleWitness<T>, SheafError> {
    let (Formula::Inf(var, body), Comparator::Lt) = (&cond.formula, cond.comparator) else {
        return Err(SheafError::Invalid(format!("expected `inf v. φ < ε`, got {cond}")));
    };
    check_on_set(u, &cond.formula, binding)?;
    let f = LocalForcer { sheaf, res };
    let c = cond.threshold;
    let mut cells = vec![u.clone()];
    for _ in 0..res.cover_depth {
        let next: Vec<_> = cells.iter().flat_map(|cell| cell.split()).collect();
        if next.len() == cells.len() {
            break;
        }
        cells = next;
    }
    let total: f64 = cells.iter().map(|c| c.measure()).sum();
    // (covered measure, margin, section, cells)
    #[allow(clippy::type_complexity)]
    let mut best: Option<(f64, T, Section<T>, Vec<OpenSet<T>>)> = None;
    for mu in sheaf.sections_at(u).sections {
        let b = extend(binding, var, &mu);
        let mut good = Vec::new();
        let mut margin: Option<T> = None;
        for cell in &cells {
            let v = f.go(cell, body, Dir::Lt, c, &b, false, res.tol)?;
            if v.is_forced() {
                margin = Some(margin.map_or(v.margin, |m: T| m.min(v.margin)));
                good.push(cell.clone());
            }
        }
        let Some(m) = margin else { continue };
        let covered = good.iter().map(|c| c.measure()).sum::<f64>() / total;
        let better = match &best {
            None => true,
            Some((cov, bm, ..)) => covered > *cov + 1e-12 || (covered > *cov - 1e-12 && m > *bm),
        };
        if better {
            // a full cover at the largest possible margin cannot be beaten
            let done = covered > 1.0 - 1e-12 && m > c - res.tol;
            best = Some((covered, m, mu, good));
            if done {
                break;
            }
        }
    }
    let Some((covered, m, section, good)) = best else {
        return Err(SheafError::NoWitness(format!("no section forces {body} < {c} on any cell")));
    };
    if covered < 1.0 - crate::scalar::to_f64(res.gap) {
        return Err(SheafError::NoWitness(format!("best witness {section} covers {covered:.3} of the set")));
    }
    let set = OpenSet::union(good);
    let b = extend(binding, var, &section);
    let tol = res.tol;
    let floor = c - m;
    for eps in [floor + tol + tol + tol, floor + m / lit(4.0), c - m / lit(2.0)] {
        if eps >= c {
            continue;
        }
        if f.go(&set, body, Dir::Lt, eps, &b, false, res.tol)?.is_forced() {
            return Ok(MaxPrincipleWitness { section, set, covered, epsilon: eps });
        }
    }
    Err(SheafError::NoWitness(format!("{section} does not force a smaller threshold")))
}
