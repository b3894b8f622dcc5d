//! Continuous cyclic flow on the torus `S¹ × S¹` over the circle.
//!
//! Sections are the integral curves `x₂ = c + G(θ)` of the field
//! `∂_θ + G'(θ) ∂_{x₂}` with `G(θ) = kθ + a sin θ`. The fiber is the circle
//! with arc distance divided by π and angle addition as `mul`.

use std::f64::consts::{PI, TAU};

use crate::logic::{ElementSample, EvalError, Signature, Structure};
use crate::scalar::{lit, Real};

use super::base::{BasePoint, BaseSpace, OpenSet};
use super::section::{Section, SectionSample};
use super::{MetricSheaf, SheafError};

#[derive(Debug, Clone)]
pub struct TorusSheaf<T> {
    base: BaseSpace<T>,
    sig: Signature,
    /// Winding number `k` of the flow.
    pub winding: i32,
    /// Amplitude `a` of the flow's wobble.
    pub amplitude: T,
    /// Curves sampled by quantifiers; the covering radius is `1 / samples`.
    pub samples: usize,
}

fn wrap<T: Real>(a: T) -> T {
    let tau: T = lit(TAU);
    let r = a % tau;
    if r < T::zero() {
        r + tau
    } else {
        r
    }
}

/// Arc distance on the unit circle divided by π.
pub fn circle_distance<T: Real>(a: T, b: T) -> T {
    let d = wrap(a - b);
    d.min(lit::<T>(TAU) - d) / lit(PI)
}

impl<T: Real> TorusSheaf<T> {
    pub fn new(winding: i32, amplitude: T, samples: usize) -> Self {
        let sig = Signature::new().with_function("mul", 2, Some(1.0)).with_function("one", 0, Some(0.0));
        TorusSheaf { base: BaseSpace::Circle, sig, winding, amplitude, samples: samples.max(1) }
    }

    pub fn flow(&self, theta: T) -> T {
        lit::<T>(self.winding as f64) * theta + self.amplitude * theta.sin()
    }

    /// Global integral curve through height `c` at `θ = 0`.
    pub fn curve(&self, c: T) -> Section<T> {
        Section::family("curve", vec![c], OpenSet::full_circle())
    }

    pub fn curve_on(&self, c: T, domain: OpenSet<T>) -> Section<T> {
        Section::family("curve", vec![c], domain)
    }

    fn grid(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.samples).map(move |j| lit(TAU * j as f64 / self.samples as f64))
    }
}

impl<T: Real> Default for TorusSheaf<T> {
    fn default() -> Self {
        Self::new(1, lit(0.3), 48)
    }
}

pub struct TorusFiber<'a, T: Real> {
    sheaf: &'a TorusSheaf<T>,
    theta: T,
}

impl<'a, T: Real> Structure<T> for TorusFiber<'a, T> {
    type Elem = T;

    fn signature(&self) -> &Signature {
        &self.sheaf.sig
    }

    fn distance(&self, a: &T, b: &T) -> Result<T, EvalError> {
        Ok(circle_distance(*a, *b))
    }

    fn relation(&self, name: &str, _: &[T]) -> Result<T, EvalError> {
        Err(EvalError::UnknownRelation(name.to_string()))
    }

    fn function(&self, name: &str, args: &[T]) -> Result<T, EvalError> {
        match (name, args) {
            ("mul", [a, b]) => Ok(wrap(*a + *b)),
            ("one", []) => Ok(T::zero()),
            ("mul", _) => Err(EvalError::Arity { name: name.into(), expected: 2, got: args.len() }),
            ("one", _) => Err(EvalError::Arity { name: name.into(), expected: 0, got: args.len() }),
            _ => Err(EvalError::UnknownFunction(name.to_string())),
        }
    }

    fn sample(&self) -> ElementSample<T, T> {
        let g = self.sheaf.flow(self.theta);
        ElementSample {
            elements: self.sheaf.grid().map(|c| wrap(c + g)).collect(),
            covering_radius: Some(lit(1.0 / self.sheaf.samples as f64)),
        }
    }
}

impl<T: Real> MetricSheaf<T> for TorusSheaf<T> {
    type Elem = T;
    type Fiber<'a>
        = TorusFiber<'a, T>
    where
        T: 'a;

    fn base(&self) -> &BaseSpace<T> {
        &self.base
    }

    fn signature(&self) -> &Signature {
        &self.sig
    }

    fn fiber(&self, x: &BasePoint<T>) -> Result<TorusFiber<'_, T>, SheafError> {
        match x {
            BasePoint::Angle(theta) => Ok(TorusFiber { sheaf: self, theta: *theta }),
            other => Err(SheafError::Invalid(format!("{other} is not a point of the circle"))),
        }
    }

    fn family_value(&self, family: &str, params: &[T], x: &BasePoint<T>) -> Result<T, SheafError> {
        let theta = match x {
            BasePoint::Angle(t) => *t,
            other => return Err(SheafError::Invalid(format!("{other} is not a point of the circle"))),
        };
        match (family, params) {
            ("curve", [c]) => Ok(wrap(*c + self.flow(theta))),
            ("curve", _) => Err(SheafError::Invalid("curve takes one parameter".into())),
            _ => Err(SheafError::UnknownFamily(family.to_string())),
        }
    }

    fn sections_at(&self, _u: &OpenSet<T>) -> SectionSample<T> {
        SectionSample {
            sections: self.grid().map(|c| self.curve(c)).collect(),
            covering_radius: Some(lit(1.0 / self.samples as f64)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_condition_with, Condition};
    use crate::sheaf::{
        bind, build_generic_model, force_local, force_point, gmt_crosscheck, max_principle_witness,
        neighborhood_witness, pseudometric_rho, Agreement, FilterChain, Resolution, Status,
    };

    fn cond(t: &TorusSheaf<f64>, s: &str) -> Condition<f64> {
        parse_condition_with(s, &t.sig).unwrap()
    }

    #[test]
    fn curves_close_around_the_circle() {
        let t = TorusSheaf::<f64>::default();
        let s = t.curve(0.7);
        let a = t.section_value(&s, &BasePoint::angle(1e-9)).unwrap();
        let b = t.section_value(&s, &BasePoint::angle(TAU - 1e-9)).unwrap();
        assert!(circle_distance(a, b) < 1e-8);
    }

    #[test]
    fn section_and_global_extension_are_forced_close() {
        let t = TorusSheaf::<f64>::default();
        let arc = OpenSet::arc(0.5, 1.0);
        let sigma = t.curve_on(1.3, arc.clone());
        let mu = t.curve(1.3);
        let b = bind(&[("s", &sigma), ("m", &mu)]);
        let res = Resolution::default().with_tol(1e-6);
        let v = force_point(&t, &BasePoint::angle(1.0), &cond(&t, "d(s,m) < 0.01"), &b, &res).unwrap();
        assert_eq!(v.status, Status::Forced);
        assert!((v.margin - 0.01).abs() < 1e-12);
        for eps in ["0.1", "0.01", "0.0001"] {
            let v = force_local(&t, &arc, &cond(&t, &format!("d(s,m) < {eps}")), &b, &res).unwrap();
            assert_eq!(v.status, Status::Forced, "eps {eps}");
        }
        let chain = FilterChain::arcs_around(1.0, 0.4, 5);
        assert!(pseudometric_rho(&t, &chain, &sigma, &mu, &res).unwrap() < 1e-12);
        let model = build_generic_model(&t, &chain, &[sigma, mu], &res).unwrap();
        assert_eq!(model.class_count(), 1);
    }

    #[test]
    fn parallel_curves_have_constant_distance() {
        let t = TorusSheaf::<f64>::default();
        let chain = FilterChain::arcs_around(2.0, 0.5, 5);
        let rho = pseudometric_rho(&t, &chain, &t.curve(0.2), &t.curve(0.2 + 0.9), &Resolution::default()).unwrap();
        assert!((rho - 0.9 / PI).abs() < 1e-12);
    }

    #[test]
    fn constant_conditions() {
        let t = TorusSheaf::<f64>::default();
        let res = Resolution::default();
        let x = BasePoint::angle(0.3);
        let b = Default::default();
        assert_eq!(force_point(&t, &x, &cond(&t, "max(0, 1) < 0.5"), &b, &res).unwrap().status, Status::Refuted);
        let u = OpenSet::arc(0.0, 1.0);
        assert_eq!(force_local(&t, &u, &cond(&t, "min(1, 1) < 0.5"), &b, &res).unwrap().status, Status::Refuted);
        let whole = neighborhood_witness(&t, &x, &cond(&t, "1 -. 1 < 0.1"), &b, &res).unwrap();
        assert_eq!(whole, OpenSet::full_circle());
    }

    #[test]
    fn half_reports_margins_in_value_units() {
        let t = TorusSheaf::<f64>::default();
        let (a, b) = (t.curve(0.3), t.curve(0.3 + 0.9));
        let bd = bind(&[("a", &a), ("b", &b)]);
        let x = BasePoint::angle(1.0);
        let v = force_point(&t, &x, &cond(&t, "half(d(a, b)) < 0.5"), &bd, &Resolution::default()).unwrap();
        assert_eq!(v.status, Status::Forced);
        assert!((v.margin - (0.5 - 0.45 / PI)).abs() < 1e-12, "{}", v.margin);
    }

    #[test]
    fn unresolved_subtrahend_is_bounded_by_its_interval() {
        // the inf over sampled curves is only known to within the covering radius
        let t = TorusSheaf::<f64>::default();
        let b = t.curve(1.1);
        let bd = bind(&[("b", &b)]);
        let c = cond(&t, "d(b, b) -. (inf q. d(b, mul(q, b))) < 0.1");
        for k in 0..20 {
            let x = BasePoint::angle(0.9 + 0.013 * k as f64);
            assert!(force_point(&t, &x, &c, &bd, &Resolution::default()).unwrap().is_forced());
        }
    }

    #[test]
    fn neighbourhood_witness_is_an_arc_around_the_point() {
        let t = TorusSheaf::<f64>::default();
        let (s, m) = (t.curve(0.4), t.curve(0.4));
        let b = bind(&[("s", &s), ("m", &m)]);
        let x = BasePoint::angle(2.0);
        let u = neighborhood_witness(&t, &x, &cond(&t, "d(s,m) < 0.01"), &b, &Resolution::default()).unwrap();
        assert!(u.contains(&x));
    }

    #[test]
    fn left_continuity_sentence() {
        let t = TorusSheaf::<f64>::default();
        let v = OpenSet::arc(0.2, 2.0);
        let e = t.curve_on(1.0, OpenSet::arc(0.0, 3.0));
        let m = t.curve_on(1.05, OpenSet::arc(0.1, 3.0));
        let b = bind(&[("e", &e), ("m", &m)]);
        let c = cond(&t, "sup s. 1 -. max(d(e,m), 1 -. d(mul(e,s),mul(m,s))) < 0.3");
        let verdict = force_local(&t, &v, &c, &b, &Resolution::default()).unwrap();
        assert_eq!(verdict.status, Status::Forced, "{verdict:?}");
    }

    #[test]
    fn maximum_principle_returns_the_bound_section() {
        let t = TorusSheaf::<f64>::default();
        let m = t.curve(t.grid().nth(5).unwrap());
        let b = bind(&[("m", &m)]);
        let u = OpenSet::arc(1.0, 1.0);
        let w = max_principle_witness(&t, &u, &cond(&t, "inf s. d(s,m) < 0.2"), &b, &Resolution::default()).unwrap();
        assert_eq!(w.section, m);
        assert!(w.epsilon <= 0.01);
    }

    #[test]
    fn gmt_examples_agree() {
        let t = TorusSheaf::<f64>::default();
        let (s, m) = (t.curve(0.3), t.curve(0.31));
        let b = bind(&[("s", &s), ("m", &m)]);
        let chain = FilterChain::arcs_around(1.0, 0.5, 5);
        let res = Resolution::default();
        let r = gmt_crosscheck(&t, &chain, &cond(&t, "d(s,m) < 0.1"), &b, &res).unwrap();
        assert_eq!((r.generic, r.forcing, r.agreement), (Status::Forced, Status::Forced, Agreement::Agree));
        let r = gmt_crosscheck(&t, &chain, &cond(&t, "1 < 0.5"), &b, &res).unwrap();
        assert_eq!((r.generic, r.forcing, r.agreement), (Status::Refuted, Status::Refuted, Agreement::Agree));
    }

    mod props {
        use super::*;
        use crate::logic::random::RandomConditions;
        use crate::logic::Comparator;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn forcing_is_monotone_in_the_bound(seed in any::<u64>(), x in 0.0..TAU, shrink in 0.2..1.0f64) {
                let t = TorusSheaf::<f64>::default();
                let (a, b) = (t.curve(0.3), t.curve(1.1));
                let bd = bind(&[("a", &a), ("b", &b)]);
                let mut gen = RandomConditions::new(t.signature().clone(), vec!["a".into(), "b".into()], seed);
                let c: Condition<f64> = gen.condition();
                let eps = c.threshold;
                let (tight, loose) = match c.comparator {
                    Comparator::Lt | Comparator::Le => (eps * shrink, eps),
                    Comparator::Gt | Comparator::Ge => (eps, eps * shrink),
                };
                let at = |e| force_point(&t, &BasePoint::angle(x), &Condition::new(c.formula.clone(), c.comparator, e), &bd, &Resolution::default()).unwrap();
                prop_assert!(!at(tight).is_forced() || at(loose).is_forced(), "{}", c);
            }
        }
    }
}
