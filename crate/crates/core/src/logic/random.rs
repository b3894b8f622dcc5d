//! Seeded random conditions over a signature, for cross-checks and fuzzing.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::formula::{Comparator, Condition, Formula, Term};
use super::signature::Signature;
use crate::scalar::{lit, Real};

#[derive(Debug, Clone)]
pub struct RandomConditions {
    rng: ChaCha8Rng,
    sig: Signature,
    /// Variables that may occur free.
    pub free: Vec<String>,
    pub max_depth: usize,
    pub allow_quantifiers: bool,
}

impl RandomConditions {
    pub fn new(sig: Signature, free: Vec<String>, seed: u64) -> Self {
        RandomConditions { rng: ChaCha8Rng::seed_from_u64(seed), sig, free, max_depth: 3, allow_quantifiers: true }
    }

    fn term(&mut self, vars: &[String], depth: usize) -> Term {
        let fns: Vec<(String, usize)> =
            self.sig.functions().filter(|(_, s)| s.arity > 0).map(|(n, s)| (n.to_string(), s.arity)).collect();
        if depth > 0 && !fns.is_empty() && self.rng.gen_bool(0.25) {
            let (name, arity) = fns[self.rng.gen_range(0..fns.len())].clone();
            let args = (0..arity).map(|_| self.term(vars, depth - 1)).collect();
            return Term::apply(name, args);
        }
        Term::var(vars[self.rng.gen_range(0..vars.len())].clone())
    }

    fn atom(&mut self, vars: &[String]) -> Formula {
        let rels: Vec<(String, usize)> = self.sig.relations().map(|(n, s)| (n.to_string(), s.arity)).collect();
        if vars.is_empty() {
            let nullary: Vec<&String> = rels.iter().filter(|(_, a)| *a == 0).map(|(n, _)| n).collect();
            return match nullary.len() {
                0 => Formula::Const1,
                n => Formula::rel(nullary[self.rng.gen_range(0..n)].clone(), vec![]),
            };
        }
        let pick = self.rng.gen_range(0..=rels.len());
        if pick == rels.len() {
            let a = self.term(vars, 1);
            let b = self.term(vars, 1);
            return Formula::dist(a, b);
        }
        let (name, arity) = rels[pick].clone();
        let args = (0..arity).map(|_| self.term(vars, 1)).collect();
        Formula::rel(name, args)
    }

    pub fn formula(&mut self, depth: usize) -> Formula {
        let vars = self.free.clone();
        self.formula_in(&vars, depth)
    }

    fn formula_in(&mut self, vars: &[String], depth: usize) -> Formula {
        if depth == 0 {
            return self.atom(vars);
        }
        let choices = if self.allow_quantifiers { 8 } else { 6 };
        match self.rng.gen_range(0..choices) {
            0 => self.atom(vars),
            1 => Formula::half(self.formula_in(vars, depth - 1)),
            2 => Formula::negation(self.formula_in(vars, depth - 1)),
            3 => Formula::trunc_sub(self.formula_in(vars, depth - 1), self.formula_in(vars, depth - 1)),
            4 => Formula::max(self.formula_in(vars, depth - 1), self.formula_in(vars, depth - 1)),
            5 => Formula::min(self.formula_in(vars, depth - 1), self.formula_in(vars, depth - 1)),
            k => {
                let v = format!("q{depth}");
                let mut inner = vars.to_vec();
                inner.push(v.clone());
                let body = self.formula_in(&inner, depth - 1);
                if k == 6 {
                    Formula::inf(v, body)
                } else {
                    Formula::sup(v, body)
                }
            }
        }
    }

    /// A strict condition with threshold drawn from `(0.05, 0.95)`.
    pub fn condition<T: Real>(&mut self) -> Condition<T> {
        let depth = self.max_depth;
        let f = self.formula(depth);
        let cmp = if self.rng.gen_bool(0.5) { Comparator::Lt } else { Comparator::Gt };
        let eps: f64 = self.rng.gen_range(0.05..0.95);
        Condition::new(f, cmp, lit((eps * 1000.0).round() / 1000.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new().with_relation("P", 2, Some(1.0)).with_function("f", 1, Some(1.0))
    }

    #[test]
    fn same_seed_same_conditions() {
        let mut a = RandomConditions::new(sig(), vec!["s".into()], 7);
        let mut b = RandomConditions::new(sig(), vec!["s".into()], 7);
        for _ in 0..20 {
            assert_eq!(a.condition::<f64>(), b.condition::<f64>());
        }
    }

    #[test]
    fn free_variables_stay_within_declared() {
        let mut g = RandomConditions::new(sig(), vec!["s".into(), "t".into()], 3);
        for _ in 0..50 {
            let c = g.condition::<f64>();
            assert!(c.formula.free_variables().iter().all(|v| v == "s" || v == "t"), "{c}");
        }
    }

    #[test]
    fn generated_text_parses_back() {
        let mut g = RandomConditions::new(sig(), vec!["s".into()], 11);
        for _ in 0..50 {
            let c = g.condition::<f64>();
            let back = crate::logic::parse_condition_with::<f64>(&c.to_string(), &sig()).unwrap();
            assert_eq!(back.to_string(), c.to_string());
        }
    }
}
