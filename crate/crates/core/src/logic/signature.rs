use std::collections::BTreeMap;

/// A relation or function symbol with its arity and a Lipschitz bound per
/// argument (with respect to the fiber metric). `None` means no bound is
/// known; quantifier enclosures through such a symbol widen to the trivial one.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub arity: usize,
    pub lipschitz: Option<f64>,
}

/// Relation, function and constant symbols shared by every fiber of a sheaf.
/// The distance `d` is implicit. Constants are zero-ary functions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Signature {
    relations: BTreeMap<String, Symbol>,
    functions: BTreeMap<String, Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_relation(mut self, name: &str, arity: usize, lipschitz: Option<f64>) -> Self {
        self.relations.insert(name.to_string(), Symbol { arity, lipschitz });
        self
    }

    pub fn with_function(mut self, name: &str, arity: usize, lipschitz: Option<f64>) -> Self {
        self.functions.insert(name.to_string(), Symbol { arity, lipschitz });
        self
    }

    pub fn relation(&self, name: &str) -> Option<&Symbol> {
        self.relations.get(name)
    }

    pub fn function(&self, name: &str) -> Option<&Symbol> {
        self.functions.get(name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.functions.get(name).is_some_and(|s| s.arity == 0)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &Symbol)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, &Symbol)> {
        self.functions.iter().map(|(k, v)| (k.as_str(), v))
    }
}
