//! First-order formulas: the AST, the LaTeX and Prover9 front ends, and the
//! renderers that translate between them.

mod latex;
mod prover9;
mod syntax;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use latex::{parse_latex_formula, render_latex, strip_math_wrappers};
pub(crate) use latex::last_boxed;
pub use prover9::{
    cleanup_prover9, parse_prover9_formula, render_prover9, Prover9Names, PROVER9_RESERVED,
};

/// Errors produced while reading a formula.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolError {
    #[error("empty formula")]
    EmptyInput,
    #[error("syntax error at byte {position}: found {found}, expected {}", expected.join(" or "))]
    Syntax {
        position: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error(
        "ambiguous quantifier scope at byte {position}: parenthesize the body of a quantifier \
         followed by a connective"
    )]
    AmbiguousScope { position: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unsupported feature at byte {position}: {feature}")]
    UnsupportedFeature { position: usize, feature: String },
    #[error("predicate `{0}` shares its name with a bound variable")]
    NameClash(String),
}

/// A variable name. Never empty, never contains whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            None
        } else {
            Some(Self(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Abstract syntax tree of a first-order formula over predicates and
/// variables. No equality, functions or constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Pred { name: String, args: Vec<Variable> },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    ForAll(Variable, Box<Formula>),
    Exists(Variable, Box<Formula>),
}

/// Shorthand constructors, mostly for tests and generated problems.
impl Formula {
    pub fn pred(name: &str, var: &str) -> Self {
        Formula::Pred {
            name: name.to_string(),
            args: vec![Variable(var.to_string())],
        }
    }

    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Self {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Formula::ForAll(Variable(var.to_string()), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists(Variable(var.to_string()), Box::new(body))
    }

    /// Variables occurring free, in first-occurrence order.
    pub fn free_variables(&self) -> Vec<Variable> {
        fn walk(f: &Formula, bound: &mut Vec<Variable>, out: &mut Vec<Variable>) {
            match f {
                Formula::Pred { args, .. } => {
                    for a in args {
                        if !bound.contains(a) && !out.contains(a) {
                            out.push(a.clone());
                        }
                    }
                }
                Formula::Not(inner) => walk(inner, bound, out),
                Formula::And(l, r)
                | Formula::Or(l, r)
                | Formula::Implies(l, r)
                | Formula::Iff(l, r) => {
                    walk(l, bound, out);
                    walk(r, bound, out);
                }
                Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    fn bound_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Pred { .. } => {}
            Formula::Not(inner) => inner.bound_variables(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.bound_variables(out);
                r.bound_variables(out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                out.insert(v.0.clone());
                body.bound_variables(out);
            }
        }
    }

    fn visit_predicates<'a>(&'a self, visit: &mut impl FnMut(&'a str, usize)) {
        match self {
            Formula::Pred { name, args } => visit(name, args.len()),
            Formula::Not(inner) => inner.visit_predicates(visit),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.visit_predicates(visit);
                r.visit_predicates(visit);
            }
            Formula::ForAll(_, body) | Formula::Exists(_, body) => body.visit_predicates(visit),
        }
    }

    /// Predicate names with their arities, in first-occurrence order.
    pub fn predicate_arities(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        self.visit_predicates(&mut |name, arity| {
            if !out.iter().any(|(n, a)| n == name && *a == arity) {
                out.push((name.to_string(), arity));
            }
        });
        out
    }
}

/// A closed formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence(Formula);

impl Sentence {
    pub fn new(formula: Formula) -> Result<Self, FolError> {
        if let Some(v) = formula.free_variables().into_iter().next() {
            return Err(FolError::UnboundVariable(v.0));
        }
        let mut bound = BTreeSet::new();
        formula.bound_variables(&mut bound);
        let mut clash = None;
        formula.visit_predicates(&mut |name, _| {
            if clash.is_none() && bound.contains(name) {
                clash = Some(name.to_string());
            }
        });
        if let Some(name) = clash {
            return Err(FolError::NameClash(name));
        }
        Ok(Self(formula))
    }

    pub fn formula(&self) -> &Formula {
        &self.0
    }

    pub fn into_formula(self) -> Formula {
        self.0
    }

    /// The negation of this sentence. Always closed.
    pub fn negate(&self) -> Sentence {
        Sentence(Formula::not(self.0.clone()))
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_latex(self))
    }
}

impl Serialize for Sentence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render_latex(self))
    }
}

impl<'de> Deserialize<'de> for Sentence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_latex_formula(&text).map_err(serde::de::Error::custom)
    }
}

/// Predicate names of a sentence in first-occurrence order, deduplicated.
pub fn collect_predicates(s: &Sentence) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    s.0.visit_predicates(&mut |name, _| {
        if !out.iter().any(|n| n == name) {
            out.push(name.to_string());
        }
    });
    out
}

/// Predicates across several sentences, first-occurrence order.
pub fn collect_predicates_all<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in sentences {
        for p in collect_predicates(s) {
            if !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

/// Natural-language propositions paired with their formalizations, in the
/// order they were parsed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateMapping {
    entries: Vec<(String, Sentence)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proposition already mapped: {0:?}")]
pub struct DuplicateProposition(pub String);

impl PredicateMapping {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, text: impl Into<String>, sentence: Sentence) -> Result<(), DuplicateProposition> {
        let text = text.into();
        if self.entries.iter().any(|(t, _)| *t == text) {
            return Err(DuplicateProposition(text));
        }
        self.entries.push((text, sentence));
        Ok(())
    }

    pub fn entries(&self) -> &[(String, Sentence)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.entries.iter().map(|(_, s)| s)
    }
}
