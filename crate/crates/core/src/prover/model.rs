//! Finite structures for monadic sentences and a direct evaluator that
//! follows the textbook satisfaction clauses on the original AST.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fol::{collect_predicates_all, Formula, Sentence};

use super::ProverError;

/// Predicates true of one domain element.
pub type TypeProfile = BTreeSet<String>;

/// A monadic model described by the set of element types it realizes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Model {
    realized_types: BTreeSet<TypeProfile>,
}

impl Model {
    /// Builds a model over `predicates`. Fails when no type is realized or
    /// a profile mentions a predicate outside the set.
    pub fn new(
        types: impl IntoIterator<Item = TypeProfile>,
        predicates: &[String],
    ) -> Result<Self, ProverError> {
        let realized_types: BTreeSet<TypeProfile> = types.into_iter().collect();
        if realized_types.is_empty() {
            return Err(ProverError::InvalidModel("a model needs at least one element".into()));
        }
        for t in &realized_types {
            if let Some(p) = t.iter().find(|p| !predicates.contains(p)) {
                return Err(ProverError::InvalidModel(format!("unknown predicate `{p}` in type")));
            }
        }
        Ok(Self { realized_types })
    }

    pub fn realized_types(&self) -> &BTreeSet<TypeProfile> {
        &self.realized_types
    }

    /// Evaluates `s` in the structure with one element per realized type.
    pub fn satisfies(&self, s: &Sentence) -> bool {
        let mut preds: Vec<String> = collect_predicates_all([s]);
        for t in &self.realized_types {
            for p in t {
                if !preds.contains(p) {
                    preds.push(p.clone());
                }
            }
        }
        let Ok(compiled) = Compiled::new(s.formula(), &preds) else {
            return false;
        };
        let elements: Vec<u64> = self
            .realized_types
            .iter()
            .map(|t| {
                t.iter()
                    .map(|p| 1u64 << preds.iter().position(|q| q == p).unwrap())
                    .fold(0, |a, b| a | b)
            })
            .collect();
        compiled.eval(&elements)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.realized_types.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("{")?;
            for (j, p) in t.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(p)?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

/// A sentence with predicates resolved to bit positions and variables to
/// binding depths.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Pred { bit: u32, slot: usize },
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    ForAll(Box<Compiled>),
    Exists(Box<Compiled>),
}

impl Compiled {
    pub fn new(f: &Formula, predicates: &[String]) -> Result<Self, ProverError> {
        if predicates.len() > 64 {
            return Err(ProverError::Unsupported("more than 64 predicates".into()));
        }
        Self::build(f, predicates, &mut Vec::new())
    }

    fn build<'a>(
        f: &'a Formula,
        preds: &[String],
        scope: &mut Vec<&'a str>,
    ) -> Result<Self, ProverError> {
        let bin = |l: &'a Formula, r: &'a Formula, scope: &mut Vec<&'a str>| {
            Ok::<_, ProverError>((
                Box::new(Self::build(l, preds, scope)?),
                Box::new(Self::build(r, preds, scope)?),
            ))
        };
        Ok(match f {
            Formula::Pred { name, args } => {
                if args.len() != 1 {
                    return Err(ProverError::Unsupported(format!(
                        "predicate `{name}` is not unary"
                    )));
                }
                let bit = preds
                    .iter()
                    .position(|p| p == name)
                    .ok_or_else(|| ProverError::Unsupported(format!("unknown predicate `{name}`")))?
                    as u32;
                let slot = scope
                    .iter()
                    .rposition(|v| *v == args[0].as_str())
                    .ok_or_else(|| ProverError::Unsupported(format!("free variable `{}`", args[0])))?;
                Compiled::Pred { bit, slot }
            }
            Formula::Not(i) => Compiled::Not(Box::new(Self::build(i, preds, scope)?)),
            Formula::And(l, r) => {
                let (l, r) = bin(l, r, scope)?;
                Compiled::And(l, r)
            }
            Formula::Or(l, r) => {
                let (l, r) = bin(l, r, scope)?;
                Compiled::Or(l, r)
            }
            Formula::Implies(l, r) => {
                let (l, r) = bin(l, r, scope)?;
                Compiled::Implies(l, r)
            }
            Formula::Iff(l, r) => {
                let (l, r) = bin(l, r, scope)?;
                Compiled::Iff(l, r)
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                scope.push(v.as_str());
                let body = Self::build(body, preds, scope);
                scope.pop();
                let body = Box::new(body?);
                if matches!(f, Formula::ForAll(..)) {
                    Compiled::ForAll(body)
                } else {
                    Compiled::Exists(body)
                }
            }
        })
    }

    /// Truth in the structure whose elements carry the given predicate masks.
    pub fn eval(&self, elements: &[u64]) -> bool {
        self.eval_in(elements, &mut Vec::new())
    }

    fn eval_in(&self, elements: &[u64], env: &mut Vec<usize>) -> bool {
        match self {
            Compiled::Pred { bit, slot } => elements[env[*slot]] >> bit & 1 == 1,
            Compiled::Not(i) => !i.eval_in(elements, env),
            Compiled::And(l, r) => l.eval_in(elements, env) && r.eval_in(elements, env),
            Compiled::Or(l, r) => l.eval_in(elements, env) || r.eval_in(elements, env),
            Compiled::Implies(l, r) => !l.eval_in(elements, env) || r.eval_in(elements, env),
            Compiled::Iff(l, r) => l.eval_in(elements, env) == r.eval_in(elements, env),
            Compiled::ForAll(body) => (0..elements.len()).all(|e| {
                env.push(e);
                let v = body.eval_in(elements, env);
                env.pop();
                v
            }),
            Compiled::Exists(body) => (0..elements.len()).any(|e| {
                env.push(e);
                let v = body.eval_in(elements, env);
                env.pop();
                v
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(names: &[&str]) -> TypeProfile {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn s(f: Formula) -> Sentence {
        Sentence::new(f).unwrap()
    }

    #[test]
    fn evaluates_quantifiers() {
        let preds = vec!["p".to_string(), "q".to_string()];
        let m = Model::new([profile(&["q"]), profile(&["p", "q"])], &preds).unwrap();
        let all_q = s(Formula::forall("x", Formula::pred("q", "x")));
        let all_p = s(Formula::forall("x", Formula::pred("p", "x")));
        let some_p = s(Formula::exists("x", Formula::pred("p", "x")));
        assert!(m.satisfies(&all_q));
        assert!(!m.satisfies(&all_p));
        assert!(m.satisfies(&some_p));
        assert_eq!(m.to_string(), "{{p, q}, {q}}");
    }

    #[test]
    fn predicates_outside_model_are_false() {
        let m = Model::new([profile(&[])], &[]).unwrap();
        assert!(!m.satisfies(&s(Formula::exists("x", Formula::pred("bird", "x")))));
        assert!(m.satisfies(&s(Formula::forall("x", Formula::not(Formula::pred("bird", "x"))))));
    }

    #[test]
    fn nested_dependent_quantifiers() {
        // ∀x ∃y (p(x) ↔ ¬p(y)) holds exactly when both p and ¬p are realized.
        let f = s(Formula::forall(
            "x",
            Formula::exists(
                "y",
                Formula::iff(Formula::pred("p", "x"), Formula::not(Formula::pred("p", "y"))),
            ),
        ));
        let preds = vec!["p".to_string()];
        assert!(Model::new([profile(&["p"]), profile(&[])], &preds).unwrap().satisfies(&f));
        assert!(!Model::new([profile(&["p"])], &preds).unwrap().satisfies(&f));
    }

    #[test]
    fn rejects_empty_and_foreign_types() {
        assert!(Model::new(Vec::<TypeProfile>::new(), &[]).is_err());
        assert!(Model::new([profile(&["z"])], &["p".to_string()]).is_err());
    }
}
