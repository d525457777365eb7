//! Entailment for monadic first-order logic.
//!
//! The default engine works on element types: a type is the set of
//! predicates true of an element, and a monadic structure is determined (up
//! to elementary equivalence) by the types it realizes. After normalization
//! every sentence is a boolean combination of `∀x ψ` and `∃x ψ` with
//! propositional `ψ`; a universal forbids the types falsifying its matrix and
//! an existential demands a witness among the remaining ones.
//!
//! [`decide_by_domain_enumeration`] is an independent brute-force check over
//! all small structures, and [`external`] drives a Prover9 binary.

pub mod external;
mod model;
mod normal;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::{collect_predicates_all, Sentence};

pub use external::{prove_external, DEFAULT_PROVER9_TIMEOUT};
pub use model::{Model, TypeProfile};
pub use normal::{normalize, Connective, Matrix, NormalSentence};

use model::Compiled;

/// Type-space search is exponential in the number of predicates.
pub const MAX_TYPE_PREDICATES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("failed to run prover: {0}")]
    Spawn(String),
    #[error("prover timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("could not interpret prover output: {0}")]
    UnparseableOutput(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverProblem {
    pub premises: Vec<Sentence>,
    pub conclusion: Sentence,
}

impl ProverProblem {
    pub fn new(premises: Vec<Sentence>, conclusion: Sentence) -> Self {
        Self {
            premises,
            conclusion,
        }
    }

    /// Predicates of premises then conclusion, first-occurrence order.
    pub fn predicates(&self) -> Vec<String> {
        collect_predicates_all(self.premises.iter().chain([&self.conclusion]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Entailed,
    NotEntailed,
    /// The engine finished without a decision (external prover limits).
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    TypeSpace,
    DomainEnumeration,
    ExternalProver9,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::TypeSpace => "type-space",
            Engine::DomainEnumeration => "domain-enumeration",
            Engine::ExternalProver9 => "prover9",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverVerdict {
    status: Status,
    countermodel: Option<Model>,
    engine: Engine,
}

impl ProverVerdict {
    pub fn entailed(engine: Engine) -> Self {
        Self {
            status: Status::Entailed,
            countermodel: None,
            engine,
        }
    }

    /// A negative verdict from an embedded engine. The countermodel is
    /// re-evaluated against the problem and rejected if it does not satisfy
    /// every premise while falsifying the conclusion.
    pub fn refuted(problem: &ProverProblem, model: Model, engine: Engine) -> Result<Self, ProverError> {
        if let Some(i) = problem.premises.iter().position(|p| !model.satisfies(p)) {
            return Err(ProverError::InvalidModel(format!(
                "countermodel {model} falsifies premise {i}"
            )));
        }
        if model.satisfies(&problem.conclusion) {
            return Err(ProverError::InvalidModel(format!(
                "countermodel {model} satisfies the conclusion"
            )));
        }
        Ok(Self {
            status: Status::NotEntailed,
            countermodel: Some(model),
            engine,
        })
    }

    /// Verdicts of the external prover carry no model.
    pub fn external(status: Status) -> Self {
        Self {
            status,
            countermodel: None,
            engine: Engine::ExternalProver9,
        }
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_entailed(&self) -> bool {
        self.status == Status::Entailed
    }

    pub fn countermodel(&self) -> Option<&Model> {
        self.countermodel.as_ref()
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Satisfiability {
    Sat(Model),
    Unsat,
}

/// Propositional matrix with predicates resolved to type bits.
enum TypeTest {
    Lit { bit: u32, positive: bool },
    And(Vec<TypeTest>),
    Or(Vec<TypeTest>),
}

impl TypeTest {
    fn new(m: &Matrix, preds: &[String]) -> Self {
        let bit = |p: &String| preds.iter().position(|q| q == p).expect("predicate indexed") as u32;
        match m {
            Matrix::Atom(p) => TypeTest::Lit {
                bit: bit(p),
                positive: true,
            },
            Matrix::Not(inner) => match &**inner {
                Matrix::Atom(p) => TypeTest::Lit {
                    bit: bit(p),
                    positive: false,
                },
                other => TypeTest::new(&other.negate(), preds),
            },
            Matrix::And(xs) => TypeTest::And(xs.iter().map(|x| TypeTest::new(x, preds)).collect()),
            Matrix::Or(xs) => TypeTest::Or(xs.iter().map(|x| TypeTest::new(x, preds)).collect()),
        }
    }

    fn holds(&self, t: u32) -> bool {
        match self {
            TypeTest::Lit { bit, positive } => (t >> bit & 1 == 1) == *positive,
            TypeTest::And(xs) => xs.iter().all(|x| x.holds(t)),
            TypeTest::Or(xs) => xs.iter().any(|x| x.holds(t)),
        }
    }
}

struct TypeSpace<'a> {
    preds: &'a [String],
    types: u32,
}

impl<'a> TypeSpace<'a> {
    /// Case-splits sentence-level disjunctions; returns witness types of the
    /// first satisfiable case.
    fn solve(
        &self,
        mut pending: Vec<&'a NormalSentence>,
        mut universals: Vec<&'a Matrix>,
        mut existentials: Vec<&'a Matrix>,
        mut disjunctions: Vec<&'a [NormalSentence]>,
    ) -> Option<Vec<u32>> {
        while let Some(s) = pending.pop() {
            match s {
                NormalSentence::Universal(m) => universals.push(m),
                NormalSentence::Existential(m) => existentials.push(m),
                NormalSentence::BoolCombo(Connective::And, xs) => pending.extend(xs.iter()),
                NormalSentence::BoolCombo(Connective::Or, xs) => disjunctions.push(xs),
            }
        }
        let allowed = self.allowed(&universals);
        if allowed.is_empty() {
            return None;
        }
        // Further cases only add universals, so a missing witness is final.
        let tests: Vec<TypeTest> = existentials.iter().map(|e| TypeTest::new(e, self.preds)).collect();
        let mut witnesses = Vec::new();
        for test in &tests {
            let w = *allowed.iter().find(|t| test.holds(**t))?;
            if !witnesses.contains(&w) {
                witnesses.push(w);
            }
        }
        if let Some(xs) = disjunctions.pop() {
            return xs.iter().find_map(|x| {
                self.solve(
                    vec![x],
                    universals.clone(),
                    existentials.clone(),
                    disjunctions.clone(),
                )
            });
        }
        if witnesses.is_empty() {
            witnesses.push(allowed[0]);
        }
        Some(witnesses)
    }

    fn allowed(&self, universals: &[&Matrix]) -> Vec<u32> {
        let tests: Vec<TypeTest> = universals.iter().map(|m| TypeTest::new(m, self.preds)).collect();
        (0..self.types).filter(|t| tests.iter().all(|u| u.holds(*t))).collect()
    }
}

/// Decides satisfiability of a set of monadic sentences by type-space search.
pub fn check_satisfiable(sentences: &[Sentence]) -> Result<Satisfiability, ProverError> {
    let preds = collect_predicates_all(sentences);
    if preds.len() > MAX_TYPE_PREDICATES {
        return Err(ProverError::Unsupported(format!(
            "{} predicates exceed the type-space limit of {MAX_TYPE_PREDICATES}",
            preds.len()
        )));
    }
    let normal = sentences.iter().map(normalize).collect::<Result<Vec<_>, _>>()?;
    let space = TypeSpace {
        preds: &preds,
        types: 1u32 << preds.len(),
    };
    match space.solve(normal.iter().collect(), Vec::new(), Vec::new(), Vec::new()) {
        None => Ok(Satisfiability::Unsat),
        Some(witnesses) => {
            let profiles = witnesses.into_iter().map(|t| {
                preds
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| t >> i & 1 == 1)
                    .map(|(_, p)| p.clone())
                    .collect::<TypeProfile>()
            });
            Ok(Satisfiability::Sat(Model::new(profiles, &preds)?))
        }
    }
}

/// Premises entail the conclusion iff premises plus the negated conclusion
/// are unsatisfiable.
pub fn decide_entailment(problem: &ProverProblem) -> Result<ProverVerdict, ProverError> {
    let mut sentences = problem.premises.clone();
    sentences.push(problem.conclusion.negate());
    match check_satisfiable(&sentences)? {
        Satisfiability::Unsat => Ok(ProverVerdict::entailed(Engine::TypeSpace)),
        Satisfiability::Sat(model) => ProverVerdict::refuted(problem, model, Engine::TypeSpace),
    }
}

/// Brute force over every structure with 1 to `max_domain` elements.
/// Complete only when `max_domain >= 2^k` for `k` predicates, so smaller
/// bounds are rejected.
pub fn decide_by_domain_enumeration(
    problem: &ProverProblem,
    max_domain: usize,
) -> Result<ProverVerdict, ProverError> {
    let preds = problem.predicates();
    if preds.len() >= 16 || (1usize << preds.len()) > max_domain {
        return Err(ProverError::Unsupported(format!(
            "domain bound {max_domain} is below 2^{} for {} predicates",
            preds.len(),
            preds.len()
        )));
    }
    let premises = problem
        .premises
        .iter()
        .map(|s| Compiled::new(s.formula(), &preds))
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = Compiled::new(problem.conclusion.formula(), &preds)?;
    let types = 1u64 << preds.len();
    for size in 1..=max_domain {
        // Structures up to isomorphism: nondecreasing sequences of types.
        let mut elements = vec![0u64; size];
        loop {
            if premises.iter().all(|p| p.eval(&elements)) && !conclusion.eval(&elements) {
                let profiles = elements.iter().map(|t| {
                    preds
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| t >> i & 1 == 1)
                        .map(|(_, p)| p.clone())
                        .collect::<TypeProfile>()
                });
                let model = Model::new(profiles, &preds)?;
                return ProverVerdict::refuted(problem, model, Engine::DomainEnumeration);
            }
            let Some(i) = elements.iter().rposition(|t| t + 1 < types) else {
                break;
            };
            let next = elements[i] + 1;
            elements[i..].iter_mut().for_each(|t| *t = next);
        }
    }
    Ok(ProverVerdict::entailed(Engine::DomainEnumeration))
}
