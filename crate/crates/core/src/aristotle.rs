//! Existential import and structural diagnostics for categorical syllogisms.
//!
//! Validity is never decided here; the prover does that. This module only
//! adds the particular propositions that classical syllogistic takes for
//! granted and reports whether an argument has the textbook shape.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fol::{collect_predicates, collect_predicates_all, Formula, Sentence};
use crate::prover::{ProverError, ProverProblem};

/// Appends `∃x T(x)` for every predicate `T` of `premises` that is not
/// already asserted that way. Idempotent.
pub fn augment_existential_import(premises: &[Sentence]) -> Result<Vec<Sentence>, ProverError> {
    for s in premises {
        if let Some((name, arity)) = s.formula().predicate_arities().into_iter().find(|(_, a)| *a != 1) {
            return Err(ProverError::Unsupported(format!(
                "predicate `{name}` has arity {arity}, existential import needs unary predicates"
            )));
        }
    }
    let mut out = premises.to_vec();
    for t in collect_predicates_all(premises) {
        let fact = existence_of(&t);
        if !out.contains(&fact) {
            out.push(fact);
        }
    }
    Ok(out)
}

fn existence_of(term: &str) -> Sentence {
    let var = if term == "x" { "y" } else { "x" };
    Sentence::new(Formula::exists(var, Formula::pred(term, var))).expect("closed by construction")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormKind {
    /// Every S is P.
    A,
    /// No S is P.
    E,
    /// Some S is P.
    I,
    /// Some S is not P.
    O,
    IndividualAffirmative,
    IndividualNegative,
    NonCategorical,
}

impl FormKind {
    pub const CLASSICAL: [FormKind; 4] = [FormKind::A, FormKind::E, FormKind::I, FormKind::O];

    pub fn letter(self) -> Option<char> {
        match self {
            FormKind::A => Some('A'),
            FormKind::E => Some('E'),
            FormKind::I => Some('I'),
            FormKind::O => Some('O'),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CategoricalForm {
    pub kind: FormKind,
    pub subject: Option<String>,
    pub predicate: Option<String>,
}

impl CategoricalForm {
    fn new(kind: FormKind, subject: &str, predicate: &str) -> Self {
        Self {
            kind,
            subject: Some(subject.to_string()),
            predicate: Some(predicate.to_string()),
        }
    }

    pub fn non_categorical() -> Self {
        Self {
            kind: FormKind::NonCategorical,
            subject: None,
            predicate: None,
        }
    }

    /// Canonical sentence for a classical form; `None` for the individual
    /// and non-categorical kinds.
    pub fn to_sentence(&self) -> Option<Sentence> {
        let (s, p) = (self.subject.as_deref()?, self.predicate.as_deref()?);
        let var = ["x", "y", "z"].into_iter().find(|v| *v != s && *v != p)?;
        let (s, p) = (Formula::pred(s, var), Formula::pred(p, var));
        let f = match self.kind {
            FormKind::A => Formula::forall(var, Formula::implies(s, p)),
            FormKind::E => Formula::forall(var, Formula::implies(s, Formula::not(p))),
            FormKind::I => Formula::exists(var, Formula::and(s, p)),
            FormKind::O => Formula::exists(var, Formula::and(s, Formula::not(p))),
            _ => return None,
        };
        Sentence::new(f).ok()
    }
}

impl fmt::Display for CategoricalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, &self.subject, &self.predicate) {
            (FormKind::NonCategorical, _, _) => f.write_str("non-categorical"),
            (kind, Some(s), Some(p)) => write!(f, "{kind:?}({s}, {p})"),
            (kind, _, _) => write!(f, "{kind:?}"),
        }
    }
}

/// Recognizes the four classical forms up to commutativity of `∧` and
/// double negation. `¬∃x(S ∧ P)` also counts as E.
pub fn classify_categorical_form(s: &Sentence) -> CategoricalForm {
    classify(s.formula()).unwrap_or_else(CategoricalForm::non_categorical)
}

/// Like [`classify_categorical_form`], but subjects named in `individuals`
/// (such as `socrates`) give the individual kinds: A and I become
/// "S is P", E and O become "S is not P".
pub fn classify_with_individuals(s: &Sentence, individuals: &[&str]) -> CategoricalForm {
    let mut form = classify_categorical_form(s);
    if form.subject.as_deref().is_some_and(|subj| individuals.contains(&subj)) {
        form.kind = match form.kind {
            FormKind::A | FormKind::I => FormKind::IndividualAffirmative,
            FormKind::E | FormKind::O => FormKind::IndividualNegative,
            other => other,
        };
    }
    form
}

fn strip_double_negation(f: &Formula) -> &Formula {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::Not(core) => strip_double_negation(core),
            _ => f,
        },
        _ => f,
    }
}

/// `(name, positive)` for a possibly negated atom over `var`.
fn literal<'a>(f: &'a Formula, var: &str) -> Option<(&'a str, bool)> {
    match strip_double_negation(f) {
        Formula::Pred { name, args } if args.len() == 1 && args[0].as_str() == var => Some((name, true)),
        Formula::Not(inner) => match strip_double_negation(inner) {
            Formula::Pred { name, args } if args.len() == 1 && args[0].as_str() == var => Some((name, false)),
            _ => None,
        },
        _ => None,
    }
}

/// Subject and predicate literal of `S ∧ ±P` in either order. A positive
/// conjunct is preferred as subject.
fn conjunction<'a>(f: &'a Formula, var: &str) -> Option<(&'a str, (&'a str, bool))> {
    let Formula::And(l, r) = strip_double_negation(f) else {
        return None;
    };
    let (l, r) = (literal(l, var)?, literal(r, var)?);
    match (l, r) {
        ((s, true), p) => Some((s, p)),
        (p, (s, true)) => Some((s, p)),
        _ => None,
    }
}

fn classify(f: &Formula) -> Option<CategoricalForm> {
    match strip_double_negation(f) {
        Formula::ForAll(v, body) => {
            let Formula::Implies(l, r) = strip_double_negation(body) else {
                return None;
            };
            let (s, true) = literal(l, v.as_str())? else {
                return None;
            };
            let (p, positive) = literal(r, v.as_str())?;
            let kind = if positive { FormKind::A } else { FormKind::E };
            Some(CategoricalForm::new(kind, s, p))
        }
        Formula::Exists(v, body) => {
            let (s, (p, positive)) = conjunction(body, v.as_str())?;
            let kind = if positive { FormKind::I } else { FormKind::O };
            Some(CategoricalForm::new(kind, s, p))
        }
        Formula::Not(inner) => match strip_double_negation(inner) {
            Formula::Exists(v, body) => match conjunction(body, v.as_str())? {
                (s, (p, true)) => Some(CategoricalForm::new(FormKind::E, s, p)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub premise_count_ok: bool,
    pub middle_term: Option<String>,
    /// Number of sentences mentioning each term.
    pub term_usage: BTreeMap<String, usize>,
    pub violations: Vec<String>,
}

impl StructureReport {
    pub fn is_well_formed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the textbook shape: two premises, three categorical sentences,
/// three terms, and a middle term shared by the premises but absent from
/// the conclusion.
pub fn check_structure(premises: &[Sentence], conclusion: &Sentence) -> StructureReport {
    let mut violations = Vec::new();
    let premise_count_ok = premises.len() == 2;
    if !premise_count_ok {
        violations.push(format!("expected 2 premises, found {}", premises.len()));
    }
    for (i, p) in premises.iter().enumerate() {
        if classify_categorical_form(p).kind == FormKind::NonCategorical {
            violations.push(format!("premise {} is not categorical", i + 1));
        }
    }
    if classify_categorical_form(conclusion).kind == FormKind::NonCategorical {
        violations.push("conclusion is not categorical".to_string());
    }

    let mut term_usage = BTreeMap::new();
    for s in premises.iter().chain([conclusion]) {
        for t in collect_predicates(s) {
            *term_usage.entry(t).or_insert(0) += 1;
        }
    }
    if term_usage.len() != 3 {
        violations.push(format!("expected 3 terms, found {}", term_usage.len()));
    }

    let mut middle_term = None;
    if premise_count_ok {
        let first = collect_predicates(&premises[0]);
        let second = collect_predicates(&premises[1]);
        let in_conclusion = collect_predicates(conclusion);
        let shared: Vec<&String> = first.iter().filter(|t| second.contains(t)).collect();
        match shared.iter().find(|t| !in_conclusion.contains(t)) {
            Some(t) => middle_term = Some((*t).clone()),
            None => match shared.first() {
                Some(t) => {
                    violations.push(format!("middle term `{t}` appears in the conclusion"));
                    middle_term = Some((*t).clone());
                }
                None => violations.push("premises share no middle term".to_string()),
            },
        }
    }

    StructureReport {
        premise_count_ok,
        middle_term,
        term_usage,
        violations,
    }
}

/// The four figures by the position of the middle term; the conclusion is
/// always `S`-`P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Figure {
    /// M-P, S-M
    First,
    /// P-M, S-M
    Second,
    /// M-P, M-S
    Third,
    /// P-M, M-S
    Fourth,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::First, Figure::Second, Figure::Third, Figure::Fourth];

    /// Subject/predicate of the major and minor premise.
    pub fn premise_terms(self) -> [(&'static str, &'static str); 2] {
        match self {
            Figure::First => [("m", "p"), ("s", "m")],
            Figure::Second => [("p", "m"), ("s", "m")],
            Figure::Third => [("m", "p"), ("m", "s")],
            Figure::Fourth => [("p", "m"), ("m", "s")],
        }
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

/// One figure-mood combination as a prover problem over the terms
/// `s`, `m`, `p`.
#[derive(Debug, Clone)]
pub struct MoodProblem {
    pub figure: Figure,
    /// Forms of the major premise, minor premise and conclusion.
    pub mood: [FormKind; 3],
    pub problem: ProverProblem,
}

impl MoodProblem {
    /// Traditional label such as `AAA-1`.
    pub fn label(&self) -> String {
        let letters: String = self.mood.iter().filter_map(|k| k.letter()).collect();
        format!("{letters}-{}", self.figure.number())
    }
}

/// All 256 combinations of four figures and 64 moods.
pub fn figure_mood_problems() -> Vec<MoodProblem> {
    let sentence = |kind, (s, p): (&str, &str)| {
        CategoricalForm::new(kind, s, p).to_sentence().expect("classical form")
    };
    let mut out = Vec::with_capacity(256);
    for figure in Figure::ALL {
        let [major, minor] = figure.premise_terms();
        for a in FormKind::CLASSICAL {
            for b in FormKind::CLASSICAL {
                for c in FormKind::CLASSICAL {
                    out.push(MoodProblem {
                        figure,
                        mood: [a, b, c],
                        problem: ProverProblem::new(
                            vec![sentence(a, major), sentence(b, minor)],
                            sentence(c, ("s", "p")),
                        ),
                    });
                }
            }
        }
    }
    out
}
