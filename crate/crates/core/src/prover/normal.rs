//! Quantifier-depth-one normal form for monadic sentences.
//!
//! Quantifiers are pushed inward bottom-up (miniscoping). A universal
//! distributes over conjunctions and an existential over disjunctions; a
//! clause or cube whose parts each mention only the bound variable or only
//! other material splits directly. Anything still tangled is case-split on
//! the truth values of its parts that do not mention the bound variable.
//! Every quantifier ends up scoping over literals of its own variable, so
//! any monadic sentence normalizes, including ones whose inner quantifiers
//! mention outer variables.

use std::fmt;

use crate::fol::{Formula, Sentence, Variable};

use super::ProverError;

/// Propositional formula over predicate names, in negation normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Matrix {
    Atom(String),
    Not(Box<Matrix>),
    And(Vec<Matrix>),
    Or(Vec<Matrix>),
}

impl Matrix {
    pub fn atom(name: &str) -> Self {
        Matrix::Atom(name.to_string())
    }

    pub fn negated(name: &str) -> Self {
        Matrix::Not(Box::new(Matrix::atom(name)))
    }

    pub fn negate(&self) -> Matrix {
        match self {
            Matrix::Atom(_) => Matrix::Not(Box::new(self.clone())),
            Matrix::Not(inner) => (**inner).clone(),
            Matrix::And(xs) => Matrix::Or(xs.iter().map(Matrix::negate).collect()),
            Matrix::Or(xs) => Matrix::And(xs.iter().map(Matrix::negate).collect()),
        }
    }

    /// Truth value for an element whose true predicates satisfy `holds`.
    pub fn eval(&self, holds: &impl Fn(&str) -> bool) -> bool {
        match self {
            Matrix::Atom(p) => holds(p),
            Matrix::Not(inner) => !inner.eval(holds),
            Matrix::And(xs) => xs.iter().all(|m| m.eval(holds)),
            Matrix::Or(xs) => xs.iter().any(|m| m.eval(holds)),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Matrix::Atom(p) => write!(f, "{p}"),
            Matrix::Not(inner) => write!(f, "¬{inner}"),
            Matrix::And(xs) | Matrix::Or(xs) => {
                let op = if matches!(self, Matrix::And(_)) { " ∧ " } else { " ∨ " };
                f.write_str("(")?;
                for (i, m) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
}

/// Boolean combination of quantified sentences of depth one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NormalSentence {
    Universal(Matrix),
    Existential(Matrix),
    BoolCombo(Connective, Vec<NormalSentence>),
}

impl NormalSentence {
    pub fn negate(&self) -> NormalSentence {
        match self {
            NormalSentence::Universal(m) => NormalSentence::Existential(m.negate()),
            NormalSentence::Existential(m) => NormalSentence::Universal(m.negate()),
            NormalSentence::BoolCombo(c, xs) => {
                let dual = match c {
                    Connective::And => Connective::Or,
                    Connective::Or => Connective::And,
                };
                NormalSentence::BoolCombo(dual, xs.iter().map(NormalSentence::negate).collect())
            }
        }
    }
}

impl fmt::Display for NormalSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormalSentence::Universal(m) => write!(f, "∀{m}"),
            NormalSentence::Existential(m) => write!(f, "∃{m}"),
            NormalSentence::BoolCombo(c, xs) => {
                let op = if *c == Connective::And { " ∧ " } else { " ∨ " };
                f.write_str("[")?;
                for (i, s) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{s}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// NNF formula whose leaves are atoms of a free variable or already
/// normalized closed subsentences.
#[derive(Debug, Clone)]
enum Mixed {
    Atom {
        pred: String,
        var: Variable,
        positive: bool,
    },
    Closed(NormalSentence),
    And(Vec<Mixed>),
    Or(Vec<Mixed>),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Quantifier {
    All,
    Some,
}

/// Case splits are exponential in the number of distinct foreign leaves.
const MAX_SPLIT_LEAVES: usize = 12;

pub fn normalize(s: &Sentence) -> Result<NormalSentence, ProverError> {
    into_normal(lower(s.formula(), true)?)
}

fn into_normal(m: Mixed) -> Result<NormalSentence, ProverError> {
    match m {
        Mixed::Closed(n) => Ok(n),
        Mixed::And(xs) => combo(Connective::And, xs),
        Mixed::Or(xs) => combo(Connective::Or, xs),
        Mixed::Atom { var, .. } => Err(ProverError::Unsupported(format!(
            "free variable `{var}` outside any quantifier"
        ))),
    }
}

fn combo(c: Connective, xs: Vec<Mixed>) -> Result<NormalSentence, ProverError> {
    let mut items = Vec::with_capacity(xs.len());
    for x in xs {
        match into_normal(x)? {
            NormalSentence::BoolCombo(inner, ys) if inner == c => items.extend(ys),
            n => items.push(n),
        }
    }
    if items.len() == 1 {
        Ok(items.pop().unwrap())
    } else {
        Ok(NormalSentence::BoolCombo(c, items))
    }
}

fn lower(f: &Formula, positive: bool) -> Result<Mixed, ProverError> {
    Ok(match f {
        Formula::Pred { name, args } => {
            if args.len() != 1 {
                return Err(ProverError::Unsupported(format!(
                    "predicate `{name}` has arity {}, only unary predicates are supported",
                    args.len()
                )));
            }
            Mixed::Atom {
                pred: name.clone(),
                var: args[0].clone(),
                positive,
            }
        }
        Formula::Not(inner) => lower(inner, !positive)?,
        Formula::And(l, r) if positive => Mixed::And(vec![lower(l, true)?, lower(r, true)?]),
        Formula::And(l, r) => Mixed::Or(vec![lower(l, false)?, lower(r, false)?]),
        Formula::Or(l, r) if positive => Mixed::Or(vec![lower(l, true)?, lower(r, true)?]),
        Formula::Or(l, r) => Mixed::And(vec![lower(l, false)?, lower(r, false)?]),
        Formula::Implies(l, r) if positive => Mixed::Or(vec![lower(l, false)?, lower(r, true)?]),
        Formula::Implies(l, r) => Mixed::And(vec![lower(l, true)?, lower(r, false)?]),
        Formula::Iff(l, r) if positive => Mixed::And(vec![
            Mixed::Or(vec![lower(l, false)?, lower(r, true)?]),
            Mixed::Or(vec![lower(l, true)?, lower(r, false)?]),
        ]),
        Formula::Iff(l, r) => Mixed::Or(vec![
            Mixed::And(vec![lower(l, true)?, lower(r, false)?]),
            Mixed::And(vec![lower(l, false)?, lower(r, true)?]),
        ]),
        Formula::ForAll(v, body) => {
            let q = if positive { Quantifier::All } else { Quantifier::Some };
            quantify(q, v, lower(body, positive)?)?
        }
        Formula::Exists(v, body) => {
            let q = if positive { Quantifier::Some } else { Quantifier::All };
            quantify(q, v, lower(body, positive)?)?
        }
    })
}

fn quantify(q: Quantifier, var: &Variable, body: Mixed) -> Result<Mixed, ProverError> {
    match scope_of(&body, var) {
        Scope::Own => return Ok(Mixed::Closed(leaf_sentence(q, to_matrix(body)))),
        // With nonempty domains a quantifier over a part that does not
        // mention its variable is vacuous.
        Scope::Foreign => return Ok(body),
        Scope::Mixed => {}
    }
    match (q, body) {
        // ∀ distributes over ∧ and ∃ over ∨.
        (Quantifier::All, Mixed::And(xs)) => Ok(Mixed::And(
            xs.into_iter().map(|x| quantify(q, var, x)).collect::<Result<_, _>>()?,
        )),
        (Quantifier::Some, Mixed::Or(xs)) => Ok(Mixed::Or(
            xs.into_iter().map(|x| quantify(q, var, x)).collect::<Result<_, _>>()?,
        )),
        (_, body) => {
            let (own, foreign, mixed) = partition(body, var);
            if mixed.is_empty() {
                // ∀x (φ(x) ∨ ψ) ≡ ∀x φ(x) ∨ ψ, dually for ∃ and ∧.
                let wrap = if q == Quantifier::All { Matrix::Or } else { Matrix::And };
                let mut parts = foreign;
                parts.push(Mixed::Closed(leaf_sentence(q, join(own, wrap))));
                return Ok(join(parts, if q == Quantifier::All { Mixed::Or } else { Mixed::And }));
            }
            let mut children: Vec<Mixed> = own.into_iter().map(from_matrix(var)).collect();
            children.extend(foreign);
            children.extend(mixed);
            let body = match q {
                Quantifier::All => Mixed::Or(children),
                Quantifier::Some => Mixed::And(children),
            };
            split(q, var, body)
        }
    }
}

/// Shannon expansion over the leaves that do not mention `var`:
/// `∀x φ ≡ ⋀σ (¬σ ∨ ∀x φσ)` and `∃x φ ≡ ⋁σ (σ ∧ ∃x φσ)` where `σ` ranges
/// over truth assignments to those leaves.
fn split(q: Quantifier, var: &Variable, body: Mixed) -> Result<Mixed, ProverError> {
    let mut leaves = Vec::new();
    foreign_leaves(&body, var, &mut leaves);
    if leaves.len() > MAX_SPLIT_LEAVES {
        return Err(ProverError::Unsupported(format!(
            "{} independent parts under one quantifier exceed the limit of {MAX_SPLIT_LEAVES}",
            leaves.len()
        )));
    }
    let own_pred = first_own_pred(&body, var).expect("mixed body mentions its variable");
    let mut parts = Vec::new();
    for sigma in 0u32..1 << leaves.len() {
        let literals = leaves.iter().enumerate().map(|(i, leaf)| {
            let value = sigma >> i & 1 == 1;
            // The literal that is true under σ, negated for clauses.
            literal(leaf, if q == Quantifier::All { !value } else { value })
        });
        let mut group: Vec<Mixed> = literals.collect();
        match substitute(&body, var, &leaves, sigma) {
            Err(value) if value == (q == Quantifier::All) => continue,
            Err(_) => {}
            Ok(rest) => group.push(Mixed::Closed(leaf_sentence(q, to_matrix(rest)))),
        }
        parts.push(match q {
            Quantifier::All => join(group, Mixed::Or),
            Quantifier::Some => join(group, Mixed::And),
        });
    }
    Ok(match (q, parts.is_empty()) {
        (Quantifier::All, true) => constant(&own_pred, true),
        (Quantifier::Some, true) => constant(&own_pred, false),
        (Quantifier::All, false) => join(parts, Mixed::And),
        (Quantifier::Some, false) => join(parts, Mixed::Or),
    })
}

fn leaf_sentence(q: Quantifier, m: Matrix) -> NormalSentence {
    match q {
        Quantifier::All => NormalSentence::Universal(m),
        Quantifier::Some => NormalSentence::Existential(m),
    }
}

/// `∀x (p(x) ∨ ¬p(x))` or its negation, standing in for a truth value.
fn constant(pred: &str, value: bool) -> Mixed {
    let top = NormalSentence::Universal(Matrix::Or(vec![Matrix::atom(pred), Matrix::negated(pred)]));
    Mixed::Closed(if value { top } else { top.negate() })
}

/// Children of a clause (`∀`) or cube (`∃`) sorted into own-only,
/// foreign-only and mixed parts.
fn partition(body: Mixed, var: &Variable) -> (Vec<Matrix>, Vec<Mixed>, Vec<Mixed>) {
    let xs = match body {
        Mixed::And(xs) | Mixed::Or(xs) => xs,
        leaf => vec![leaf],
    };
    let (mut own, mut foreign, mut mixed) = (Vec::new(), Vec::new(), Vec::new());
    for x in xs {
        match scope_of(&x, var) {
            Scope::Own => own.push(to_matrix(x)),
            Scope::Foreign => foreign.push(x),
            Scope::Mixed => mixed.push(x),
        }
    }
    (own, foreign, mixed)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Scope {
    /// Only atoms of the bound variable.
    Own,
    /// Nothing that mentions the bound variable.
    Foreign,
    Mixed,
}

fn scope_of(m: &Mixed, var: &Variable) -> Scope {
    match m {
        Mixed::Atom { var: v, .. } if v == var => Scope::Own,
        Mixed::Atom { .. } | Mixed::Closed(_) => Scope::Foreign,
        Mixed::And(xs) | Mixed::Or(xs) => {
            let mut scopes = xs.iter().map(|x| scope_of(x, var));
            let first = scopes.next().unwrap_or(Scope::Foreign);
            if scopes.all(|s| s == first) {
                first
            } else {
                Scope::Mixed
            }
        }
    }
}

/// A foreign leaf, identified up to polarity.
#[derive(Clone, PartialEq)]
enum Leaf {
    Atom(String, Variable),
    Closed(NormalSentence),
}

fn leaf_key(m: &Mixed) -> Option<(Leaf, bool)> {
    match m {
        Mixed::Atom { pred, var, positive } => Some((Leaf::Atom(pred.clone(), var.clone()), *positive)),
        Mixed::Closed(n) => {
            let negated = n.negate();
            // Store the sentence in one canonical polarity.
            if format!("{n}") <= format!("{negated}") {
                Some((Leaf::Closed(n.clone()), true))
            } else {
                Some((Leaf::Closed(negated), false))
            }
        }
        _ => None,
    }
}

fn foreign_leaves(m: &Mixed, var: &Variable, out: &mut Vec<Leaf>) {
    match m {
        Mixed::Atom { var: v, .. } if v == var => {}
        Mixed::And(xs) | Mixed::Or(xs) => xs.iter().for_each(|x| foreign_leaves(x, var, out)),
        leaf => {
            let (key, _) = leaf_key(leaf).expect("leaf");
            if !out.contains(&key) {
                out.push(key);
            }
        }
    }
}

fn literal(leaf: &Leaf, value: bool) -> Mixed {
    match leaf {
        Leaf::Atom(pred, var) => Mixed::Atom {
            pred: pred.clone(),
            var: var.clone(),
            positive: value,
        },
        Leaf::Closed(n) if value => Mixed::Closed(n.clone()),
        Leaf::Closed(n) => Mixed::Closed(n.negate()),
    }
}

/// `m` with foreign leaves fixed by `sigma`; `Err` carries a constant result.
fn substitute(m: &Mixed, var: &Variable, leaves: &[Leaf], sigma: u32) -> Result<Mixed, bool> {
    match m {
        Mixed::Atom { var: v, .. } if v == var => Ok(m.clone()),
        Mixed::And(xs) | Mixed::Or(xs) => {
            let is_and = matches!(m, Mixed::And(_));
            let mut kept = Vec::new();
            for x in xs {
                match substitute(x, var, leaves, sigma) {
                    // A false conjunct or true disjunct decides the node.
                    Err(value) if value != is_and => return Err(value),
                    Err(_) => {}
                    Ok(y) => kept.push(y),
                }
            }
            if kept.is_empty() {
                Err(is_and)
            } else if is_and {
                Ok(join(kept, Mixed::And))
            } else {
                Ok(join(kept, Mixed::Or))
            }
        }
        leaf => {
            let (key, positive) = leaf_key(leaf).expect("leaf");
            let i = leaves.iter().position(|l| *l == key).expect("collected leaf");
            Err((sigma >> i & 1 == 1) == positive)
        }
    }
}

fn first_own_pred(m: &Mixed, var: &Variable) -> Option<String> {
    match m {
        Mixed::Atom { pred, var: v, .. } if v == var => Some(pred.clone()),
        Mixed::And(xs) | Mixed::Or(xs) => xs.iter().find_map(|x| first_own_pred(x, var)),
        _ => None,
    }
}

fn from_matrix(var: &Variable) -> impl Fn(Matrix) -> Mixed + '_ {
    move |m| match m {
        Matrix::Atom(pred) => Mixed::Atom {
            pred,
            var: var.clone(),
            positive: true,
        },
        Matrix::Not(inner) => match *inner {
            Matrix::Atom(pred) => Mixed::Atom {
                pred,
                var: var.clone(),
                positive: false,
            },
            other => from_matrix(var)(other.negate()),
        },
        Matrix::And(xs) => Mixed::And(xs.into_iter().map(from_matrix(var)).collect()),
        Matrix::Or(xs) => Mixed::Or(xs.into_iter().map(from_matrix(var)).collect()),
    }
}

fn to_matrix(m: Mixed) -> Matrix {
    match m {
        Mixed::Atom { pred, positive: true, .. } => Matrix::Atom(pred),
        Mixed::Atom { pred, .. } => Matrix::negated(&pred),
        Mixed::And(xs) => Matrix::And(xs.into_iter().map(to_matrix).collect()),
        Mixed::Or(xs) => Matrix::Or(xs.into_iter().map(to_matrix).collect()),
        Mixed::Closed(_) => unreachable!("closed parts never scope over the bound variable"),
    }
}

fn join<T>(mut xs: Vec<T>, wrap: fn(Vec<T>) -> T) -> T {
    if xs.len() == 1 {
        xs.pop().unwrap()
    } else {
        wrap(xs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(name: &str) -> Formula {
        Formula::pred(name, "x")
    }

    fn norm(f: Formula) -> NormalSentence {
        normalize(&Sentence::new(f).unwrap()).unwrap()
    }

    #[test]
    fn negated_universal_becomes_existential() {
        let n = norm(Formula::not(Formula::forall("x", Formula::implies(p("p"), p("q")))));
        assert_eq!(
            n,
            NormalSentence::Existential(Matrix::And(vec![Matrix::atom("p"), Matrix::negated("q")]))
        );
    }

    #[test]
    fn conjunction_of_quantified_sentences() {
        let n = norm(Formula::and(
            Formula::exists("x", p("p")),
            Formula::forall("x", Formula::implies(p("p"), p("q"))),
        ));
        assert_eq!(
            n,
            NormalSentence::BoolCombo(
                Connective::And,
                vec![
                    NormalSentence::Existential(Matrix::atom("p")),
                    NormalSentence::Universal(Matrix::Or(vec![
                        Matrix::negated("p"),
                        Matrix::atom("q")
                    ])),
                ]
            )
        );
    }

    #[test]
    fn independent_nested_quantifiers_split() {
        let n = norm(Formula::forall(
            "x",
            Formula::exists("y", Formula::and(p("p"), Formula::pred("q", "y"))),
        ));
        assert_eq!(
            n,
            NormalSentence::BoolCombo(
                Connective::And,
                vec![
                    NormalSentence::Universal(Matrix::atom("p")),
                    NormalSentence::Existential(Matrix::atom("q")),
                ]
            )
        );
    }

    #[test]
    fn shadowed_variable_binds_innermost() {
        // ∀x ∃x p(x) ≡ ∃x p(x)
        let n = norm(Formula::forall("x", Formula::exists("x", p("p"))));
        assert_eq!(n, NormalSentence::Existential(Matrix::atom("p")));
    }

    #[test]
    fn vacuous_quantifier_drops() {
        let n = norm(Formula::forall("y", Formula::exists("x", p("p"))));
        assert_eq!(n, NormalSentence::Existential(Matrix::atom("p")));
    }

    #[test]
    fn non_unary_predicate_is_unsupported() {
        let f = Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::Pred {
                    name: "r".into(),
                    args: vec![Variable::new("x").unwrap(), Variable::new("y").unwrap()],
                },
            ),
        );
        let err = normalize(&Sentence::new(f).unwrap()).unwrap_err();
        assert!(matches!(err, ProverError::Unsupported(_)));
    }

    #[test]
    fn matrix_negation_is_involutive() {
        let m = Matrix::Or(vec![
            Matrix::And(vec![Matrix::atom("a"), Matrix::negated("b")]),
            Matrix::atom("c"),
        ]);
        assert_eq!(m.negate().negate(), m);
        assert_eq!(m.to_string(), "((a ∧ ¬b) ∨ c)");
    }
}
