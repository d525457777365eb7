//! Random formulas and prover problems for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::fol::{Formula, Sentence, Variable};
use crate::prover::ProverProblem;

/// Shape limits for generated monadic problems.
#[derive(Debug, Clone, Copy)]
pub struct ProblemShape {
    /// Number of distinct predicates to draw from.
    pub predicates: usize,
    /// Upper bound on premises plus conclusion.
    pub max_sentences: usize,
    /// Depth of the propositional matrix under a quantifier.
    pub matrix_depth: usize,
}

impl Default for ProblemShape {
    fn default() -> Self {
        Self {
            predicates: 3,
            max_sentences: 4,
            matrix_depth: 3,
        }
    }
}

const PREDICATE_NAMES: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];

fn predicate_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| match PREDICATE_NAMES.get(i) {
            Some(n) => n.to_string(),
            None => format!("p{i}"),
        })
        .collect()
}

/// Quantifier-free formula over unary atoms of the variables in `vars`.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, preds: &[String], vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let p = preds.choose(rng).expect("at least one predicate");
        let v = vars.choose(rng).expect("at least one variable");
        return Formula::pred(p, v);
    }
    let sub = |rng: &mut R| random_matrix(rng, preds, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

fn quantify(universal: bool, var: &str, body: Formula) -> Formula {
    if universal {
        Formula::forall(var, body)
    } else {
        Formula::exists(var, body)
    }
}

/// A closed monadic sentence: mostly single quantifiers over a matrix, with
/// some sentence-level connectives and some two-variable nestings.
pub fn random_monadic_sentence<R: Rng + ?Sized>(rng: &mut R, preds: &[String], matrix_depth: usize) -> Sentence {
    let f = match rng.gen_range(0..10) {
        0..=5 => quantify(rng.gen(), "x", random_matrix(rng, preds, &["x"], matrix_depth)),
        6 => Formula::not(quantify(rng.gen(), "x", random_matrix(rng, preds, &["x"], matrix_depth))),
        7 | 8 => {
            let l = quantify(rng.gen(), "x", random_matrix(rng, preds, &["x"], matrix_depth.min(2)));
            let r = quantify(rng.gen(), "y", random_matrix(rng, preds, &["y"], matrix_depth.min(2)));
            match rng.gen_range(0..4) {
                0 => Formula::and(l, r),
                1 => Formula::or(l, r),
                2 => Formula::implies(l, r),
                _ => Formula::iff(l, r),
            }
        }
        _ => {
            let body = random_matrix(rng, preds, &["x", "y"], matrix_depth.min(2));
            quantify(rng.gen(), "x", quantify(rng.gen(), "y", body))
        }
    };
    Sentence::new(f).expect("generated sentences are closed")
}

/// A random entailment problem; the sentence count (premises plus
/// conclusion) is drawn from `1..=max_sentences`.
pub fn random_problem<R: Rng + ?Sized>(rng: &mut R, shape: ProblemShape) -> ProverProblem {
    let k = rng.gen_range(1..=shape.predicates.max(1));
    let preds = predicate_names(k);
    let n = rng.gen_range(1..=shape.max_sentences.max(1));
    let premises = (1..n)
        .map(|_| random_monadic_sentence(rng, &preds, shape.matrix_depth))
        .collect();
    let conclusion = random_monadic_sentence(rng, &preds, shape.matrix_depth);
    ProverProblem::new(premises, conclusion)
}

/// Arbitrary closed formula for parser round trips: any arity, any
/// connective, variables drawn from the enclosing binders.
pub fn random_sentence<R: Rng + ?Sized>(rng: &mut R, depth: usize) -> Sentence {
    const VARS: &[&str] = &["x", "y", "z", "w", "v1"];
    const PREDS: &[&str] = &["bird", "Animal", "p", "q_2", "flightless_thing", "S", "rose"];
    fn go<R: Rng + ?Sized>(rng: &mut R, depth: usize, scope: &mut Vec<&'static str>) -> Formula {
        let must_bind = scope.is_empty();
        if !must_bind && (depth == 0 || rng.gen_bool(0.25)) {
            let arity = *[1usize, 1, 1, 2, 3].choose(rng).unwrap();
            let args = (0..arity)
                .map(|_| Variable::new(*scope.choose(rng).unwrap()).unwrap())
                .collect();
            return Formula::Pred {
                name: PREDS.choose(rng).unwrap().to_string(),
                args,
            };
        }
        let choice = if must_bind { rng.gen_range(0..2) } else { rng.gen_range(0..7) };
        let depth = depth.saturating_sub(1);
        match choice {
            0 | 1 => {
                let v = *VARS.choose(rng).unwrap();
                scope.push(v);
                let body = go(rng, depth, scope);
                scope.pop();
                quantify(choice == 0, v, body)
            }
            2 => Formula::not(go(rng, depth, scope)),
            3 => Formula::and(go(rng, depth, scope), go(rng, depth, scope)),
            4 => Formula::or(go(rng, depth, scope), go(rng, depth, scope)),
            5 => Formula::implies(go(rng, depth, scope), go(rng, depth, scope)),
            _ => Formula::iff(go(rng, depth, scope), go(rng, depth, scope)),
        }
    }
    let f = if rng.gen_bool(0.2) {
        // Sentence-level connective between two closed parts.
        let l = go(rng, depth, &mut Vec::new());
        let r = go(rng, depth, &mut Vec::new());
        Formula::and(l, r)
    } else {
        go(rng, depth, &mut Vec::new())
    };
    Sentence::new(f).expect("generated sentences are closed")
}
