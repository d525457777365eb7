//! Relevance datasets built by mixing unrelated premises into labelled
//! syllogisms.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pipeline::Syllogism;

use super::EvalError;

const STOP_WORDS: &[&str] = &[
    "all", "and", "any", "are", "but", "can", "does", "each", "every", "for", "from", "has", "have", "into", "is",
    "it", "its", "not", "none", "of", "some", "that", "the", "their", "them", "then", "there", "these", "they",
    "thing", "things", "this", "those", "to", "was", "were", "which", "who", "with", "without", "also", "been",
    "being", "least", "one", "only", "such", "than", "therefore", "thus", "hence", "must", "may", "might",
    "nothing", "anything", "everything", "something", "cannot",
];

/// Lowercase words of three or more letters outside the stop list, with a
/// trailing plural `s` dropped.
pub fn content_tokens(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .map(str::to_lowercase)
        .filter(|w| w.chars().count() >= 3 && !STOP_WORDS.contains(&w.as_str()))
        .map(|w| match w.strip_suffix('s') {
            Some(stem) if stem.chars().count() >= 3 && !stem.ends_with('s') => stem.to_string(),
            _ => w,
        })
        .collect()
}

/// Tokens found in at least two propositions of `s`.
fn shared_tokens(s: &Syllogism) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut shared = BTreeSet::new();
    for text in s.premises.iter().chain([&s.conclusion]) {
        for t in content_tokens(text) {
            if !seen.insert(t.clone()) {
                shared.insert(t);
            }
        }
    }
    shared
}

/// For each base sample, draws `k` in `k_range` distractor premises from
/// pool samples that mention one of its shared tokens. Plausible samples
/// only borrow from plausible pool samples. Premises are de-duplicated and
/// shuffled; `gold_relevant` holds the new positions of the original
/// premises when the sample is valid and is empty when it is invalid.
pub fn synthesize_subtask2(
    base: &[Syllogism],
    pool: &[Syllogism],
    k_range: (usize, usize),
    seed: u64,
) -> Result<Vec<Syllogism>, EvalError> {
    let (k_min, k_max) = k_range;
    if k_min == 0 || k_min > k_max {
        return Err(EvalError::InvalidArgument(format!("bad distractor range {k_min}..={k_max}")));
    }
    let base_ids: BTreeSet<&str> = base.iter().map(|s| s.id.as_str()).collect();
    if let Some(s) = pool.iter().find(|s| base_ids.contains(s.id.as_str())) {
        return Err(EvalError::InvalidArgument(format!("`{}` is in both base and pool", s.id)));
    }
    let pool_tokens: Vec<BTreeSet<String>> = pool
        .iter()
        .map(|s| s.premises.iter().chain([&s.conclusion]).flat_map(|t| content_tokens(t)).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(base.len());
    for s in base {
        let shared = shared_tokens(s);
        let mut candidates: Vec<&String> = Vec::new();
        for (p, tokens) in pool.iter().zip(&pool_tokens) {
            if s.label_plausible == Some(true) && p.label_plausible != Some(true) {
                continue;
            }
            if tokens.is_disjoint(&shared) {
                continue;
            }
            for premise in &p.premises {
                if !s.premises.contains(premise) && !candidates.contains(&premise) {
                    candidates.push(premise);
                }
            }
        }
        if candidates.len() < k_min {
            return Err(EvalError::InsufficientPool {
                id: s.id.clone(),
                needed: k_min,
                found: candidates.len(),
            });
        }
        let k = rng.gen_range(k_min..=k_max).min(candidates.len());
        let distractors: Vec<String> = candidates.choose_multiple(&mut rng, k).map(|p| p.to_string()).collect();

        let mut originals: Vec<String> = Vec::new();
        for p in &s.premises {
            if !originals.contains(p) {
                originals.push(p.clone());
            }
        }
        let mut merged: Vec<(bool, String)> = originals.into_iter().map(|p| (true, p)).collect();
        merged.extend(distractors.into_iter().map(|p| (false, p)));
        merged.shuffle(&mut rng);

        let gold_relevant = s.label_valid.map(|valid| {
            if valid {
                merged.iter().enumerate().filter(|(_, (orig, _))| *orig).map(|(i, _)| i).collect()
            } else {
                Vec::new()
            }
        });
        out.push(Syllogism {
            premises: merged.into_iter().map(|(_, p)| p).collect(),
            gold_relevant,
            ..s.clone()
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syl(id: &str, premises: &[&str], conclusion: &str, valid: bool, plausible: bool) -> Syllogism {
        Syllogism {
            id: id.into(),
            premises: premises.iter().map(|p| p.to_string()).collect(),
            conclusion: conclusion.into(),
            label_valid: Some(valid),
            label_plausible: Some(plausible),
            gold_relevant: None,
            language: "en".into(),
        }
    }

    fn base() -> Vec<Syllogism> {
        vec![syl(
            "b1",
            &["All dogs are mammals.", "All mammals are animals."],
            "All dogs are animals.",
            true,
            true,
        )]
    }

    fn pool() -> Vec<Syllogism> {
        vec![
            syl("p1", &["All cats are mammals.", "Some pets are cats."], "Some pets are mammals.", true, true),
            syl("p2", &["No fish is a mammal.", "All trout are fish."], "No trout is a mammal.", true, true),
            syl("p3", &["All animals breathe.", "Some rocks are animals."], "Some rocks breathe.", true, false),
            syl("p4", &["All stars are hot.", "The sun is a star."], "The sun is hot.", true, true),
        ]
    }

    #[test]
    fn tokens() {
        let t = content_tokens("All dogs are mammals, and some cats are not.");
        assert_eq!(t, ["cat", "dog", "mammal"].iter().map(|s| s.to_string()).collect());
    }

    #[test]
    fn originals_are_marked_relevant() {
        let out = synthesize_subtask2(&base(), &pool(), (3, 5), 4).unwrap();
        let s = &out[0];
        let gold = s.gold_relevant.as_ref().unwrap();
        let kept: Vec<&String> = gold.iter().map(|&i| &s.premises[i]).collect();
        assert_eq!(kept.len(), 2);
        assert!(kept.contains(&&"All dogs are mammals.".to_string()));
        assert!(kept.contains(&&"All mammals are animals.".to_string()));
        assert!((5..=6).contains(&s.premises.len()));
        // Plausible base: nothing from the implausible p3, nothing unrelated.
        assert!(!s.premises.iter().any(|p| p.contains("rocks") || p.contains("breathe") || p.contains("star")));
    }

    #[test]
    fn deterministic_under_seed() {
        let a = serde_json::to_string(&synthesize_subtask2(&base(), &pool(), (3, 5), 9).unwrap()).unwrap();
        let b = serde_json::to_string(&synthesize_subtask2(&base(), &pool(), (3, 5), 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unrelated_pool_is_insufficient() {
        let pool = vec![syl("p4", &["All stars are hot.", "The sun is a star."], "The sun is hot.", true, true)];
        assert!(matches!(
            synthesize_subtask2(&base(), &pool, (3, 5), 1),
            Err(EvalError::InsufficientPool { found: 0, .. })
        ));
    }

    #[test]
    fn invalid_samples_get_empty_relevance() {
        let mut b = base();
        b[0].label_valid = Some(false);
        b[0].label_plausible = Some(false);
        let out = synthesize_subtask2(&b, &pool(), (3, 3), 2).unwrap();
        assert_eq!(out[0].gold_relevant, Some(vec![]));
        assert_eq!(out[0].premises.len(), 5);
    }

    #[test]
    fn overlapping_ids_rejected() {
        let mut p = pool();
        p[0].id = "b1".into();
        assert!(synthesize_subtask2(&base(), &p, (3, 5), 1).is_err());
    }
}
