//! Prover-driven selection of the premises a conclusion actually needs.

use crate::fol::Sentence;

use super::{entails, EngineChoice, PipelineError};

/// Greedy premise pruning with permanent removal. Each premise, in index
/// order, is dropped from the working set if the rest still entails the
/// conclusion; existential import (when enabled) is recomputed from the
/// working set at every check. Returns the surviving indices, or nothing
/// when the full set does not entail the conclusion.
pub fn retrieve_relevant_premises(
    premises: &[Sentence],
    conclusion: &Sentence,
    engine: &EngineChoice,
    augment_import: bool,
) -> Result<Vec<usize>, PipelineError> {
    let check = |keep: &[usize]| {
        let subset: Vec<Sentence> = keep.iter().map(|&i| premises[i].clone()).collect();
        entails(&subset, conclusion, engine, augment_import).map(|(yes, _)| yes)
    };
    let mut working: Vec<usize> = (0..premises.len()).collect();
    if !check(&working)? {
        return Ok(Vec::new());
    }
    for i in 0..premises.len() {
        let without: Vec<usize> = working.iter().copied().filter(|&j| j != i).collect();
        if check(&without)? {
            working = without;
        }
    }
    Ok(working)
}
