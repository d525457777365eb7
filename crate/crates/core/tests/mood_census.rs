use syllo_core::aristotle::{augment_existential_import, figure_mood_problems};
use syllo_core::prover::{decide_by_domain_enumeration, decide_entailment, ProverProblem, Status};

fn census(with_import: bool) -> Vec<String> {
    let mut valid = Vec::new();
    for mp in figure_mood_problems() {
        let problem = if with_import {
            ProverProblem::new(augment_existential_import(&mp.problem.premises).unwrap(), mp.problem.conclusion.clone())
        } else {
            mp.problem.clone()
        };
        let fast = decide_entailment(&problem).unwrap().status();
        let oracle = decide_by_domain_enumeration(&problem, 8).unwrap().status();
        assert_eq!(fast, oracle, "{}", mp.label());
        if fast == Status::Entailed {
            valid.push(mp.label());
        }
    }
    valid
}

#[test]
fn fifteen_moods_without_import() {
    let valid = census(false);
    println!("{valid:?}");
    assert_eq!(valid.len(), 15);
    for m in ["AAA-1", "EAE-1", "AII-1", "EIO-1", "EAE-2", "AEE-2", "EIO-2", "AOO-2", "IAI-3", "AII-3", "OAO-3", "EIO-3", "AEE-4", "IAI-4", "EIO-4"] {
        assert!(valid.contains(&m.to_string()), "{m}");
    }
}

#[test]
fn twenty_four_moods_with_import() {
    let valid = census(true);
    println!("{valid:?}");
    assert_eq!(valid.len(), 24);
    for m in ["AAI-1", "EAO-1", "AEO-2", "EAO-2", "AAI-3", "EAO-3", "AAI-4", "AEO-4", "EAO-4"] {
        assert!(valid.contains(&m.to_string()), "{m}");
    }
}
