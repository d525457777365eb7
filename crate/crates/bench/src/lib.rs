//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use syllo_core::fol::render_latex;
use syllo_core::prover::ProverProblem;
use syllo_core::random::{random_problem, random_sentence, ProblemShape};

pub fn monadic_problems(n: usize, seed: u64) -> Vec<ProverProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_problem(&mut rng, ProblemShape::default())).collect()
}

/// LaTeX renderings of random formulas of the given depth.
pub fn latex_corpus(n: usize, depth: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| render_latex(&random_sentence(&mut rng, depth))).collect()
}
