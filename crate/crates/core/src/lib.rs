pub mod aristotle;
pub mod evalkit;
pub mod fol;
pub mod llm;
pub mod pipeline;
pub mod prover;
pub mod random;
