//! End-to-end processing of syllogism datasets: optional translation,
//! formalization by the chosen strategy, existential import, proving, and
//! premise retrieval.

mod retrieval;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aristotle::augment_existential_import;
use crate::fol::{render_latex, Sentence};
use crate::llm::{format_syllogism, split_syllogism, ChatGateway, FormulaSyntax, LlmClient, LlmError, RetryPolicy};
use crate::prover::{
    decide_by_domain_enumeration, decide_entailment, prove_external, ProverError, ProverProblem, ProverVerdict,
    Status, DEFAULT_PROVER9_TIMEOUT,
};

pub use retrieval::retrieve_relevant_premises;

fn default_language() -> String {
    "en".to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllogism {
    pub id: String,
    pub premises: Vec<String>,
    pub conclusion: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_valid: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_plausible: Option<bool>,
    /// 0-based premise indices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_relevant: Option<Vec<usize>>,
    #[serde(default = "default_language")]
    pub language: String,
}

impl Syllogism {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::Input(format!("{}: {msg}", self.id)));
        if self.id.trim().is_empty() {
            return Err(PipelineError::Input("record without id".into()));
        }
        if self.premises.is_empty() {
            return bad("no premises".into());
        }
        if self.premises.iter().any(|p| p.trim().is_empty()) {
            return bad("empty premise".into());
        }
        if self.conclusion.trim().is_empty() {
            return bad("empty conclusion".into());
        }
        if let Some(i) = self.gold_relevant.iter().flatten().find(|&&i| i >= self.premises.len()) {
            return bad(format!("gold relevant index {i} out of range"));
        }
        Ok(())
    }

    pub fn is_english(&self) -> bool {
        self.language.eq_ignore_ascii_case("en")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subtask {
    /// Validity, English.
    One,
    /// Validity and relevant premises, English.
    Two,
    /// Validity, multilingual.
    Three,
    /// Validity and relevant premises, multilingual.
    Four,
}

impl Subtask {
    pub fn wants_relevance(self) -> bool {
        matches!(self, Subtask::Two | Subtask::Four)
    }

    pub fn is_multilingual(self) -> bool {
        matches!(self, Subtask::Three | Subtask::Four)
    }
}

impl TryFrom<u8> for Subtask {
    type Error = PipelineError;

    fn try_from(n: u8) -> Result<Self, PipelineError> {
        match n {
            1 => Ok(Subtask::One),
            2 => Ok(Subtask::Two),
            3 => Ok(Subtask::Three),
            4 => Ok(Subtask::Four),
            _ => Err(PipelineError::Input(format!("no subtask {n}; expected 1 to 4"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One model call per proposition, LaTeX output, symbolic prover.
    MultiStep,
    /// One model call for the whole syllogism.
    SingleStep,
    /// Propositions parsed straight into Prover9 syntax.
    DirectProver9,
    /// The model answers validity (and relevance) itself.
    EndToEnd,
    /// Symbolic parsing, but the model decides entailment.
    LlmProver,
    /// Symbolic validity, model-chosen relevant premises.
    LlmRetrieval,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::MultiStep,
        Strategy::SingleStep,
        Strategy::DirectProver9,
        Strategy::EndToEnd,
        Strategy::LlmProver,
        Strategy::LlmRetrieval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::MultiStep => "multistep",
            Strategy::SingleStep => "singlestep",
            Strategy::DirectProver9 => "directprover9",
            Strategy::EndToEnd => "endtoend",
            Strategy::LlmProver => "llmprover",
            Strategy::LlmRetrieval => "llmretrieval",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_lowercase();
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == key)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineChoice {
    TypeSpace,
    /// Brute force over domains up to `2^k` elements; only practical for a
    /// handful of predicates.
    DomainEnumeration,
    Prover9 { binary: PathBuf, timeout: Duration },
}

impl EngineChoice {
    pub fn prover9(binary: PathBuf) -> Self {
        EngineChoice::Prover9 {
            binary,
            timeout: DEFAULT_PROVER9_TIMEOUT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub strategy: Strategy,
    pub translate_first: bool,
    pub augment_import: bool,
    pub engine: EngineChoice,
    pub retry: RetryPolicy,
    pub worker_limit: usize,
    pub model: String,
}

impl Default for PipelineConfig {
    /// Proposition-by-proposition parsing, existential import, embedded
    /// prover, translation for the multilingual subtasks.
    fn default() -> Self {
        Self {
            strategy: Strategy::MultiStep,
            translate_first: true,
            augment_import: true,
            engine: EngineChoice::TypeSpace,
            retry: RetryPolicy::default(),
            worker_limit: 4,
            model: "qwen3-4b".to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub fol_premises: Vec<String>,
    pub fol_conclusion: String,
    pub engine: String,
    pub attempts: u32,
    #[serde(default)]
    pub failed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub valid: bool,
    /// Sorted, unique, 0-based; empty when not requested or not valid.
    pub relevant: Vec<usize>,
    pub diagnostics: Diagnostics,
}

impl Prediction {
    fn failed(id: &str, error: &PipelineError) -> Self {
        Self {
            id: id.to_string(),
            valid: false,
            relevant: Vec::new(),
            diagnostics: Diagnostics {
                failed: true,
                error: Some(error.to_string()),
                ..Diagnostics::default()
            },
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Llm(#[from] LlmError),
    #[error("{0}")]
    Prover(#[from] ProverError),
    #[error("the prover gave no decision")]
    Inconclusive,
    #[error("this strategy needs a language-model gateway")]
    NoGateway,
    #[error("worker pool: {0}")]
    Pool(String),
}

/// Entailment under `engine`, adding existential import first when asked.
pub(crate) fn entails(
    premises: &[Sentence],
    conclusion: &Sentence,
    engine: &EngineChoice,
    augment_import: bool,
) -> Result<(bool, ProverVerdict), PipelineError> {
    let premises = if augment_import {
        augment_existential_import(premises)?
    } else {
        premises.to_vec()
    };
    let problem = ProverProblem::new(premises, conclusion.clone());
    let verdict = match engine {
        EngineChoice::TypeSpace => decide_entailment(&problem)?,
        EngineChoice::DomainEnumeration => {
            let k = problem.predicates().len() as u32;
            if k >= 16 {
                return Err(ProverError::Unsupported(format!("{k} predicates are too many to enumerate")).into());
            }
            decide_by_domain_enumeration(&problem, 1 << k)?
        }
        EngineChoice::Prover9 { binary, timeout } => prove_external(&problem, binary, *timeout)?,
    };
    match verdict.status() {
        Status::Unsupported => Err(PipelineError::Inconclusive),
        status => Ok((status == Status::Entailed, verdict)),
    }
}

/// Runs samples through the configured strategy.
pub struct Pipeline<'a> {
    pub config: PipelineConfig,
    gateway: Option<&'a dyn ChatGateway>,
}

impl<'a> Pipeline<'a> {
    pub fn new(config: PipelineConfig, gateway: Option<&'a dyn ChatGateway>) -> Self {
        Self { config, gateway }
    }

    fn client(&self) -> Result<LlmClient<'a>, PipelineError> {
        let gateway = self.gateway.ok_or(PipelineError::NoGateway)?;
        Ok(LlmClient::new(gateway, &self.config.model).with_policy(self.config.retry))
    }

    /// Validity (and, for the relevance subtasks, relevant premises) of one
    /// sample.
    pub fn classify(&self, s: &Syllogism, subtask: Subtask) -> Result<Prediction, PipelineError> {
        s.validate()?;
        let cfg = &self.config;
        let mut diagnostics = Diagnostics::default();

        let (premises, conclusion) = if subtask.is_multilingual() && cfg.translate_first && !s.is_english() {
            let outcome = self.client()?.translate_syllogism(&format_syllogism(&s.premises, &s.conclusion))?;
            let split = split_syllogism(&outcome.translation, s.premises.len())?;
            diagnostics.translation = Some(outcome.translation);
            split
        } else {
            (s.premises.clone(), s.conclusion.clone())
        };

        if cfg.strategy == Strategy::EndToEnd {
            let text = format_syllogism(&premises, &conclusion);
            let (valid, relevant) =
                self.client()?
                    .end_to_end_classify(&text, premises.len(), subtask.wants_relevance())?;
            diagnostics.engine = "llm-end-to-end".into();
            diagnostics.attempts = 1;
            return Ok(Prediction {
                id: s.id.clone(),
                valid,
                relevant: if valid { relevant.unwrap_or_default() } else { Vec::new() },
                diagnostics,
            });
        }

        let mut propositions = premises.clone();
        propositions.push(conclusion.clone());
        let client = self.client()?;
        let parsed = match cfg.strategy {
            Strategy::SingleStep => client.parse_syllogism_singlestep(&premises, &conclusion)?,
            Strategy::DirectProver9 => client.parse_syllogism_multistep(&propositions, FormulaSyntax::Prover9)?,
            _ => client.parse_syllogism_multistep(&propositions, FormulaSyntax::Latex)?,
        };
        let mut sentences = parsed.sentences.clone();
        let fol_conclusion = sentences.pop().expect("conclusion parsed");
        diagnostics.fol_premises = sentences.iter().map(render_latex).collect();
        diagnostics.fol_conclusion = render_latex(&fol_conclusion);
        diagnostics.attempts = parsed.total_attempts();

        let valid = if cfg.strategy == Strategy::LlmProver {
            diagnostics.engine = "llm-prover".into();
            client.llm_prove(&diagnostics.fol_premises, &diagnostics.fol_conclusion)?
        } else {
            let (valid, verdict) = entails(&sentences, &fol_conclusion, &cfg.engine, cfg.augment_import)?;
            diagnostics.engine = verdict.engine().to_string();
            diagnostics.countermodel = verdict.countermodel().map(|m| m.to_string());
            valid
        };

        let relevant = if subtask.wants_relevance() && valid {
            if cfg.strategy == Strategy::LlmRetrieval {
                client.llm_retrieve_relevant(&premises, &conclusion)?
            } else {
                retrieve_relevant_premises(&sentences, &fol_conclusion, &cfg.engine, cfg.augment_import)?
            }
        } else {
            Vec::new()
        };

        Ok(Prediction {
            id: s.id.clone(),
            valid,
            relevant,
            diagnostics,
        })
    }

    /// Processes a dataset on up to `worker_limit` threads. Output order
    /// follows input order; a failing sample becomes an invalid prediction
    /// flagged in its diagnostics.
    pub fn run_subtask(&self, dataset: &[Syllogism], subtask: Subtask) -> Result<Vec<Prediction>, PipelineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.config.worker_limit.max(1))
            .build()
            .map_err(|e| PipelineError::Pool(e.to_string()))?;
        Ok(pool.install(|| {
            dataset
                .par_iter()
                .map(|s| self.classify(s, subtask).unwrap_or_else(|e| Prediction::failed(&s.id, &e)))
                .collect()
        }))
    }
}
