//! Deterministic offline gateway driven by a fixture.
//!
//! Answers are looked up in this order: a scripted queue keyed by template
//! name and SHA-256 of the rendered prompt; the gold-FOL table for the
//! parsing templates; a fixed per-template default. Anything else is a
//! [`LlmError::StubMiss`].

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fol::{parse_latex_formula, render_prover9};

use super::gateway::{ChatGateway, ChatRequest};
use super::template::{PARSER_DEFAULT, PARSER_INITIAL, PROVER9_DEFAULT, PROVER9_INITIAL, SINGLE_STEP};
use super::LlmError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StubFixture {
    /// Proposition text to gold LaTeX formula.
    #[serde(default)]
    pub fol: BTreeMap<String, String>,
    #[serde(default)]
    pub scripted: Vec<ScriptedResponses>,
    /// Template name to a fixed answer.
    #[serde(default)]
    pub defaults: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedResponses {
    pub template: String,
    pub prompt_sha256: String,
    /// Returned in order, one per call; exhausted queues fall through.
    pub responses: Vec<String>,
}

impl StubFixture {
    pub fn load(path: &Path) -> Result<Self, LlmError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LlmError::InvalidRequest(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| LlmError::InvalidRequest(format!("{}: {e}", path.display())))
    }
}

pub fn prompt_hash(prompt: &str) -> String {
    format!("{:x}", Sha256::digest(prompt.as_bytes()))
}

#[derive(Debug, Default)]
pub struct StubGateway {
    fol: BTreeMap<String, String>,
    defaults: BTreeMap<String, String>,
    queues: Mutex<HashMap<(String, String), VecDeque<String>>>,
    calls: Mutex<Vec<(String, String)>>,
}

impl StubGateway {
    pub fn new(fixture: StubFixture) -> Self {
        let mut queues: HashMap<(String, String), VecDeque<String>> = HashMap::new();
        for s in fixture.scripted {
            queues
                .entry((s.template, s.prompt_sha256))
                .or_default()
                .extend(s.responses);
        }
        Self {
            fol: fixture.fol,
            defaults: fixture.defaults,
            queues: Mutex::new(queues),
            calls: Mutex::new(Vec::new()),
        }
    }

    /// Queues `responses` for the exact rendered `prompt`.
    pub fn script(&self, template: &str, prompt: &str, responses: impl IntoIterator<Item = String>) {
        self.queues
            .lock()
            .unwrap()
            .entry((template.to_string(), prompt_hash(prompt)))
            .or_default()
            .extend(responses);
    }

    /// Template name and prompt hash of every call so far.
    pub fn calls(&self) -> Vec<(String, String)> {
        self.calls.lock().unwrap().clone()
    }

    pub fn call_count(&self, template: &str) -> usize {
        self.calls.lock().unwrap().iter().filter(|(t, _)| t == template).count()
    }

    fn gold(&self, proposition: &str) -> Option<&str> {
        self.fol.get(proposition.trim()).map(String::as_str)
    }

    fn from_gold(&self, template: &str, prompt: &str) -> Option<String> {
        match template {
            PARSER_DEFAULT | PARSER_INITIAL => {
                let latex = self.gold(after_last(prompt, "Proposition: ")?)?;
                Some(format!("\\boxed{{{latex}}}"))
            }
            PROVER9_DEFAULT | PROVER9_INITIAL => {
                let latex = self.gold(after_last(prompt, "Proposition: ")?)?;
                let p9 = render_prover9(&parse_latex_formula(latex).ok()?);
                Some(format!("\\boxed{{{p9}}}"))
            }
            SINGLE_STEP => {
                let text = after_last(prompt, "Syllogism:")?;
                let mut pairs = Vec::new();
                for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                    let proposition = strip_label(line);
                    pairs.push(serde_json::json!({
                        "proposition": proposition,
                        "fol_formula": self.gold(proposition)?,
                    }));
                }
                Some(serde_json::Value::Array(pairs).to_string())
            }
            _ => None,
        }
    }
}

fn after_last<'a>(text: &'a str, marker: &str) -> Option<&'a str> {
    text.rfind(marker).map(|i| text[i + marker.len()..].trim())
}

/// Drops a leading `Premise 2:` or `Conclusion:` label.
pub(crate) fn strip_label(line: &str) -> &str {
    match line.split_once(": ") {
        Some((label, rest)) if label == "Conclusion" || label.starts_with("Premise") => rest,
        _ => line,
    }
}

impl ChatGateway for StubGateway {
    fn chat(&self, request: &ChatRequest) -> Result<String, LlmError> {
        request.validate()?;
        let prompt = request.prompt();
        let key = (request.template.clone(), prompt_hash(prompt));
        self.calls.lock().unwrap().push(key.clone());
        if let Some(answer) = self.queues.lock().unwrap().get_mut(&key).and_then(VecDeque::pop_front) {
            return Ok(answer);
        }
        if let Some(answer) = self.from_gold(&request.template, prompt) {
            return Ok(answer);
        }
        if let Some(answer) = self.defaults.get(&request.template) {
            return Ok(answer.clone());
        }
        Err(LlmError::StubMiss {
            template: key.0,
            prompt_sha256: key.1,
        })
    }
}
