//! Prompt templates shipped as text assets with `{slot}` placeholders.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::LlmError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: &'static str,
    pub body: &'static str,
    pub required_slots: &'static [&'static str],
}

macro_rules! template {
    ($name:literal, [$($slot:literal),*]) => {
        PromptTemplate {
            name: $name,
            body: include_str!(concat!("../../assets/prompts/", $name, ".txt")),
            required_slots: &[$($slot),*],
        }
    };
}

pub const PARSER_DEFAULT: &str = "parser_default";
pub const PARSER_INITIAL: &str = "parser_initial";
pub const TRANSLATE: &str = "translate";
pub const TRANSLATE_EVALUATE: &str = "translate_evaluate";
pub const TRANSLATE_FEEDBACK: &str = "translate_feedback";
pub const END_TO_END: &str = "end_to_end";
pub const END_TO_END_RETRIEVAL: &str = "end_to_end_retrieval";
pub const PROVER9_DEFAULT: &str = "prover9_default";
pub const PROVER9_INITIAL: &str = "prover9_initial";
pub const SINGLE_STEP: &str = "single_step";
pub const LLM_PROVER: &str = "llm_prover";
pub const LLM_RETRIEVAL: &str = "llm_retrieval";

pub fn all_templates() -> &'static [PromptTemplate] {
    static TEMPLATES: OnceLock<Vec<PromptTemplate>> = OnceLock::new();
    TEMPLATES.get_or_init(|| {
        vec![
            template!("parser_default", ["previous_propositions", "proposition"]),
            template!("parser_initial", ["proposition"]),
            template!("translate", ["syllogism"]),
            template!("translate_evaluate", ["formatted_original", "translation"]),
            template!("translate_feedback", ["syllogism", "feedback"]),
            template!("end_to_end", ["syllogism"]),
            template!("end_to_end_retrieval", ["syllogism"]),
            template!("prover9_default", ["previous_propositions", "proposition"]),
            template!("prover9_initial", ["proposition"]),
            template!("single_step", ["num_premises", "syllogism"]),
            template!("llm_prover", ["premises", "conclusion"]),
            template!("llm_retrieval", ["premises", "conclusion"]),
        ]
    })
}

pub fn template(name: &str) -> Option<&'static PromptTemplate> {
    all_templates().iter().find(|t| t.name == name)
}

impl PromptTemplate {
    /// Substitutes every `{slot}` naming a required slot in one pass, so
    /// slot values containing braces are never re-expanded. Other braces
    /// are left alone.
    pub fn render(&self, slots: &[(&str, &str)]) -> Result<String, LlmError> {
        let values: BTreeMap<&str, &str> = slots.iter().copied().collect();
        if let Some(missing) = self.required_slots.iter().find(|s| !values.contains_key(*s)) {
            return Err(LlmError::MissingSlot {
                template: self.name.to_string(),
                slot: missing.to_string(),
            });
        }
        let mut out = String::with_capacity(self.body.len() + 256);
        let mut rest = self.body;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let after = &rest[open + 1..];
            let name_len = after
                .find(|c: char| !(c.is_ascii_lowercase() || c == '_'))
                .unwrap_or(after.len());
            let name = &after[..name_len];
            match (after[name_len..].starts_with('}'), values.get(name)) {
                (true, Some(value)) if self.required_slots.contains(&name) => {
                    out.push_str(value);
                    rest = &after[name_len + 1..];
                }
                _ => {
                    out.push('{');
                    rest = after;
                }
            }
        }
        out.push_str(rest);
        Ok(out)
    }
}
