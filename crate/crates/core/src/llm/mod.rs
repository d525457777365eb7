//! Language-model access: prompt templates, transports, answer extraction
//! and the prompting workflows built on them.

mod extract;
mod gateway;
mod stub;
pub mod template;
mod workflows;

use thiserror::Error;

use crate::fol::FolError;

pub use extract::{extract_boxed, extract_json_object};
pub use gateway::{
    request_body, response_content, ChatGateway, ChatRequest, HttpGateway, Message, Role, DEFAULT_CONCURRENCY,
    DEFAULT_CONTEXT_TOKENS,
};
pub use stub::{prompt_hash, ScriptedResponses, StubFixture, StubGateway};
pub use template::{all_templates, template, PromptTemplate};
pub use workflows::{
    format_premise_list, format_syllogism, split_syllogism, FormulaSyntax, LlmClient, ParseOutcome,
    TranslationOutcome,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LlmError {
    #[error("network error: {0}")]
    Network(String),
    #[error("HTTP status {0}: {1}")]
    HttpStatus(u16, String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("request timed out")]
    Timeout,
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("template `{template}` needs slot `{slot}`")]
    MissingSlot { template: String, slot: String },
    #[error("no \\boxed{{...}} group in the response")]
    NoBoxedContent,
    #[error("no JSON object or array in the response")]
    NoJsonFound,
    #[error("response does not match the expected schema: {0}")]
    SchemaMismatch(String),
    #[error("`{0}` is not a boolean")]
    NotABoolean(String),
    #[error("premise index {index} out of range for {len} premises")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("formula rejected: {0}")]
    Formula(#[from] FolError),
    #[error("proposition {proposition} could not be parsed after {attempts} attempts: {last}")]
    ParseExhausted {
        proposition: usize,
        attempts: u32,
        last: Box<LlmError>,
    },
    #[error("stub has no answer for template `{template}` (prompt sha256 {prompt_sha256})")]
    StubMiss { template: String, prompt_sha256: String },
}

impl LlmError {
    /// Problems with the content of an answer, which a resampled answer
    /// may not have. Transport and configuration errors are not retried.
    pub fn is_output_error(&self) -> bool {
        matches!(
            self,
            LlmError::NoBoxedContent
                | LlmError::NoJsonFound
                | LlmError::SchemaMismatch(_)
                | LlmError::NotABoolean(_)
                | LlmError::IndexOutOfRange { .. }
                | LlmError::Formula(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub retry_temperature: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            retry_temperature: 0.6,
        }
    }
}

impl RetryPolicy {
    /// Sampling temperature for a 1-based attempt number.
    pub fn temperature(&self, attempt: u32) -> f64 {
        if attempt <= 1 {
            0.0
        } else {
            self.retry_temperature
        }
    }
}
