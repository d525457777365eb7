//! Prompting workflows: proposition-by-proposition parsing, single-call
//! parsing, translation with self-evaluation, and the baselines that let
//! the model classify, prove or retrieve on its own.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::fol::{parse_latex_formula, parse_prover9_formula, render_latex, render_prover9, PredicateMapping, Sentence};

use super::extract::{extract_boxed, extract_json_object, loose_bool};
use super::gateway::{ChatGateway, ChatRequest, DEFAULT_CONTEXT_TOKENS};
use super::stub::strip_label;
use super::template::{self, template};
use super::{LlmError, RetryPolicy};

/// `Premise 1: ...` lines followed by `Conclusion: ...`.
pub fn format_syllogism(premises: &[String], conclusion: &str) -> String {
    let mut out = String::new();
    for (i, p) in premises.iter().enumerate() {
        out.push_str(&format!("Premise {}: {}\n", i + 1, p.trim()));
    }
    out.push_str(&format!("Conclusion: {}", conclusion.trim()));
    out
}

/// Inverse of [`format_syllogism`] for text with `n_premises` premises;
/// labels are optional.
pub fn split_syllogism(text: &str, n_premises: usize) -> Result<(Vec<String>, String), LlmError> {
    let mut lines: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| strip_label(l).to_string())
        .collect();
    if lines.len() != n_premises + 1 {
        return Err(LlmError::SchemaMismatch(format!(
            "expected {} propositions, found {} lines",
            n_premises + 1,
            lines.len()
        )));
    }
    let conclusion = lines.pop().expect("nonempty");
    Ok((lines, conclusion))
}

/// `[i] text` lines with 0-based indices.
pub fn format_premise_list(premises: &[String]) -> String {
    premises
        .iter()
        .enumerate()
        .map(|(i, p)| format!("[{i}] {p}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormulaSyntax {
    Latex,
    Prover9,
}

impl FormulaSyntax {
    fn templates(self) -> (&'static str, &'static str) {
        match self {
            FormulaSyntax::Latex => (template::PARSER_INITIAL, template::PARSER_DEFAULT),
            FormulaSyntax::Prover9 => (template::PROVER9_INITIAL, template::PROVER9_DEFAULT),
        }
    }

    fn parse(self, text: &str) -> Result<Sentence, LlmError> {
        Ok(match self {
            FormulaSyntax::Latex => parse_latex_formula(text)?,
            FormulaSyntax::Prover9 => parse_prover9_formula(text)?,
        })
    }

    fn render(self, s: &Sentence) -> String {
        match self {
            FormulaSyntax::Latex => render_latex(s),
            FormulaSyntax::Prover9 => render_prover9(s),
        }
    }
}

/// Parsed propositions of one syllogism.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseOutcome {
    /// One sentence per input proposition, in order.
    pub sentences: Vec<Sentence>,
    /// Distinct proposition texts with their formulas.
    pub mapping: PredicateMapping,
    /// Model calls spent per input proposition (0 for repeated texts).
    pub attempts: Vec<u32>,
}

impl ParseOutcome {
    pub fn total_attempts(&self) -> u32 {
        self.attempts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationOutcome {
    pub translation: String,
    pub self_eval_feedback: String,
    pub self_eval_correct: bool,
    pub corrected: bool,
}

/// Workflows over any gateway.
pub struct LlmClient<'a> {
    pub gateway: &'a dyn ChatGateway,
    pub model: String,
    pub policy: RetryPolicy,
    pub context_tokens: u32,
}

impl<'a> LlmClient<'a> {
    pub fn new(gateway: &'a dyn ChatGateway, model: &str) -> Self {
        Self {
            gateway,
            model: model.to_string(),
            policy: RetryPolicy::default(),
            context_tokens: DEFAULT_CONTEXT_TOKENS,
        }
    }

    pub fn with_policy(mut self, policy: RetryPolicy) -> Self {
        self.policy = policy;
        self
    }

    fn call(&self, name: &str, slots: &[(&str, &str)], temperature: f64) -> Result<String, LlmError> {
        let t = template(name).ok_or_else(|| LlmError::InvalidRequest(format!("unknown template `{name}`")))?;
        let mut request = ChatRequest::user(name, &self.model, t.render(slots)?);
        request.temperature = temperature;
        request.max_context_tokens = self.context_tokens;
        self.gateway.chat(&request)
    }

    /// Calls until `read` accepts an answer. The first attempt is greedy,
    /// later ones sample at the retry temperature. Returns the value and
    /// the number of attempts, or the last output error once the budget is
    /// spent.
    fn with_retries<T>(
        &self,
        name: &str,
        slots: &[(&str, &str)],
        mut read: impl FnMut(&str) -> Result<T, LlmError>,
    ) -> Result<(T, u32), (LlmError, u32)> {
        let mut last = LlmError::NoBoxedContent;
        for attempt in 1..=self.policy.max_attempts.max(1) {
            let answer = self
                .call(name, slots, self.policy.temperature(attempt))
                .map_err(|e| (e, attempt))?;
            match read(&answer) {
                Ok(v) => return Ok((v, attempt)),
                Err(e) if e.is_output_error() => last = e,
                Err(e) => return Err((e, attempt)),
            }
        }
        Err((last, self.policy.max_attempts.max(1)))
    }

    /// One call per proposition. The first uses the initial template; later
    /// ones see the previous propositions as `text -> formula` lines.
    pub fn parse_syllogism_multistep(
        &self,
        propositions: &[String],
        syntax: FormulaSyntax,
    ) -> Result<ParseOutcome, LlmError> {
        if propositions.is_empty() {
            return Err(LlmError::InvalidRequest("no propositions to parse".into()));
        }
        let (initial, default) = syntax.templates();
        let mut mapping = PredicateMapping::new();
        let mut sentences = Vec::with_capacity(propositions.len());
        let mut attempts = Vec::with_capacity(propositions.len());
        for (i, text) in propositions.iter().enumerate() {
            if let Some((_, s)) = mapping.entries().iter().find(|(t, _)| t == text) {
                sentences.push(s.clone());
                attempts.push(0);
                continue;
            }
            let previous: String = mapping
                .entries()
                .iter()
                .map(|(t, s)| format!("{t} -> {}\n", syntax.render(s)))
                .collect();
            let previous = previous.trim_end();
            let (name, slots): (&str, Vec<(&str, &str)>) = if mapping.is_empty() {
                (initial, vec![("proposition", text.as_str())])
            } else {
                (default, vec![("previous_propositions", previous), ("proposition", text.as_str())])
            };
            let read = |answer: &str| syntax.parse(extract_boxed(answer)?);
            let (sentence, n) = self.with_retries(name, &slots, read).map_err(|(last, n)| {
                if last.is_output_error() {
                    LlmError::ParseExhausted {
                        proposition: i,
                        attempts: n,
                        last: Box::new(last),
                    }
                } else {
                    last
                }
            })?;
            mapping.push(text.clone(), sentence.clone()).expect("checked above");
            sentences.push(sentence);
            attempts.push(n);
        }
        Ok(ParseOutcome {
            sentences,
            mapping,
            attempts,
        })
    }

    /// The whole syllogism in one call, answered as a JSON list of
    /// `{proposition, fol_formula}` pairs.
    pub fn parse_syllogism_singlestep(
        &self,
        premises: &[String],
        conclusion: &str,
    ) -> Result<ParseOutcome, LlmError> {
        let n_premises = premises.len().to_string();
        let text = format_syllogism(premises, conclusion);
        let expected = premises.len() + 1;
        let read = |answer: &str| {
            let value = extract_json_object(answer)?;
            let items = value
                .as_array()
                .ok_or_else(|| LlmError::SchemaMismatch("expected a JSON array".into()))?;
            if items.len() != expected {
                return Err(LlmError::SchemaMismatch(format!(
                    "expected {expected} entries, found {}",
                    items.len()
                )));
            }
            items
                .iter()
                .map(|item| {
                    let formula = item
                        .get("fol_formula")
                        .and_then(Value::as_str)
                        .ok_or_else(|| LlmError::SchemaMismatch("entry without `fol_formula`".into()))?;
                    Ok(parse_latex_formula(formula)?)
                })
                .collect::<Result<Vec<Sentence>, LlmError>>()
        };
        let slots = [("num_premises", n_premises.as_str()), ("syllogism", text.as_str())];
        let (sentences, n) = self
            .with_retries(template::SINGLE_STEP, &slots, read)
            .map_err(|(last, n)| {
                if last.is_output_error() {
                    LlmError::ParseExhausted {
                        proposition: 0,
                        attempts: n,
                        last: Box::new(last),
                    }
                } else {
                    last
                }
            })?;
        let mut mapping = PredicateMapping::new();
        for (text, s) in premises.iter().map(String::as_str).chain([conclusion]).zip(&sentences) {
            // Repeated texts keep their first formula.
            let _ = mapping.push(text, s.clone());
        }
        let mut attempts = vec![0; sentences.len()];
        attempts[0] = n;
        Ok(ParseOutcome {
            sentences,
            mapping,
            attempts,
        })
    }

    /// Translate, self-evaluate, and correct at most once.
    pub fn translate_syllogism(&self, syllogism_text: &str) -> Result<TranslationOutcome, LlmError> {
        let first = self.call(template::TRANSLATE, &[("syllogism", syllogism_text)], 0.0)?;
        let first = first.trim().to_string();
        let verdict = extract_json_object(&self.call(
            template::TRANSLATE_EVALUATE,
            &[("formatted_original", syllogism_text), ("translation", &first)],
            0.0,
        )?)?;
        let feedback = verdict
            .get("feedback")
            .and_then(Value::as_str)
            .ok_or_else(|| LlmError::SchemaMismatch("self-evaluation lacks `feedback`".into()))?
            .to_string();
        let correct = verdict
            .get("correct")
            .and_then(loose_bool)
            .ok_or_else(|| LlmError::SchemaMismatch("self-evaluation lacks boolean `correct`".into()))?;
        if correct {
            return Ok(TranslationOutcome {
                translation: first,
                self_eval_feedback: feedback,
                self_eval_correct: true,
                corrected: false,
            });
        }
        let second = self.call(
            template::TRANSLATE_FEEDBACK,
            &[("syllogism", syllogism_text), ("feedback", &feedback)],
            0.0,
        )?;
        Ok(TranslationOutcome {
            translation: second.trim().to_string(),
            self_eval_feedback: feedback,
            self_eval_correct: false,
            corrected: true,
        })
    }

    /// The model judges validity directly. Relevant premises are read only
    /// when asked for and the answer is `valid`.
    pub fn end_to_end_classify(
        &self,
        syllogism_text: &str,
        n_premises: usize,
        want_relevance: bool,
    ) -> Result<(bool, Option<Vec<usize>>), LlmError> {
        let name = if want_relevance {
            template::END_TO_END_RETRIEVAL
        } else {
            template::END_TO_END
        };
        let value = extract_json_object(&self.call(name, &[("syllogism", syllogism_text)], 0.0)?)?;
        let valid = value
            .get("valid")
            .and_then(loose_bool)
            .ok_or_else(|| LlmError::SchemaMismatch("`valid` must be true or false".into()))?;
        if !want_relevance {
            return Ok((valid, None));
        }
        let relevant = match value.get("relevant_premises") {
            Some(v) if valid => Some(indices(v, n_premises)?),
            _ => Some(Vec::new()),
        };
        Ok((valid, relevant))
    }

    /// The model acts as the prover and answers `\boxed{true}` or
    /// `\boxed{false}`.
    pub fn llm_prove(&self, premises_fol: &[String], conclusion_fol: &str) -> Result<bool, LlmError> {
        let premises = premises_fol.join("\n");
        let answer = self.call(
            template::LLM_PROVER,
            &[("premises", &premises), ("conclusion", conclusion_fol)],
            0.0,
        )?;
        let token = extract_boxed(&answer)?.trim();
        match token.to_ascii_lowercase().as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(LlmError::NotABoolean(token.to_string())),
        }
    }

    /// The model picks relevant premises of a valid syllogism.
    pub fn llm_retrieve_relevant(&self, premises: &[String], conclusion: &str) -> Result<Vec<usize>, LlmError> {
        let list = format_premise_list(premises);
        let answer = self.call(
            template::LLM_RETRIEVAL,
            &[("premises", &list), ("conclusion", conclusion)],
            0.0,
        )?;
        indices(&extract_json_object(&answer)?, premises.len())
    }
}

/// Sorted, deduplicated 0-based indices below `len`.
fn indices(value: &Value, len: usize) -> Result<Vec<usize>, LlmError> {
    let items = value
        .as_array()
        .ok_or_else(|| LlmError::SchemaMismatch("expected an array of indices".into()))?;
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        let i = item
            .as_i64()
            .ok_or_else(|| LlmError::SchemaMismatch(format!("`{item}` is not an integer index")))?;
        if i < 0 || i as usize >= len {
            return Err(LlmError::IndexOutOfRange { index: i, len });
        }
        out.push(i as usize);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::stub::{StubFixture, StubGateway};
    use crate::llm::template::{END_TO_END, LLM_PROVER, LLM_RETRIEVAL, PARSER_DEFAULT, PARSER_INITIAL};
    use std::sync::Mutex;

    const P1: &str = "All animals are flightless.";
    const P2: &str = "All birds are animals.";
    const C: &str = "No bird can fly.";

    fn gold() -> StubFixture {
        StubFixture {
            fol: [
                (P1, "\\forall x (animal(x) \\rightarrow flightless(x))"),
                (P2, "\\forall x (bird(x) \\rightarrow animal(x))"),
                (C, "\\neg \\exists x (bird(x) \\land \\neg flightless(x))"),
            ]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
            ..StubFixture::default()
        }
    }

    fn props() -> Vec<String> {
        [P1, P2, C].iter().map(|s| s.to_string()).collect()
    }

    /// Records every request so tests can inspect temperatures and prompts.
    struct Recorder<G> {
        inner: G,
        seen: Mutex<Vec<ChatRequest>>,
    }

    impl<G: ChatGateway> ChatGateway for Recorder<G> {
        fn chat(&self, request: &ChatRequest) -> Result<String, LlmError> {
            self.seen.lock().unwrap().push(request.clone());
            self.inner.chat(request)
        }
    }

    #[test]
    fn multistep_with_gold_answers() {
        let rec = Recorder {
            inner: StubGateway::new(gold()),
            seen: Mutex::new(Vec::new()),
        };
        let client = LlmClient::new(&rec, "m");
        let out = client.parse_syllogism_multistep(&props(), FormulaSyntax::Latex).unwrap();
        assert_eq!(out.mapping.len(), 3);
        assert_eq!(out.attempts, vec![1, 1, 1]);
        let seen = rec.seen.lock().unwrap();
        assert_eq!(seen[0].template, PARSER_INITIAL);
        assert_eq!(seen[2].template, PARSER_DEFAULT);
        assert!(seen[2].prompt().contains(
            "All animals are flightless. -> \\forall x (animal(x) \\rightarrow flightless(x))\n\
             All birds are animals. -> \\forall x (bird(x) \\rightarrow animal(x))\n\nProposition: No bird can fly."
        ));
    }

    #[test]
    fn retries_then_succeeds() {
        let stub = StubGateway::new(gold());
        let prompt = template(PARSER_INITIAL).unwrap().render(&[("proposition", P1)]).unwrap();
        stub.script(PARSER_INITIAL, &prompt, ["no box here".into(), "\\boxed{p(x)}".into()]);
        let rec = Recorder {
            inner: stub,
            seen: Mutex::new(Vec::new()),
        };
        let client = LlmClient::new(&rec, "m");
        let out = client.parse_syllogism_multistep(&props()[..1], FormulaSyntax::Latex).unwrap();
        assert_eq!(out.attempts, vec![3]);
        let temps: Vec<f64> = rec.seen.lock().unwrap().iter().map(|r| r.temperature).collect();
        assert_eq!(temps, vec![0.0, 0.6, 0.6]);
    }

    #[test]
    fn retries_exhausted() {
        let stub = StubGateway::new(StubFixture {
            defaults: [(PARSER_INITIAL.to_string(), "garbage".to_string())].into_iter().collect(),
            ..StubFixture::default()
        });
        let err = LlmClient::new(&stub, "m")
            .parse_syllogism_multistep(&props(), FormulaSyntax::Latex)
            .unwrap_err();
        assert!(matches!(err, LlmError::ParseExhausted { proposition: 0, attempts: 3, .. }), "{err:?}");
        assert_eq!(stub.call_count(PARSER_INITIAL), 3);
    }

    #[test]
    fn repeated_proposition_reuses_formula() {
        let stub = StubGateway::new(gold());
        let texts: Vec<String> = [P2, P2, P1].iter().map(|s| s.to_string()).collect();
        let out = LlmClient::new(&stub, "m")
            .parse_syllogism_multistep(&texts, FormulaSyntax::Latex)
            .unwrap();
        assert_eq!(out.attempts, vec![1, 0, 1]);
        assert_eq!(out.sentences[0], out.sentences[1]);
        assert_eq!(out.mapping.len(), 2);
    }

    #[test]
    fn prover9_syntax() {
        let stub = StubGateway::new(gold());
        let out = LlmClient::new(&stub, "m")
            .parse_syllogism_multistep(&props(), FormulaSyntax::Prover9)
            .unwrap();
        let latex = LlmClient::new(&StubGateway::new(gold()), "m")
            .parse_syllogism_multistep(&props(), FormulaSyntax::Latex)
            .unwrap();
        assert_eq!(out.sentences, latex.sentences);
    }

    #[test]
    fn singlestep_with_gold_answers() {
        let stub = StubGateway::new(gold());
        let premises = props()[..2].to_vec();
        let out = LlmClient::new(&stub, "m").parse_syllogism_singlestep(&premises, C).unwrap();
        assert_eq!(out.sentences.len(), 3);
        assert_eq!(out.sentences[2], parse_latex_formula("\\neg \\exists x (bird(x) \\land \\neg flightless(x))").unwrap());
    }

    #[test]
    fn singlestep_wrong_count() {
        let stub = StubGateway::new(StubFixture {
            defaults: [(
                template::SINGLE_STEP.to_string(),
                "[{\"proposition\": \"a\", \"fol_formula\": \"\\\\exists x (a(x))\"}]".to_string(),
            )]
            .into_iter()
            .collect(),
            ..StubFixture::default()
        });
        let err = LlmClient::new(&stub, "m")
            .parse_syllogism_singlestep(&props()[..2], C)
            .unwrap_err();
        let LlmError::ParseExhausted { last, .. } = err else { panic!("{err:?}") };
        assert!(matches!(*last, LlmError::SchemaMismatch(_)));
    }

    fn translation_stub(verdict: &str) -> StubGateway {
        StubGateway::new(StubFixture {
            defaults: [
                (template::TRANSLATE, "first"),
                (template::TRANSLATE_EVALUATE, verdict),
                (template::TRANSLATE_FEEDBACK, "second"),
            ]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
            ..StubFixture::default()
        })
    }

    #[test]
    fn translation_accepted() {
        let stub = translation_stub("Fine.\n{\"feedback\": \"ok\", \"correct\": true}");
        let out = LlmClient::new(&stub, "m").translate_syllogism("Alle Vögel ...").unwrap();
        assert_eq!(out.translation, "first");
        assert!(!out.corrected);
        assert_eq!(stub.call_count(template::TRANSLATE_FEEDBACK), 0);
    }

    #[test]
    fn translation_corrected_once() {
        let stub = translation_stub("{\"feedback\": \"missed negation\", \"correct\": false}");
        let out = LlmClient::new(&stub, "m").translate_syllogism("x").unwrap();
        assert_eq!(
            out,
            TranslationOutcome {
                translation: "second".into(),
                self_eval_feedback: "missed negation".into(),
                self_eval_correct: false,
                corrected: true,
            }
        );
        assert_eq!(stub.call_count(template::TRANSLATE_FEEDBACK), 1);
    }

    #[test]
    fn translation_eval_prose_only() {
        let stub = translation_stub("It looks right to me.");
        let err = LlmClient::new(&stub, "m").translate_syllogism("x").unwrap_err();
        assert_eq!(err, LlmError::NoJsonFound);
    }

    fn one_answer(name: &str, answer: &str) -> StubGateway {
        StubGateway::new(StubFixture {
            defaults: [(name.to_string(), answer.to_string())].into_iter().collect(),
            ..StubFixture::default()
        })
    }

    #[test]
    fn end_to_end_answers() {
        let stub = one_answer(END_TO_END, "{\"reasoning\": \"...\", \"valid\": true}");
        assert_eq!(LlmClient::new(&stub, "m").end_to_end_classify("s", 2, false).unwrap(), (true, None));
        let stub = one_answer(END_TO_END, "{\"reasoning\": \"...\", \"valid\": \"false\"}");
        assert_eq!(LlmClient::new(&stub, "m").end_to_end_classify("s", 2, false).unwrap(), (false, None));
        let stub = one_answer(END_TO_END, "{\"reasoning\": \"...\", \"valid\": \"perhaps\"}");
        assert!(matches!(
            LlmClient::new(&stub, "m").end_to_end_classify("s", 2, false),
            Err(LlmError::SchemaMismatch(_))
        ));
        let stub = one_answer(
            template::END_TO_END_RETRIEVAL,
            "{\"reasoning\": \"r\", \"valid\": true, \"relevant_premises\": [2, 0]}",
        );
        assert_eq!(
            LlmClient::new(&stub, "m").end_to_end_classify("s", 3, true).unwrap(),
            (true, Some(vec![0, 2]))
        );
    }

    #[test]
    fn llm_prover_answers() {
        let prove = |answer: &str| {
            LlmClient::new(&one_answer(LLM_PROVER, answer), "m").llm_prove(&["a".into(), "b".into()], "c")
        };
        assert_eq!(prove("\\boxed{true}"), Ok(true));
        assert_eq!(prove("so \\boxed{ False }"), Ok(false));
        assert_eq!(prove("\\boxed{maybe}"), Err(LlmError::NotABoolean("maybe".into())));
        assert_eq!(prove("true"), Err(LlmError::NoBoxedContent));
    }

    #[test]
    fn llm_retrieval_answers() {
        let retrieve = |answer: &str, n: usize| {
            let premises: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            LlmClient::new(&one_answer(LLM_RETRIEVAL, answer), "m").llm_retrieve_relevant(&premises, "c")
        };
        assert_eq!(retrieve("[0,2]", 4), Ok(vec![0, 2]));
        assert_eq!(retrieve("[5]", 2), Err(LlmError::IndexOutOfRange { index: 5, len: 2 }));
        assert_eq!(retrieve("[]", 2), Ok(vec![]));
    }

    #[test]
    fn syllogism_text_round_trip() {
        let text = format_syllogism(&[P1.into(), P2.into()], C);
        assert_eq!(text, format!("Premise 1: {P1}\nPremise 2: {P2}\nConclusion: {C}"));
        assert_eq!(split_syllogism(&text, 2).unwrap(), (vec![P1.to_string(), P2.to_string()], C.to_string()));
        assert!(split_syllogism(&text, 3).is_err());
    }
}
