//! Pulling answers out of free-form model output.

use serde_json::Value;

use crate::fol::last_boxed;

use super::LlmError;

/// Content of the last balanced `\boxed{...}` group.
pub fn extract_boxed(text: &str) -> Result<&str, LlmError> {
    last_boxed(text).ok_or(LlmError::NoBoxedContent)
}

/// The last complete JSON object or array in `text`. Values are found by
/// scanning left to right and skipping over each one parsed, so nested
/// objects are never mistaken for the outer value; fenced code blocks need
/// no special handling.
pub fn extract_json_object(text: &str) -> Result<Value, LlmError> {
    let mut last = None;
    let mut i = 0;
    while i < text.len() {
        let c = text.as_bytes()[i];
        if c == b'{' || c == b'[' {
            let mut stream = serde_json::Deserializer::from_str(&text[i..]).into_iter::<Value>();
            if let Some(Ok(value)) = stream.next() {
                if value.is_object() || value.is_array() {
                    i += stream.byte_offset();
                    last = Some(value);
                    continue;
                }
            }
        }
        i += 1;
    }
    last.ok_or(LlmError::NoJsonFound)
}

/// A JSON boolean, or the strings `"true"`/`"false"` that models emit when
/// a prompt quotes them.
pub(crate) fn loose_bool(v: &Value) -> Option<bool> {
    match v {
        Value::Bool(b) => Some(*b),
        Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn boxed_last_wins() {
        let text = "first \\boxed{a(x)} then \\boxed{\\forall x (p(x) \\rightarrow q(x))}";
        assert_eq!(extract_boxed(text).unwrap(), "\\forall x (p(x) \\rightarrow q(x))");
        assert_eq!(extract_boxed("no box"), Err(LlmError::NoBoxedContent));
    }

    #[test]
    fn json_object_at_end() {
        let v = extract_json_object("Looks fine.\n{\"feedback\": \"ok\", \"correct\": true}").unwrap();
        assert_eq!(v, json!({"feedback": "ok", "correct": true}));
    }

    #[test]
    fn json_array_of_pairs() {
        let v = extract_json_object(
            "```json\n[{\"proposition\": \"All dogs bark.\", \"fol_formula\": \"\\\\forall x (dog(x) \\\\rightarrow bark(x))\"}]\n```",
        )
        .unwrap();
        assert_eq!(v[0]["fol_formula"], "\\forall x (dog(x) \\rightarrow bark(x))");
    }

    #[test]
    fn nested_objects_return_outer() {
        let v = extract_json_object("x {\"a\": {\"b\": 1}, \"c\": [1, 2]} y").unwrap();
        assert_eq!(v, json!({"a": {"b": 1}, "c": [1, 2]}));
    }

    #[test]
    fn last_of_several() {
        let v = extract_json_object("draft {\"valid\": false} final {\"valid\": true}").unwrap();
        assert_eq!(v, json!({"valid": true}));
    }

    #[test]
    fn prose_has_no_json() {
        assert_eq!(extract_json_object("the set {a, b} is [not json"), Err(LlmError::NoJsonFound));
    }

    #[test]
    fn loose_booleans() {
        assert_eq!(loose_bool(&json!(true)), Some(true));
        assert_eq!(loose_bool(&json!("False")), Some(false));
        assert_eq!(loose_bool(&json!("maybe")), None);
    }
}
