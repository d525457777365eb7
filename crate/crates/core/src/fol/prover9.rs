use std::collections::BTreeMap;

use super::latex::last_boxed;
use super::syntax::{is_ident_continue, is_ident_start, Parser, Spanned, Tok};
use super::{collect_predicates_all, FolError, Formula, Sentence};

/// Names Prover9 reads as variables (plus its quantifier keywords); a
/// predicate with one of these names gets a `_pred` suffix.
pub const PROVER9_RESERVED: &[&str] = &["x", "y", "z", "u", "v", "w", "p", "q", "r", "all", "exists"];

/// Predicate renaming applied consistently across one prover problem.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Prover9Names {
    renames: BTreeMap<String, String>,
}

impl Prover9Names {
    pub fn for_sentences<'a>(sentences: impl IntoIterator<Item = &'a Sentence>) -> Self {
        let names = collect_predicates_all(sentences);
        let mut renames = BTreeMap::new();
        for name in &names {
            if !PROVER9_RESERVED.contains(&name.as_str()) {
                continue;
            }
            let mut candidate = format!("{name}_pred");
            while names.contains(&candidate) || renames.values().any(|v| *v == candidate) {
                candidate.push_str("_pred");
            }
            renames.insert(name.clone(), candidate);
        }
        Self { renames }
    }

    pub fn name<'a>(&'a self, predicate: &'a str) -> &'a str {
        self.renames.get(predicate).map_or(predicate, String::as_str)
    }

    /// Applies the renaming to the AST.
    pub fn rename(&self, s: &Sentence) -> Sentence {
        fn go(names: &Prover9Names, f: &Formula) -> Formula {
            match f {
                Formula::Pred { name, args } => Formula::Pred {
                    name: names.name(name).to_string(),
                    args: args.clone(),
                },
                Formula::Not(i) => Formula::not(go(names, i)),
                Formula::And(l, r) => Formula::and(go(names, l), go(names, r)),
                Formula::Or(l, r) => Formula::or(go(names, l), go(names, r)),
                Formula::Implies(l, r) => Formula::implies(go(names, l), go(names, r)),
                Formula::Iff(l, r) => Formula::iff(go(names, l), go(names, r)),
                Formula::ForAll(v, b) => Formula::ForAll(v.clone(), Box::new(go(names, b))),
                Formula::Exists(v, b) => Formula::Exists(v.clone(), Box::new(go(names, b))),
            }
        }
        Sentence(go(self, s.formula()))
    }

    /// Prover9 clause text for `s`, terminated by a period.
    pub fn render(&self, s: &Sentence) -> String {
        let mut out = String::new();
        self.write_bare(s.formula(), &mut out);
        out.push('.');
        out
    }

    fn write_bare(&self, f: &Formula, out: &mut String) {
        let parts = match f {
            Formula::And(l, r) => Some((l, "&", r)),
            Formula::Or(l, r) => Some((l, "|", r)),
            Formula::Implies(l, r) => Some((l, "->", r)),
            Formula::Iff(l, r) => Some((l, "<->", r)),
            _ => None,
        };
        match parts {
            Some((l, op, r)) => {
                self.write_nested(l, out);
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                self.write_nested(r, out);
            }
            None => self.write_nested(f, out),
        }
    }

    fn write_nested(&self, f: &Formula, out: &mut String) {
        match f {
            Formula::Pred { name, args } => {
                out.push_str(self.name(name));
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(a.as_str());
                }
                out.push(')');
            }
            Formula::Not(inner) => {
                out.push('-');
                if matches!(**inner, Formula::Pred { .. }) {
                    self.write_nested(inner, out);
                } else {
                    out.push('(');
                    self.write_bare(inner, out);
                    out.push(')');
                }
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                out.push_str(if matches!(f, Formula::ForAll(..)) {
                    "all "
                } else {
                    "exists "
                });
                out.push_str(v.as_str());
                out.push_str(" (");
                self.write_bare(body, out);
                out.push(')');
            }
            _ => {
                out.push('(');
                self.write_bare(f, out);
                out.push(')');
            }
        }
    }
}

/// Prover9 rendering of a single sentence, renaming reserved predicate names.
pub fn render_prover9(s: &Sentence) -> String {
    Prover9Names::for_sentences([s]).render(s)
}

fn latex_command_replacement(name: &str) -> &'static str {
    match name {
        "rightarrow" | "to" | "Rightarrow" | "implies" | "longrightarrow" => " -> ",
        "leftrightarrow" | "Leftrightarrow" | "iff" | "longleftrightarrow" => " <-> ",
        "land" | "wedge" => " & ",
        "lor" | "vee" => " | ",
        "neg" | "lnot" => "-",
        "forall" => "all ",
        "exists" => "exists ",
        _ => "",
    }
}

/// Textual cleanup applied to raw model output before Prover9 parsing:
/// keeps the last `\boxed{}` group, rewrites LaTeX connectives that leaked
/// into the output, drops other LaTeX commands, `$`, `;` and trailing periods.
pub fn cleanup_prover9(text: &str) -> String {
    let text = last_boxed(text).unwrap_or(text);
    let mut out = String::with_capacity(text.len());
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => {
                let name: String = text[i + 1..]
                    .chars()
                    .take_while(|c| c.is_ascii_alphabetic())
                    .collect();
                for _ in 0..name.chars().count() {
                    chars.next();
                }
                if name.is_empty() {
                    // `\_` keeps the underscore, other escapes vanish.
                    if let Some(&(_, '_')) = chars.peek() {
                        chars.next();
                        out.push('_');
                    }
                } else {
                    out.push_str(latex_command_replacement(&name));
                }
            }
            ';' | '$' => {}
            '∀' => out.push_str("all "),
            '∃' => out.push_str("exists "),
            '¬' => out.push('-'),
            '∧' => out.push_str(" & "),
            '∨' => out.push_str(" | "),
            '→' => out.push_str(" -> "),
            '↔' => out.push_str(" <-> "),
            _ => out.push(c),
        }
    }
    let mut out = out.trim().to_string();
    while out.ends_with('.') {
        out.pop();
        out = out.trim_end().to_string();
    }
    out
}

fn lex(src: &str) -> Result<Vec<Spanned>, FolError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap();
        let pos = i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else if rest.starts_with("<-") {
            (Tok::RevImplies, 2)
        } else {
            match c {
                '-' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Sep, 1),
                c if is_ident_start(c) => {
                    let ident: String = rest.chars().take_while(|c| is_ident_continue(*c)).collect();
                    let len = ident.len();
                    let tok = match ident.as_str() {
                        "all" => Tok::ForAll,
                        "exists" => Tok::Exists,
                        _ => Tok::Ident(ident),
                    };
                    (tok, len)
                }
                c if c.is_ascii_digit() => {
                    return Err(FolError::UnsupportedFeature {
                        position: pos,
                        feature: "constants".into(),
                    })
                }
                '=' | '!' => {
                    return Err(FolError::UnsupportedFeature {
                        position: pos,
                        feature: "equality".into(),
                    })
                }
                _ => {
                    return Err(FolError::Syntax {
                        position: pos,
                        found: format!("`{c}`"),
                        expected: vec!["formula".into()],
                    })
                }
            }
        };
        out.push(Spanned { tok, pos });
        i += len;
    }
    Ok(out)
}

/// Parses one Prover9 formula after [`cleanup_prover9`]. Byte positions in
/// errors refer to the cleaned text.
pub fn parse_prover9_formula(input: &str) -> Result<Sentence, FolError> {
    let text = cleanup_prover9(input);
    if text.is_empty() {
        return Err(FolError::EmptyInput);
    }
    let toks = lex(&text)?;
    let formula = Parser::new(toks, text.len()).parse_formula()?;
    Sentence::new(formula)
}
