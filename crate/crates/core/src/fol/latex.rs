use super::syntax::{is_ident_continue, is_ident_start, Parser, Spanned, Tok};
use super::{FolError, Formula, Sentence};

/// Content of the last balanced `\boxed{...}` group, if any.
pub(crate) fn last_boxed(text: &str) -> Option<&str> {
    let mut found = None;
    let mut from = 0;
    while let Some(rel) = text[from..].find("\\boxed") {
        let start = from + rel + "\\boxed".len();
        let rest = &text[start..];
        let open = rest.len() - rest.trim_start().len();
        if rest[open..].starts_with('{') {
            let body_start = start + open + 1;
            let mut depth = 1usize;
            for (i, c) in text[body_start..].char_indices() {
                match c {
                    '{' => depth += 1,
                    '}' => {
                        depth -= 1;
                        if depth == 0 {
                            found = Some(&text[body_start..body_start + i]);
                            break;
                        }
                    }
                    _ => {}
                }
            }
        }
        from = start;
    }
    found
}

/// Removes `\boxed{}` (keeping the last group), math-mode delimiters,
/// surrounding whitespace and trailing periods.
pub fn strip_math_wrappers(input: &str) -> String {
    let mut text = match last_boxed(input) {
        Some(inner) => inner.trim().to_string(),
        None => input.trim().to_string(),
    };
    loop {
        let before = text.clone();
        for (open, close) in [("$$", "$$"), ("$", "$"), ("\\[", "\\]"), ("\\(", "\\)")] {
            if text.len() >= open.len() + close.len() && text.starts_with(open) && text.ends_with(close)
            {
                text = text[open.len()..text.len() - close.len()].trim().to_string();
            }
        }
        while text.ends_with('.') {
            text.pop();
            text = text.trim_end().to_string();
        }
        if text == before {
            return text;
        }
    }
}

fn command_token(name: &str) -> Option<Option<Tok>> {
    let tok = match name {
        "forall" => Tok::ForAll,
        "exists" => Tok::Exists,
        "neg" | "lnot" => Tok::Not,
        "land" | "wedge" => Tok::And,
        "lor" | "vee" => Tok::Or,
        "rightarrow" | "to" | "Rightarrow" | "implies" | "longrightarrow" | "Longrightarrow" => {
            Tok::Implies
        }
        "leftrightarrow" | "Leftrightarrow" | "iff" | "longleftrightarrow" => Tok::Iff,
        "left" | "right" | "quad" | "qquad" | "big" | "Big" | "bigl" | "bigr" | "Bigl" | "Bigr" => {
            return Some(None)
        }
        _ => return None,
    };
    Some(Some(tok))
}

const NAME_WRAPPERS: &[&str] = &[
    "text", "textit", "textrm", "texttt", "mathrm", "mathit", "mathsf", "mathtt", "operatorname",
];

fn lex(src: &str) -> Result<Vec<Spanned>, FolError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().unwrap();
        let pos = i;
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let simple = match c {
            '(' | '[' | '{' => Some(Tok::LParen),
            ')' | ']' | '}' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' | ':' => Some(Tok::Sep),
            '∀' => Some(Tok::ForAll),
            '∃' => Some(Tok::Exists),
            '¬' => Some(Tok::Not),
            '∧' => Some(Tok::And),
            '∨' => Some(Tok::Or),
            '→' | '⇒' => Some(Tok::Implies),
            '↔' | '⇔' => Some(Tok::Iff),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Spanned { tok, pos });
            i += c.len_utf8();
            continue;
        }
        if c == '\\' {
            let rest = &src[i + 1..];
            let name: String = rest.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
            if name.is_empty() {
                match rest.chars().next() {
                    Some(',' | ';' | '!' | ':' | ' ') => {
                        i += 2;
                        continue;
                    }
                    Some('_') => {
                        return Err(FolError::Syntax {
                            position: pos,
                            found: "`\\_`".into(),
                            expected: vec!["formula".into()],
                        })
                    }
                    Some(c2) => {
                        return Err(FolError::UnsupportedFeature {
                            position: pos,
                            feature: format!("LaTeX escape `\\{c2}`"),
                        })
                    }
                    None => {
                        return Err(FolError::Syntax {
                            position: pos,
                            found: "`\\`".into(),
                            expected: vec!["LaTeX command".into()],
                        })
                    }
                }
            }
            i += 1 + name.len();
            if NAME_WRAPPERS.contains(&name.as_str()) {
                let (ident, next) = lex_wrapped_name(src, i, pos)?;
                out.push(Spanned {
                    tok: Tok::Ident(ident),
                    pos,
                });
                i = next;
                continue;
            }
            match command_token(&name) {
                Some(Some(tok)) => out.push(Spanned { tok, pos }),
                Some(None) => {}
                None => {
                    return Err(FolError::UnsupportedFeature {
                        position: pos,
                        feature: format!("LaTeX command `\\{name}`"),
                    })
                }
            }
            continue;
        }
        if is_ident_start(c) {
            let (ident, next) = lex_ident(src, i);
            out.push(Spanned {
                tok: Tok::Ident(ident),
                pos,
            });
            i = next;
            continue;
        }
        if c.is_ascii_digit() {
            return Err(FolError::UnsupportedFeature {
                position: pos,
                feature: "constants".into(),
            });
        }
        if c == '=' || c == '≠' {
            return Err(FolError::UnsupportedFeature {
                position: pos,
                feature: "equality".into(),
            });
        }
        return Err(FolError::Syntax {
            position: pos,
            found: format!("`{c}`"),
            expected: vec!["formula".into()],
        });
    }
    Ok(out)
}

/// Identifier starting at byte `i`; `\_` is read as an underscore.
fn lex_ident(src: &str, mut i: usize) -> (String, usize) {
    let mut ident = String::new();
    loop {
        let rest = &src[i..];
        if let Some(c) = rest.chars().next() {
            if is_ident_continue(c) {
                ident.push(c);
                i += c.len_utf8();
                continue;
            }
            if rest.starts_with("\\_") {
                ident.push('_');
                i += 2;
                continue;
            }
        }
        return (ident, i);
    }
}

fn lex_wrapped_name(src: &str, i: usize, pos: usize) -> Result<(String, usize), FolError> {
    let after = &src[i..];
    let skip = after.len() - after.trim_start().len();
    let open = i + skip;
    let bad = |position| FolError::Syntax {
        position,
        found: "malformed name".into(),
        expected: vec!["`{identifier}`".into()],
    };
    if !src[open..].starts_with('{') {
        return Err(bad(pos));
    }
    let start = open + 1;
    if !src[start..].chars().next().is_some_and(is_ident_start) {
        return Err(bad(start));
    }
    let (ident, next) = lex_ident(src, start);
    if !src[next..].starts_with('}') {
        return Err(bad(next));
    }
    Ok((ident, next + 1))
}

/// Parses a LaTeX-notation first-order sentence such as
/// `\forall x (bird(x) \rightarrow animal(x))`.
///
/// Surrounding `\boxed{...}`, math delimiters and whitespace are removed
/// first; byte positions in errors refer to the stripped text.
pub fn parse_latex_formula(input: &str) -> Result<Sentence, FolError> {
    let text = strip_math_wrappers(input);
    if text.is_empty() {
        return Err(FolError::EmptyInput);
    }
    let toks = lex(&text)?;
    let formula = Parser::new(toks, text.len()).parse_formula()?;
    Sentence::new(formula)
}

/// Canonical, fully parenthesized LaTeX rendering.
pub fn render_latex(s: &Sentence) -> String {
    let mut out = String::new();
    write_bare(s.formula(), &mut out);
    out
}

fn binary_parts(f: &Formula) -> Option<(&Formula, &'static str, &Formula)> {
    match f {
        Formula::And(l, r) => Some((l, "\\land", r)),
        Formula::Or(l, r) => Some((l, "\\lor", r)),
        Formula::Implies(l, r) => Some((l, "\\rightarrow", r)),
        Formula::Iff(l, r) => Some((l, "\\leftrightarrow", r)),
        _ => None,
    }
}

fn write_bare(f: &Formula, out: &mut String) {
    if let Some((l, op, r)) = binary_parts(f) {
        write_nested(l, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_nested(r, out);
    } else {
        write_nested(f, out);
    }
}

fn write_nested(f: &Formula, out: &mut String) {
    match f {
        Formula::Pred { name, args } => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(a.as_str());
            }
            out.push(')');
        }
        Formula::Not(inner) => {
            out.push_str("\\neg ");
            write_nested(inner, out);
        }
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            out.push_str(if matches!(f, Formula::ForAll(..)) {
                "\\forall "
            } else {
                "\\exists "
            });
            out.push_str(v.as_str());
            out.push_str(" (");
            write_bare(body, out);
            out.push(')');
        }
        _ => {
            out.push('(');
            write_bare(f, out);
            out.push(')');
        }
    }
}
