//! Token stream and precedence parser shared by the LaTeX and Prover9 front
//! ends.
//!
//! Precedence, tightest first: negation, conjunction, disjunction,
//! implication (right associative), biconditional. A quantifier scopes over
//! the smallest following formula at negation level. When that body is not
//! closed by a parenthesized group and a binary connective follows, the input
//! is rejected as ambiguous.

use super::{FolError, Formula, Variable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    ForAll,
    Exists,
    Not,
    And,
    Or,
    Implies,
    /// `<-` in Prover9: `a <- b` means `b -> a`.
    RevImplies,
    Iff,
    LParen,
    RParen,
    Comma,
    /// `.` or `:` between a quantified variable and its body.
    Sep,
    Ident(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::ForAll => "universal quantifier".into(),
            Tok::Exists => "existential quantifier".into(),
            Tok::Not => "negation".into(),
            Tok::And => "conjunction".into(),
            Tok::Or => "disjunction".into(),
            Tok::Implies => "implication".into(),
            Tok::RevImplies => "reverse implication".into(),
            Tok::Iff => "biconditional".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Sep => "quantifier separator".into(),
            Tok::Ident(name) => format!("identifier `{name}`"),
        }
    }

    fn is_binary(&self) -> bool {
        matches!(
            self,
            Tok::And | Tok::Or | Tok::Implies | Tok::RevImplies | Tok::Iff
        )
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// Ends with a parenthesized group.
    Group,
    /// A bare atom, possibly negated.
    Atom,
    /// A quantifier whose scope was not delimited by parentheses.
    Open,
}

pub(crate) struct Parser {
    toks: Vec<Spanned>,
    idx: usize,
    end: usize,
}

impl Parser {
    pub fn new(toks: Vec<Spanned>, end: usize) -> Self {
        Self { toks, idx: 0, end }
    }

    /// Parses the whole token stream as one formula.
    pub fn parse_formula(mut self) -> Result<Formula, FolError> {
        if self.toks.is_empty() {
            return Err(FolError::EmptyInput);
        }
        let f = self.parse_iff()?;
        if let Some(t) = self.peek() {
            let expected = vec!["connective".to_string(), "end of input".to_string()];
            let (found, position) = (t.tok.describe(), t.pos);
            return Err(FolError::Syntax {
                position,
                found,
                expected,
            });
        }
        Ok(f)
    }

    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.idx)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|s| &s.tok)
    }

    fn bump(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> FolError {
        let (found, position) = match self.peek() {
            Some(t) => (t.tok.describe(), t.pos),
            None => ("end of input".to_string(), self.end),
        };
        FolError::Syntax {
            position,
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, label: &str) -> Result<(), FolError> {
        if self.peek_tok() == Some(&tok) {
            self.idx += 1;
            Ok(())
        } else {
            Err(self.error(&[label]))
        }
    }

    fn parse_iff(&mut self) -> Result<Formula, FolError> {
        let mut left = self.parse_implication()?;
        while self.peek_tok() == Some(&Tok::Iff) {
            self.idx += 1;
            let right = self.parse_implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn parse_implication(&mut self) -> Result<Formula, FolError> {
        let left = self.parse_or()?;
        match self.peek_tok() {
            Some(Tok::Implies) => {
                self.idx += 1;
                let right = self.parse_implication()?;
                Ok(Formula::implies(left, right))
            }
            Some(Tok::RevImplies) => {
                self.idx += 1;
                let right = self.parse_implication()?;
                Ok(Formula::implies(right, left))
            }
            _ => Ok(left),
        }
    }

    fn parse_or(&mut self) -> Result<Formula, FolError> {
        let mut left = self.parse_and()?;
        while self.peek_tok() == Some(&Tok::Or) {
            self.idx += 1;
            let right = self.parse_and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Formula, FolError> {
        let mut left = self.parse_operand()?;
        while self.peek_tok() == Some(&Tok::And) {
            self.idx += 1;
            let right = self.parse_operand()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn parse_operand(&mut self) -> Result<Formula, FolError> {
        let (f, shape) = self.parse_unary()?;
        if shape == Shape::Open {
            if let Some(t) = self.peek() {
                if t.tok.is_binary() {
                    return Err(FolError::AmbiguousScope { position: t.pos });
                }
            }
        }
        Ok(f)
    }

    fn parse_unary(&mut self) -> Result<(Formula, Shape), FolError> {
        let Some(t) = self.bump() else {
            return Err(self.error(&["formula"]));
        };
        match t.tok {
            Tok::Not => {
                let (inner, shape) = self.parse_unary()?;
                Ok((Formula::not(inner), shape))
            }
            Tok::ForAll | Tok::Exists => {
                let var = match self.peek_tok() {
                    Some(Tok::Ident(name)) => Variable(name.clone()),
                    _ => return Err(self.error(&["variable"])),
                };
                self.idx += 1;
                while self.peek_tok() == Some(&Tok::Sep) {
                    self.idx += 1;
                }
                let (body, shape) = self.parse_unary()?;
                let shape = if shape == Shape::Group {
                    Shape::Group
                } else {
                    Shape::Open
                };
                let f = if t.tok == Tok::ForAll {
                    Formula::ForAll(var, Box::new(body))
                } else {
                    Formula::Exists(var, Box::new(body))
                };
                Ok((f, shape))
            }
            Tok::LParen => {
                let f = self.parse_iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok((f, Shape::Group))
            }
            Tok::Ident(name) => {
                self.expect(Tok::LParen, "`(` after predicate name")?;
                let mut args = Vec::new();
                loop {
                    match self.peek_tok() {
                        Some(Tok::Ident(v)) => args.push(Variable(v.clone())),
                        _ => return Err(self.error(&["variable"])),
                    }
                    self.idx += 1;
                    match self.peek_tok() {
                        Some(Tok::Comma) => self.idx += 1,
                        Some(Tok::RParen) => {
                            self.idx += 1;
                            break;
                        }
                        _ => return Err(self.error(&["`,`", "`)`"])),
                    }
                }
                Ok((Formula::Pred { name, args }, Shape::Atom))
            }
            _ => {
                self.idx -= 1;
                Err(self.error(&["formula"]))
            }
        }
    }
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}
