//! Recursive-descent parser for the condition DSL.
//!
//! ```text
//! condition := formula cmp real ;   cmp := "<" | ">" | "<=" | ">="
//! formula   := operand { "-." operand }            (left associative)
//! operand   := "0" | "1" | "half(" formula ")" | "not(" formula ")"
//!            | "max(" formula "," formula ")" | "min(" formula "," formula ")"
//!            | "d(" term "," term ")" | ident [ "(" [term {"," term}] ")" ]
//!            | "inf" ident "." formula | "sup" ident "." formula
//!            | "(" formula ")"
//! term      := ident [ "(" [term {"," term}] ")" ]
//! ```
//!
//! `1 -. φ` is folded into `Negation(φ)`.

use thiserror::Error;

use super::formula::{Comparator, Condition, Formula, Term};
use super::signature::Signature;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown relation symbol `{name}` at {pos}")]
    UnknownRelation { pos: usize, name: String },
    #[error("unknown function symbol `{name}` at {pos}")]
    UnknownFunction { pos: usize, name: String },
    #[error("symbol `{name}` at {pos} expects {expected} arguments, got {got}")]
    Arity { pos: usize, name: String, expected: usize, got: usize },
    #[error("threshold {value} outside (0, 1) for strict comparator")]
    Threshold { value: f64 },
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownRelation { pos, .. }
            | ParseError::UnknownFunction { pos, .. }
            | ParseError::Arity { pos, .. } => Some(*pos),
            ParseError::Threshold { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    Comma,
    Dot,
    TSub,
    Cmp(Comparator),
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let number_start = c.is_ascii_digit()
            || (c == '-' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()))
            || (c == '.' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()));
        if number_start {
            i += 1;
            while i < bytes.len() {
                let d = bytes[i] as char;
                let exp_sign = (d == '-' || d == '+') && matches!(bytes[i - 1] as char, 'e' | 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    // `1.` followed by a non-digit is a number then a dot; keep it simple:
                    // a dot belongs to the number only when a digit follows.
                    if d == '.' && !bytes.get(i + 1).is_some_and(|b| b.is_ascii_digit()) {
                        break;
                    }
                    i += 1;
                } else {
                    break;
                }
            }
            out.push((start, Tok::Number(text[start..i].to_string())));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '-' if bytes.get(i + 1) == Some(&b'.') => {
                i += 1;
                Tok::TSub
            }
            '<' | '>' => {
                let strict = bytes.get(i + 1) != Some(&b'=');
                if !strict {
                    i += 1;
                }
                Tok::Cmp(match (c, strict) {
                    ('<', true) => Comparator::Lt,
                    ('<', false) => Comparator::Le,
                    ('>', true) => Comparator::Gt,
                    _ => Comparator::Ge,
                })
            }
            other => {
                return Err(ParseError::Syntax { pos: start, msg: format!("unexpected character `{other}`") });
            }
        };
        i += 1;
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    sig: Option<&'a Signature>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else if want == Tok::RParen && matches!(self.peek(), Tok::End | Tok::Cmp(_)) {
            self.err("unbalanced parenthesis")
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.operand()?;
        while *self.peek() == Tok::TSub {
            self.bump();
            let rhs = self.operand()?;
            lhs = match lhs {
                Formula::Const1 => Formula::negation(rhs),
                l => Formula::trunc_sub(l, rhs),
            };
        }
        Ok(lhs)
    }

    fn operand(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Number(n) => match n.as_str() {
                "0" => Ok(Formula::Const0),
                "1" => Ok(Formula::Const1),
                _ => Err(ParseError::Syntax { pos, msg: format!("formula constant must be 0 or 1, found {n}") }),
            },
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => self.ident_operand(name, pos),
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(ParseError::Syntax { pos, msg: format!("unexpected token {t:?}") }),
        }
    }

    fn ident_operand(&mut self, name: String, pos: usize) -> Result<Formula, ParseError> {
        let call = *self.peek() == Tok::LParen;
        match name.as_str() {
            "inf" | "sup" => {
                let var = match self.bump() {
                    Tok::Ident(v) => v,
                    _ => return Err(ParseError::Syntax { pos, msg: format!("`{name}` needs a variable") }),
                };
                self.expect(Tok::Dot, "`.` after quantified variable")?;
                let body = self.formula()?;
                Ok(if name == "inf" { Formula::inf(var, body) } else { Formula::sup(var, body) })
            }
            "half" | "not" if call => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if name == "half" { Formula::half(f) } else { Formula::negation(f) })
            }
            "max" | "min" if call => {
                self.bump();
                let a = self.formula()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if name == "max" { Formula::max(a, b) } else { Formula::min(a, b) })
            }
            "d" if call => {
                self.bump();
                let a = self.term()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Formula::dist(a, b))
            }
            _ => {
                let args = if call { self.arg_list()? } else { Vec::new() };
                if let Some(sig) = self.sig {
                    match sig.relation(&name) {
                        None => return Err(ParseError::UnknownRelation { pos, name }),
                        Some(s) if s.arity != args.len() => {
                            return Err(ParseError::Arity { pos, name, expected: s.arity, got: args.len() })
                        }
                        _ => {}
                    }
                }
                Ok(Formula::AtomRel(name, args))
            }
        }
    }

    fn arg_list(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(args)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let args = self.arg_list()?;
                    if let Some(sig) = self.sig {
                        match sig.function(&name) {
                            None => return Err(ParseError::UnknownFunction { pos, name }),
                            Some(s) if s.arity != args.len() => {
                                return Err(ParseError::Arity { pos, name, expected: s.arity, got: args.len() })
                            }
                            _ => {}
                        }
                    }
                    Ok(Term::Apply(name, args))
                } else {
                    Ok(Term::Var(name))
                }
            }
            Tok::End => Err(ParseError::Syntax { pos, msg: "unexpected end of input".into() }),
            t => Err(ParseError::Syntax { pos, msg: format!("expected a term, found {t:?}") }),
        }
    }
}

fn run<T: Real>(text: &str, sig: Option<&Signature>) -> Result<Condition<T>, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, sig };
    let formula = p.formula()?;
    let comparator = match p.bump() {
        Tok::Cmp(c) => c,
        Tok::End => return p.err("unbalanced parenthesis or missing comparator"),
        Tok::RParen => return p.err("unbalanced parenthesis"),
        t => return p.err(format!("expected comparator, found {t:?}")),
    };
    let pos = p.pos();
    let value: f64 = match p.bump() {
        Tok::Number(n) => n.parse().map_err(|_| ParseError::Syntax { pos, msg: format!("bad number {n}") })?,
        _ => return Err(ParseError::Syntax { pos, msg: "expected threshold".into() }),
    };
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    if comparator.is_strict() && !(value > 0.0 && value < 1.0) {
        return Err(ParseError::Threshold { value });
    }
    let threshold = T::from_f64(value).ok_or(ParseError::Threshold { value })?;
    Ok(Condition { formula, comparator, threshold })
}

/// Parses a condition without symbol checks.
pub fn parse_condition<T: Real>(text: &str) -> Result<Condition<T>, ParseError> {
    run(text, None)
}

/// Parses a condition and checks every relation and function symbol against `sig`.
pub fn parse_condition_with<T: Real>(text: &str, sig: &Signature) -> Result<Condition<T>, ParseError> {
    run(text, Some(sig))
}

/// Parses a bare formula (no comparator).
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, sig: None };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err(if *p.peek() == Tok::RParen { "unbalanced parenthesis" } else { "trailing input" });
    }
    Ok(f)
}
