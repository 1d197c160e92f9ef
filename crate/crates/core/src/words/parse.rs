//! Recursive-descent parser for the equation DSL.
//!
//! ```text
//! system   := equation (";" equation)* ";"?
//! equation := word "=" word
//! word     := factor ("*"? factor)*
//! factor   := atom ("^" exp)*              (left associative)
//! atom     := "1" | "@" name | name | "(" word ")" | "[" word "," word "]"
//! exp      := "-"? int | "(" "-"? int ")" | atom
//! ```
//!
//! `u^v` with a word exponent is `v⁻¹ u v`; `[u,v]` is `u⁻¹ v⁻¹ u v`.

use std::sync::Arc;

use super::{Token, Word, WordError};
use crate::group::GroupTable;

/// Upper bound on the token count of any parsed or substituted word.
pub const MAX_WORD_TOKENS: usize = 1 << 20;
const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseWarning {
    /// `u^0` at this byte offset was read as the identity.
    ZeroExponentNormalizedToIdentity(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Lexeme {
    Name(String),
    Int(u64),
    At,
    Caret,
    Star,
    Minus,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Eq,
    Semi,
    Amp,
    Arrow,
}

pub(crate) struct Lexer;

impl Lexer {
    pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Lexeme)>, WordError> {
        let bytes = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let b = bytes[i];
            let start = i;
            let simple = match b {
                b'@' => Some(Lexeme::At),
                b'^' => Some(Lexeme::Caret),
                b'*' => Some(Lexeme::Star),
                b'-' => Some(Lexeme::Minus),
                b'(' => Some(Lexeme::LParen),
                b')' => Some(Lexeme::RParen),
                b'[' => Some(Lexeme::LBrack),
                b']' => Some(Lexeme::RBrack),
                b',' => Some(Lexeme::Comma),
                b';' => Some(Lexeme::Semi),
                b'&' => Some(Lexeme::Amp),
                _ => None,
            };
            if let Some(l) = simple {
                out.push((start, l));
                i += 1;
            } else if b == b'=' {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((start, Lexeme::Arrow));
                    i += 2;
                } else {
                    out.push((start, Lexeme::Eq));
                    i += 1;
                }
            } else if b.is_ascii_whitespace() {
                i += 1;
            } else if b.is_ascii_digit() {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i]
                    .parse::<u64>()
                    .map_err(|_| WordError::ExponentTooLarge(start))?;
                out.push((start, Lexeme::Int(n)));
            } else if b.is_ascii_alphabetic() {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Lexeme::Name(text[start..i].to_string())));
            } else {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(WordError::Syntax {
                    pos: start,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        }
        Ok(out)
    }
}

pub(crate) struct Parser<'a> {
    toks: Vec<(usize, Lexeme)>,
    pos: usize,
    end: usize,
    group: &'a Arc<GroupTable>,
    allow_coeff: bool,
    depth: usize,
    pub(crate) warnings: Vec<ParseWarning>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &str, group: &'a Arc<GroupTable>, allow_coeff: bool) -> Result<Self, WordError> {
        Ok(Parser {
            toks: Lexer::lex(text)?,
            pos: 0,
            end: text.len(),
            group,
            allow_coeff,
            depth: 0,
            warnings: Vec::new(),
        })
    }

    pub(crate) fn peek(&self) -> Option<&Lexeme> {
        self.toks.get(self.pos).map(|(_, l)| l)
    }

    fn peek_at(&self, k: usize) -> Option<&Lexeme> {
        self.toks.get(self.pos + k).map(|(_, l)| l)
    }

    pub(crate) fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> WordError {
        WordError::Syntax {
            pos: self.offset(),
            message: message.into(),
        }
    }

    pub(crate) fn eat(&mut self, l: &Lexeme) -> bool {
        if self.peek() == Some(l) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, l: &Lexeme, what: &str) -> Result<(), WordError> {
        if self.eat(l) {
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Some(Lexeme::Name(_) | Lexeme::At | Lexeme::LParen | Lexeme::LBrack | Lexeme::Int(1))
        )
    }

    pub(crate) fn word(&mut self) -> Result<Word, WordError> {
        if !self.starts_atom() {
            return Err(self.error("expected a word"));
        }
        let mut acc = self.factor()?;
        loop {
            // `*` is optional between factors
            if self.eat(&Lexeme::Star) || self.starts_atom() {
                let f = self.factor()?;
                acc = checked_mul(&acc, &f)?;
            } else {
                return Ok(acc);
            }
        }
    }

    /// `word "=" word`, returned as `u · v⁻¹`.
    pub(crate) fn equation(&mut self) -> Result<Word, WordError> {
        let lhs = self.word()?;
        self.expect(&Lexeme::Eq, "'='")?;
        let rhs = self.word()?;
        checked_mul(&lhs, &rhs.inverse())
    }

    fn factor(&mut self) -> Result<Word, WordError> {
        let mut base = self.atom()?;
        while self.eat(&Lexeme::Caret) {
            let at = self.offset();
            if let Some(k) = self.int_exponent()? {
                if k == 0 {
                    self.warnings
                        .push(ParseWarning::ZeroExponentNormalizedToIdentity(at));
                }
                if base.len().saturating_mul(k.unsigned_abs() as usize) > MAX_WORD_TOKENS {
                    return Err(WordError::TooLong);
                }
                base = base.pow(k);
            } else {
                let by = self.atom()?;
                base = checked_mul(&checked_mul(&by.inverse(), &base)?, &by)?;
            }
        }
        Ok(base)
    }

    /// `-? int` or `( -? int )`; `None` when the exponent is an atom.
    fn int_exponent(&mut self) -> Result<Option<i64>, WordError> {
        let paren = matches!(self.peek(), Some(Lexeme::LParen));
        let skip = usize::from(paren);
        let neg = matches!(self.peek_at(skip), Some(Lexeme::Minus));
        let int_at = skip + usize::from(neg);
        let Some(Lexeme::Int(n)) = self.peek_at(int_at).cloned() else {
            if neg {
                self.pos += int_at;
                return Err(self.error("expected an integer after '-'"));
            }
            return Ok(None);
        };
        if paren && self.peek_at(int_at + 1) != Some(&Lexeme::RParen) {
            // "(1 ...)" is a parenthesised word, not an integer exponent
            if !neg && n == 1 {
                return Ok(None);
            }
            self.pos += int_at + 1;
            return Err(self.error("expected ')'"));
        }
        let at = self.offset();
        self.pos += int_at + 1 + skip;
        if n > MAX_WORD_TOKENS as u64 {
            return Err(WordError::ExponentTooLarge(at));
        }
        let n = n as i64;
        Ok(Some(if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Word, WordError> {
        let at = self.offset();
        let Some(l) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match l {
            Lexeme::Int(1) => {
                self.pos += 1;
                Ok(Word::identity(self.group.clone()))
            }
            Lexeme::Name(n) => {
                self.pos += 1;
                Ok(Word::var(self.group.clone(), &n))
            }
            Lexeme::At => {
                if !self.allow_coeff {
                    return Err(WordError::CoefficientNotAllowed(at));
                }
                self.pos += 1;
                let Some(Lexeme::Name(n)) = self.peek().cloned() else {
                    return Err(self.error("expected a coefficient name after '@'"));
                };
                self.pos += 1;
                let g = self
                    .group
                    .resolve(&n)
                    .ok_or(WordError::UnknownCoefficient(n))?;
                Ok(Word::coeff(self.group.clone(), g))
            }
            Lexeme::LParen => {
                self.pos += 1;
                self.descend(at)?;
                let w = self.word()?;
                self.depth -= 1;
                self.expect(&Lexeme::RParen, "')'")?;
                Ok(w)
            }
            Lexeme::LBrack => {
                self.pos += 1;
                self.descend(at)?;
                let u = self.word()?;
                self.expect(&Lexeme::Comma, "','")?;
                let v = self.word()?;
                self.depth -= 1;
                self.expect(&Lexeme::RBrack, "']'")?;
                let w = Word::commutator(&u, &v);
                if w.len() > MAX_WORD_TOKENS {
                    return Err(WordError::TooLong);
                }
                Ok(w)
            }
            _ => Err(self.error("expected a word")),
        }
    }

    fn descend(&mut self, at: usize) -> Result<(), WordError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(WordError::NestingTooDeep(at))
        } else {
            Ok(())
        }
    }
}

fn checked_mul(a: &Word, b: &Word) -> Result<Word, WordError> {
    if a.len() + b.len() > MAX_WORD_TOKENS {
        return Err(WordError::TooLong);
    }
    Ok(a.mul(b))
}

/// Parses a single word over `group`.
pub fn parse_word(text: &str, group: &Arc<GroupTable>) -> Result<Word, WordError> {
    parse_word_with_warnings(text, group).map(|(w, _)| w)
}

pub fn parse_word_with_warnings(
    text: &str,
    group: &Arc<GroupTable>,
) -> Result<(Word, Vec<ParseWarning>), WordError> {
    let mut p = Parser::new(text, group, true)?;
    let w = p.word()?;
    if !p.at_end() {
        return Err(p.error("trailing input"));
    }
    Ok((w, p.warnings))
}

/// Parses `u = v; …` into the words `u·v⁻¹`.
pub fn parse_equations(text: &str, group: &Arc<GroupTable>) -> Result<Vec<Word>, WordError> {
    let mut p = Parser::new(text, group, true)?;
    let mut out = vec![p.equation()?];
    while p.eat(&Lexeme::Semi) {
        if p.at_end() {
            break;
        }
        out.push(p.equation()?);
    }
    if !p.at_end() {
        return Err(p.error("expected ';' or end of input"));
    }
    Ok(out)
}

#[allow(dead_code)]
pub(crate) fn tokens_of(w: &Word) -> &[Token] {
    w.tokens()
}
