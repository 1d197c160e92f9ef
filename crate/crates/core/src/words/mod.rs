//! Words over `G ∗ Fₙ`: coefficient tokens from a finite group interleaved
//! with unknown letters. Words are kept freely reduced.

mod parse;

pub use parse::{parse_equations, parse_word, parse_word_with_warnings, ParseWarning, MAX_WORD_TOKENS};
#[allow(unused_imports)]
pub(crate) use parse::{Lexeme, Lexer, Parser};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::{FiniteGroup, GroupTable, Homomorphism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown coefficient @{0}")]
    UnknownCoefficient(String),
    #[error("coefficient at byte {0} is not allowed here")]
    CoefficientNotAllowed(usize),
    #[error("exponent at byte {0} is too large")]
    ExponentTooLarge(usize),
    #[error("word exceeds {MAX_WORD_TOKENS} tokens")]
    TooLong,
    #[error("nesting too deep at byte {0}")]
    NestingTooDeep(usize),
    #[error("no value assigned to unknown {0}")]
    MissingAssignment(String),
    #[error("no substitute given for unknown {0}")]
    MissingSubstitute(String),
    #[error("words live over different coefficient groups")]
    GroupMismatch,
    #[error("coefficient {0} out of range")]
    ElementOutOfRange(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Token {
    Coeff(usize),
    Letter { var: String, inverse: bool },
}

impl Token {
    pub fn letter(var: impl Into<String>) -> Token {
        Token::Letter {
            var: var.into(),
            inverse: false,
        }
    }

    pub fn letter_inv(var: impl Into<String>) -> Token {
        Token::Letter {
            var: var.into(),
            inverse: true,
        }
    }
}

#[derive(Clone)]
pub struct Word {
    group: Arc<GroupTable>,
    tokens: Vec<Token>,
}

pub(crate) fn same_group(a: &Arc<GroupTable>, b: &Arc<GroupTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Free reduction in `G ∗ Fₙ` with a single stack pass.
pub fn reduce(group: &GroupTable, tokens: impl IntoIterator<Item = Token>) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::new();
    for tok in tokens {
        match tok {
            Token::Coeff(c) => {
                let c = match out.last() {
                    Some(Token::Coeff(prev)) => {
                        let merged = group.mul(*prev, c);
                        out.pop();
                        merged
                    }
                    _ => c,
                };
                if c != group.identity() {
                    out.push(Token::Coeff(c));
                }
            }
            Token::Letter { var, inverse } => {
                let cancels = matches!(
                    out.last(),
                    Some(Token::Letter { var: v, inverse: i }) if *v == var && *i != inverse
                );
                if cancels {
                    out.pop();
                } else {
                    out.push(Token::Letter { var, inverse });
                }
            }
        }
    }
    out
}

impl Word {
    pub fn identity(group: Arc<GroupTable>) -> Word {
        Word {
            group,
            tokens: Vec::new(),
        }
    }

    pub fn from_tokens(group: Arc<GroupTable>, tokens: Vec<Token>) -> Result<Word, WordError> {
        if let Some(Token::Coeff(c)) = tokens
            .iter()
            .find(|t| matches!(t, Token::Coeff(c) if *c >= group.order()))
        {
            return Err(WordError::ElementOutOfRange(*c));
        }
        let tokens = reduce(&group, tokens);
        Ok(Word { group, tokens })
    }

    pub fn coeff(group: Arc<GroupTable>, g: usize) -> Word {
        Word::from_tokens(group, vec![Token::Coeff(g)]).expect("coefficient in range")
    }

    pub fn var(group: Arc<GroupTable>, name: &str) -> Word {
        Word {
            group,
            tokens: vec![Token::letter(name)],
        }
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Concatenation followed by reduction.
    ///
    /// Panics if the words live over different coefficient groups.
    pub fn mul(&self, other: &Word) -> Word {
        assert!(
            same_group(&self.group, &other.group),
            "multiplying words over different coefficient groups"
        );
        let tokens = reduce(
            &self.group,
            self.tokens.iter().chain(other.tokens.iter()).cloned(),
        );
        Word {
            group: self.group.clone(),
            tokens,
        }
    }

    pub fn inverse(&self) -> Word {
        let tokens = self
            .tokens
            .iter()
            .rev()
            .map(|t| match t {
                Token::Coeff(c) => Token::Coeff(self.group.inv(*c)),
                Token::Letter { var, inverse } => Token::Letter {
                    var: var.clone(),
                    inverse: !inverse,
                },
            })
            .collect();
        Word {
            group: self.group.clone(),
            tokens,
        }
    }

    /// Repeated multiplication; negative powers invert first.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let n = k.unsigned_abs() as usize;
        let tokens = reduce(
            &self.group,
            std::iter::repeat_n(base.tokens.iter(), n).flatten().cloned(),
        );
        Word {
            group: self.group.clone(),
            tokens,
        }
    }

    /// `by⁻¹ · self · by`
    pub fn conj(&self, by: &Word) -> Word {
        by.inverse().mul(self).mul(by)
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.inverse().mul(&b.inverse()).mul(a).mul(b)
    }

    /// Unknowns in order of first appearance.
    pub fn unknowns(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in &self.tokens {
            if let Token::Letter { var, .. } = t {
                if !out.contains(var) {
                    out.push(var.clone());
                }
            }
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.unknowns().len()
    }

    pub fn is_coefficient_free(&self) -> bool {
        self.tokens.iter().all(|t| matches!(t, Token::Letter { .. }))
    }

    /// Moves a coefficient-free word to another coefficient group.
    pub fn rehome(&self, group: Arc<GroupTable>) -> Result<Word, WordError> {
        if !self.is_coefficient_free() {
            return Err(WordError::GroupMismatch);
        }
        Ok(Word {
            group,
            tokens: self.tokens.clone(),
        })
    }

    /// Renames unknowns; names absent from `map` are kept.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> Word {
        let tokens = self
            .tokens
            .iter()
            .map(|t| match t {
                Token::Letter { var, inverse } => Token::Letter {
                    var: map.get(var).cloned().unwrap_or_else(|| var.clone()),
                    inverse: *inverse,
                },
                c => c.clone(),
            })
            .collect();
        Word::from_tokens(self.group.clone(), tokens).expect("renaming keeps coefficients")
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens && same_group(&self.group, &other.group)
    }
}

impl Eq for Word {}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({} over {})", self, self.group.name())
    }
}

/// Prints in the equation DSL; runs of one letter collapse to a power.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tokens.is_empty() {
            return f.write_str("1");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.tokens.len() {
            match &self.tokens[i] {
                Token::Coeff(c) => {
                    parts.push(format!("@{}", self.group.label(*c)));
                    i += 1;
                }
                t @ Token::Letter { var, inverse } => {
                    let run = self.tokens[i..].iter().take_while(|u| *u == t).count();
                    let exp = if *inverse { -(run as i64) } else { run as i64 };
                    if exp == 1 {
                        parts.push(var.clone());
                    } else {
                        parts.push(format!("{var}^{exp}"));
                    }
                    i += run;
                }
            }
        }
        f.write_str(&parts.join(" "))
    }
}

/// Values for the unknowns of a word, read in `embed.target()`.
#[derive(Debug, Clone)]
pub struct Assignment<'a, T: FiniteGroup = GroupTable> {
    pub embed: &'a Homomorphism<T>,
    pub values: BTreeMap<String, T::Elem>,
}

impl<'a, T: FiniteGroup> Assignment<'a, T> {
    pub fn new(embed: &'a Homomorphism<T>) -> Self {
        Assignment {
            embed,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, var: impl Into<String>, value: T::Elem) -> Self {
        self.values.insert(var.into(), value);
        self
    }
}

/// The image of `w` under the map `G ∗ Fₙ → target` that is `embed` on `G`
/// and sends each unknown to its assigned value.
pub fn evaluate<T: FiniteGroup>(w: &Word, asg: &Assignment<'_, T>) -> Result<T::Elem, WordError> {
    if !same_group(w.group(), asg.embed.source()) {
        return Err(WordError::GroupMismatch);
    }
    let target = asg.embed.target();
    let mut acc = target.identity();
    for t in w.tokens() {
        let x = match t {
            Token::Coeff(c) => asg.embed.apply(*c).clone(),
            Token::Letter { var, inverse } => {
                let v = asg
                    .values
                    .get(var)
                    .ok_or_else(|| WordError::MissingAssignment(var.clone()))?;
                if *inverse {
                    target.inv(v)
                } else {
                    v.clone()
                }
            }
        };
        acc = target.mul(&acc, &x);
    }
    Ok(acc)
}

/// Replaces every `Letter(v, ±1)` by `sub[v]^{±1}`. In strict mode every
/// unknown of `w` must have a substitute; otherwise missing ones are kept.
pub fn substitute(
    w: &Word,
    sub: &BTreeMap<String, Word>,
    strict: bool,
) -> Result<Word, WordError> {
    let mut tokens = Vec::new();
    for s in sub.values() {
        if !same_group(w.group(), s.group()) {
            return Err(WordError::GroupMismatch);
        }
    }
    let inverses: HashMap<&String, Word> = sub.iter().map(|(k, v)| (k, v.inverse())).collect();
    for t in w.tokens() {
        match t {
            Token::Letter { var, inverse } => match sub.get(var) {
                Some(image) => {
                    let image = if *inverse { &inverses[var] } else { image };
                    tokens.extend(image.tokens().iter().cloned());
                }
                None if strict => return Err(WordError::MissingSubstitute(var.clone())),
                None => tokens.push(t.clone()),
            },
            c => tokens.push(c.clone()),
        }
        if tokens.len() > MAX_WORD_TOKENS {
            return Err(WordError::TooLong);
        }
    }
    Word::from_tokens(w.group().clone(), tokens)
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(usize),
    Var(usize),
    VarInv(usize),
}

/// A word specialised to a table-backed target: coefficients are embedded
/// once and unknowns become slot indices.
#[derive(Debug, Clone)]
pub struct CompiledWord {
    ops: Vec<Op>,
}

impl CompiledWord {
    /// `vars` fixes the slot order; `embed` maps coefficient indices to the target.
    pub fn new(w: &Word, embed: &[usize], vars: &[String]) -> Result<CompiledWord, WordError> {
        let slot: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let ops = w
            .tokens()
            .iter()
            .map(|t| match t {
                Token::Coeff(c) => Ok(Op::Const(embed[*c])),
                Token::Letter { var, inverse } => {
                    let i = *slot
                        .get(var.as_str())
                        .ok_or_else(|| WordError::MissingAssignment(var.clone()))?;
                    Ok(if *inverse { Op::VarInv(i) } else { Op::Var(i) })
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(CompiledWord { ops })
    }

    #[inline]
    pub fn eval(&self, target: &GroupTable, values: &[usize]) -> usize {
        let mut acc = target.identity();
        for op in &self.ops {
            let x = match *op {
                Op::Const(c) => c,
                Op::Var(i) => values[i],
                Op::VarInv(i) => target.inv(values[i]),
            };
            acc = target.mul(acc, x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin;

    fn grp(name: &str) -> Arc<GroupTable> {
        Arc::new(builtin(name).unwrap())
    }

    #[test]
    fn reduce_merges_coefficients() {
        let z6 = grp("Z6");
        let w = Word::from_tokens(z6.clone(), vec![Token::Coeff(2), Token::Coeff(3)]).unwrap();
        assert_eq!(w.tokens(), &[Token::Coeff(5)]);
        let w = Word::from_tokens(z6.clone(), vec![Token::Coeff(2), Token::Coeff(4)]).unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn identity_coefficient_between_cancelling_letters() {
        let z6 = grp("Z6");
        let w = Word::from_tokens(
            z6,
            vec![Token::letter_inv("x"), Token::Coeff(0), Token::letter("x")],
        )
        .unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn cascade_reduction() {
        let s3 = grp("S3");
        let a = s3.tag("a").unwrap();
        let w = Word::from_tokens(
            s3.clone(),
            vec![
                Token::Coeff(a),
                Token::letter("x"),
                Token::letter("y"),
                Token::letter_inv("y"),
                Token::letter_inv("x"),
                Token::Coeff(a),
            ],
        )
        .unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn out_of_range_coefficient() {
        assert_eq!(
            Word::from_tokens(grp("Z2"), vec![Token::Coeff(2)]).unwrap_err(),
            WordError::ElementOutOfRange(2)
        );
    }

    #[test]
    fn conjugation_of_coefficient() {
        // (12) conjugated by (123) with right actions is (23)
        let s3 = grp("S3");
        let id = Homomorphism::identity_on(s3.clone());
        let w = parse_word("@a^x", &s3).unwrap();
        let x = s3.resolve("c123").unwrap();
        let v = evaluate(&w, &Assignment::new(&id).with("x", x)).unwrap();
        assert_eq!(s3.label(v), "c23");
    }

    #[test]
    fn evaluate_empty_and_missing() {
        let z6 = grp("Z6");
        let id = Homomorphism::identity_on(z6.clone());
        assert_eq!(evaluate(&Word::identity(z6.clone()), &Assignment::new(&id)).unwrap(), 0);
        let w = parse_word("x", &z6).unwrap();
        assert_eq!(
            evaluate(&w, &Assignment::new(&id)).unwrap_err(),
            WordError::MissingAssignment("x".into())
        );
    }

    #[test]
    fn commutators_vanish_in_abelian_groups() {
        let z6 = grp("Z6");
        let id = Homomorphism::identity_on(z6.clone());
        let w = parse_word("[x,y]", &z6).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                let asg = Assignment::new(&id).with("x", x).with("y", y);
                assert_eq!(evaluate(&w, &asg).unwrap(), 0);
            }
        }
    }

    #[test]
    fn substitution_examples() {
        let z2 = grp("Z2");
        let w = parse_word("x", &z2).unwrap();
        let image = parse_word("@a t^21 @a t^22", &z2).unwrap();
        let sub = BTreeMap::from([("x".to_string(), image.clone())]);
        assert_eq!(substitute(&w, &sub, true).unwrap(), image);

        let w = parse_word("[x,y]", &z2).unwrap();
        let sub = BTreeMap::from([("x".to_string(), Word::identity(z2.clone()))]);
        assert!(substitute(&w, &sub, false).unwrap().is_empty());
        assert_eq!(
            substitute(&w, &sub, true).unwrap_err(),
            WordError::MissingSubstitute("y".into())
        );
        assert_eq!(substitute(&w, &BTreeMap::new(), false).unwrap(), w);
    }

    #[test]
    fn display_collapses_runs() {
        let z2 = grp("Z2");
        let w = parse_word("x x x y^-1 y^-1 @g", &z2).unwrap();
        assert_eq!(w.to_string(), "x^3 y^-2 @g1");
        assert_eq!(Word::identity(z2).to_string(), "1");
    }
}
