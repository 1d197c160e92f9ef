//! Syllable normal forms in `Q ∗ ⟨t⟩`, symmetrized relator sets and the
//! metric small cancellation condition `C'(λ)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::group::{GroupError, GroupTable};
use crate::words::{parse_word, Token, Word, WordError};

/// Name of the free generator in relator text.
pub const T: &str = "t";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmallCancError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("relator {0} is trivial after cyclic reduction")]
    RelatorTrivial(usize),
    #[error("relator set is not symmetrized")]
    NotSymmetrized,
    #[error("the anchor element must be nontrivial")]
    TrivialElement,
    #[error("relators may only use the letter t, found {0}")]
    UnexpectedUnknown(String),
    #[error("relator set is empty")]
    Empty,
    #[error("lambda must be a positive fraction, got {0}")]
    BadLambda(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syllable {
    /// A nontrivial element of `Q`.
    Q(usize),
    /// A nonzero power of `t`.
    T(BigInt),
}

impl Syllable {
    fn same_kind(&self, other: &Syllable) -> bool {
        matches!(
            (self, other),
            (Syllable::Q(_), Syllable::Q(_)) | (Syllable::T(_), Syllable::T(_))
        )
    }
}

/// An element of `Q ∗ ⟨t⟩` in normal form.
#[derive(Clone, PartialEq, Eq)]
pub struct FreeProductWord {
    factor: Arc<GroupTable>,
    syllables: Vec<Syllable>,
}

/// Product of two same-kind syllables, `None` when it is trivial.
fn merge(q: &GroupTable, a: &Syllable, b: &Syllable) -> Option<Syllable> {
    match (a, b) {
        (Syllable::Q(x), Syllable::Q(y)) => {
            let z = q.mul(*x, *y);
            (z != q.identity()).then_some(Syllable::Q(z))
        }
        (Syllable::T(x), Syllable::T(y)) => {
            let z = x + y;
            (!z.is_zero()).then_some(Syllable::T(z))
        }
        _ => unreachable!("merging syllables of different kinds"),
    }
}

fn trivial(q: &GroupTable, s: &Syllable) -> bool {
    match s {
        Syllable::Q(x) => *x == q.identity(),
        Syllable::T(e) => e.is_zero(),
    }
}

/// Merges adjacent same-kind syllables and drops trivial ones until nothing changes.
pub fn fp_normalize(factor: &Arc<GroupTable>, tokens: impl IntoIterator<Item = Syllable>) -> FreeProductWord {
    let q = &**factor;
    let mut out: Vec<Syllable> = Vec::new();
    for s in tokens {
        if trivial(q, &s) {
            continue;
        }
        match out.last() {
            Some(top) if top.same_kind(&s) => {
                let merged = merge(q, top, &s);
                out.pop();
                out.extend(merged);
            }
            _ => out.push(s),
        }
    }
    FreeProductWord {
        factor: factor.clone(),
        syllables: out,
    }
}

impl FreeProductWord {
    pub fn factor(&self) -> &Arc<GroupTable> {
        &self.factor
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    /// Syllable count.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn inverse(&self) -> FreeProductWord {
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| match s {
                Syllable::Q(x) => Syllable::Q(self.factor.inv(*x)),
                Syllable::T(e) => Syllable::T(-e),
            })
            .collect();
        FreeProductWord {
            factor: self.factor.clone(),
            syllables,
        }
    }

    pub fn mul(&self, other: &FreeProductWord) -> FreeProductWord {
        fp_normalize(
            &self.factor,
            self.syllables.iter().chain(&other.syllables).cloned(),
        )
    }

    /// Conjugates by the last syllable until the first and last syllables
    /// have different kinds (or one syllable is left).
    pub fn weak_cyclic_reduce(&self) -> FreeProductWord {
        let mut s = self.syllables.clone();
        while s.len() >= 2 && s[0].same_kind(&s[s.len() - 1]) {
            let last = s.pop().expect("len ≥ 2");
            match merge(&self.factor, &last, &s[0]) {
                Some(m) => s[0] = m,
                None => {
                    s.remove(0);
                }
            }
        }
        FreeProductWord {
            factor: self.factor.clone(),
            syllables: s,
        }
    }

    /// Cyclic shift starting at syllable `i`, weakly cyclically reduced.
    pub fn rotate(&self, i: usize) -> FreeProductWord {
        let n = self.syllables.len();
        let mut s = self.syllables[i % n.max(1)..].to_vec();
        s.extend_from_slice(&self.syllables[..i % n.max(1)]);
        FreeProductWord {
            factor: self.factor.clone(),
            syllables: s,
        }
        .weak_cyclic_reduce()
    }

    /// Least `d ≥ 1` with the word equal to its rotation by `d`.
    pub fn cyclic_period(&self) -> usize {
        let n = self.syllables.len();
        (1..n)
            .filter(|d| n.is_multiple_of(*d))
            .find(|&d| (0..n).all(|i| self.syllables[i] == self.syllables[(i + d) % n]))
            .unwrap_or(n.max(1))
    }

    /// Reads a word over `Q` whose only unknown is `t`.
    pub fn from_word(w: &Word) -> Result<FreeProductWord, SmallCancError> {
        let mut tokens = Vec::with_capacity(w.len());
        for tok in w.tokens() {
            tokens.push(match tok {
                Token::Coeff(c) => Syllable::Q(*c),
                Token::Letter { var, inverse } if var == T => {
                    Syllable::T(BigInt::from(if *inverse { -1 } else { 1 }))
                }
                Token::Letter { var, .. } => return Err(SmallCancError::UnexpectedUnknown(var.clone())),
            });
        }
        Ok(fp_normalize(w.group(), tokens))
    }
}

/// Relator text: the word DSL over `Q` with `@` elements and the letter `t`.
pub fn parse_fp_word(text: &str, factor: &Arc<GroupTable>) -> Result<FreeProductWord, SmallCancError> {
    FreeProductWord::from_word(&parse_word(text, factor)?)
}

impl fmt::Display for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|s| match s {
                Syllable::Q(x) => format!("@{}", self.factor.label(*x)),
                Syllable::T(e) if *e == BigInt::from(1) => T.to_string(),
                Syllable::T(e) => format!("{T}^{e}"),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for FreeProductWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeProductWord({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelatorSet {
    factor: Arc<GroupTable>,
    relators: Vec<FreeProductWord>,
    symmetrized: bool,
}

impl RelatorSet {
    /// A plain list of relators, not yet symmetrized.
    pub fn new(factor: Arc<GroupTable>, relators: Vec<FreeProductWord>) -> RelatorSet {
        RelatorSet {
            factor,
            relators,
            symmetrized: false,
        }
    }

    pub fn factor(&self) -> &Arc<GroupTable> {
        &self.factor
    }

    pub fn relators(&self) -> &[FreeProductWord] {
        &self.relators
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn len(&self) -> usize {
        self.relators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relators.is_empty()
    }
}

/// All cyclic shifts of every relator and its inverse, weakly cyclically
/// reduced and deduplicated, in sorted order.
pub fn symmetrize(rs: &RelatorSet) -> Result<RelatorSet, SmallCancError> {
    if rs.relators.is_empty() {
        return Err(SmallCancError::Empty);
    }
    let mut members: BTreeSet<Vec<Syllable>> = BTreeSet::new();
    for (i, r) in rs.relators.iter().enumerate() {
        let r = r.weak_cyclic_reduce();
        if r.is_empty() {
            return Err(SmallCancError::RelatorTrivial(i));
        }
        for w in [r.inverse(), r] {
            for k in 0..w.len() {
                members.insert(w.rotate(k).syllables);
            }
        }
    }
    Ok(RelatorSet {
        factor: rs.factor.clone(),
        relators: members
            .into_iter()
            .map(|syllables| FreeProductWord {
                factor: rs.factor.clone(),
                syllables,
            })
            .collect(),
        symmetrized: true,
    })
}

/// `Rᵢ = x̄ᵢ⁻¹ ā t^{20i+1} ā t^{20i+2} ⋯ ā t^{20i+20}` for `i = 1..=x_bar.len()`.
pub fn reduction_relators(
    factor: &Arc<GroupTable>,
    a_bar: usize,
    x_bar: &[usize],
) -> Result<RelatorSet, SmallCancError> {
    factor.check_element(a_bar)?;
    if a_bar == factor.identity() {
        return Err(SmallCancError::TrivialElement);
    }
    let mut relators = Vec::new();
    for (i, &x) in x_bar.iter().enumerate() {
        factor.check_element(x)?;
        let mut tokens = vec![Syllable::Q(factor.inv(x))];
        for e in crate::equations::reduction_exponents(i + 1) {
            tokens.push(Syllable::Q(a_bar));
            tokens.push(Syllable::T(BigInt::from(e)));
        }
        relators.push(fp_normalize(factor, tokens));
    }
    Ok(RelatorSet::new(factor.clone(), relators))
}

/// Length of the common prefix of `a` and `b`, counted conservatively: the
/// first differing position still counts as a (partial) match when both are
/// `Q`-syllables, or `T`-syllables of the same sign.
pub fn piece_length(a: &[Syllable], b: &[Syllable]) -> usize {
    let exact = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let partial = match (a.get(exact), b.get(exact)) {
        (Some(Syllable::Q(_)), Some(Syllable::Q(_))) => true,
        (Some(Syllable::T(x)), Some(Syllable::T(y))) => x.is_positive() == y.is_positive(),
        _ => false,
    };
    exact + usize::from(partial)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MetricReport {
    pub max_piece_syllables: usize,
    pub min_relator_syllables: usize,
    /// `λ` as `p/q`.
    pub lambda_bound: String,
    pub pass: bool,
    /// Two members realizing the longest piece, and its length.
    pub witness_pair: Option<(String, String, usize)>,
}

pub fn parse_lambda(text: &str) -> Result<Ratio<u64>, SmallCancError> {
    let bad = || SmallCancError::BadLambda(text.to_string());
    let (p, q) = text.split_once('/').unwrap_or((text, "1"));
    let p: u64 = p.trim().parse().map_err(|_| bad())?;
    let q: u64 = q.trim().parse().map_err(|_| bad())?;
    if p == 0 || q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

/// `C'(λ)` on a symmetrized set.
pub fn check_metric(rs: &RelatorSet, lambda: Ratio<u64>) -> Result<MetricReport, SmallCancError> {
    if !rs.symmetrized {
        return Err(SmallCancError::NotSymmetrized);
    }
    metric_over_members(&rs.relators, lambda)
}

/// The metric computation over an explicit member list, without asking for
/// closure under inverses and rotations. Pieces are taken between distinct
/// members; a member equal to a proper rotation of itself, `u^m` with period
/// `d`, also overlaps its own shift in `len − d` syllables.
pub fn metric_over_members(
    members: &[FreeProductWord],
    lambda: Ratio<u64>,
) -> Result<MetricReport, SmallCancError> {
    if *lambda.numer() == 0 {
        return Err(SmallCancError::BadLambda(lambda.to_string()));
    }
    let min_len = members.iter().map(FreeProductWord::len).min().ok_or(SmallCancError::Empty)?;
    let mut best: Option<(usize, usize, usize)> = None;
    let mut consider = |piece: usize, i: usize, j: usize| {
        if best.is_none_or(|(p, _, _)| piece > p) {
            best = Some((piece, i, j));
        }
    };
    for (i, r) in members.iter().enumerate() {
        let d = r.cyclic_period();
        if d < r.len() {
            consider(r.len() - d, i, i);
        }
        for (j, s) in members.iter().enumerate().skip(i + 1) {
            if r.syllables != s.syllables {
                consider(piece_length(&r.syllables, &s.syllables), i, j);
            }
        }
    }
    let max_piece = best.map_or(0, |(p, _, _)| p);
    let pass = (max_piece as u128) * (*lambda.denom() as u128)
        < (*lambda.numer() as u128) * (min_len as u128);
    Ok(MetricReport {
        max_piece_syllables: max_piece,
        min_relator_syllables: min_len,
        lambda_bound: format!("{}/{}", lambda.numer(), lambda.denom()),
        pass,
        witness_pair: best
            .filter(|&(p, _, _)| p > 0)
            .map(|(p, i, j)| (members[i].to_string(), members[j].to_string(), p)),
    })
}
