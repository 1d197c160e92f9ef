//! Amalgams `(A, B; C)` of finite groups: words in `A ∗ B`, normal forms in
//! `A ∗_C B`, and the decomposition of kernel words into conjugates of the
//! generators `ĉ⁻¹ c̃`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::io::load_group;
use crate::group::{GroupError, GroupTable, Homomorphism, Sign};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AmalgamError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("letter {index}: element {elem} is out of range for factor {side}")]
    LetterOutOfRange { index: usize, side: Side, elem: usize },
    #[error("malformed input: {0}")]
    Format(String),
    #[error("the amalgamated subgroup is trivial, so the kernel is trivial")]
    TrivialAmalgamatedSubgroup,
    #[error("maximum length must be at least 2")]
    LengthTooSmall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// An element of one factor, serialized as `["A", 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(pub Side, pub usize);

/// Right-coset representatives of the image of `C` in a factor.
#[derive(Debug, Clone)]
struct Transversal {
    /// `rep[x]` is the chosen representative of `C x`.
    rep: Vec<usize>,
    /// `c_index[x]` is the `C`-element mapping to `x`, if any.
    c_index: Vec<Option<usize>>,
}

impl Transversal {
    fn new(factor: &GroupTable, into: &Homomorphism) -> Transversal {
        let mut c_index = vec![None; factor.order()];
        for c in into.source().elements() {
            c_index[*into.apply(c)] = Some(c);
        }
        let mut rep = vec![usize::MAX; factor.order()];
        for x in factor.elements() {
            if rep[x] != usize::MAX {
                continue;
            }
            // least index in the coset, except that C itself is represented by 1
            let coset: Vec<usize> = into.images().iter().map(|&c| factor.mul(c, x)).collect();
            let r = if c_index[x].is_some() {
                factor.identity()
            } else {
                *coset.iter().min().expect("cosets are nonempty")
            };
            for y in coset {
                rep[y] = r;
            }
        }
        Transversal { rep, c_index }
    }
}

#[derive(Debug, Clone)]
pub struct Amalgam {
    a: Arc<GroupTable>,
    b: Arc<GroupTable>,
    c: Arc<GroupTable>,
    into_a: Homomorphism,
    into_b: Homomorphism,
    trans_a: Transversal,
    trans_b: Transversal,
}

/// `{"A": ref, "B": ref, "C": ref, "intoA": [..], "intoB": [..]}` with
/// references as accepted by [`load_group`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmalgamFile {
    #[serde(rename = "A")]
    pub a: String,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "C")]
    pub c: String,
    #[serde(rename = "intoA")]
    pub into_a: Vec<usize>,
    #[serde(rename = "intoB")]
    pub into_b: Vec<usize>,
}

impl Amalgam {
    /// Checks both maps are injective homomorphisms.
    pub fn new(
        a: Arc<GroupTable>,
        b: Arc<GroupTable>,
        c: Arc<GroupTable>,
        into_a: Vec<usize>,
        into_b: Vec<usize>,
    ) -> Result<Amalgam, AmalgamError> {
        let into_a = Homomorphism::from_indices(c.clone(), a.clone(), into_a)?;
        let into_b = Homomorphism::from_indices(c.clone(), b.clone(), into_b)?;
        into_a.require_embedding()?;
        into_b.require_embedding()?;
        let trans_a = Transversal::new(&a, &into_a);
        let trans_b = Transversal::new(&b, &into_b);
        Ok(Amalgam {
            a,
            b,
            c,
            into_a,
            into_b,
            trans_a,
            trans_b,
        })
    }

    pub fn from_file(file: &AmalgamFile) -> Result<Amalgam, AmalgamError> {
        let load = |r: &str| load_group(r).map(Arc::new);
        Amalgam::new(
            load(&file.a)?,
            load(&file.b)?,
            load(&file.c)?,
            file.into_a.clone(),
            file.into_b.clone(),
        )
    }

    pub fn factor(&self, side: Side) -> &Arc<GroupTable> {
        match side {
            Side::A => &self.a,
            Side::B => &self.b,
        }
    }

    pub fn amalgamated(&self) -> &Arc<GroupTable> {
        &self.c
    }

    /// The image of `c ∈ C` in the given factor (`c̃` in `A`, `ĉ` in `B`).
    pub fn image(&self, side: Side, c: usize) -> usize {
        match side {
            Side::A => *self.into_a.apply(c),
            Side::B => *self.into_b.apply(c),
        }
    }

    fn transversal(&self, side: Side) -> &Transversal {
        match side {
            Side::A => &self.trans_a,
            Side::B => &self.trans_b,
        }
    }

    /// The `C`-element whose image is `x`, if `x` lies in the image.
    pub fn c_preimage(&self, side: Side, x: usize) -> Option<usize> {
        self.transversal(side).c_index[x]
    }

    /// `x = c̄ · r` with `r` the chosen representative of `C x`.
    fn split(&self, side: Side, x: usize) -> (usize, usize) {
        let g = self.factor(side);
        let r = self.transversal(side).rep[x];
        let cbar = g.mul(x, g.inv(r));
        let c = self.c_preimage(side, cbar).expect("x r⁻¹ lies in the image of C");
        (c, r)
    }

    /// The generator `ĉ⁻¹ c̃` as a word in `A ∗ B`.
    pub fn generator(&self, c: usize) -> TwoFactorWord {
        TwoFactorWord::reduced(
            self,
            [
                Letter(Side::B, self.b.inv(self.image(Side::B, c))),
                Letter(Side::A, self.image(Side::A, c)),
            ],
        )
    }
}

pub fn parse_amalgam_json(text: &str) -> Result<Amalgam, AmalgamError> {
    let file: AmalgamFile =
        serde_json::from_str(text).map_err(|e| AmalgamError::Format(e.to_string()))?;
    Amalgam::from_file(&file)
}

/// A freely reduced word in `A ∗ B`: nontrivial letters with alternating sides.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoFactorWord {
    letters: Vec<Letter>,
}

impl TwoFactorWord {
    pub fn empty() -> TwoFactorWord {
        TwoFactorWord::default()
    }

    /// Free reduction of an arbitrary letter sequence; letters must be in range.
    pub fn reduced(am: &Amalgam, letters: impl IntoIterator<Item = Letter>) -> TwoFactorWord {
        let mut out: Vec<Letter> = Vec::new();
        for Letter(side, x) in letters {
            let g = am.factor(side);
            let x = match out.last() {
                Some(&Letter(s, y)) if s == side => {
                    out.pop();
                    g.mul(y, x)
                }
                _ => x,
            };
            if x != g.identity() {
                out.push(Letter(side, x));
            }
        }
        TwoFactorWord { letters: out }
    }

    /// Range-checked constructor for external input.
    pub fn from_letters(am: &Amalgam, letters: Vec<Letter>) -> Result<TwoFactorWord, AmalgamError> {
        for (index, &Letter(side, elem)) in letters.iter().enumerate() {
            if elem >= am.factor(side).order() {
                return Err(AmalgamError::LetterOutOfRange { index, side, elem });
            }
        }
        Ok(TwoFactorWord::reduced(am, letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Alternating length.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, am: &Amalgam, other: &TwoFactorWord) -> TwoFactorWord {
        TwoFactorWord::reduced(am, self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inverse(&self, am: &Amalgam) -> TwoFactorWord {
        TwoFactorWord {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|&Letter(s, x)| Letter(s, am.factor(s).inv(x)))
                .collect(),
        }
    }

    /// `by⁻¹ · self · by`
    pub fn conj(&self, am: &Amalgam, by: &TwoFactorWord) -> TwoFactorWord {
        by.inverse(am).mul(am, self).mul(am, by)
    }

    pub fn pow_sign(&self, am: &Amalgam, sign: Sign) -> TwoFactorWord {
        match sign {
            Sign::Plus => self.clone(),
            Sign::Minus => self.inverse(am),
        }
    }

    pub fn display(&self, am: &Amalgam) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        self.letters
            .iter()
            .map(|&Letter(s, x)| format!("{s}:{}", am.factor(s).label(x)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn parse_two_factor_word_json(text: &str, am: &Amalgam) -> Result<TwoFactorWord, AmalgamError> {
    let letters: Vec<Letter> =
        serde_json::from_str(text).map_err(|e| AmalgamError::Format(e.to_string()))?;
    TwoFactorWord::from_letters(am, letters)
}

/// `ι(c) · s₁ s₂ ⋯ s_k` with `c ∈ C` and nontrivial transversal
/// representatives `sᵢ` from alternating factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NormalForm {
    pub head: usize,
    pub reps: Vec<Letter>,
}

impl NormalForm {
    pub fn is_trivial(&self, am: &Amalgam) -> bool {
        self.reps.is_empty() && self.head == am.c.identity()
    }
}

/// Canonical form in `A ∗_C B`, computed from the right: two words are equal
/// in the amalgamated product exactly when their normal forms coincide.
pub fn amalgam_normal_form(w: &TwoFactorWord, am: &Amalgam) -> NormalForm {
    let mut head = am.c.identity();
    // representatives stored right to left
    let mut reps: Vec<Letter> = Vec::new();
    for &Letter(side, d) in w.letters.iter().rev() {
        let g = am.factor(side);
        let mut y = g.mul(d, am.image(side, head));
        if let Some(&Letter(s, r)) = reps.last() {
            if s == side {
                reps.pop();
                y = g.mul(y, r);
            }
        }
        let (c, r) = am.split(side, y);
        head = c;
        if r != g.identity() {
            reps.push(Letter(side, r));
        }
    }
    reps.reverse();
    NormalForm { head, reps }
}

/// `w = ∏ᵢ (ĉᵢ⁻¹ c̃ᵢ)^{±uᵢ}` in `A ∗ B`, product taken left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub conjugates: Vec<(usize, Sign, TwoFactorWord)>,
}

impl Decomposition {
    /// Multiplies the conjugates back together in `A ∗ B`.
    pub fn product(&self, am: &Amalgam) -> TwoFactorWord {
        self.conjugates
            .iter()
            .fold(TwoFactorWord::empty(), |acc, (c, s, u)| {
                acc.mul(am, &am.generator(*c).pow_sign(am, *s).conj(am, u))
            })
    }
}

/// Writes a word of the kernel of `A ∗ B → A ∗_C B` as a product of at most
/// `len(w)` conjugates of generators; `None` when `w` is not in the kernel.
///
/// Each step takes the rightmost letter lying in the image of `C`, respells
/// it in the other factor (which merges it into its neighbours) and records
/// the generator conjugated by the suffix to its right.
pub fn kernel_decompose(w: &TwoFactorWord, am: &Amalgam) -> Option<Decomposition> {
    if !amalgam_normal_form(w, am).is_trivial(am) {
        return None;
    }
    let mut peeled = Vec::new();
    let mut cur = w.clone();
    while !cur.is_empty() {
        let (i, c) = cur
            .letters
            .iter()
            .enumerate()
            .rev()
            .find_map(|(i, &Letter(s, x))| am.c_preimage(s, x).map(|c| (i, c)))
            .expect("a nonempty kernel word has a letter in the image of C");
        let Letter(side, _) = cur.letters[i];
        let sign = match side {
            Side::A => Sign::Plus,
            Side::B => Sign::Minus,
        };
        let suffix = TwoFactorWord {
            letters: cur.letters[i + 1..].to_vec(),
        };
        let mut letters = cur.letters.clone();
        letters[i] = Letter(side.other(), am.image(side.other(), c));
        let next = TwoFactorWord::reduced(am, letters);
        debug_assert!(next.len() < cur.len());
        peeled.push((c, sign, suffix));
        cur = next;
    }
    peeled.reverse();
    Some(Decomposition { conjugates: peeled })
}

/// A nonempty kernel word of length at most `max_len`, built from random
/// conjugates of random generators; deterministic in `seed`.
pub fn random_kernel_word(am: &Amalgam, max_len: usize, seed: u64) -> Result<TwoFactorWord, AmalgamError> {
    if max_len < 2 {
        return Err(AmalgamError::LengthTooSmall);
    }
    let nontrivial_c: Vec<usize> = am.c.elements().filter(|&c| c != am.c.identity()).collect();
    if nontrivial_c.is_empty() {
        return Err(AmalgamError::TrivialAmalgamatedSubgroup);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // a uniformly random nontrivial element, if the factor has one
    let letter = |rng: &mut ChaCha8Rng, side: Side| {
        let g = am.factor(side);
        (g.order() > 1).then(|| {
            let r = rng.gen_range(0..g.order() - 1);
            Letter(side, if r >= g.identity() { r + 1 } else { r })
        })
    };
    for _ in 0..256 {
        let factors = rng.gen_range(1..=3);
        let mut w = TwoFactorWord::empty();
        for _ in 0..factors {
            let c = nontrivial_c[rng.gen_range(0..nontrivial_c.len())];
            let sign = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
            let conj_len = rng.gen_range(0..=2);
            let mut side = if rng.gen_bool(0.5) { Side::A } else { Side::B };
            let mut u = Vec::new();
            for _ in 0..conj_len {
                u.extend(letter(&mut rng, side));
                side = side.other();
            }
            let u = TwoFactorWord::reduced(am, u);
            w = w.mul(am, &am.generator(c).pow_sign(am, sign).conj(am, &u));
        }
        if !w.is_empty() && w.len() <= max_len {
            return Ok(w);
        }
    }
    Ok(am.generator(nontrivial_c[rng.gen_range(0..nontrivial_c.len())]))
}
