//! Finite groups given by multiplication tables.
//!
//! Products compose left to right everywhere: `mul(a, b)` is "a then b", which
//! for permutation groups means the image of a point under `a` is fed to `b`.
//! With this convention a word evaluates as a left fold over its tokens.

mod build;
mod hom;
pub mod io;
mod structure;
mod wreath;

pub use build::{
    build_atomic, build_composite, builtin, catalog, central_product, cyclic_embeddings,
    direct_product, embeddings, quotient, semidirect_product, wreath_cyclic, AtomicSpec, Composite,
    CompositeSpec, CATALOG, MAX_TABLE_ORDER,
};
pub use hom::{verify_map, Homomorphism, MapReport};
pub use structure::{
    closure, commutator_subgroup, derived_series, express_in_normal_closure, lower_central_series,
    structure_report, ClosureMode, ConjugateExpression, Sign, StructureReport,
};
pub use wreath::{WreathCyclic, WreathElem};

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Orders up to this bound get an exhaustive associativity check.
pub const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 400;
/// Random triples checked for larger groups.
pub const SAMPLED_ASSOCIATIVITY_TRIPLES: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("table entry [{row}][{col}] = {value} is out of range for order {order}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("no identity element")]
    NoIdentity,
    #[error("element {0} has no two-sided inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0}, {1}, {2})")]
    NonAssociative(usize, usize, usize),
    #[error("empty table")]
    Empty,
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    #[error("central product needs order(c) = order(g), got {0} and {1}")]
    OrderMismatch(u64, u64),
    #[error("identified element {0} is not central")]
    NonCentralIdentification(String),
    #[error("action is not by automorphisms: {0}")]
    ActionNotAutomorphic(String),
    #[error("map is not a homomorphism: f({0}*{1}) != f({0})*f({1})")]
    NotHomomorphism(usize, usize),
    #[error("map is not injective: {0} and {1} have the same image")]
    NotInjective(usize, usize),
    #[error("map has {got} entries, source has order {expected}")]
    MapLength { got: usize, expected: usize },
    #[error("base element of a normal-closure expression must be nontrivial")]
    TrivialBase,
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("unknown group reference {0:?}")]
    UnknownGroup(String),
    #[error("unknown element {0:?}")]
    UnknownElement(String),
    #[error("malformed group file: {0}")]
    Format(String),
}

/// Minimal interface shared by table-backed and implicitly represented groups.
pub trait FiniteGroup {
    type Elem: Clone + Eq + Hash + fmt::Debug;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn order(&self) -> u64;

    fn pow(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        let base = if k < 0 { self.inv(a) } else { a.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            sq = self.mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    /// `b⁻¹ a b`.
    fn conj(&self, a: &Self::Elem, by: &Self::Elem) -> Self::Elem {
        self.mul(&self.mul(&self.inv(by), a), by)
    }

    /// `a⁻¹ b⁻¹ a b`.
    fn commutator(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(&self.inv(&ba), &ab)
    }
}

/// Unvalidated table data, as read from a file or produced by a constructor.
#[derive(Debug, Clone, Default)]
pub struct RawTable {
    pub name: String,
    pub table: Vec<Vec<usize>>,
    pub identity: Option<usize>,
    pub names: Option<Vec<String>>,
    pub tags: BTreeMap<String, usize>,
}

/// A validated finite group. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupTable {
    name: String,
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<u32>,
    names: Option<Vec<String>>,
    tags: BTreeMap<String, usize>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("tags", &self.tags)
            .finish()
    }
}

/// Checks the group axioms on `raw` and computes inverses.
pub fn validate_group(raw: RawTable) -> Result<GroupTable, GroupError> {
    let n = raw.table.len();
    if n == 0 {
        return Err(GroupError::Empty);
    }
    if n > u32::MAX as usize {
        return Err(GroupError::UnsupportedSize(format!("order {n}")));
    }
    let mut flat = Vec::with_capacity(n * n);
    for (row, entries) in raw.table.iter().enumerate() {
        if entries.len() != n {
            return Err(GroupError::NotSquare {
                row,
                len: entries.len(),
                order: n,
            });
        }
        for (col, &value) in entries.iter().enumerate() {
            if value >= n {
                return Err(GroupError::IndexOutOfRange {
                    row,
                    col,
                    value,
                    order: n,
                });
            }
            flat.push(value as u32);
        }
    }
    let at = |i: usize, j: usize| flat[i * n + j] as usize;
    let is_identity = |e: usize| (0..n).all(|j| at(e, j) == j && at(j, e) == j);
    let identity = match raw.identity {
        Some(e) if e < n && is_identity(e) => e,
        Some(_) => return Err(GroupError::NoIdentity),
        None => (0..n).find(|&e| is_identity(e)).ok_or(GroupError::NoIdentity)?,
    };
    let mut inverse = Vec::with_capacity(n);
    for i in 0..n {
        let inv = (0..n)
            .find(|&j| at(i, j) == identity && at(j, i) == identity)
            .ok_or(GroupError::NoInverse(i))?;
        inverse.push(inv as u32);
    }
    let group = GroupTable {
        name: raw.name,
        order: n,
        table: flat,
        identity,
        inverse,
        names: raw.names,
        tags: raw.tags,
    };
    if let Some(names) = &group.names {
        if names.len() != n {
            return Err(GroupError::Format(format!(
                "{} names for a group of order {n}",
                names.len()
            )));
        }
    }
    if let Some((tag, &e)) = group.tags.iter().find(|(_, &e)| e >= n) {
        return Err(GroupError::Format(format!("tag {tag} points at {e}")));
    }
    group.check_associativity()?;
    Ok(group)
}

impl GroupTable {
    pub(crate) fn from_validated_parts(
        name: String,
        order: usize,
        table: Vec<u32>,
        identity: usize,
        names: Option<Vec<String>>,
        tags: BTreeMap<String, usize>,
    ) -> GroupTable {
        debug_assert_eq!(table.len(), order * order);
        let mut inverse = vec![0u32; order];
        for i in 0..order {
            for j in 0..order {
                if table[i * order + j] as usize == identity {
                    inverse[i] = j as u32;
                    break;
                }
            }
        }
        GroupTable {
            name,
            order,
            table,
            identity,
            inverse,
            names,
            tags,
        }
    }

    /// A table known to be a group by construction (products, quotients),
    /// with its inverse map supplied. Skips the axiom checks.
    pub(crate) fn from_construction(
        name: String,
        table: Vec<u32>,
        identity: usize,
        inverse: Vec<u32>,
        names: Option<Vec<String>>,
        tags: BTreeMap<String, usize>,
    ) -> GroupTable {
        let order = inverse.len();
        debug_assert_eq!(table.len(), order * order);
        GroupTable {
            name,
            order,
            table,
            identity,
            inverse,
            names,
            tags,
        }
    }

    /// The trivial group; coefficient group of coefficient-free words.
    pub fn trivial() -> GroupTable {
        let names = vec!["e".to_string()];
        GroupTable::from_validated_parts("Z1".into(), 1, vec![0], 0, Some(names), BTreeMap::new())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        FiniteGroup::pow(self, &a, k)
    }

    pub fn conj(&self, a: usize, by: usize) -> usize {
        self.mul(self.mul(self.inv(by), a), by)
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    /// Least `k ≥ 1` with `g^k = 1`.
    pub fn element_order(&self, g: usize) -> u64 {
        let mut k = 1u64;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|i| (i + 1..self.order).all(|j| self.mul(i, j) == self.mul(j, i)))
    }

    pub fn is_central(&self, g: usize) -> bool {
        self.elements().all(|x| self.mul(g, x) == self.mul(x, g))
    }

    pub fn center(&self) -> Vec<usize> {
        self.elements().filter(|&g| self.is_central(g)).collect()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn tags(&self) -> &BTreeMap<String, usize> {
        &self.tags
    }

    pub fn tag(&self, name: &str) -> Option<usize> {
        self.tags.get(name).copied()
    }

    pub fn with_tag(mut self, name: impl Into<String>, element: usize) -> Self {
        assert!(element < self.order, "tag target out of range");
        self.tags.insert(name.into(), element);
        self
    }

    /// Resolves an element label: tags first, then names, then the `g<index>`
    /// fallback, then a bare decimal index.
    pub fn resolve(&self, label: &str) -> Option<usize> {
        if let Some(&e) = self.tags.get(label) {
            return Some(e);
        }
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == label) {
                return Some(i);
            }
        }
        let index = |s: &str| s.parse::<usize>().ok().filter(|&i| i < self.order);
        if let Some(rest) = label.strip_prefix('g') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return index(rest);
            }
        }
        if !label.is_empty() && label.bytes().all(|b| b.is_ascii_digit()) {
            return index(label);
        }
        None
    }

    /// A label for `g` that `resolve` maps back to `g` and that is a valid
    /// DSL name.
    pub fn label(&self, g: usize) -> String {
        if let Some(names) = &self.names {
            let name = &names[g];
            if is_dsl_name(name) && self.resolve(name) == Some(g) {
                return name.clone();
            }
        }
        let fallback = format!("g{g}");
        if self.resolve(&fallback) == Some(g) {
            return fallback;
        }
        if let Some((tag, _)) = self.tags.iter().find(|(t, &e)| e == g && is_dsl_name(t)) {
            if self.resolve(tag) == Some(g) {
                return tag.clone();
            }
        }
        // Only reachable when names shadow the index fallback.
        g.to_string()
    }

    /// Exhaustive for small orders, sampled above `EXHAUSTIVE_ASSOCIATIVITY_LIMIT`.
    pub fn check_associativity(&self) -> Result<(), GroupError> {
        let n = self.order;
        if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for i in 0..n {
                for j in 0..n {
                    let ij = self.mul(i, j);
                    for k in 0..n {
                        if self.mul(ij, k) != self.mul(i, self.mul(j, k)) {
                            return Err(GroupError::NonAssociative(i, j, k));
                        }
                    }
                }
            }
            Ok(())
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6765_715f_6173_736f);
            for _ in 0..SAMPLED_ASSOCIATIVITY_TRIPLES {
                let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if self.mul(self.mul(i, j), k) != self.mul(i, self.mul(j, k)) {
                    return Err(GroupError::NonAssociative(i, j, k));
                }
            }
            Ok(())
        }
    }

    pub fn check_element(&self, g: usize) -> Result<usize, GroupError> {
        if g < self.order {
            Ok(g)
        } else {
            Err(GroupError::ElementOutOfRange(g))
        }
    }

    pub fn to_raw(&self) -> RawTable {
        RawTable {
            name: self.name.clone(),
            table: (0..self.order)
                .map(|i| (0..self.order).map(|j| self.mul(i, j)).collect())
                .collect(),
            identity: Some(self.identity),
            names: self.names.clone(),
            tags: self.tags.clone(),
        }
    }
}

impl FiniteGroup for GroupTable {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        GroupTable::mul(self, *a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        GroupTable::inv(self, *a)
    }

    fn order(&self) -> u64 {
        self.order as u64
    }
}

/// `letter (letter | digit | "_")*`
pub fn is_dsl_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
