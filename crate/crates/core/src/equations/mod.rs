//! Finite systems of equations over a coefficient group, an exhaustive
//! solver, the named equations and their witness overgroups.

mod witness;

pub use witness::{verify_witness, witness_construction, AnyWitness, Witness};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{structure_report, FiniteGroup, GroupError, GroupTable, Homomorphism};
use crate::words::{
    parse_equations, same_group, substitute, CompiledWord, Word, WordError, MAX_WORD_TOKENS,
};

/// Default bound on `|K|ⁿ` for [`solve`].
pub const DEFAULT_MAX_SPACE: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquationError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("search space {space} exceeds the cap {cap}")]
    SearchSpaceTooLarge { space: u128, cap: u64 },
    #[error("element must be nontrivial")]
    TrivialElement,
    #[error("expected unknowns {expected:?}, found {found:?}")]
    ArityMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("unknown {0} is not declared by the system")]
    UndeclaredUnknown(String),
    #[error("embedding does not start at the coefficient group")]
    EmbeddingMismatch,
    #[error("witness failed verification: {0}")]
    VerificationFailed(String),
}

/// Words `wᵢ`, each read as the equation `wᵢ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    group: Arc<GroupTable>,
    equations: Vec<Word>,
    unknowns: Vec<String>,
}

impl EquationSystem {
    /// Unknowns are taken in order of first appearance.
    pub fn new(group: Arc<GroupTable>, equations: Vec<Word>) -> Result<Self, EquationError> {
        let mut unknowns: Vec<String> = Vec::new();
        for w in &equations {
            for v in w.unknowns() {
                if !unknowns.contains(&v) {
                    unknowns.push(v);
                }
            }
        }
        EquationSystem::with_unknowns(group, equations, unknowns)
    }

    /// `unknowns` may list names that no equation uses.
    pub fn with_unknowns(
        group: Arc<GroupTable>,
        equations: Vec<Word>,
        unknowns: Vec<String>,
    ) -> Result<Self, EquationError> {
        for w in &equations {
            if !same_group(w.group(), &group) {
                return Err(WordError::GroupMismatch.into());
            }
            if let Some(v) = w.unknowns().into_iter().find(|v| !unknowns.contains(v)) {
                return Err(EquationError::UndeclaredUnknown(v));
            }
        }
        for (i, v) in unknowns.iter().enumerate() {
            if unknowns[..i].contains(v) {
                return Err(EquationError::BadParameters(format!("unknown {v} listed twice")));
            }
        }
        Ok(EquationSystem {
            group,
            equations,
            unknowns,
        })
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn equations(&self) -> &[Word] {
        &self.equations
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn is_univariate(&self) -> bool {
        self.unknowns.len() == 1
    }

    /// Appends equations, extending the unknown list by first appearance.
    pub fn extended(&self, more: Vec<Word>) -> Result<Self, EquationError> {
        let mut unknowns = self.unknowns.clone();
        for w in &more {
            for v in w.unknowns() {
                if !unknowns.contains(&v) {
                    unknowns.push(v);
                }
            }
        }
        let mut equations = self.equations.clone();
        equations.extend(more);
        EquationSystem::with_unknowns(self.group.clone(), equations, unknowns)
    }
}

/// `w₁ = 1; w₂ = 1; …` in the equation DSL.
impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.equations.iter().map(|w| format!("{w} = 1")).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Parses `u = v; …` over `group`.
pub fn parse_system(text: &str, group: &Arc<GroupTable>) -> Result<EquationSystem, EquationError> {
    EquationSystem::new(group.clone(), parse_equations(text, group)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    First,
    All,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub mode: SolveMode,
    pub max_space: u64,
    /// Worker threads; `0` means rayon's default, `1` runs inline.
    pub jobs: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            mode: SolveMode::All,
            max_space: DEFAULT_MAX_SPACE,
            jobs: 1,
        }
    }
}

impl SolveOptions {
    pub fn first() -> Self {
        SolveOptions {
            mode: SolveMode::First,
            ..Default::default()
        }
    }

    pub fn all() -> Self {
        SolveOptions::default()
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn max_space(mut self, cap: u64) -> Self {
        self.max_space = cap;
        self
    }
}

/// Solutions as tuples of element indices, one entry per unknown in system
/// order, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solutions: Vec<Vec<usize>>,
    /// Whether the whole space was scanned.
    pub exhaustive: bool,
    pub space: u64,
}

impl SolveReport {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// `|K|ⁿ`, or an error past `cap`.
pub fn search_space(order: usize, n: usize, cap: u64) -> Result<u64, EquationError> {
    let mut space: u128 = 1;
    for _ in 0..n {
        space = space.saturating_mul(order as u128);
        if space > cap as u128 {
            // report the true size when it fits, otherwise the saturated bound
            let full = (order as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            return Err(EquationError::SearchSpaceTooLarge { space: full, cap });
        }
    }
    Ok(space as u64)
}

/// Lexicographic exhaustive search over `Kⁿ`. The outermost coordinate is
/// split between workers and partial lists are concatenated in order, so the
/// report does not depend on `jobs`.
pub fn solve(
    sys: &EquationSystem,
    k: &Arc<GroupTable>,
    embed: &Homomorphism,
    opts: SolveOptions,
) -> Result<SolveReport, EquationError> {
    if !same_group(embed.source(), &sys.group) || !same_group(embed.target(), k) {
        return Err(EquationError::EmbeddingMismatch);
    }
    embed.require_embedding()?;
    let n = sys.unknowns.len();
    let space = search_space(k.order(), n, opts.max_space)?;
    let compiled: Vec<CompiledWord> = sys
        .equations
        .iter()
        .map(|w| CompiledWord::new(w, embed.images(), &sys.unknowns))
        .collect::<Result<_, _>>()?;
    let id = k.identity();
    let holds = |vals: &[usize]| compiled.iter().all(|c| c.eval(k, vals) == id);

    if n == 0 {
        let solutions = if holds(&[]) { vec![vec![]] } else { vec![] };
        return Ok(SolveReport {
            exhaustive: opts.mode == SolveMode::All || solutions.is_empty(),
            solutions,
            space,
        });
    }

    // every tuple with first coordinate `head`, in lexicographic order
    let scan = |head: usize, first_only: bool| -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        let mut vals = vec![0usize; n];
        vals[0] = head;
        loop {
            if holds(&vals) {
                found.push(vals.clone());
                if first_only {
                    return found;
                }
            }
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return found;
                }
                vals[i] += 1;
                if vals[i] < k.order() {
                    break;
                }
                vals[i] = 0;
                i -= 1;
            }
        }
    };

    let run = || -> Vec<Vec<usize>> {
        match (opts.mode, opts.jobs) {
            (SolveMode::First, 1) => (0..k.order())
                .find_map(|h| scan(h, true).pop())
                .into_iter()
                .collect(),
            (SolveMode::All, 1) => (0..k.order()).flat_map(|h| scan(h, false)).collect(),
            (SolveMode::First, _) => (0..k.order())
                .into_par_iter()
                .map(|h| scan(h, true).pop())
                .find_first(|r| r.is_some())
                .flatten()
                .into_iter()
                .collect(),
            (SolveMode::All, _) => {
                let parts: Vec<Vec<Vec<usize>>> = (0..k.order())
                    .into_par_iter()
                    .map(|h| scan(h, false))
                    .collect();
                parts.into_iter().flatten().collect()
            }
        }
    };
    let solutions = if opts.jobs == 1 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| EquationError::BadParameters(e.to_string()))?
            .install(run)
    };
    Ok(SolveReport {
        exhaustive: opts.mode == SolveMode::All || solutions.is_empty(),
        solutions,
        space,
    })
}

/// Solves over `G` itself.
pub fn solve_in_place(sys: &EquationSystem, opts: SolveOptions) -> Result<SolveReport, EquationError> {
    let id = Homomorphism::identity_on(sys.group.clone());
    solve(sys, &sys.group.clone(), &id, opts)
}

/// Checks a tuple against every equation of the system.
pub fn is_solution<T: FiniteGroup>(
    sys: &EquationSystem,
    embed: &Homomorphism<T>,
    values: &[T::Elem],
) -> Result<bool, EquationError> {
    if values.len() != sys.unknowns.len() {
        return Err(EquationError::BadParameters(format!(
            "{} values for {} unknowns",
            values.len(),
            sys.unknowns.len()
        )));
    }
    let mut asg = crate::words::Assignment::new(embed);
    for (v, x) in sys.unknowns.iter().zip(values) {
        asg.values.insert(v.clone(), x.clone());
    }
    let id = embed.target().identity();
    for w in &sys.equations {
        if crate::words::evaluate(w, &asg)? != id {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An equation in `x` with no solution in any overgroup of `⟨a⟩`:
/// `a^{a^x} a⁻²` when `a² ≠ 1`, and `a^{x²} [a, a^x]⁻¹` when `a` is an involution.
pub fn unsolvable_word(g: &Arc<GroupTable>, a: usize) -> Result<Word, EquationError> {
    g.check_element(a)?;
    if a == g.identity() {
        return Err(EquationError::TrivialElement);
    }
    let ca = Word::coeff(g.clone(), a);
    let x = Word::var(g.clone(), "x");
    let a_x = ca.conj(&x);
    Ok(if g.element_order(a) > 2 {
        ca.conj(&a_x).mul(&ca.pow(-2))
    } else {
        ca.conj(&x.pow(2)).mul(&Word::commutator(&ca, &a_x).inverse())
    })
}

/// `w^{w^y} w⁻² = 1` for a word `w` in the single unknown `x`.
pub fn star_equation(w: &Word) -> Result<EquationSystem, EquationError> {
    let found = w.unknowns();
    if found.iter().any(|v| v != "x") {
        return Err(EquationError::ArityMismatch {
            expected: vec!["x".into()],
            found,
        });
    }
    let y = Word::var(w.group().clone(), "y");
    let eq = w.conj(&w.conj(&y)).mul(&w.pow(-2));
    EquationSystem::with_unknowns(w.group().clone(), vec![eq], vec!["x".into(), "y".into()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NamedEquation {
    /// `[x, y] = g`
    Commutator { g: usize },
    /// `(a x)^{q^k} = x^{q^k}`
    Power { a: usize, q: u64, k: u32 },
    /// `g^x = g⁻¹`
    Antipodal { g: usize },
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `q^k` after checking the power-equation hypotheses.
pub(crate) fn power_exponent(g: &GroupTable, a: usize, q: u64, k: u32) -> Result<u64, EquationError> {
    let p = g.element_order(a);
    if !is_prime(p) {
        return Err(EquationError::BadParameters(format!("a has order {p}, which is not prime")));
    }
    if !is_prime(q) {
        return Err(EquationError::BadParameters(format!("q = {q} is not prime")));
    }
    if structure_report(g).prime_set.contains(&q) {
        return Err(EquationError::BadParameters(format!("q = {q} divides |G|")));
    }
    let qk = q
        .checked_pow(k)
        .filter(|&e| e <= (MAX_WORD_TOKENS / 4) as u64)
        .ok_or_else(|| EquationError::BadParameters(format!("q^k = {q}^{k} is too large")))?;
    if qk <= p {
        return Err(EquationError::BadParameters(format!("q^k = {qk} must exceed the order {p} of a")));
    }
    Ok(qk)
}

pub fn named_equation(g: &Arc<GroupTable>, kind: NamedEquation) -> Result<EquationSystem, EquationError> {
    let x = Word::var(g.clone(), "x");
    let nontrivial = |e: usize| -> Result<Word, EquationError> {
        g.check_element(e)?;
        if e == g.identity() {
            return Err(EquationError::BadParameters("element must be nontrivial".into()));
        }
        Ok(Word::coeff(g.clone(), e))
    };
    let (eq, unknowns) = match kind {
        NamedEquation::Commutator { g: e } => {
            let c = nontrivial(e)?;
            let y = Word::var(g.clone(), "y");
            (Word::commutator(&x, &y).mul(&c.inverse()), vec!["x", "y"])
        }
        NamedEquation::Power { a, q, k } => {
            let ca = nontrivial(a)?;
            let qk = power_exponent(g, a, q, k)? as i64;
            (ca.mul(&x).pow(qk).mul(&x.pow(-qk)), vec!["x"])
        }
        NamedEquation::Antipodal { g: e } => {
            let c = nontrivial(e)?;
            (c.conj(&x).mul(&c), vec!["x"])
        }
    };
    EquationSystem::with_unknowns(
        g.clone(),
        vec![eq],
        unknowns.into_iter().map(String::from).collect(),
    )
}

/// The univariate system in `parameter` together with the substitution
/// `xᵢ ↦ a t^{20i+1} a t^{20i+2} ⋯ a t^{20i+20}` that produced it.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub system: EquationSystem,
    pub parameter: String,
    /// Unknowns of the original system, in order.
    pub original_unknowns: Vec<String>,
    pub substitution: BTreeMap<String, Word>,
}

impl Reduction {
    /// Values of the original unknowns induced by a value of the parameter.
    pub fn pullback(&self, embed: &Homomorphism, t: usize) -> Result<Vec<usize>, EquationError> {
        let asg = crate::words::Assignment::new(embed).with(self.parameter.clone(), t);
        self.original_unknowns
            .iter()
            .map(|v| Ok(crate::words::evaluate(&self.substitution[v], &asg)?))
            .collect()
    }
}

/// Exponent schedule of the `i`-th unknown (1-based).
pub fn reduction_exponents(i: usize) -> std::ops::RangeInclusive<u64> {
    let base = 20 * i as u64;
    base + 1..=base + 20
}

/// Rewrites `sys` in the single unknown `t` (or a fresh variant when `t` is taken).
pub fn univariate_reduce(sys: &EquationSystem, a: usize) -> Result<Reduction, EquationError> {
    let g = &sys.group;
    g.check_element(a)?;
    if a == g.identity() {
        return Err(EquationError::TrivialElement);
    }
    let parameter = fresh_name("t", sys.unknowns());
    let t = Word::var(g.clone(), &parameter);
    let ca = Word::coeff(g.clone(), a);
    let mut substitution = BTreeMap::new();
    for (i, v) in sys.unknowns.iter().enumerate() {
        let mut image = Word::identity(g.clone());
        for e in reduction_exponents(i + 1) {
            image = image.mul(&ca).mul(&t.pow(e as i64));
        }
        substitution.insert(v.clone(), image);
    }
    let equations = sys
        .equations
        .iter()
        .map(|w| substitute(w, &substitution, true))
        .collect::<Result<Vec<_>, _>>()?;
    let system = EquationSystem::with_unknowns(g.clone(), equations, vec![parameter.clone()])?;
    Ok(Reduction {
        system,
        parameter,
        substitution,
        original_unknowns: sys.unknowns.clone(),
    })
}

/// `base`, or `base1`, `base2`, … avoiding `taken`.
pub fn fresh_name(base: &str, taken: &[String]) -> String {
    if !taken.iter().any(|v| v == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !taken.contains(c))
        .expect("some suffix is free")
}
