//! Quasi-identities `(w₁ = 1 & … & wₘ = 1) ⇒ v = 1`: parsing, exhaustive
//! checking in finite groups, and the separating systems they induce.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::equations::{
    search_space, verify_witness, EquationError, EquationSystem, Witness, DEFAULT_MAX_SPACE,
};
use crate::group::{express_in_normal_closure, GroupError, GroupTable, Homomorphism, Sign};
use crate::words::{same_group, CompiledWord, Lexeme, Parser, Word, WordError};

/// Quasi-identities shipped with the toolkit, keyed by a short label.
pub const SHIPPED_QIS: &[(&str, &str)] = &[
    ("involution-free", "x^2=1 => x=1"),
    ("commutator-fixed", "x*[x,y]^-1=1 => x=1"),
    ("square-conjugation", "y^(2)^x*y^2=1 & x^(2)^y*x^2=1 => x=1"),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuasiError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error("unknown {0} is not a generator of the presentation")]
    GeneratorMismatch(String),
    #[error("witness is invalid: {0}")]
    WitnessInvalid(String),
    #[error("the coefficient g must be nontrivial")]
    TrivialTarget,
    #[error("g does not lie in the normal closure of h in the host group")]
    NotInNormalClosure,
}

/// Words living over the trivial group, so that they carry no coefficients.
fn letters_only() -> Arc<GroupTable> {
    static TRIVIAL: OnceLock<Arc<GroupTable>> = OnceLock::new();
    TRIVIAL.get_or_init(|| Arc::new(GroupTable::trivial())).clone()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIdentity {
    variables: Vec<String>,
    hypotheses: Vec<Word>,
    conclusion: Word,
}

impl QuasiIdentity {
    /// Variables are collected by first appearance, hypotheses before the conclusion.
    pub fn new(hypotheses: Vec<Word>, conclusion: Word) -> Result<Self, QuasiError> {
        let trivial = letters_only();
        let mut variables: Vec<String> = Vec::new();
        let mut rehome = |w: &Word| -> Result<Word, QuasiError> {
            for v in w.unknowns() {
                if !variables.contains(&v) {
                    variables.push(v);
                }
            }
            w.rehome(trivial.clone()).map_err(|_| WordError::CoefficientNotAllowed(0).into())
        };
        let hypotheses = hypotheses.iter().map(&mut rehome).collect::<Result<Vec<_>, _>>()?;
        let conclusion = rehome(&conclusion)?;
        Ok(QuasiIdentity {
            variables,
            hypotheses,
            conclusion,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn hypotheses(&self) -> &[Word] {
        &self.hypotheses
    }

    pub fn conclusion(&self) -> &Word {
        &self.conclusion
    }
}

impl fmt::Display for QuasiIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hyps: Vec<String> = self.hypotheses.iter().map(|w| format!("{w}=1")).collect();
        if !hyps.is_empty() {
            write!(f, "{} ", hyps.join(" & "))?;
        }
        write!(f, "=> {}=1", self.conclusion)
    }
}

/// `u₁ = v₁ & … => u = v`; every side is a coefficient-free word.
pub fn parse_qi(text: &str) -> Result<QuasiIdentity, QuasiError> {
    let trivial = letters_only();
    let mut p = Parser::new(text, &trivial, false)?;
    let mut hypotheses = Vec::new();
    if !p.eat(&Lexeme::Arrow) {
        hypotheses.push(p.equation()?);
        while p.eat(&Lexeme::Amp) {
            hypotheses.push(p.equation()?);
        }
        p.expect(&Lexeme::Arrow, "'=>'")?;
    }
    let conclusion = p.equation()?;
    if !p.at_end() {
        return Err(p.error("trailing input").into());
    }
    QuasiIdentity::new(hypotheses, conclusion)
}

/// A relator `w` or a relation `u = v` (read as `u v⁻¹`), without coefficients.
pub fn parse_relator(text: &str) -> Result<Word, QuasiError> {
    let trivial = letters_only();
    let mut p = Parser::new(text, &trivial, false)?;
    let lhs = p.word()?;
    let w = if p.eat(&Lexeme::Eq) {
        lhs.mul(&p.word()?.inverse())
    } else {
        lhs
    };
    if !p.at_end() {
        return Err(p.error("trailing input").into());
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QiVerdict {
    pub holds: bool,
    /// Values of the variables, in declaration order.
    pub counterexample: Option<Vec<usize>>,
}

/// Exhaustive check over `G^{#variables}`; the reported counterexample is the
/// lexicographically first one.
pub fn qi_holds(g: &GroupTable, qi: &QuasiIdentity) -> Result<QiVerdict, QuasiError> {
    qi_holds_with(g, qi, DEFAULT_MAX_SPACE, 1)
}

pub fn qi_holds_with(
    g: &GroupTable,
    qi: &QuasiIdentity,
    max_space: u64,
    jobs: usize,
) -> Result<QiVerdict, QuasiError> {
    let n = qi.variables.len();
    search_space(g.order(), n, max_space)?;
    let compile = |w: &Word| CompiledWord::new(w, &[], &qi.variables);
    let hyps = qi.hypotheses.iter().map(compile).collect::<Result<Vec<_>, _>>()?;
    let concl = compile(&qi.conclusion)?;
    let id = g.identity();
    let violated =
        |vals: &[usize]| hyps.iter().all(|h| h.eval(g, vals) == id) && concl.eval(g, vals) != id;
    if n == 0 {
        let bad = violated(&[]);
        return Ok(QiVerdict {
            holds: !bad,
            counterexample: bad.then(Vec::new),
        });
    }
    let first_under = |head: usize| -> Option<Vec<usize>> {
        let mut vals = vec![0usize; n];
        vals[0] = head;
        loop {
            if violated(&vals) {
                return Some(vals);
            }
            let mut i = n - 1;
            loop {
                if i == 0 {
                    return None;
                }
                vals[i] += 1;
                if vals[i] < g.order() {
                    break;
                }
                vals[i] = 0;
                i -= 1;
            }
        }
    };
    let found = if jobs == 1 {
        g.elements().find_map(first_under)
    } else {
        let run = || {
            (0..g.order())
                .into_par_iter()
                .map(first_under)
                .find_first(Option::is_some)
                .flatten()
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| EquationError::BadParameters(e.to_string()))?
            .install(run)
    };
    Ok(QiVerdict {
        holds: found.is_none(),
        counterexample: found,
    })
}

/// `(relators = 1) ⇒ target = 1` over the listed generators.
pub fn qi_from_presentation(
    generators: &[String],
    relators: &[Word],
    target: &Word,
) -> Result<QuasiIdentity, QuasiError> {
    for w in relators.iter().chain(std::iter::once(target)) {
        if let Some(v) = w.unknowns().into_iter().find(|v| !generators.contains(v)) {
            return Err(QuasiError::GeneratorMismatch(v));
        }
    }
    QuasiIdentity::new(relators.to_vec(), target.clone())
}

/// The output of the simple-class construction: the hypotheses of the
/// quasi-identity plus `∏ᵢ (v^{±1})^{zᵢ} = g`, with a solution in the host.
#[derive(Debug, Clone)]
pub struct SeparatingSystem {
    pub qi: QuasiIdentity,
    pub system: EquationSystem,
    pub witness: Witness,
    /// Fresh unknowns `zᵢ`, their signs and the conjugators bound to them.
    pub conjugators: Vec<(String, Sign, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparatingSystemFile {
    pub qi: String,
    pub system: String,
    pub unknowns: Vec<String>,
    pub overgroup: String,
    pub witness: Vec<String>,
}

impl SeparatingSystem {
    /// JSON view; `overgroup` is the reference the host was loaded from.
    pub fn to_file(&self, overgroup: &str) -> SeparatingSystemFile {
        SeparatingSystemFile {
            qi: self.qi.to_string(),
            system: self.system.to_string(),
            unknowns: self.system.unknowns().to_vec(),
            overgroup: overgroup.to_string(),
            witness: self
                .witness
                .solution
                .iter()
                .map(|&x| self.witness.overgroup.label(x))
                .collect(),
        }
    }
}

/// Inputs of [`build_separating_system`].
pub struct SeparationInput<'a> {
    pub qi: &'a QuasiIdentity,
    /// Group violating the quasi-identity and the violating values.
    pub violator: &'a Arc<GroupTable>,
    pub witness_values: &'a [usize],
    pub coeff: &'a Arc<GroupTable>,
    pub g: usize,
    pub host: &'a Arc<GroupTable>,
    pub embed_g: &'a Homomorphism,
    pub embed_h: &'a Homomorphism,
}

pub fn build_separating_system(input: SeparationInput<'_>) -> Result<SeparatingSystem, QuasiError> {
    let SeparationInput {
        qi,
        violator: h_group,
        witness_values,
        coeff,
        g,
        host,
        embed_g,
        embed_h,
    } = input;
    coeff.check_element(g)?;
    if g == coeff.identity() {
        return Err(QuasiError::TrivialTarget);
    }
    for (e, src, name) in [(embed_g, coeff, "G"), (embed_h, h_group, "H")] {
        if !same_group(e.source(), src) || !same_group(e.target(), host) {
            return Err(QuasiError::WitnessInvalid(format!(
                "the embedding of {name} does not run into the host group"
            )));
        }
        e.require_embedding()?;
    }
    if witness_values.len() != qi.variables.len() {
        return Err(QuasiError::WitnessInvalid(format!(
            "{} values for {} variables",
            witness_values.len(),
            qi.variables.len()
        )));
    }
    for &x in witness_values {
        h_group.check_element(x)?;
    }
    let compile = |w: &Word| CompiledWord::new(w, &[], &qi.variables);
    for w in &qi.hypotheses {
        if compile(w)?.eval(h_group, witness_values) != h_group.identity() {
            return Err(QuasiError::WitnessInvalid(format!("hypothesis {w} = 1 fails")));
        }
    }
    let v_value = compile(&qi.conclusion)?.eval(h_group, witness_values);
    if v_value == h_group.identity() {
        return Err(QuasiError::WitnessInvalid("the conclusion holds at the witness".into()));
    }
    let h = *embed_h.apply(v_value);
    let target = *embed_g.apply(g);
    let expr = express_in_normal_closure(host, h, target)?.ok_or(QuasiError::NotInNormalClosure)?;

    let mut conjugators = Vec::new();
    let mut next = 1;
    for &(sign, z) in &expr.factors {
        let name = loop {
            let c = format!("z{next}");
            next += 1;
            if !qi.variables.contains(&c) {
                break c;
            }
        };
        conjugators.push((name, sign, z));
    }

    let rehome = |w: &Word| w.rehome(coeff.clone()).expect("quasi-identities carry no coefficients");
    let v = rehome(&qi.conclusion);
    let mut product = Word::identity(coeff.clone());
    for (name, sign, _) in &conjugators {
        let z = Word::var(coeff.clone(), name);
        product = product.mul(&v.pow(sign.as_i64()).conj(&z));
    }
    let last = product.mul(&Word::coeff(coeff.clone(), coeff.inv(g)));
    let mut equations: Vec<Word> = qi.hypotheses.iter().map(rehome).collect();
    equations.push(last);
    let mut unknowns = qi.variables.clone();
    unknowns.extend(conjugators.iter().map(|(n, _, _)| n.clone()));
    let system = EquationSystem::with_unknowns(coeff.clone(), equations, unknowns)?;

    let mut solution: Vec<usize> = witness_values.iter().map(|&x| *embed_h.apply(x)).collect();
    solution.extend(conjugators.iter().map(|&(_, _, z)| z));
    let witness = Witness {
        overgroup: host.clone(),
        embedding: embed_g.clone(),
        solution,
    };
    verify_witness(&system, &witness).map_err(|e| QuasiError::WitnessInvalid(e.to_string()))?;
    Ok(SeparatingSystem {
        qi: qi.clone(),
        system,
        witness,
        conjugators,
    })
}
