//! Reproducible sweeps behind each demo: every run yields a [`DemoReport`]
//! of pass/fail steps with JSON data, identical across runs and `jobs`.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::amalgam::{
    amalgam_normal_form, kernel_decompose, random_kernel_word, Amalgam, AmalgamError, Letter, Side,
    TwoFactorWord,
};
use crate::equations::{
    is_solution, named_equation, solve, solve_in_place, star_equation, univariate_reduce,
    unsolvable_word, witness_construction, AnyWitness, EquationError, EquationSystem,
    NamedEquation, SolveOptions, Witness, DEFAULT_MAX_SPACE,
};
use crate::group::{
    builtin, catalog, closure, commutator_subgroup, cyclic_embeddings, embeddings, structure_report,
    wreath_cyclic, ClosureMode, FiniteGroup, GroupError, GroupTable, Homomorphism,
};
use crate::quasi::{
    build_separating_system, parse_qi, qi_holds_with, QuasiError, QuasiIdentity, SeparationInput,
};
use crate::words::{CompiledWord, WordError};


#[derive(Debug, Error)]
pub enum DemoError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Equation(#[from] EquationError),
    #[error(transparent)]
    Quasi(#[from] QuasiError),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error("unknown demo {0}")]
    UnknownDemo(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoStep {
    pub description: String,
    pub pass: bool,
    pub data: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub demo: String,
    pub parameters: Value,
    pub steps: Vec<DemoStep>,
    pub overall: bool,
}

impl DemoReport {
    pub fn new(demo: &str, parameters: Value) -> DemoReport {
        DemoReport {
            demo: demo.to_string(),
            parameters,
            steps: Vec::new(),
            overall: true,
        }
    }

    pub fn step(&mut self, description: impl Into<String>, pass: bool, data: Value) {
        self.overall &= pass;
        self.steps.push(DemoStep {
            description: description.into(),
            pass,
            data,
        });
    }

    /// Pretty JSON with object keys sorted.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        serde_json::to_string_pretty(&v).expect("values serialize")
    }

    /// One line per step.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.demo, verdict(self.overall));
        for s in &self.steps {
            out.push_str(&format!("  [{}] {}\n", verdict(s.pass), s.description));
        }
        out
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Search limits shared by all demos.
#[derive(Debug, Clone, Copy)]
pub struct DemoOptions {
    pub jobs: usize,
    pub max_space: u64,
}

impl Default for DemoOptions {
    fn default() -> Self {
        DemoOptions {
            jobs: 1,
            max_space: DEFAULT_MAX_SPACE,
        }
    }
}

impl DemoOptions {
    fn all(&self) -> SolveOptions {
        SolveOptions::all().jobs(self.jobs).max_space(self.max_space)
    }

    fn first(&self) -> SolveOptions {
        SolveOptions::first().jobs(self.jobs).max_space(self.max_space)
    }
}

pub struct DemoInfo {
    pub id: &'static str,
    pub claim: &'static str,
    pub summary: &'static str,
}

pub const DEMOS: &[DemoInfo] = &[
    DemoInfo {
        id: "claim1",
        claim: "Claim 1",
        summary: "x^2=1 => x=1 yields a system solvable in S3 but not in groups without involutions",
    },
    DemoInfo {
        id: "baumslag-sweep",
        claim: "Claim 3 (a^2 != 1)",
        summary: "a^(a^x) = a^2 has no solution in any catalog group",
    },
    DemoInfo {
        id: "lyndon-sweep",
        claim: "Claim 3 (a^2 = 1)",
        summary: "a^(x^2) = [a, a^x] has no solution in any catalog group",
    },
    DemoInfo {
        id: "star-property",
        claim: "Claim 3 (star equation)",
        summary: "every solution of w^(w^y) = w^2 in a finite group solves w = 1",
    },
    DemoInfo {
        id: "claim13",
        claim: "Claim 13",
        summary: "g^x = g^-1 is unsolvable in abelian groups, solvable in G semidirect Z2",
    },
    DemoInfo {
        id: "claim14",
        claim: "Claim 14",
        summary: "x=[x,y] => x=1 holds in nilpotent groups and fails in AGL1_7",
    },
    DemoInfo {
        id: "claim15",
        claim: "Claim 15",
        summary: "[x,y] = g is unsolvable in abelian overgroups, solvable in a central product",
    },
    DemoInfo {
        id: "claim16",
        claim: "Claim 16",
        summary: "(ax)^(q^k) = x^(q^k) is unsolvable in Z_p, solved by the shift of a wreath product",
    },
    DemoInfo {
        id: "claim18",
        claim: "Claim 18",
        summary: "the wreath witness of claim 16 is finite of order p^(q^k) q^k",
    },
    DemoInfo {
        id: "thm-simple",
        claim: "Simple-class theorem",
        summary: "x^3=1 => x=1 with G=Z2, H=Z3 inside A5 gives a separating system",
    },
    DemoInfo {
        id: "neumann-wreath",
        claim: "Simple classes (wreath products)",
        summary: "the normal closure of a top element meets a base factor in its derived subgroup",
    },
    DemoInfo {
        id: "diagonal",
        claim: "Simple classes (diagonal)",
        summary: "the base diagonal of Zn wr Zn lies in the derived subgroup",
    },
    DemoInfo {
        id: "amalgam-decompose",
        claim: "Amalgam kernel lemma",
        summary: "kernel words of A*B -> A*_C B are products of at most n conjugated generators",
    },
];

/// Tunable demo inputs; unset fields take each demo's defaults.
#[derive(Debug, Clone, Default)]
pub struct DemoParams {
    pub p: Option<u64>,
    pub q: Option<u64>,
    pub k: Option<u32>,
    pub max_order: Option<usize>,
    pub max_n: Option<u64>,
    pub seeds: Option<u64>,
    pub max_len: Option<usize>,
}

pub fn run_demo(id: &str, params: &DemoParams, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let pqk = || (params.p.unwrap_or(3), params.q.unwrap_or(2), params.k.unwrap_or(2));
    match id {
        "claim1" => claim1(opts),
        "baumslag-sweep" => baumslag_sweep(params.max_order.unwrap_or(60), opts),
        "lyndon-sweep" => lyndon_sweep(params.max_order.unwrap_or(60), opts),
        "star-property" => star_property(params.max_order.unwrap_or(60), opts),
        "claim13" => claim13(opts),
        "claim14" => claim14(opts),
        "claim15" => claim15(params.max_n.unwrap_or(6), opts),
        "claim16" => {
            let (p, q, k) = pqk();
            claim16(p, q, k, opts)
        }
        "claim18" => {
            let (p, q, k) = pqk();
            claim18(p, q, k, opts)
        }
        "thm-simple" => thm_simple(opts),
        "neumann-wreath" => neumann_wreath(),
        "diagonal" => diagonal(&[2, 3, 4]),
        "amalgam-decompose" => amalgam_decompose(params.seeds.unwrap_or(100), params.max_len.unwrap_or(8)),
        other => Err(DemoError::UnknownDemo(other.to_string())),
    }
}

fn groups_up_to(max_order: usize) -> impl Iterator<Item = &'static Arc<GroupTable>> {
    catalog().iter().filter(move |g| g.order() <= max_order)
}

/// Solves `w(a) = 1` in `G` for each `a` selected by `pick`, one step per group.
fn unsolvable_sweep(
    report: &mut DemoReport,
    max_order: usize,
    pick: impl Fn(u64) -> bool,
    opts: DemoOptions,
) -> Result<(), DemoError> {
    let mut total = 0;
    for g in groups_up_to(max_order) {
        let picked: Vec<usize> = g.elements().filter(|&a| pick(g.element_order(a))).collect();
        if picked.is_empty() {
            continue;
        }
        let mut solutions = 0;
        for &a in &picked {
            let sys = EquationSystem::new(g.clone(), vec![unsolvable_word(g, a)?])?;
            solutions += solve_in_place(&sys, opts.all())?.solutions.len();
        }
        total += solutions;
        report.step(
            format!("no solution in {}", g.name()),
            solutions == 0,
            json!({"group": g.name(), "order": g.order(), "elements": picked.len(), "solutions": solutions}),
        );
    }
    report.step("total solutions across the catalog", total == 0, json!({"solutions": total}));
    Ok(())
}

pub fn baumslag_sweep(max_order: usize, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("baumslag-sweep", json!({"max_order": max_order}));
    unsolvable_sweep(&mut report, max_order, |o| o > 2, opts)?;
    Ok(report)
}

pub fn lyndon_sweep(max_order: usize, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("lyndon-sweep", json!({"max_order": max_order}));
    unsolvable_sweep(&mut report, max_order, |o| o == 2, opts)?;
    Ok(report)
}

/// `G = Z3`, `w` its Baumslag word; every solution `(x, y)` of the star
/// equation in an overgroup must satisfy `w(x) = 1`.
pub fn star_property(max_order: usize, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("star-property", json!({"coefficients": "Z3", "max_order": max_order}));
    let (mut solutions, mut violations) = (0, 0);
    for k in groups_up_to(max_order) {
        let embs = cyclic_embeddings(3, k)?;
        if embs.is_empty() {
            continue;
        }
        let (mut here, mut bad) = (0, 0);
        for emb in &embs {
            let z3 = emb.source().clone();
            let w = unsolvable_word(&z3, 1)?;
            let sys = star_equation(&w)?;
            let found = solve(&sys, k, emb, opts.all())?;
            let cw = CompiledWord::new(&w, emb.images(), &["x".to_string()])?;
            here += found.solutions.len();
            bad += found
                .solutions
                .iter()
                .filter(|s| cw.eval(k, &s[..1]) != k.identity())
                .count();
        }
        solutions += here;
        violations += bad;
        report.step(
            format!("star solutions in {} satisfy w(x)=1", k.name()),
            bad == 0,
            json!({"group": k.name(), "embeddings": embs.len(), "solutions": here, "violations": bad}),
        );
    }
    report.step(
        "no violations",
        violations == 0,
        json!({"solutions": solutions, "violations": violations}),
    );
    Ok(report)
}

pub fn claim13(opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("claim13", json!({"groups": "abelian catalog", "min_element_order": 3}));
    for g in catalog().iter().filter(|g| g.is_abelian()) {
        let picked: Vec<usize> = g.elements().filter(|&e| g.element_order(e) > 2).collect();
        if picked.is_empty() {
            continue;
        }
        let (mut solutions, mut verified, mut orders_ok, mut nonabelian) = (0, 0, true, true);
        for &e in &picked {
            let kind = NamedEquation::Antipodal { g: e };
            let sys = named_equation(g, kind)?;
            solutions += solve_in_place(&sys, opts.all())?.solutions.len();
            let w = witness_construction(g, kind)?;
            if w.verify(&sys).is_ok() {
                verified += 1;
            }
            orders_ok &= w.order() == 2 * g.order() as u64;
            nonabelian &= w.as_table().is_some_and(|t| !t.overgroup.is_abelian());
        }
        report.step(
            format!("g^x = g^-1 unsolvable in {}, solvable in {}:Z2", g.name(), g.name()),
            solutions == 0 && verified == picked.len() && orders_ok && nonabelian,
            json!({
                "group": g.name(),
                "elements": picked.len(),
                "solutions": solutions,
                "witnesses_verified": verified,
                "witness_order": 2 * g.order(),
            }),
        );
    }
    Ok(report)
}

/// Injective maps of the abelian `g` into abelian catalog groups; `[x,y] = e`
/// must have no solution in any of them.
pub fn claim15(max_n: u64, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("claim15", json!({"max_element_order": max_n}));
    let abelian: Vec<&Arc<GroupTable>> = catalog().iter().filter(|g| g.is_abelian()).collect();
    for g in &abelian {
        let picked: Vec<usize> = g
            .elements()
            .filter(|&e| e != g.identity() && g.element_order(e) <= max_n)
            .collect();
        if picked.is_empty() {
            continue;
        }
        let mut overgroups = Vec::new();
        let mut solutions = 0;
        for l in &abelian {
            let embs = embeddings(g, l)?;
            if embs.is_empty() {
                continue;
            }
            overgroups.push(l.name().to_string());
            for &e in &picked {
                let sys = named_equation(g, NamedEquation::Commutator { g: e })?;
                for emb in &embs {
                    solutions += solve(&sys, l, emb, opts.all())?.solutions.len();
                }
            }
        }
        report.step(
            format!("[x,y] = g unsolvable in abelian overgroups of {}", g.name()),
            solutions == 0,
            json!({"group": g.name(), "elements": picked.len(), "overgroups": overgroups, "solutions": solutions}),
        );
        let mut verified = 0;
        let mut orders = Vec::new();
        for &e in &picked {
            let kind = NamedEquation::Commutator { g: e };
            let w = witness_construction(g, kind)?;
            if w.verify(&named_equation(g, kind)?).is_ok() {
                verified += 1;
            }
            orders.push(w.order());
        }
        orders.dedup();
        report.step(
            format!("central product witnesses verify for {}", g.name()),
            verified == picked.len(),
            json!({"group": g.name(), "verified": verified, "witness_orders": orders}),
        );
    }
    Ok(report)
}

fn sides<T: FiniteGroup>(w: &Witness<T>, a: usize, qk: u64) -> (bool, bool) {
    let g = &*w.overgroup;
    let x = &w.solution[0];
    let ax = g.mul(w.embedding.apply(a), x);
    let one = g.identity();
    (g.pow(&ax, qk as i64) == one, g.pow(x, qk as i64) == one)
}

fn power_report(id: &str, p: u64, q: u64, k: u32, opts: DemoOptions) -> Result<(DemoReport, AnyWitness), DemoError> {
    let mut report = DemoReport::new(id, json!({"p": p, "q": q, "k": k}));
    let name = format!("Z{p}");
    let g = Arc::new(builtin(&name)?);
    let kind = NamedEquation::Power { a: 1, q, k };
    let sys = named_equation(&g, kind)?;
    let qk = q.pow(k);
    let found = solve_in_place(&sys, opts.all())?;
    report.step(
        format!("no solution in {name}"),
        found.is_empty(),
        json!({"group": name, "system": sys.to_string(), "solutions": found.solutions.len()}),
    );
    let w = witness_construction(&g, kind)?;
    let verified = w.verify(&sys).is_ok();
    let (lhs, rhs) = match &w {
        AnyWitness::Table(t) => sides(t, 1, qk),
        AnyWitness::Wreath(t) => sides(t, 1, qk),
    };
    report.step(
        format!("shift of {name} wr Z{qk} solves the equation, both sides trivial"),
        verified && lhs && rhs,
        json!({
            "overgroup_order": w.order(),
            "representation": if w.as_table().is_some() { "table" } else { "implicit" },
            "lhs_identity": lhs,
            "rhs_identity": rhs,
            "solution": w.solution_labels(),
        }),
    );
    Ok((report, w))
}

pub fn claim16(p: u64, q: u64, k: u32, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    Ok(power_report("claim16", p, q, k, opts)?.0)
}

pub fn claim18(p: u64, q: u64, k: u32, opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let (mut report, w) = power_report("claim18", p, q, k, opts)?;
    let qk = q.pow(k);
    let expected = u32::try_from(qk)
        .ok()
        .and_then(|e| (p as u128).checked_pow(e))
        .and_then(|b| b.checked_mul(qk as u128));
    report.step(
        "witness is finite of order p^(q^k) q^k",
        expected == Some(w.order() as u128),
        json!({"order": w.order(), "expected": expected.map(|e| e.to_string())}),
    );
    Ok(report)
}

type ClassTest = fn(&GroupTable) -> bool;

/// A quasi-identity, a group violating it and an overgroup joining both.
struct Separation<'a> {
    qi: &'a str,
    coeff: Arc<GroupTable>,
    g: usize,
    violator: Arc<GroupTable>,
    host: Arc<GroupTable>,
    embed_g: Homomorphism,
    embed_h: Homomorphism,
    /// Catalog groups where the system must be unsolvable; `None` means
    /// every group satisfying the quasi-identity.
    class: Option<(&'a str, ClassTest)>,
    max_order: usize,
    max_conjugators: Option<usize>,
    reduce: bool,
}

fn separation(report: &mut DemoReport, s: Separation<'_>, opts: DemoOptions) -> Result<(), DemoError> {
    let qi: QuasiIdentity = parse_qi(s.qi)?;
    let v = qi_holds_with(&s.violator, &qi, opts.max_space, opts.jobs)?;
    let ce = v.counterexample.clone().unwrap_or_default();
    report.step(
        format!("{} fails in {}", s.qi, s.violator.name()),
        !v.holds,
        json!({"group": s.violator.name(), "counterexample": ce.iter().map(|&x| s.violator.label(x)).collect::<Vec<_>>()}),
    );
    if v.holds {
        return Ok(());
    }
    let sep = build_separating_system(SeparationInput {
        qi: &qi,
        violator: &s.violator,
        witness_values: &ce,
        coeff: &s.coeff,
        g: s.g,
        host: &s.host,
        embed_g: &s.embed_g,
        embed_h: &s.embed_h,
    })?;
    let m = sep.conjugators.len();
    report.step(
        "separating system built",
        s.max_conjugators.is_none_or(|b| m <= b),
        json!({
            "system": sep.system.to_string(),
            "unknowns": sep.system.unknowns(),
            "conjugators": m,
            "witness": sep.to_file(s.host.name()).witness,
        }),
    );
    let found = solve(&sep.system, &s.host, &s.embed_g, opts.first())?;
    let witness_ok = is_solution(&sep.system, &s.embed_g, &sep.witness.solution)?;
    report.step(
        format!("system solvable in {}", s.host.name()),
        !found.is_empty() && witness_ok,
        json!({
            "group": s.host.name(),
            "first_solution": found.solutions.first().map(|t| t.iter().map(|&x| s.host.label(x)).collect::<Vec<_>>()),
        }),
    );
    let reduction = if s.reduce {
        Some(univariate_reduce(&sep.system, s.g)?)
    } else {
        None
    };
    let mut targets = Vec::new();
    for l in groups_up_to(s.max_order) {
        let in_class = match s.class {
            Some((_, f)) => f(l),
            None => qi_holds_with(l, &qi, opts.max_space, opts.jobs)?.holds,
        };
        if in_class {
            targets.push(l);
        }
    }
    if let Some((label, _)) = s.class {
        let mut failing = Vec::new();
        for l in &targets {
            if !qi_holds_with(l, &qi, opts.max_space, opts.jobs)?.holds {
                failing.push(l.name().to_string());
            }
        }
        report.step(
            format!("{} holds in every {label} catalog group", s.qi),
            failing.is_empty(),
            json!({"class": label, "groups": targets.len(), "failing": failing}),
        );
    }
    for l in targets {
        let embs = embeddings(&s.coeff, l)?;
        if embs.is_empty() {
            continue;
        }
        let mut solutions = 0;
        let mut reduced = 0;
        for emb in &embs {
            solutions += solve(&sep.system, l, emb, opts.all())?.solutions.len();
            if let Some(r) = &reduction {
                reduced += solve(&r.system, l, emb, opts.all())?.solutions.len();
            }
        }
        let mut data = json!({
            "group": l.name(),
            "embeddings": embs.len(),
            "space": (l.order() as u128).pow(sep.system.unknowns().len() as u32).to_string(),
            "solutions": solutions,
        });
        if reduction.is_some() {
            data["univariate_solutions"] = json!(reduced);
        }
        report.step(
            format!("no solution in {}", l.name()),
            solutions == 0 && reduced == 0,
            data,
        );
    }
    Ok(())
}

fn cyclic_into(n: usize, host: &Arc<GroupTable>, x: usize) -> Result<Homomorphism, DemoError> {
    let zn = Arc::new(builtin(&format!("Z{n}"))?);
    let map = (0..n).map(|k| host.pow(x, k as i64)).collect();
    Ok(Homomorphism::embedding(zn, host.clone(), map)?)
}

fn resolve(g: &GroupTable, label: &str) -> Result<usize, DemoError> {
    g.resolve(label)
        .ok_or_else(|| DemoError::BadParameter(format!("{label} is not an element of {}", g.name())))
}

pub fn claim1(opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let qi = "x^2=1 => x=1";
    let mut report = DemoReport::new(
        "claim1",
        json!({"qi": qi, "coefficients": "Z3", "violator": "Z2", "host": "S3", "max_order": 60}),
    );
    let s3 = Arc::new(builtin("S3")?);
    let embed_g = cyclic_into(3, &s3, resolve(&s3, "c123")?)?;
    let embed_h = cyclic_into(2, &s3, resolve(&s3, "c12")?)?;
    let s = Separation {
        qi,
        coeff: embed_g.source().clone(),
        g: 1,
        violator: embed_h.source().clone(),
        host: s3,
        embed_g,
        embed_h,
        class: Some(("odd-order", |g| g.order() % 2 == 1)),
        max_order: 60,
        max_conjugators: None,
        reduce: true,
    };
    separation(&mut report, s, opts)?;
    Ok(report)
}

pub fn claim14(opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let qi = "x*[x,y]^-1=1 => x=1";
    let mut report = DemoReport::new(
        "claim14",
        json!({"qi": qi, "coefficients": "Z7", "violator": "AGL1_7", "host": "AGL1_7", "max_order": 60}),
    );
    let agl = Arc::new(builtin("AGL1_7")?);
    let ce = qi_holds_with(&agl, &parse_qi(qi)?, opts.max_space, opts.jobs)?
        .counterexample
        .ok_or_else(|| DemoError::BadParameter("AGL1_7 satisfies the quasi-identity".into()))?;
    let embed_g = cyclic_into(7, &agl, ce[0])?;
    let s = Separation {
        qi,
        coeff: embed_g.source().clone(),
        g: 1,
        violator: agl.clone(),
        host: agl.clone(),
        embed_g,
        embed_h: Homomorphism::identity_on(agl),
        class: Some(("nilpotent", |g| structure_report(g).nilpotency_class.is_some())),
        max_order: 60,
        max_conjugators: None,
        reduce: false,
    };
    separation(&mut report, s, opts)?;
    Ok(report)
}

pub fn thm_simple(opts: DemoOptions) -> Result<DemoReport, DemoError> {
    let qi = "x^3=1 => x=1";
    let mut report = DemoReport::new(
        "thm-simple",
        json!({"qi": qi, "coefficients": "Z2", "violator": "Z3", "host": "A5", "max_order": 16}),
    );
    let a5 = Arc::new(builtin("A5")?);
    let embed_g = cyclic_into(2, &a5, resolve(&a5, "c12_34")?)?;
    let embed_h = cyclic_into(3, &a5, resolve(&a5, "c123")?)?;
    let s = Separation {
        qi,
        coeff: embed_g.source().clone(),
        g: 1,
        violator: embed_h.source().clone(),
        host: a5,
        embed_g,
        embed_h,
        class: None,
        max_order: 16,
        max_conjugators: Some(3),
        reduce: false,
    };
    separation(&mut report, s, opts)?;
    Ok(report)
}

/// For `G ≀ Zn` and each nontrivial power `h` of the shift: the normal
/// closure of `h` meets the first base factor exactly in the image of `G'`.
pub fn neumann_wreath() -> Result<DemoReport, DemoError> {
    let cases = [("S3", 2), ("Z4", 2), ("S3", 3)];
    let mut report = DemoReport::new(
        "neumann-wreath",
        json!({"cases": cases.iter().map(|(g, n)| format!("{g} wr Z{n}")).collect::<Vec<_>>()}),
    );
    for (name, n) in cases {
        let g = Arc::new(builtin(name)?);
        let w = wreath_cyclic(&g, n, None)?;
        let wg = &w.group;
        let first = w.embedding("first");
        let mut factor: Vec<usize> = first.images().to_vec();
        factor.sort_unstable();
        let mut derived: Vec<usize> = commutator_subgroup(&g).iter().map(|&x| *first.apply(x)).collect();
        derived.sort_unstable();
        let shift = wg.tag("shift").expect("wreath products tag the shift");
        for j in 1..n {
            let h = wg.pow(shift, j as i64);
            let nc = closure(wg, &[h], ClosureMode::Normal);
            let meet: Vec<usize> = nc.iter().copied().filter(|x| factor.binary_search(x).is_ok()).collect();
            report.step(
                format!("<<shift^{j}>> meets the first factor of {name} wr Z{n} in {name}'"),
                meet == derived,
                json!({
                    "group": name,
                    "n": n,
                    "power": j,
                    "closure_order": nc.len(),
                    "intersection_order": meet.len(),
                    "derived_order": derived.len(),
                }),
            );
        }
    }
    Ok(report)
}

pub fn diagonal(ns: &[usize]) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("diagonal", json!({"n": ns}));
    for &n in ns {
        let zn = Arc::new(builtin(&format!("Z{n}"))?);
        let w = wreath_cyclic(&zn, n, None)?;
        let derived = commutator_subgroup(&w.group);
        let diag = w.embedding("diagonal");
        let inside = diag.images().iter().all(|x| derived.binary_search(x).is_ok());
        report.step(
            format!("diagonal of Z{n} wr Z{n} lies in the derived subgroup"),
            inside,
            json!({"n": n, "order": w.group.order(), "derived_order": derived.len()}),
        );
    }
    Ok(report)
}

/// `(S3, Z6; Z3)` and `(D4, Z4; Z2)` with their obvious embeddings.
pub fn sample_amalgams() -> Result<Vec<(String, Amalgam)>, DemoError> {
    let s3 = Arc::new(builtin("S3")?);
    let r = resolve(&s3, "c123")?;
    let into_s3 = vec![s3.identity(), r, s3.mul(r, r)];
    let first = Amalgam::new(s3, Arc::new(builtin("Z6")?), Arc::new(builtin("Z3")?), into_s3, vec![0, 2, 4])?;
    let d4 = Arc::new(builtin("D4")?);
    let z = resolve(&d4, "z")?;
    let second = Amalgam::new(
        d4.clone(),
        Arc::new(builtin("Z4")?),
        Arc::new(builtin("Z2")?),
        vec![d4.identity(), z],
        vec![0, 2],
    )?;
    Ok(vec![("(S3,Z6;Z3)".into(), first), ("(D4,Z4;Z2)".into(), second)])
}

pub fn amalgam_decompose(seeds: u64, max_len: usize) -> Result<DemoReport, DemoError> {
    let mut report = DemoReport::new("amalgam-decompose", json!({"seeds": seeds, "max_len": max_len}));
    for (name, am) in sample_amalgams()? {
        let (mut failures, mut max_conj, mut longest) = (0, 0, 0);
        let mut outside = Vec::new();
        for side in [Side::A, Side::B] {
            let f = am.factor(side);
            for x in f.elements().filter(|&x| am.c_preimage(side, x).is_none()) {
                outside.push(TwoFactorWord::reduced(&am, [Letter(side, x)]));
            }
        }
        let mut probes = 0;
        let mut accepted = 0;
        for seed in 0..seeds {
            let w = random_kernel_word(&am, max_len, seed)?;
            longest = longest.max(w.len());
            let ok = match kernel_decompose(&w, &am) {
                Some(d) => {
                    max_conj = max_conj.max(d.conjugates.len());
                    d.conjugates.len() <= w.len() && d.product(&am) == w
                }
                None => false,
            };
            if !ok || !amalgam_normal_form(&w, &am).is_trivial(&am) {
                failures += 1;
            }
            let probe = w.mul(&am, &outside[seed as usize % outside.len()]);
            probes += 1;
            accepted += usize::from(kernel_decompose(&probe, &am).is_some());
        }
        for single in &outside {
            probes += 1;
            accepted += usize::from(kernel_decompose(single, &am).is_some());
        }
        report.step(
            format!("kernel words over {name} decompose exactly"),
            failures == 0,
            json!({"amalgam": name, "words": seeds, "longest": longest, "max_conjugates": max_conj, "failures": failures}),
        );
        report.step(
            format!("non-kernel probes over {name} are rejected"),
            accepted == 0,
            json!({"amalgam": name, "probes": probes, "accepted": accepted}),
        );
    }
    Ok(report)
}
