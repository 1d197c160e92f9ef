//! `geq`: command-line front end for geq-core.
//!
//! Exit codes: 0 success or property verified, 1 property refuted or no
//! solution, 2 bad input.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use geq_core::claims::{run_demo, DemoOptions, DemoParams, DEMOS};
use geq_core::equations::{parse_system, solve, univariate_reduce, SolveOptions, DEFAULT_MAX_SPACE};
use geq_core::group::{catalog, io::load_group, structure_report, GroupTable, Homomorphism};
use geq_core::quasi::{
    build_separating_system, parse_qi, parse_relator, qi_from_presentation, qi_holds_with,
    SeparationInput,
};
use geq_core::smallcanc::{
    check_metric, parse_fp_word, parse_lambda, reduction_relators, symmetrize, RelatorSet,
};

#[derive(Parser)]
#[command(name = "geq", version, about = "Equations over finite groups")]
struct Cli {
    /// Plain text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Limits {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Cap on the search space; defaults to GEQ_MAX_SPACE or 10^8.
    #[arg(long)]
    max_space: Option<u64>,
}

impl Limits {
    fn max_space(&self) -> Result<u64> {
        if let Some(m) = self.max_space {
            return Ok(m);
        }
        match std::env::var("GEQ_MAX_SPACE") {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| anyhow!("GEQ_MAX_SPACE: not a number: {v}")),
            Err(_) => Ok(DEFAULT_MAX_SPACE),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// The built-in group catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Exhaustive search for solutions of a system in a finite group.
    Solve {
        #[arg(long)]
        group: String,
        /// System text (contains '=') or a file holding it.
        #[arg(long)]
        system: String,
        /// JSON {"source": REF, "map": [...]} embedding the coefficient group.
        #[arg(long)]
        embed: Option<String>,
        /// Every solution instead of the first.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Quasi-identities.
    Qi {
        #[command(subcommand)]
        action: QiAction,
    },
    /// Builds a separating system from a violated quasi-identity.
    Separate {
        #[arg(long)]
        qi: String,
        #[arg(long)]
        violator: String,
        /// Comma-separated element names, or "auto" for the first counterexample.
        #[arg(long, default_value = "auto")]
        witness: String,
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        host: String,
        #[arg(long)]
        embed_g: String,
        #[arg(long)]
        embed_h: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Rewrites a system in one unknown.
    Reduce {
        #[arg(long)]
        system: String,
        /// Nontrivial coefficient `a` of the substitution.
        #[arg(long)]
        anchor: String,
        /// Coefficient group of the system.
        #[arg(long)]
        group: String,
    },
    /// Checks C'(lambda) for the reduction relators or given relators.
    Smallcancel {
        #[arg(long)]
        factor: String,
        /// Number of relators in the reduction family.
        #[arg(long, required_unless_present = "relator")]
        n: Option<usize>,
        #[arg(long, default_value = "1/6")]
        lambda: String,
        /// The element `a` (default: tag `a`, else the first nontrivial element).
        #[arg(long)]
        anchor: Option<String>,
        /// Comma-separated values of the unknowns (default: identities).
        #[arg(long)]
        xbar: Option<String>,
        /// Explicit relator over the factor and `t`; repeatable.
        #[arg(long)]
        relator: Vec<String>,
    },
    /// Reproduces a claim; `--list` shows the available ids.
    Demo {
        #[arg(required_unless_present = "list")]
        id: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        max_order: Option<usize>,
        #[arg(long)]
        max_n: Option<u64>,
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        max_len: Option<usize>,
        #[command(flatten)]
        limits: Limits,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
}

#[derive(Subcommand)]
enum QiAction {
    /// Decides whether a quasi-identity holds in a finite group.
    Check {
        #[arg(long)]
        group: String,
        #[arg(long)]
        qi: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// `(relators = 1) => target = 1`.
    FromPresentation {
        #[arg(long, required = true)]
        rel: Vec<String>,
        #[arg(long)]
        target: String,
        /// Generator names (default: variables in order of appearance).
        #[arg(long, value_delimiter = ',')]
        gens: Vec<String>,
    },
}

/// What to print and how to exit.
struct Outcome {
    json: Value,
    text: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let as_text = cli.text;
    match run(cli.command) {
        Ok(out) => {
            if as_text {
                print!("{}", out.text);
            } else {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values print"));
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn group(reference: &str) -> Result<Arc<GroupTable>> {
    let r = if reference.starts_with("builtin:") || Path::new(reference).exists() {
        reference.to_string()
    } else if geq_core::group::builtin(reference).is_ok() {
        format!("builtin:{reference}")
    } else {
        reference.to_string()
    };
    Ok(Arc::new(load_group(&r).with_context(|| format!("group {reference}"))?))
}

/// Inline DSL text when it contains `=` (or `=>`), otherwise a file.
fn text_or_file(arg: &str, flag: &str) -> Result<String> {
    if arg.contains('=') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg).with_context(|| format!("--{flag}: cannot read {arg}"))
}

fn element(g: &GroupTable, name: &str, flag: &str) -> Result<usize> {
    let name = name.trim().trim_start_matches('@');
    if let Some(e) = g.resolve(name) {
        return Ok(e);
    }
    match name.parse::<usize>() {
        Ok(i) if i < g.order() => Ok(i),
        _ => bail!("--{flag}: {name} is not an element of {}", g.name()),
    }
}

/// Either `[..]`, `{"map": [..], "source": REF}` inline, or a file with the same.
fn embedding_spec(arg: &str, flag: &str) -> Result<(Option<String>, Vec<usize>)> {
    let text = if arg.trim_start().starts_with(['[', '{']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("--{flag}: cannot read {arg}"))?
    };
    let v: Value = serde_json::from_str(&text).with_context(|| format!("--{flag}: invalid JSON"))?;
    let (source, map) = match v {
        Value::Array(_) => (None, v),
        Value::Object(mut o) => {
            let source = match o.remove("source") {
                Some(Value::String(s)) => Some(s),
                None => None,
                Some(_) => bail!("--{flag}: \"source\" must be a group reference"),
            };
            (source, o.remove("map").ok_or_else(|| anyhow!("--{flag}: missing \"map\""))?)
        }
        _ => bail!("--{flag}: expected a list or an object"),
    };
    let map: Vec<usize> = serde_json::from_value(map).with_context(|| format!("--{flag}: bad map"))?;
    Ok((source, map))
}

fn embedding_into(source: &Arc<GroupTable>, target: &Arc<GroupTable>, map: Vec<usize>, flag: &str) -> Result<Homomorphism> {
    Homomorphism::embedding(source.clone(), target.clone(), map).with_context(|| format!("--{flag}"))
}

fn labels(g: &GroupTable, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&x| g.label(x)).collect()
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Catalog { action: CatalogAction::List } => {
            let rows: Vec<Value> = catalog()
                .iter()
                .map(|g| {
                    let s = structure_report(g);
                    json!({
                        "name": g.name(),
                        "order": g.order(),
                        "abelian": s.is_abelian,
                        "nilpotency_class": s.nilpotency_class,
                        "derived_length": s.derived_length,
                    })
                })
                .collect();
            let text = catalog().iter().map(|g| format!("{}\t{}\n", g.name(), g.order())).collect();
            Ok(Outcome {
                json: Value::Array(rows),
                text,
                ok: true,
            })
        }
        Command::Solve {
            group: k_ref,
            system,
            embed,
            all,
            limits,
        } => {
            let k = group(&k_ref)?;
            let text = text_or_file(&system, "system")?;
            let (coeff, emb) = match embed {
                None => (k.clone(), Homomorphism::identity_on(k.clone())),
                Some(arg) => {
                    let (source, map) = embedding_spec(&arg, "embed")?;
                    let source = source.ok_or_else(|| anyhow!("--embed: missing \"source\""))?;
                    let g = group(&source)?;
                    let emb = embedding_into(&g, &k, map, "embed")?;
                    (g, emb)
                }
            };
            let sys = parse_system(&text, &coeff).context("--system")?;
            let opts = if all { SolveOptions::all() } else { SolveOptions::first() };
            let opts = opts.jobs(limits.jobs).max_space(limits.max_space()?);
            let report = solve(&sys, &k, &emb, opts)?;
            let sols: Vec<Vec<String>> = report.solutions.iter().map(|s| labels(&k, s)).collect();
            let mut text = format!("{} solution(s) in {}\n", sols.len(), k.name());
            for s in &sols {
                let pairs: Vec<String> = sys.unknowns().iter().zip(s).map(|(u, v)| format!("{u}={v}")).collect();
                text.push_str(&format!("  {}\n", pairs.join(" ")));
            }
            Ok(Outcome {
                json: json!({
                    "group": k.name(),
                    "system": sys.to_string(),
                    "unknowns": sys.unknowns(),
                    "solutions": sols,
                    "count": report.solutions.len(),
                    "exhaustive": report.exhaustive,
                    "space": report.space,
                }),
                text,
                ok: !report.is_empty(),
            })
        }
        Command::Qi {
            action: QiAction::Check { group: g_ref, qi, limits },
        } => {
            let g = group(&g_ref)?;
            let qi = parse_qi(&text_or_file(&qi, "qi")?).context("--qi")?;
            let v = qi_holds_with(&g, &qi, limits.max_space()?, limits.jobs)?;
            let ce = v.counterexample.as_ref().map(|c| {
                qi.variables()
                    .iter()
                    .zip(labels(&g, c))
                    .map(|(k, v)| (k.clone(), v))
                    .collect::<BTreeMap<_, _>>()
            });
            let text = match &ce {
                None => format!("holds in {}\n", g.name()),
                Some(c) => format!("fails in {}: {c:?}\n", g.name()),
            };
            Ok(Outcome {
                json: json!({"group": g.name(), "qi": qi.to_string(), "holds": v.holds, "counterexample": ce}),
                text,
                ok: v.holds,
            })
        }
        Command::Qi {
            action: QiAction::FromPresentation { rel, target, gens },
        } => {
            let relators = rel
                .iter()
                .map(|r| parse_relator(r).with_context(|| format!("--rel {r}")))
                .collect::<Result<Vec<_>>>()?;
            let target = parse_relator(&target).context("--target")?;
            let gens = if gens.is_empty() {
                let mut seen: Vec<String> = Vec::new();
                for w in relators.iter().chain(std::iter::once(&target)) {
                    for v in w.unknowns() {
                        if !seen.contains(&v) {
                            seen.push(v);
                        }
                    }
                }
                seen
            } else {
                gens
            };
            let qi = qi_from_presentation(&gens, &relators, &target)?;
            Ok(Outcome {
                json: json!({"generators": gens, "qi": qi.to_string()}),
                text: format!("{qi}\n"),
                ok: true,
            })
        }
        Command::Separate {
            qi,
            violator,
            witness,
            coeff,
            g,
            host,
            embed_g,
            embed_h,
            limits,
        } => {
            let qi = parse_qi(&text_or_file(&qi, "qi")?).context("--qi")?;
            let (h, c, k) = (group(&violator)?, group(&coeff)?, group(&host)?);
            let values = if witness == "auto" {
                qi_holds_with(&h, &qi, limits.max_space()?, limits.jobs)?
                    .counterexample
                    .ok_or_else(|| anyhow!("--violator: {} satisfies the quasi-identity", h.name()))?
            } else {
                witness
                    .split(',')
                    .map(|w| element(&h, w, "witness"))
                    .collect::<Result<Vec<_>>>()?
            };
            let g_elem = element(&c, &g, "g")?;
            let eg = embedding_into(&c, &k, embedding_spec(&embed_g, "embed-g")?.1, "embed-g")?;
            let eh = embedding_into(&h, &k, embedding_spec(&embed_h, "embed-h")?.1, "embed-h")?;
            let sep = build_separating_system(SeparationInput {
                qi: &qi,
                violator: &h,
                witness_values: &values,
                coeff: &c,
                g: g_elem,
                host: &k,
                embed_g: &eg,
                embed_h: &eh,
            })?;
            let file = sep.to_file(&host);
            Ok(Outcome {
                text: format!("{}\nunknowns: {}\n", file.system, file.unknowns.join(" ")),
                json: serde_json::to_value(&file)?,
                ok: true,
            })
        }
        Command::Reduce { system, anchor, group: g_ref } => {
            let g = group(&g_ref)?;
            let sys = parse_system(&text_or_file(&system, "system")?, &g).context("--system")?;
            let a = element(&g, &anchor, "anchor")?;
            let r = univariate_reduce(&sys, a)?;
            let subst: BTreeMap<String, String> =
                r.substitution.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
            Ok(Outcome {
                text: format!("{}\n", r.system),
                json: json!({"parameter": r.parameter, "system": r.system.to_string(), "substitution": subst}),
                ok: true,
            })
        }
        Command::Smallcancel {
            factor,
            n,
            lambda,
            anchor,
            xbar,
            relator,
        } => {
            let q = group(&factor)?;
            let lambda = parse_lambda(&lambda).context("--lambda")?;
            let set = if relator.is_empty() {
                let n = n.unwrap_or(1);
                let a = match &anchor {
                    Some(a) => element(&q, a, "anchor")?,
                    None => q
                        .tag("a")
                        .or_else(|| q.elements().find(|&x| x != q.identity()))
                        .ok_or_else(|| anyhow!("--factor: the trivial group has no anchor"))?,
                };
                let xs = match &xbar {
                    Some(list) => list.split(',').map(|x| element(&q, x, "xbar")).collect::<Result<Vec<_>>>()?,
                    None => vec![q.identity(); n],
                };
                if xs.len() != n {
                    bail!("--xbar: {} values for n = {n}", xs.len());
                }
                reduction_relators(&q, a, &xs)?
            } else {
                let words = relator
                    .iter()
                    .map(|r| parse_fp_word(r, &q).with_context(|| format!("--relator {r}")))
                    .collect::<Result<Vec<_>>>()?;
                RelatorSet::new(q.clone(), words)
            };
            let report = check_metric(&symmetrize(&set)?, lambda)?;
            Ok(Outcome {
                text: format!(
                    "{}: max piece {} vs min length {} at lambda {}\n",
                    if report.pass { "pass" } else { "fail" },
                    report.max_piece_syllables,
                    report.min_relator_syllables,
                    report.lambda_bound
                ),
                ok: report.pass,
                json: serde_json::to_value(&report)?,
            })
        }
        Command::Demo { list: true, .. } => {
            let rows: Vec<Value> = DEMOS
                .iter()
                .map(|d| json!({"id": d.id, "claim": d.claim, "summary": d.summary}))
                .collect();
            let text = DEMOS.iter().map(|d| format!("{:<18} {:<32} {}\n", d.id, d.claim, d.summary)).collect();
            Ok(Outcome {
                json: Value::Array(rows),
                text,
                ok: true,
            })
        }
        Command::Demo {
            id,
            p,
            q,
            k,
            max_order,
            max_n,
            seeds,
            max_len,
            limits,
            ..
        } => {
            let id = id.expect("clap requires an id without --list");
            let params = DemoParams {
                p,
                q,
                k,
                max_order,
                max_n,
                seeds,
                max_len,
            };
            let opts = DemoOptions {
                jobs: limits.jobs,
                max_space: limits.max_space()?,
            };
            let report = run_demo(&id, &params, opts)?;
            Ok(Outcome {
                text: report.to_text(),
                ok: report.overall,
                json: serde_json::to_value(&report)?,
            })
        }
    }
}
