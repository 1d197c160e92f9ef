//! Acceptance suite. Each criterion runs under its time limit and prints one
//! PASS/FAIL line to the real stdout, so the lines survive output capture.
//! Library results are checked against naive recomputations written here.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use geq_core::amalgam::{amalgam_normal_form, kernel_decompose, random_kernel_word, Amalgam, Letter, Side, TwoFactorWord};
use geq_core::claims::{claim15, star_property, DemoOptions};
use geq_core::equations::{
    is_solution, named_equation, parse_system, solve, solve_in_place, unsolvable_word, witness_construction,
    AnyWitness, EquationSystem, NamedEquation, SolveOptions,
};
use geq_core::group::{
    builtin, catalog, central_product, closure, cyclic_embeddings, embeddings, validate_group, wreath_cyclic,
    ClosureMode, FiniteGroup, GroupTable, Homomorphism, Sign, CATALOG,
};
use geq_core::quasi::{build_separating_system, parse_qi, qi_holds, qi_holds_with, SeparationInput, SHIPPED_QIS};
use geq_core::smallcanc::{
    check_metric, parse_fp_word, reduction_relators, symmetrize, FreeProductWord, RelatorSet, Syllable,
};
use geq_core::words::{evaluate, reduce, substitute, Assignment, Token, Word};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn criterion(id: u32, title: &str, limit_secs: u64, body: impl FnOnce() -> String) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (pass, detail) = match &outcome {
        Ok(d) if elapsed <= limit => (true, d.clone()),
        Ok(d) => (false, format!("{d}; over the time limit")),
        Err(p) => (
            false,
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()),
        ),
    };
    let line = format!(
        "criterion {id:>2} {}: {title} [{:.2}s / {limit_secs}s] {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    writeln!(std::io::stdout().lock(), "{line}").unwrap();
    assert!(pass, "{line}");
}

fn grp(name: &str) -> Arc<GroupTable> {
    Arc::new(builtin(name).unwrap())
}

/// Identity, inverses and every associativity triple, straight from the table.
fn naive_axioms(g: &GroupTable) -> bool {
    let n = g.order();
    let e = g.identity();
    let identity = (0..n).all(|x| g.mul(e, x) == x && g.mul(x, e) == x);
    let inverses = (0..n).all(|x| (0..n).any(|y| g.mul(x, y) == e && g.mul(y, x) == e));
    let assoc = (0..n).all(|a| (0..n).all(|b| {
        let ab = g.mul(a, b);
        (0..n).all(|c| g.mul(ab, c) == g.mul(a, g.mul(b, c)))
    }));
    identity && inverses && assoc
}

/// Subgroup generated by `gens`, by saturating under products.
fn naive_subgroup(g: &GroupTable, gens: &[usize]) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = BTreeSet::from([g.identity()]);
    let gens: BTreeSet<usize> = gens.iter().copied().collect();
    let mut frontier: Vec<usize> = vec![g.identity()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            for &s in &gens {
                let y = g.mul(x, s);
                if set.insert(y) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    set
}

fn naive_derived(g: &GroupTable) -> BTreeSet<usize> {
    let mut comms = BTreeSet::new();
    for a in g.elements() {
        for b in g.elements() {
            comms.insert(g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b)));
        }
    }
    naive_subgroup(g, &comms.into_iter().collect::<Vec<_>>())
}

/// Left fold of a word's tokens with coefficients sent through `embed`.
fn naive_eval(k: &GroupTable, embed: &[usize], tokens: &[Token], vars: &[String], vals: &[usize]) -> usize {
    tokens.iter().fold(k.identity(), |acc, t| {
        let x = match t {
            Token::Coeff(c) => embed[*c],
            Token::Letter { var, inverse } => {
                let v = vals[vars.iter().position(|u| u == var).unwrap()];
                if *inverse {
                    k.inv(v)
                } else {
                    v
                }
            }
        };
        k.mul(acc, x)
    })
}

/// Brute-force solution count with the naive evaluator.
fn naive_count(sys: &EquationSystem, k: &GroupTable, embed: &[usize]) -> usize {
    let n = sys.unknowns().len();
    let mut vals = vec![0usize; n];
    let mut count = 0;
    loop {
        if sys
            .equations()
            .iter()
            .all(|w| naive_eval(k, embed, w.tokens(), sys.unknowns(), &vals) == k.identity())
        {
            count += 1;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < k.order() {
                break;
            }
            vals[i] = 0;
        }
    }
}

#[test]
fn criterion_01_group_axioms() {
    criterion(1, "group axioms", 30, || {
        let mut names: Vec<String> = CATALOG.iter().map(|s| s.to_string()).collect();
        names.extend(["D8", "H5", "AGL1_11", "A3", "S2", "Z16", "Q8xZ3"].map(String::from));
        let mut exhaustive = 0;
        for name in &names {
            let g = builtin(name).unwrap();
            let again = validate_group(g.to_raw()).unwrap();
            assert_eq!(again, g, "{name}");
            if g.order() <= 400 {
                assert!(naive_axioms(&g), "{name}");
                exhaustive += 1;
            }
        }

        let z3 = grp("Z3");
        let w = wreath_cyclic(&z3, 4, None).unwrap();
        assert_eq!(w.group.order(), 3usize.pow(4) * 4);
        let shift = w.group.tag("shift").unwrap();
        assert_eq!(w.group.element_order(shift), 4);
        assert!(naive_axioms(&w.group));

        let h2 = grp("H2");
        let cp = central_product(&h2, &grp("Z2"), h2.tag("c").unwrap(), 1).unwrap();
        assert_eq!(cp.group.order(), 8);
        assert!(!cp.group.is_abelian());
        assert!(naive_axioms(&cp.group));

        // S3 wr Z3: base is the normal closure of the first factor, of index 3
        let s3 = grp("S3");
        let w = wreath_cyclic(&s3, 3, None).unwrap();
        let wg = &w.group;
        assert_eq!(wg.order(), 648);
        validate_group(wg.to_raw()).unwrap();
        let first = w.embedding("first").images().to_vec();
        let base = closure(wg, &first, ClosureMode::Normal);
        assert_eq!(base.len(), 216);
        let shift = wg.tag("shift").unwrap();
        assert_eq!(wg.element_order(shift), 3);
        assert!(base.binary_search(&shift).is_err());
        for &x in &first {
            for &y in &first {
                // distinct coordinates commute
                assert_eq!(wg.commutator(x, wg.conj(y, shift)), wg.identity());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200_000 {
            let (a, b, c) = (rng.gen_range(0..648), rng.gen_range(0..648), rng.gen_range(0..648));
            assert_eq!(wg.mul(wg.mul(a, b), c), wg.mul(a, wg.mul(b, c)));
        }

        let mut bad = grp("Z4").to_raw();
        bad.table[1].swap(0, 1);
        bad.table[0].swap(1, 2);
        assert!(validate_group(bad).is_err());
        format!("{} builtins, {exhaustive} exhaustive", names.len())
    });
}

fn sweep(pick: impl Fn(u64) -> bool, naive: impl Fn(&GroupTable, usize, usize) -> bool) -> (usize, usize, usize) {
    let (mut cases, mut lib, mut oracle) = (0, 0, 0);
    for g in catalog().iter().filter(|g| g.order() <= 60) {
        for a in g.elements().filter(|&a| pick(g.element_order(a))) {
            cases += 1;
            let sys = EquationSystem::new(g.clone(), vec![unsolvable_word(g, a).unwrap()]).unwrap();
            lib += solve_in_place(&sys, SolveOptions::all()).unwrap().solutions.len();
            oracle += g.elements().filter(|&x| naive(g, a, x)).count();
        }
    }
    (cases, lib, oracle)
}

#[test]
fn criterion_02_baumslag_sweep() {
    criterion(2, "Baumslag sweep", 10, || {
        let (cases, lib, oracle) = sweep(|o| o > 2, |g, a, x| g.conj(a, g.conj(a, x)) == g.mul(a, a));
        assert!(cases > 100);
        assert_eq!((lib, oracle), (0, 0));
        format!("{cases} elements, 0 solutions")
    });
}

#[test]
fn criterion_03_lyndon_sweep() {
    criterion(3, "Lyndon sweep", 10, || {
        let (cases, lib, oracle) = sweep(
            |o| o == 2,
            |g, a, x| g.conj(a, g.mul(x, x)) == g.commutator(a, g.conj(a, x)),
        );
        assert!(cases > 50);
        assert_eq!((lib, oracle), (0, 0));
        format!("{cases} involutions, 0 solutions")
    });
}

/// `((a x)^{qk}, x^{qk})` with `x` the shift of `Z_p wr Z_{qk}` and `a` on the
/// first `p` coordinates, in a wreath multiplication written out here.
fn oracle_power_sides(p: usize, qk: usize) -> (bool, bool) {
    type El = (Vec<usize>, usize);
    let mul = |(f, s): &El, (g, t): &El| -> El {
        let h = (0..qk).map(|i| (f[i] + g[(i + qk - s) % qk]) % p).collect();
        (h, (s + t) % qk)
    };
    let id: El = (vec![0; qk], 0);
    let x: El = (vec![0; qk], 1);
    let a: El = ((0..qk).map(|i| usize::from(i < p)).collect(), 0);
    let ax = mul(&a, &x);
    let pow = |e: &El| (0..qk).fold(id.clone(), |acc, _| mul(&acc, e));
    (pow(&ax) == id, pow(&x) == id)
}

#[test]
fn criterion_04_power_equations() {
    criterion(4, "power equations and their wreath witnesses", 60, || {
        let mut orders = Vec::new();
        for (p, q, k) in [(3u64, 2u64, 2u32), (5, 2, 3), (3, 5, 1)] {
            let g = grp(&format!("Z{p}"));
            let kind = NamedEquation::Power { a: 1, q, k };
            let sys = named_equation(&g, kind).unwrap();
            let qk = q.pow(k);
            assert!(solve_in_place(&sys, SolveOptions::all()).unwrap().is_empty());
            let naive = g
                .elements()
                .filter(|&x| g.pow(g.mul(1, x), qk as i64) == g.pow(x, qk as i64))
                .count();
            assert_eq!(naive, 0);

            let w = witness_construction(&g, kind).unwrap();
            w.verify(&sys).unwrap();
            let both = match &w {
                AnyWitness::Table(t) => {
                    let x = t.solution[0];
                    let ax = t.overgroup.mul(*t.embedding.apply(1), x);
                    (t.overgroup.pow(ax, qk as i64), t.overgroup.pow(x, qk as i64))
                        == (t.overgroup.identity(), t.overgroup.identity())
                }
                AnyWitness::Wreath(t) => {
                    let grp = &*t.overgroup;
                    let x = &t.solution[0];
                    let ax = FiniteGroup::mul(grp, t.embedding.apply(1), x);
                    (FiniteGroup::pow(grp, &ax, qk as i64), FiniteGroup::pow(grp, x, qk as i64))
                        == (FiniteGroup::identity(grp), FiniteGroup::identity(grp))
                }
            };
            assert!(both, "({p},{q},{k})");
            assert_eq!(oracle_power_sides(p as usize, qk as usize), (true, true));
            let expected = p.pow(qk as u32) * qk;
            assert_eq!(w.order(), expected, "({p},{q},{k})");
            orders.push(expected);
        }
        format!("witness orders {orders:?}")
    });
}

#[test]
fn criterion_05_commutator_equation() {
    criterion(5, "[x,y]=g over abelian groups", 10, || {
        let abelian: Vec<&Arc<GroupTable>> = catalog().iter().filter(|g| g.is_abelian()).collect();
        for l in &abelian {
            // the oracle: every commutator is trivial
            assert!(l.elements().all(|x| l.elements().all(|y| l.commutator(x, y) == l.identity())));
        }
        let mut solved = 0;
        let mut witnesses = 0;
        for g in &abelian {
            for e in g.elements().filter(|&e| e != g.identity() && g.element_order(e) <= 6) {
                let kind = NamedEquation::Commutator { g: e };
                let sys = named_equation(g, kind).unwrap();
                for l in &abelian {
                    for emb in embeddings(g, l).unwrap() {
                        let r = solve(&sys, l, &emb, SolveOptions::all()).unwrap();
                        assert!(r.is_empty(), "{} in {}", g.name(), l.name());
                        solved += 1;
                    }
                }
                let AnyWitness::Table(w) = witness_construction(g, kind).unwrap() else {
                    panic!("central products are tables");
                };
                let n = g.element_order(e) as usize;
                assert_eq!(w.overgroup.order(), n * n * g.order());
                assert_eq!(w.overgroup.commutator(w.solution[0], w.solution[1]), *w.embedding.apply(e));
                assert!(is_solution(&sys, &w.embedding, &w.solution).unwrap());
                witnesses += 1;
            }
        }
        assert!(claim15(6, DemoOptions::default()).unwrap().overall);
        format!("{solved} (element, overgroup embedding) pairs, {witnesses} witnesses")
    });
}

#[test]
fn criterion_06_simple_class_pipeline() {
    criterion(6, "separating system for x^3=1 => x=1 in A5", 60, || {
        let qi = parse_qi("x^3=1 => x=1").unwrap();
        let (z2, z3, a5) = (grp("Z2"), grp("Z3"), grp("A5"));
        let g_img = a5.resolve("c12_34").unwrap();
        let h_img = a5.resolve("c123").unwrap();
        let embed_g = Homomorphism::embedding(z2.clone(), a5.clone(), vec![0, g_img]).unwrap();
        let embed_h =
            Homomorphism::embedding(z3.clone(), a5.clone(), vec![0, h_img, a5.mul(h_img, h_img)]).unwrap();
        let sep = build_separating_system(SeparationInput {
            qi: &qi,
            violator: &z3,
            witness_values: &[1],
            coeff: &z2,
            g: 1,
            host: &a5,
            embed_g: &embed_g,
            embed_h: &embed_h,
        })
        .unwrap();
        let m = sep.conjugators.len();
        assert!(m <= 3);
        let found = solve(&sep.system, &a5, &embed_g, SolveOptions::first()).unwrap();
        let sol = found.solutions.first().expect("solvable in A5");
        assert_eq!(naive_count_at(&sep.system, &a5, embed_g.images(), sol), 1);

        let mut checked = Vec::new();
        for l in catalog().iter().filter(|l| l.order() <= 16) {
            let no_order_3 = l.elements().all(|x| l.element_order(x) != 3);
            assert_eq!(qi_holds(l, &qi).unwrap().holds, no_order_3, "{}", l.name());
            if !no_order_3 {
                continue;
            }
            let embs = cyclic_embeddings(2, l).unwrap();
            assert_eq!(embs.len(), l.elements().filter(|&x| l.element_order(x) == 2).count());
            for emb in embs {
                let emb = Homomorphism::new(z2.clone(), l.clone(), emb.images().to_vec()).unwrap();
                let r = solve(&sep.system, l, &emb, SolveOptions::all()).unwrap();
                assert!(r.space <= 16u64.pow(1 + m as u32));
                assert!(r.is_empty(), "{}", l.name());
                assert_eq!(naive_count(&sep.system, l, emb.images()), 0);
            }
            checked.push(l.name().to_string());
        }
        assert!(checked.len() >= 10);
        format!("{m} conjugators, unsolvable in {} groups", checked.len())
    });
}

/// 1 when `vals` solves `sys` under the naive evaluator.
fn naive_count_at(sys: &EquationSystem, k: &GroupTable, embed: &[usize], vals: &[usize]) -> usize {
    usize::from(
        sys.equations()
            .iter()
            .all(|w| naive_eval(k, embed, w.tokens(), sys.unknowns(), vals) == k.identity()),
    )
}

#[test]
fn criterion_07_star_property() {
    criterion(7, "star property", 30, || {
        let (mut solutions, mut violations, mut embeddings) = (0, 0, 0);
        for k in catalog().iter().filter(|k| k.order() <= 60) {
            for a in k.elements().filter(|&a| k.element_order(a) == 3) {
                embeddings += 1;
                let a2 = k.mul(a, a);
                for x in k.elements() {
                    let w = k.mul(k.conj(a, k.conj(a, x)), k.inv(a2));
                    let ww = k.mul(w, w);
                    for y in k.elements() {
                        if k.conj(w, k.conj(w, y)) == ww {
                            solutions += 1;
                            violations += usize::from(w != k.identity());
                        }
                    }
                }
            }
        }
        assert_eq!(violations, 0);
        let r = star_property(60, DemoOptions::default()).unwrap();
        assert!(r.overall);
        let last = &r.steps.last().unwrap().data;
        assert_eq!(last["violations"], 0);
        assert_eq!(last["solutions"], solutions);
        format!("{embeddings} embeddings, {solutions} solutions, 0 violations")
    });
}

/// Inverse and every rotation of each relator, weakly cyclically reduced.
fn naive_symmetric_closure(rs: &RelatorSet) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for r in rs.relators() {
        let r = r.weak_cyclic_reduce();
        for m in [r.clone(), r.inverse()] {
            for k in 0..m.len() {
                out.insert(m.rotate(k).weak_cyclic_reduce().to_string());
            }
        }
    }
    out
}

fn common_prefix(a: &[Syllable], b: &[Syllable]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Longest exact overlap between distinct members, or between a member and
/// a proper shift of itself that reproduces it.
fn naive_max_overlap(members: &[FreeProductWord]) -> usize {
    let mut best = 0;
    for (i, u) in members.iter().enumerate() {
        for (j, v) in members.iter().enumerate() {
            if i != j {
                best = best.max(common_prefix(u.syllables(), v.syllables()));
            }
        }
        for k in 1..u.len() {
            if &u.rotate(k) == u {
                best = best.max(common_prefix(u.syllables(), &u.syllables()[k..]));
            }
        }
    }
    best
}

#[test]
fn criterion_08_small_cancellation() {
    criterion(8, "C'(1/6) for the reduction relators", 5, || {
        let sixth = Ratio::new(1, 6);
        let mut worst = 0;
        for q in ["Z2", "S3"] {
            let q = grp(q);
            let a = q.elements().find(|&x| x != q.identity()).unwrap();
            for n in 1..=3 {
                let raw = reduction_relators(&q, a, &vec![q.identity(); n]).unwrap();
                let sym = symmetrize(&raw).unwrap();
                let names: BTreeSet<String> = sym.relators().iter().map(|m| m.to_string()).collect();
                assert_eq!(names, naive_symmetric_closure(&raw));
                let rep = check_metric(&sym, sixth).unwrap();
                let exact = naive_max_overlap(sym.relators());
                assert!(rep.pass, "{} n={n}: {rep:?}", q.name());
                assert!(exact <= rep.max_piece_syllables && rep.max_piece_syllables <= 3);
                assert!(rep.min_relator_syllables >= 40);
                assert!(6 * rep.max_piece_syllables < rep.min_relator_syllables);
                worst = worst.max(rep.max_piece_syllables);
            }
        }
        let z2 = grp("Z2");
        let r = parse_fp_word("(@a t)^6", &z2).unwrap();
        let sym = symmetrize(&RelatorSet::new(z2, vec![r])).unwrap();
        let rep = check_metric(&sym, sixth).unwrap();
        assert_eq!(naive_max_overlap(sym.relators()), 10);
        assert!(!rep.pass && rep.max_piece_syllables >= 10);
        format!("max piece {worst} vs length >= 40; (@a t)^6 piece {}", rep.max_piece_syllables)
    });
}

#[test]
fn criterion_09_wreath_facts() {
    criterion(9, "normal closures in wreath products", 60, || {
        let mut cases = 0;
        for (name, n) in [("S3", 2), ("Z4", 2), ("S3", 3)] {
            let g = grp(name);
            let w = wreath_cyclic(&g, n, None).unwrap();
            let wg = &w.group;
            let first = w.embedding("first");
            let factor: BTreeSet<usize> = first.images().iter().copied().collect();
            let derived: BTreeSet<usize> = naive_derived(&g).iter().map(|&x| *first.apply(x)).collect();
            let shift = wg.tag("shift").unwrap();
            for j in 1..n {
                let h = wg.pow(shift, j as i64);
                let conjugates: Vec<usize> = wg.elements().map(|y| wg.conj(h, y)).collect();
                let nc = naive_subgroup(wg, &conjugates);
                assert_eq!(nc.iter().copied().collect::<Vec<_>>(), closure(wg, &[h], ClosureMode::Normal));
                let meet: BTreeSet<usize> = nc.intersection(&factor).copied().collect();
                assert_eq!(meet, derived, "{name} wr Z{n}, shift^{j}");
                cases += 1;
            }
        }
        for n in [2, 3, 4] {
            let zn = grp(&format!("Z{n}"));
            let w = wreath_cyclic(&zn, n, None).unwrap();
            let d = naive_derived(&w.group);
            assert!(w.embedding("diagonal").images().iter().all(|x| d.contains(x)), "n={n}");
        }
        format!("{cases} top elements, diagonals for n = 2, 3, 4")
    });
}

fn s3_z6() -> Amalgam {
    let s3 = grp("S3");
    let r = s3.resolve("c123").unwrap();
    let into_a = vec![s3.identity(), r, s3.mul(r, r)];
    Amalgam::new(s3, grp("Z6"), grp("Z3"), into_a, vec![0, 2, 4]).unwrap()
}

fn d4_z4() -> Amalgam {
    let d4 = grp("D4");
    let z = d4.tag("z").unwrap();
    Amalgam::new(d4.clone(), grp("Z4"), grp("Z2"), vec![d4.identity(), z], vec![0, 2]).unwrap()
}

/// Free-product reduction of a letter list.
fn fp_reduce(am: &Amalgam, letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for Letter(side, x) in letters {
        let g = am.factor(side);
        let merged = match out.last() {
            Some(&Letter(s, y)) if s == side => {
                out.pop();
                g.mul(y, x)
            }
            _ => x,
        };
        if merged != g.identity() {
            out.push(Letter(side, merged));
        }
    }
    out
}

fn inverse_letters(am: &Amalgam, w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&Letter(s, x)| Letter(s, am.factor(s).inv(x))).collect()
}

/// Triviality in the amalgamated product via left cosets, independent of the
/// library's right-to-left normal form.
fn left_trivial(am: &Amalgam, letters: &[Letter]) -> bool {
    let c_grp = am.amalgamated();
    let mut tail = c_grp.identity();
    let mut reps: Vec<Letter> = Vec::new();
    for &Letter(side, d) in letters {
        let g = am.factor(side);
        let mut y = g.mul(am.image(side, tail), d);
        if let Some(&Letter(s, r)) = reps.last() {
            if s == side {
                reps.pop();
                y = g.mul(r, y);
            }
        }
        let r = if am.c_preimage(side, y).is_some() {
            g.identity()
        } else {
            c_grp.elements().map(|c| g.mul(y, am.image(side, c))).min().unwrap()
        };
        tail = am.c_preimage(side, g.mul(g.inv(r), y)).unwrap();
        if r != g.identity() {
            reps.push(Letter(side, r));
        }
    }
    reps.is_empty() && tail == c_grp.identity()
}

#[test]
fn criterion_10_amalgam_decomposition() {
    criterion(10, "kernel decomposition in amalgams", 10, || {
        let mut words = 0;
        let mut probes = 0;
        for am in [s3_z6(), d4_z4()] {
            for seed in 0..100 {
                let w = random_kernel_word(&am, 8, seed).unwrap();
                assert!(w.len() <= 8 && !w.is_empty());
                assert!(left_trivial(&am, w.letters()));
                let d = kernel_decompose(&w, &am).expect("kernel word");
                assert!(d.conjugates.len() <= w.len());
                let mut letters = Vec::new();
                for (c, sign, u) in &d.conjugates {
                    let gen = [
                        Letter(Side::B, am.factor(Side::B).inv(am.image(Side::B, *c))),
                        Letter(Side::A, am.image(Side::A, *c)),
                    ];
                    let gen = match sign {
                        Sign::Plus => gen.to_vec(),
                        Sign::Minus => inverse_letters(&am, &gen),
                    };
                    letters.extend(inverse_letters(&am, u.letters()));
                    letters.extend(gen);
                    letters.extend(u.letters().iter().copied());
                }
                assert_eq!(fp_reduce(&am, letters), w.letters(), "seed {seed}");
                words += 1;

                for side in [Side::A, Side::B] {
                    let f = am.factor(side);
                    for x in f.elements().filter(|&x| am.c_preimage(side, x).is_none()) {
                        let probe = w.mul(&am, &TwoFactorWord::reduced(&am, [Letter(side, x)]));
                        assert!(!left_trivial(&am, probe.letters()));
                        assert!(kernel_decompose(&probe, &am).is_none());
                        assert!(!amalgam_normal_form(&probe, &am).is_trivial(&am));
                        probes += 1;
                    }
                }
            }
        }
        format!("{words} kernel words, {probes} non-kernel probes")
    });
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn random_tokens(rng: &mut ChaCha8Rng, order: usize, vars: &[&str], max_len: usize) -> Vec<Token> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.3) {
                Token::Coeff(rng.gen_range(0..order))
            } else {
                Token::Letter {
                    var: vars[rng.gen_range(0..vars.len())].to_string(),
                    inverse: rng.gen_bool(0.5),
                }
            }
        })
        .collect()
}

/// Verdict of a quasi-identity by scanning assignments from the last tuple back.
fn reverse_oracle(g: &GroupTable, hyps: &[Word], concl: &Word, vars: &[String]) -> bool {
    let n = vars.len();
    let total = g.order().pow(n as u32);
    let trivial_map = [g.identity()];
    for idx in (0..total).rev() {
        let mut rest = idx;
        let mut vals = vec![0; n];
        for slot in vals.iter_mut().rev() {
            *slot = rest % g.order();
            rest /= g.order();
        }
        let ev = |w: &Word| naive_eval(g, &trivial_map, w.tokens(), vars, &vals);
        if hyps.iter().all(|h| ev(h) == g.identity()) && ev(concl) != g.identity() {
            return false;
        }
    }
    true
}

#[test]
fn criterion_11_differential() {
    criterion(11, "differential and metamorphic checks", 120, || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let groups = [grp("S4"), grp("D6"), grp("Q8")];
        let vars: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();

        for _ in 0..10_000 {
            let g = &groups[rng.gen_range(0..groups.len())];
            let tokens = random_tokens(&mut rng, g.order(), &VARS, 30);
            let vals: Vec<usize> = (0..3).map(|_| rng.gen_range(0..g.order())).collect();
            let reduced = reduce(g, tokens.iter().cloned());
            let id: Vec<usize> = g.elements().collect();
            assert_eq!(naive_eval(g, &id, &tokens, &vars, &vals), naive_eval(g, &id, &reduced, &vars, &vals));
        }

        for _ in 0..10_000 {
            let g = &groups[rng.gen_range(0..groups.len())];
            let embed = Homomorphism::identity_on(g.clone());
            let w = Word::from_tokens(g.clone(), random_tokens(&mut rng, g.order(), &VARS[..2], 12)).unwrap();
            let sub: BTreeMap<String, Word> = VARS[..2]
                .iter()
                .map(|v| {
                    let t = random_tokens(&mut rng, g.order(), &VARS, 6);
                    (v.to_string(), Word::from_tokens(g.clone(), t).unwrap())
                })
                .collect();
            let vals: Vec<usize> = (0..3).map(|_| rng.gen_range(0..g.order())).collect();
            let asg = VARS.iter().zip(&vals).fold(Assignment::new(&embed), |a, (v, &x)| a.with(*v, x));
            let direct = evaluate(&substitute(&w, &sub, true).unwrap(), &asg).unwrap();
            let inner = VARS[..2].iter().fold(Assignment::new(&embed), |a, v| {
                a.with(*v, evaluate(&sub[*v], &asg).unwrap())
            });
            assert_eq!(direct, evaluate(&w, &inner).unwrap());
        }

        let mut verdicts = 0;
        for (_, text) in SHIPPED_QIS {
            let qi = parse_qi(text).unwrap();
            for g in catalog() {
                let v = qi_holds(g, &qi).unwrap();
                assert_eq!(
                    v.holds,
                    reverse_oracle(g, qi.hypotheses(), qi.conclusion(), qi.variables()),
                    "{text} in {}",
                    g.name()
                );
                if let Some(ce) = &v.counterexample {
                    let ev = |w: &Word| naive_eval(g, &[g.identity()], w.tokens(), qi.variables(), ce);
                    assert!(qi.hypotheses().iter().all(|h| ev(h) == g.identity()));
                    assert_ne!(ev(qi.conclusion()), g.identity());
                }
                assert_eq!(qi_holds_with(g, &qi, u64::MAX, 4).unwrap(), v);
                verdicts += 1;
            }
        }

        let s4 = grp("S4");
        let a5 = grp("A5");
        let mut runs = 0;
        for (k, text) in [
            (&s4, "[x,y] = @c123"),
            (&s4, "x^2 = y^3; [x,y]^2 = 1"),
            (&a5, "x^5 = 1; x^y = x^2"),
            (&a5, "x y x = y x y"),
        ] {
            let sys = parse_system(text, k).unwrap();
            let id = Homomorphism::identity_on(k.clone());
            for base in [SolveOptions::all(), SolveOptions::first()] {
                let one = solve(&sys, k, &id, base).unwrap();
                for jobs in [0, 2, 3, 8] {
                    assert_eq!(solve(&sys, k, &id, base.jobs(jobs)).unwrap(), one, "{text} jobs {jobs}");
                    runs += 1;
                }
            }
        }
        format!("2x10^4 word cases, {verdicts} qi verdicts, {runs} parallel solver runs")
    });
}
