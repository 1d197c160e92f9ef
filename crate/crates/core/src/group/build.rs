//! Constructors for the concrete groups used as coefficient groups and
//! witness overgroups, plus the built-in catalog.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use super::{
    closure, validate_group, ClosureMode, FiniteGroup, GroupError, GroupTable, Homomorphism,
    RawTable, WreathCyclic,
};

/// Largest order for which a multiplication table is materialized.
pub const MAX_TABLE_ORDER: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomicSpec {
    Cyclic(usize),
    /// Symmetries of the regular `n`-gon, order `2n`.
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Quaternion,
    /// Unitriangular 3×3 matrices over `ℤ/n`, tags `a`, `b`, `c` with `[a,b] = c`.
    Heisenberg(usize),
    /// Affine maps `x ↦ ux + v` over `ℤ/p`.
    Agl1(usize),
}

pub enum CompositeSpec {
    Direct(Arc<GroupTable>, Arc<GroupTable>),
    Semidirect {
        normal: Arc<GroupTable>,
        complement: Arc<GroupTable>,
        /// `action[h]` is the automorphism of `normal` attached to `h`.
        action: Vec<Vec<usize>>,
    },
    WreathCyclic {
        base: Arc<GroupTable>,
        n: usize,
        prefix_copies: Option<usize>,
    },
    Central {
        left: Arc<GroupTable>,
        right: Arc<GroupTable>,
        c: usize,
        g: usize,
    },
}

/// A composite group together with its named structural embeddings.
#[derive(Debug, Clone)]
pub struct Composite {
    pub group: Arc<GroupTable>,
    pub embeddings: BTreeMap<String, Homomorphism>,
}

impl Composite {
    pub fn embedding(&self, name: &str) -> &Homomorphism {
        self.embeddings
            .get(name)
            .unwrap_or_else(|| panic!("composite has no embedding named {name}"))
    }
}

fn check_order(order: usize) -> Result<(), GroupError> {
    if order > MAX_TABLE_ORDER {
        Err(GroupError::UnsupportedSize(format!(
            "order {order} exceeds the table limit {MAX_TABLE_ORDER}"
        )))
    } else {
        Ok(())
    }
}

/// Tabulates a closed set of elements. `elems[0]` need not be the identity.
fn tabulate<E, F>(name: String, elems: &[E], mul: F, names: Vec<String>) -> RawTable
where
    E: Eq + Hash + Clone,
    F: Fn(&E, &E) -> E,
{
    let index: HashMap<&E, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let table = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    *index
                        .get(&mul(a, b))
                        .expect("element set is closed under multiplication")
                })
                .collect()
        })
        .collect();
    RawTable {
        name,
        table,
        identity: None,
        names: Some(names),
        tags: BTreeMap::new(),
    }
}

fn finish(mut raw: RawTable, tags: &[(&str, usize)]) -> Result<GroupTable, GroupError> {
    for (t, e) in tags {
        raw.tags.insert((*t).to_string(), *e);
    }
    validate_group(raw)
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn cycle_name(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut parts = Vec::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = String::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push_str(&(i + 1).to_string());
            i = perm[i];
        }
        parts.push(cycle);
    }
    if parts.is_empty() {
        "e".to_string()
    } else {
        format!("c{}", parts.join("_"))
    }
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..m).collect();
    let mut out = vec![cur.clone()];
    loop {
        // next lexicographic permutation
        let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn is_even(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn perm_group(name: String, perms: Vec<Vec<usize>>, tags: &[(&str, Vec<usize>)]) -> Result<GroupTable, GroupError> {
    let names = perms.iter().map(|p| cycle_name(p)).collect();
    // left to right: apply p, then q
    let raw = tabulate(name, &perms, |p, q| p.iter().map(|&i| q[i]).collect::<Vec<_>>(), names);
    let tag_idx: Vec<(&str, usize)> = tags
        .iter()
        .filter_map(|(t, p)| perms.iter().position(|x| x == p).map(|i| (*t, i)))
        .collect();
    finish(raw, &tag_idx)
}

fn perm_from_cycles(m: usize, cycles: &[&[usize]]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..m).collect();
    for c in cycles {
        for k in 0..c.len() {
            p[c[k]] = c[(k + 1) % c.len()];
        }
    }
    p
}

pub fn build_atomic(spec: AtomicSpec) -> Result<GroupTable, GroupError> {
    match spec {
        AtomicSpec::Cyclic(n) => {
            if n == 0 {
                return Err(GroupError::UnsupportedSize("cyclic group of order 0".into()));
            }
            check_order(n)?;
            let elems: Vec<usize> = (0..n).collect();
            let names = (0..n)
                .map(|i| if i == 0 { "e".to_string() } else { format!("g{i}") })
                .collect();
            let raw = tabulate(format!("Z{n}"), &elems, |a, b| (a + b) % n, names);
            let tags: Vec<(&str, usize)> = if n > 1 { vec![("g", 1), ("a", 1)] } else { vec![] };
            finish(raw, &tags)
        }
        AtomicSpec::Dihedral(n) => {
            if n == 0 {
                return Err(GroupError::UnsupportedSize("dihedral group D0".into()));
            }
            check_order(2 * n)?;
            // (i, j) = r^i s^j with s r = r⁻¹ s
            let elems: Vec<(usize, usize)> =
                (0..2).flat_map(|j| (0..n).map(move |i| (i, j))).collect();
            let names = elems
                .iter()
                .map(|&(i, j)| match (i, j) {
                    (0, 0) => "e".to_string(),
                    (i, 0) => format!("r{i}"),
                    (i, _) => format!("s{i}"),
                })
                .collect();
            let raw = tabulate(
                format!("D{n}"),
                &elems,
                |&(i, j), &(k, l)| {
                    let k = if j == 1 { (n - k) % n } else { k };
                    ((i + k) % n, (j + l) % 2)
                },
                names,
            );
            let mut tags = vec![("b", n), ("s", n)];
            if n > 1 {
                tags.push(("a", 1));
                tags.push(("r", 1));
            }
            if n % 2 == 0 {
                tags.push(("z", n / 2));
            }
            finish(raw, &tags)
        }
        AtomicSpec::Symmetric(m) => {
            if m == 0 || m > 5 {
                return Err(GroupError::UnsupportedSize(format!("S{m}: degree must be 1..=5")));
            }
            let mut tags = Vec::new();
            if m >= 2 {
                tags.push(("a", perm_from_cycles(m, &[&[0, 1]])));
                let full: Vec<usize> = (0..m).collect();
                tags.push(("b", perm_from_cycles(m, &[&full])));
            }
            perm_group(format!("S{m}"), permutations(m), &tags)
        }
        AtomicSpec::Alternating(m) => {
            if m == 0 || m > 5 {
                return Err(GroupError::UnsupportedSize(format!("A{m}: degree must be 1..=5")));
            }
            let perms: Vec<Vec<usize>> = permutations(m).into_iter().filter(|p| is_even(p)).collect();
            let mut tags = Vec::new();
            if m >= 3 {
                tags.push(("a", perm_from_cycles(m, &[&[0, 1, 2]])));
            }
            if m >= 4 {
                tags.push(("b", perm_from_cycles(m, &[&[0, 1], &[2, 3]])));
            }
            perm_group(format!("A{m}"), perms, &tags)
        }
        AtomicSpec::Quaternion => {
            // (sign, basis) with basis 0..4 = 1, i, j, k
            let elems: Vec<(usize, usize)> =
                (0..4).flat_map(|b| (0..2).map(move |s| (s, b))).collect();
            let basis = ["e", "i", "j", "k"];
            let names = elems
                .iter()
                .map(|&(s, b)| match (s, b) {
                    (0, b) => basis[b].to_string(),
                    (_, 0) => "m".to_string(),
                    (_, b) => format!("m{}", basis[b]),
                })
                .collect();
            // unit products: BASIS[x][y] = (sign, basis) of e_x e_y
            const BASIS: [[(usize, usize); 4]; 4] = [
                [(0, 0), (0, 1), (0, 2), (0, 3)],
                [(0, 1), (1, 0), (0, 3), (1, 2)],
                [(0, 2), (1, 3), (1, 0), (0, 1)],
                [(0, 3), (0, 2), (1, 1), (1, 0)],
            ];
            let raw = tabulate(
                "Q8".into(),
                &elems,
                |&(s1, b1), &(s2, b2)| {
                    let (s, b) = BASIS[b1][b2];
                    ((s1 + s2 + s) % 2, b)
                },
                names,
            );
            finish(raw, &[("a", 2), ("b", 4), ("c", 6), ("z", 1)])
        }
        AtomicSpec::Heisenberg(n) => {
            if n == 0 {
                return Err(GroupError::UnsupportedSize("Heisenberg group mod 0".into()));
            }
            check_order(n * n * n)?;
            // (x, y, z) is the matrix [[1,x,z],[0,1,y],[0,0,1]]
            let elems: Vec<(usize, usize, usize)> = (0..n)
                .flat_map(|z| (0..n).flat_map(move |y| (0..n).map(move |x| (x, y, z))))
                .collect();
            let names = elems
                .iter()
                .map(|&(x, y, z)| {
                    if (x, y, z) == (0, 0, 0) {
                        "e".to_string()
                    } else {
                        format!("m{x}_{y}_{z}")
                    }
                })
                .collect();
            let raw = tabulate(
                format!("H{n}"),
                &elems,
                |&(x, y, z), &(x2, y2, z2)| ((x + x2) % n, (y + y2) % n, (z + z2 + x * y2) % n),
                names,
            );
            let at = |x: usize, y: usize, z: usize| (x % n) + n * (y % n) + n * n * (z % n);
            if n == 1 {
                return finish(raw, &[]);
            }
            finish(raw, &[("a", at(1, 0, 0)), ("b", at(0, 1, 0)), ("c", at(0, 0, 1))])
        }
        AtomicSpec::Agl1(p) => {
            if !is_prime(p) {
                return Err(GroupError::UnsupportedSize(format!("AGL(1,{p}): {p} is not prime")));
            }
            check_order(p * (p - 1))?;
            let elems: Vec<(usize, usize)> =
                (1..p).flat_map(|u| (0..p).map(move |v| (u, v))).collect();
            let names = elems
                .iter()
                .map(|&(u, v)| if (u, v) == (1, 0) { "e".to_string() } else { format!("f{u}_{v}") })
                .collect();
            // (u,v) then (u',v'): x ↦ u'(ux+v)+v'
            let raw = tabulate(
                format!("AGL1_{p}"),
                &elems,
                |&(u, v), &(u2, v2)| ((u2 * u) % p, (u2 * v + v2) % p),
                names,
            );
            let at = |u: usize, v: usize| (u - 1) * p + v;
            let root = (1..p)
                .find(|&r| (1..p - 1).all(|k| mod_pow(r, k, p) != 1))
                .unwrap_or(1);
            let mut tags = vec![("a", at(1, 1)), ("t", at(1, 1)), ("r", at(root, 0))];
            if p > 2 {
                tags.push(("b", at(2, 0)));
            }
            finish(raw, &tags)
        }
    }
}

fn mod_pow(b: usize, e: usize, m: usize) -> usize {
    (0..e).fold(1 % m, |acc, _| acc * b % m)
}

fn pair_names(a: &GroupTable, b: &GroupTable) -> Vec<String> {
    a.elements()
        .flat_map(|i| b.elements().map(move |j| (i, j)))
        .map(|(i, j)| format!("{}_{}", a.label(i), b.label(j)))
        .collect()
}

fn side_tags(a: &GroupTable, b: &GroupTable, pair: impl Fn(usize, usize) -> usize) -> BTreeMap<String, usize> {
    let mut tags = BTreeMap::new();
    for (t, &e) in a.tags() {
        tags.insert(format!("{t}_l"), pair(e, b.identity()));
    }
    for (t, &e) in b.tags() {
        tags.insert(format!("{t}_r"), pair(a.identity(), e));
    }
    tags
}

pub fn direct_product(a: &Arc<GroupTable>, b: &Arc<GroupTable>) -> Result<Composite, GroupError> {
    let (na, nb) = (a.order(), b.order());
    check_order(na * nb)?;
    let pair = |i: usize, j: usize| i * nb + j;
    let mut table = Vec::with_capacity(na * na * nb * nb);
    for xa in 0..na {
        for xb in 0..nb {
            for ya in 0..na {
                let base = (a.mul(xa, ya) * nb) as u32;
                table.extend((0..nb).map(|yb| base + b.mul(xb, yb) as u32));
            }
        }
    }
    let inverse = (0..na * nb).map(|x| pair(a.inv(x / nb), b.inv(x % nb)) as u32).collect();
    let group = Arc::new(GroupTable::from_construction(
        format!("{}x{}", a.name(), b.name()),
        table,
        pair(a.identity(), b.identity()),
        inverse,
        Some(pair_names(a, b)),
        side_tags(a, b, pair),
    ));
    let left = Homomorphism::embedding(
        a.clone(),
        group.clone(),
        a.elements().map(|i| pair(i, b.identity())).collect(),
    )?;
    let right = Homomorphism::embedding(
        b.clone(),
        group.clone(),
        b.elements().map(|j| pair(a.identity(), j)).collect(),
    )?;
    Ok(Composite {
        group,
        embeddings: BTreeMap::from([("left".to_string(), left), ("right".to_string(), right)]),
    })
}

/// `N ⋊ H` with `(n,h)(n',h') = (n·φ_h(n'), hh')`; requires `φ_{hh'} = φ_h ∘ φ_{h'}`.
pub fn semidirect_product(
    normal: &Arc<GroupTable>,
    complement: &Arc<GroupTable>,
    action: &[Vec<usize>],
) -> Result<Composite, GroupError> {
    let (nn, nh) = (normal.order(), complement.order());
    check_order(nn * nh)?;
    if action.len() != nh {
        return Err(GroupError::ActionNotAutomorphic(format!(
            "{} automorphisms for a complement of order {nh}",
            action.len()
        )));
    }
    for (h, phi) in action.iter().enumerate() {
        if phi.len() != nn || phi.iter().any(|&x| x >= nn) {
            return Err(GroupError::ActionNotAutomorphic(format!("φ_{h} is not a map on N")));
        }
        let mut hit = vec![false; nn];
        for &x in phi {
            hit[x] = true;
        }
        if hit.iter().any(|&b| !b) {
            return Err(GroupError::ActionNotAutomorphic(format!("φ_{h} is not bijective")));
        }
        for x in normal.elements() {
            for y in normal.elements() {
                if phi[normal.mul(x, y)] != normal.mul(phi[x], phi[y]) {
                    return Err(GroupError::ActionNotAutomorphic(format!(
                        "φ_{h} is not multiplicative at ({x}, {y})"
                    )));
                }
            }
        }
    }
    for h in complement.elements() {
        for k in complement.elements() {
            let hk = complement.mul(h, k);
            if normal.elements().any(|x| action[hk][x] != action[h][action[k][x]]) {
                return Err(GroupError::ActionNotAutomorphic(format!(
                    "φ_({h}·{k}) differs from φ_{h}∘φ_{k}"
                )));
            }
        }
    }
    let pair = |x: usize, h: usize| x * nh + h;
    let table = (0..nn * nh)
        .map(|p| {
            let (x, h) = (p / nh, p % nh);
            (0..nn * nh)
                .map(|q| {
                    let (y, k) = (q / nh, q % nh);
                    pair(normal.mul(x, action[h][y]), complement.mul(h, k))
                })
                .collect()
        })
        .collect();
    let raw = RawTable {
        name: format!("{}:{}", normal.name(), complement.name()),
        table,
        identity: Some(pair(normal.identity(), complement.identity())),
        names: Some(pair_names(normal, complement)),
        tags: side_tags(normal, complement, pair),
    };
    let group = Arc::new(validate_group(raw)?);
    let n_emb = Homomorphism::embedding(
        normal.clone(),
        group.clone(),
        normal.elements().map(|x| pair(x, complement.identity())).collect(),
    )?;
    let h_emb = Homomorphism::embedding(
        complement.clone(),
        group.clone(),
        complement.elements().map(|h| pair(normal.identity(), h)).collect(),
    )?;
    Ok(Composite {
        group,
        embeddings: BTreeMap::from([
            ("normal".to_string(), n_emb),
            ("complement".to_string(), h_emb),
        ]),
    })
}

/// `G ≀ ℤₙ` as a table, tagging `shift` and returning the `diagonal`,
/// `first` (coordinate 0) and, when requested, `prefix` embeddings.
pub fn wreath_cyclic(
    base: &Arc<GroupTable>,
    n: usize,
    prefix_copies: Option<usize>,
) -> Result<Composite, GroupError> {
    if n == 0 {
        return Err(GroupError::UnsupportedSize("wreath product with ℤ0".into()));
    }
    let w = WreathCyclic::new(base.clone(), n);
    let order = w
        .checked_order()
        .filter(|&o| o <= MAX_TABLE_ORDER as u64)
        .ok_or_else(|| {
            GroupError::UnsupportedSize(format!(
                "{}≀Z{n} exceeds the table limit {MAX_TABLE_ORDER}",
                base.name()
            ))
        })? as usize;
    if let Some(p) = prefix_copies {
        if p > n {
            return Err(GroupError::UnsupportedSize(format!("{p} prefix copies in {n} coordinates")));
        }
    }
    let elems: Vec<_> = (0..order).map(|i| w.element_at(i)).collect();
    let table = elems
        .iter()
        .map(|a| elems.iter().map(|b| w.index_of(&w.mul(a, b))).collect())
        .collect();
    let names = elems
        .iter()
        .map(|e| {
            let coords: Vec<String> = e.coords.iter().map(|&c| base.label(c)).collect();
            format!("w{}_{}", e.shift, coords.join("_"))
        })
        .collect();
    let mut tags = BTreeMap::new();
    tags.insert("shift".to_string(), w.index_of(&w.shift()));
    let raw = RawTable {
        name: format!("{}wrZ{n}", base.name()),
        table,
        identity: Some(w.index_of(&w.identity())),
        names: Some(names),
        tags,
    };
    let group = Arc::new(validate_group(raw)?);
    let id = base.identity();
    let embed = |f: &dyn Fn(usize) -> Vec<usize>| {
        Homomorphism::embedding(
            base.clone(),
            group.clone(),
            base.elements().map(|g| w.index_of(&w.base_element(f(g)))).collect(),
        )
    };
    let mut embeddings = BTreeMap::new();
    embeddings.insert("diagonal".to_string(), embed(&|g| vec![g; n])?);
    embeddings.insert(
        "first".to_string(),
        embed(&|g| (0..n).map(|i| if i == 0 { g } else { id }).collect())?,
    );
    if let Some(p) = prefix_copies {
        embeddings.insert(
            "prefix".to_string(),
            embed(&|g| (0..n).map(|i| if i < p { g } else { id }).collect())?,
        );
    }
    Ok(Composite { group, embeddings })
}

/// `G / N` for a normal subgroup given by its elements, with the projection.
pub fn quotient(
    g: &Arc<GroupTable>,
    normal: &[usize],
) -> Result<(Arc<GroupTable>, Homomorphism), GroupError> {
    let mut in_n = vec![false; g.order()];
    for &x in normal {
        g.check_element(x)?;
        in_n[x] = true;
    }
    for &x in normal {
        if g.elements().any(|y| !in_n[g.conj(x, y)]) {
            return Err(GroupError::Format(format!("subgroup is not normal (element {x})")));
        }
    }
    let mut class = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in g.elements() {
        if class[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &m in normal {
            class[g.mul(m, x)] = c;
        }
    }
    let table = reps
        .iter()
        .flat_map(|&a| reps.iter().map(|&b| class[g.mul(a, b)] as u32).collect::<Vec<_>>())
        .collect();
    let tags = g.tags().iter().map(|(t, &e)| (t.clone(), class[e])).collect();
    let q = Arc::new(GroupTable::from_construction(
        format!("{}/N{}", g.name(), normal.len()),
        table,
        class[g.identity()],
        reps.iter().map(|&r| class[g.inv(r)] as u32).collect(),
        Some(reps.iter().map(|&r| g.label(r)).collect()),
        tags,
    ));
    let proj = Homomorphism::new(g.clone(), q.clone(), class)?;
    Ok((q, proj))
}

/// `(H × G)/⟨(c, g⁻¹)⟩` for central `c ∈ H`, `g ∈ G` of equal order.
pub fn central_product(
    left: &Arc<GroupTable>,
    right: &Arc<GroupTable>,
    c: usize,
    g: usize,
) -> Result<Composite, GroupError> {
    left.check_element(c)?;
    right.check_element(g)?;
    if !left.is_central(c) {
        return Err(GroupError::NonCentralIdentification(left.label(c)));
    }
    if !right.is_central(g) {
        return Err(GroupError::NonCentralIdentification(right.label(g)));
    }
    let (oc, og) = (left.element_order(c), right.element_order(g));
    if oc != og {
        return Err(GroupError::OrderMismatch(oc, og));
    }
    let prod = direct_product(left, right)?;
    let pg = &prod.group;
    let gen = pg.mul(
        *prod.embedding("left").apply(c),
        *prod.embedding("right").apply(right.inv(g)),
    );
    let n = closure(pg, &[gen], ClosureMode::Subgroup);
    let (q, proj) = quotient(pg, &n)?;
    let l = prod.embedding("left").then(&proj)?;
    let r = prod.embedding("right").then(&proj)?;
    l.require_embedding()?;
    r.require_embedding()?;
    Ok(Composite {
        group: q,
        embeddings: BTreeMap::from([("left".to_string(), l), ("right".to_string(), r)]),
    })
}

pub fn build_composite(spec: CompositeSpec) -> Result<Composite, GroupError> {
    match spec {
        CompositeSpec::Direct(a, b) => direct_product(&a, &b),
        CompositeSpec::Semidirect {
            normal,
            complement,
            action,
        } => semidirect_product(&normal, &complement, &action),
        CompositeSpec::WreathCyclic {
            base,
            n,
            prefix_copies,
        } => wreath_cyclic(&base, n, prefix_copies),
        CompositeSpec::Central { left, right, c, g } => central_product(&left, &right, c, g),
    }
}

/// Every embedding `ℤₙ → target`, one per element of order `n` in index order.
pub fn cyclic_embeddings(n: usize, target: &Arc<GroupTable>) -> Result<Vec<Homomorphism>, GroupError> {
    let zn = Arc::new(build_atomic(AtomicSpec::Cyclic(n))?);
    let mut out = Vec::new();
    for x in target.elements() {
        if target.element_order(x) == n as u64 {
            let map = (0..n).map(|k| target.pow(x, k as i64)).collect();
            out.push(Homomorphism::new(zn.clone(), target.clone(), map)?);
        }
    }
    Ok(out)
}

/// Every injective homomorphism `source → target`, found by trying images for
/// a greedy generating set. Ordered by the images of the generators.
pub fn embeddings(source: &Arc<GroupTable>, target: &Arc<GroupTable>) -> Result<Vec<Homomorphism>, GroupError> {
    if !target.order().is_multiple_of(source.order()) {
        return Ok(Vec::new());
    }
    let mut gens = Vec::new();
    let mut sub = vec![source.identity()];
    for x in source.elements() {
        if sub.binary_search(&x).is_err() {
            gens.push(x);
            sub = closure(source, &gens, ClosureMode::Subgroup);
        }
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let o = source.element_order(s);
            target.elements().filter(|&y| target.element_order(y) == o).collect()
        })
        .collect();
    let total = candidates
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| {
            GroupError::UnsupportedSize(format!(
                "too many candidate maps {} -> {}",
                source.name(),
                target.name()
            ))
        })?;
    let mut out = Vec::new();
    let mut pick = vec![0usize; gens.len()];
    for _ in 0..total {
        let images: Vec<usize> = pick.iter().zip(&candidates).map(|(&i, c)| c[i]).collect();
        if let Some(map) = extend_map(source, target, &gens, &images) {
            out.push(Homomorphism::new(source.clone(), target.clone(), map)?);
        }
        for (slot, c) in pick.iter_mut().zip(&candidates).rev() {
            *slot += 1;
            if *slot < c.len() {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// The homomorphism sending `gens[i]` to `images[i]`, if one exists and is injective.
fn extend_map(source: &GroupTable, target: &GroupTable, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; source.order()];
    map[source.identity()] = target.identity();
    let mut queue = vec![source.identity()];
    while let Some(x) = queue.pop() {
        for (&s, &t) in gens.iter().zip(images) {
            let (y, fy) = (source.mul(x, s), target.mul(map[x], t));
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    let mut seen = vec![false; target.order()];
    for &y in &map {
        if std::mem::replace(&mut seen[y], true) {
            return None;
        }
    }
    Some(map)
}

/// Parses a built-in name such as `Z6`, `D4`, `S4`, `A5`, `Q8`, `H2`,
/// `AGL1_7`, or a direct product `Z2xZ4xS3`.
pub fn builtin(name: &str) -> Result<GroupTable, GroupError> {
    let unknown = || GroupError::UnknownGroup(name.to_string());
    if name.contains('x') {
        let mut parts = name.split('x');
        let first = parts.next().ok_or_else(unknown)?;
        let mut acc = Arc::new(builtin(first)?);
        for part in parts {
            let next = Arc::new(builtin(part)?);
            acc = direct_product(&acc, &next)?.group;
        }
        let g = Arc::try_unwrap(acc).unwrap_or_else(|a| (*a).clone());
        return Ok(g.with_name(name));
    }
    let num = |prefix: &str| -> Option<usize> {
        name.strip_prefix(prefix)
            .filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|r| r.parse().ok())
    };
    let spec = if name == "Q8" {
        AtomicSpec::Quaternion
    } else if let Some(p) = num("AGL1_") {
        AtomicSpec::Agl1(p)
    } else if let Some(n) = num("Z") {
        AtomicSpec::Cyclic(n)
    } else if let Some(n) = num("D") {
        AtomicSpec::Dihedral(n)
    } else if let Some(n) = num("S") {
        AtomicSpec::Symmetric(n)
    } else if let Some(n) = num("A") {
        AtomicSpec::Alternating(n)
    } else if let Some(n) = num("H") {
        AtomicSpec::Heisenberg(n)
    } else {
        return Err(unknown());
    };
    Ok(build_atomic(spec)?.with_name(name))
}

/// Names of the fixed catalog used by the sweeps.
pub const CATALOG: &[&str] = &[
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z12", "Z2xZ2", "Z2xZ4",
    "Z2xZ2xZ2", "Z3xZ3", "Z2xZ6", "Z4xZ4", "S3", "D4", "D5", "D6", "Q8", "H2", "H3", "A4", "S4",
    "A5", "AGL1_5", "AGL1_7", "Z2xS3", "Z3xS3", "Q8xZ2", "D4xZ2", "S5",
];

/// The catalog, built once and shared.
pub fn catalog() -> &'static [Arc<GroupTable>] {
    static CAT: OnceLock<Vec<Arc<GroupTable>>> = OnceLock::new();
    CAT.get_or_init(|| {
        CATALOG
            .iter()
            .map(|n| Arc::new(builtin(n).expect("catalog entries are valid")))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{commutator_subgroup, structure_report};

    fn arc(spec: AtomicSpec) -> Arc<GroupTable> {
        Arc::new(build_atomic(spec).unwrap())
    }

    #[test]
    fn atomic_orders() {
        assert_eq!(build_atomic(AtomicSpec::Cyclic(1)).unwrap().order(), 1);
        assert_eq!(build_atomic(AtomicSpec::Agl1(7)).unwrap().order(), 42);
        assert_eq!(build_atomic(AtomicSpec::Dihedral(4)).unwrap().order(), 8);
        assert_eq!(build_atomic(AtomicSpec::Symmetric(5)).unwrap().order(), 120);
        assert_eq!(build_atomic(AtomicSpec::Alternating(5)).unwrap().order(), 60);
        assert_eq!(build_atomic(AtomicSpec::Quaternion).unwrap().order(), 8);
    }

    #[test]
    fn unsupported_sizes() {
        assert!(matches!(
            build_atomic(AtomicSpec::Symmetric(6)),
            Err(GroupError::UnsupportedSize(_))
        ));
        assert!(matches!(
            build_atomic(AtomicSpec::Agl1(6)),
            Err(GroupError::UnsupportedSize(_))
        ));
    }

    #[test]
    fn heisenberg_mod_two() {
        let h = build_atomic(AtomicSpec::Heisenberg(2)).unwrap();
        assert_eq!(h.order(), 8);
        let (a, b, c) = (h.tag("a").unwrap(), h.tag("b").unwrap(), h.tag("c").unwrap());
        assert_eq!(h.commutator(a, b), c);
        assert_eq!(h.element_order(c), 2);
        assert!(h.is_central(c));
    }

    #[test]
    fn heisenberg_commutator_generic_n() {
        for n in 2..=6 {
            let h = build_atomic(AtomicSpec::Heisenberg(n)).unwrap();
            let (a, b, c) = (h.tag("a").unwrap(), h.tag("b").unwrap(), h.tag("c").unwrap());
            assert_eq!(h.commutator(a, b), c);
            assert_eq!(h.element_order(c), n as u64);
            assert_eq!(h.commutator(a, c), h.identity());
            assert_eq!(h.commutator(b, c), h.identity());
        }
    }

    #[test]
    fn quaternion_relations() {
        let q = build_atomic(AtomicSpec::Quaternion).unwrap();
        let (i, j, k, m) = (q.tag("a").unwrap(), q.tag("b").unwrap(), q.tag("c").unwrap(), q.tag("z").unwrap());
        assert_eq!(q.mul(i, j), k);
        assert_eq!(q.mul(i, i), m);
        assert_eq!(q.mul(j, i), q.inv(k));
        assert_eq!(q.center().len(), 2);
    }

    #[test]
    fn wreath_z3_by_4() {
        let z3 = arc(AtomicSpec::Cyclic(3));
        let w = wreath_cyclic(&z3, 4, Some(3)).unwrap();
        assert_eq!(w.group.order(), 324);
        let s = w.group.tag("shift").unwrap();
        assert_eq!(w.group.element_order(s), 4);
        assert!(w.embeddings.contains_key("prefix"));
    }

    #[test]
    fn central_product_heisenberg_z2() {
        let h = arc(AtomicSpec::Heisenberg(2));
        let z2 = arc(AtomicSpec::Cyclic(2));
        let cp = central_product(&h, &z2, h.tag("c").unwrap(), 1).unwrap();
        assert_eq!(cp.group.order(), 8);
    }

    fn revalidate(g: &GroupTable) {
        let v = validate_group(g.to_raw()).unwrap();
        assert_eq!(v.identity(), g.identity());
        assert!(g.elements().all(|x| v.inv(x) == g.inv(x)), "{}", g.name());
    }

    #[test]
    fn constructed_tables_pass_validation() {
        let s3 = arc(AtomicSpec::Symmetric(3));
        let d4 = arc(AtomicSpec::Dihedral(4));
        let z6 = arc(AtomicSpec::Cyclic(6));
        revalidate(&direct_product(&s3, &d4).unwrap().group);
        revalidate(&direct_product(&z6, &s3).unwrap().group);
        let h3 = arc(AtomicSpec::Heisenberg(3));
        let cp = central_product(&h3, &z6, h3.tag("c").unwrap(), 2).unwrap();
        assert_eq!(cp.group.order(), 27 * 6 / 3);
        revalidate(&cp.group);
        let s4 = arc(AtomicSpec::Symmetric(4));
        let (q, _) = quotient(&s4, &commutator_subgroup(&s4)).unwrap();
        assert_eq!(q.order(), 2);
        revalidate(&q);
        let (q, _) = quotient(&d4, &[d4.identity(), d4.tag("z").unwrap()]).unwrap();
        revalidate(&q);
    }

    #[test]
    fn central_product_errors() {
        let h = arc(AtomicSpec::Heisenberg(2));
        let z4 = arc(AtomicSpec::Cyclic(4));
        assert!(matches!(
            central_product(&h, &z4, h.tag("c").unwrap(), 1),
            Err(GroupError::OrderMismatch(2, 4))
        ));
        let z2 = arc(AtomicSpec::Cyclic(2));
        assert!(matches!(
            central_product(&h, &z2, h.tag("a").unwrap(), 1),
            Err(GroupError::NonCentralIdentification(_))
        ));
    }

    #[test]
    fn direct_z2_z3_is_abelian_of_order_6() {
        let d = direct_product(&arc(AtomicSpec::Cyclic(2)), &arc(AtomicSpec::Cyclic(3))).unwrap();
        assert_eq!(d.group.order(), 6);
        assert!(d.group.is_abelian());
    }

    #[test]
    fn inversion_semidirect_is_dihedral() {
        let z3 = arc(AtomicSpec::Cyclic(3));
        let z2 = arc(AtomicSpec::Cyclic(2));
        let action = vec![vec![0, 1, 2], vec![0, 2, 1]];
        let sd = semidirect_product(&z3, &z2, &action).unwrap();
        assert_eq!(sd.group.order(), 6);
        assert!(!sd.group.is_abelian());
        // a non-automorphism is refused
        let bad = vec![vec![0, 1, 2], vec![1, 2, 0]];
        assert!(matches!(
            semidirect_product(&z3, &z2, &bad),
            Err(GroupError::ActionNotAutomorphic(_))
        ));
    }

    #[test]
    fn builtin_names_resolve() {
        assert_eq!(builtin("Z2xZ4").unwrap().order(), 8);
        assert_eq!(builtin("AGL1_7").unwrap().order(), 42);
        assert_eq!(builtin("H2").unwrap().order(), 8);
        assert!(builtin("Y3").is_err());
        assert!(builtin("Z").is_err());
    }

    #[test]
    fn catalog_is_valid_and_named() {
        for g in catalog() {
            assert!(g.order() >= 1);
            assert!(CATALOG.contains(&g.name()));
        }
        let a5 = catalog().iter().find(|g| g.name() == "A5").unwrap();
        assert_eq!(commutator_subgroup(a5).len(), 60);
        assert!(structure_report(a5).derived_length.is_none());
    }

    #[test]
    fn embeddings_between_small_groups() {
        let z2 = arc(AtomicSpec::Cyclic(2));
        let v4 = Arc::new(builtin("Z2xZ2").unwrap());
        let z4 = arc(AtomicSpec::Cyclic(4));
        let d4 = arc(AtomicSpec::Dihedral(4));
        // automorphisms of the Klein group
        assert_eq!(embeddings(&v4, &v4).unwrap().len(), 6);
        assert_eq!(embeddings(&v4, &z4).unwrap().len(), 0);
        assert_eq!(embeddings(&z2, &d4).unwrap().len(), 5);
        assert_eq!(embeddings(&z4, &d4).unwrap().len(), 2);
        for f in embeddings(&v4, &d4).unwrap() {
            f.require_embedding().unwrap();
        }
        assert_eq!(embeddings(&v4, &d4).unwrap().len(), 12);
    }

    #[test]
    fn cyclic_embeddings_count_involutions() {
        let d4 = arc(AtomicSpec::Dihedral(4));
        assert_eq!(cyclic_embeddings(2, &d4).unwrap().len(), 5);
    }
}
