use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::{GroupError, GroupTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureMode {
    Subgroup,
    Normal,
}

/// Least subgroup (or normal subgroup) containing `gens`, as sorted indices.
pub fn closure(g: &GroupTable, gens: &[usize], mode: ClosureMode) -> Vec<usize> {
    let mut generators: Vec<usize> = Vec::new();
    let mut seen_gen = vec![false; g.order()];
    let mut push_gen = |x: usize, generators: &mut Vec<usize>| {
        if x != g.identity() && !seen_gen[x] {
            seen_gen[x] = true;
            generators.push(x);
        }
    };
    for &s in gens {
        match mode {
            ClosureMode::Subgroup => push_gen(s, &mut generators),
            ClosureMode::Normal => {
                for y in g.elements() {
                    push_gen(g.conj(s, y), &mut generators);
                }
            }
        }
    }
    // BFS over right multiplication; in a finite group the monoid generated is
    // already the subgroup.
    let mut member = vec![false; g.order()];
    member[g.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        for &s in &generators {
            let y = g.mul(x, s);
            if !member[y] {
                member[y] = true;
                queue.push_back(y);
            }
        }
    }
    g.elements().filter(|&x| member[x]).collect()
}

/// `[G, G]`.
pub fn commutator_subgroup(g: &GroupTable) -> Vec<usize> {
    let all: Vec<usize> = g.elements().collect();
    mutual_commutator(g, &all, &all)
}

/// `[X, Y]` for normal subgroups `X`, `Y`: the subgroup generated by all
/// commutators, which is itself normal.
fn mutual_commutator(g: &GroupTable, xs: &[usize], ys: &[usize]) -> Vec<usize> {
    let mut comms = BTreeSet::new();
    for &x in xs {
        for &y in ys {
            comms.insert(g.commutator(x, y));
        }
    }
    let comms: Vec<usize> = comms.into_iter().collect();
    closure(g, &comms, ClosureMode::Subgroup)
}

/// `G = G⁽⁰⁾ ⊵ G⁽¹⁾ ⊵ …` until it stabilizes; the last entry repeats no earlier one.
pub fn derived_series(g: &GroupTable) -> Vec<Vec<usize>> {
    let mut series = vec![g.elements().collect::<Vec<_>>()];
    loop {
        let last = series.last().unwrap();
        let next = mutual_commutator(g, last, last);
        if next.len() == last.len() {
            return series;
        }
        series.push(next);
    }
}

/// `γ₁ = G, γᵢ₊₁ = [γᵢ, G]` until it stabilizes.
pub fn lower_central_series(g: &GroupTable) -> Vec<Vec<usize>> {
    let all: Vec<usize> = g.elements().collect();
    let mut series = vec![all.clone()];
    loop {
        let last = series.last().unwrap();
        let next = mutual_commutator(g, last, &all);
        if next.len() == last.len() {
            return series;
        }
        series.push(next);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub is_abelian: bool,
    pub nilpotency_class: Option<usize>,
    pub derived_length: Option<usize>,
    /// element order ↦ number of elements with that order
    pub element_orders: BTreeMap<u64, usize>,
    pub prime_set: BTreeSet<u64>,
    pub center_size: usize,
    pub derived_size: usize,
}

pub fn structure_report(g: &GroupTable) -> StructureReport {
    let mut element_orders = BTreeMap::new();
    for x in g.elements() {
        *element_orders.entry(g.element_order(x)).or_insert(0) += 1;
    }
    let mut prime_set = BTreeSet::new();
    let mut n = g.order() as u64;
    let mut p = 2;
    while n > 1 {
        if n.is_multiple_of(p) {
            prime_set.insert(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    let derived = derived_series(g);
    let derived_length = (derived.last().unwrap().len() == 1).then(|| derived.len() - 1);
    let lcs = lower_central_series(g);
    let nilpotency_class = (lcs.last().unwrap().len() == 1).then(|| lcs.len() - 1);
    StructureReport {
        is_abelian: g.is_abelian(),
        nilpotency_class,
        derived_length,
        element_orders,
        prime_set,
        center_size: g.center().len(),
        derived_size: derived.get(1).map_or(g.order(), |d| d.len()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// `g = ∏ᵢ (h^{sᵢ})^{zᵢ}`, product taken left to right.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugateExpression {
    pub base: usize,
    pub factors: Vec<(Sign, usize)>,
}

impl ConjugateExpression {
    pub fn evaluate(&self, g: &GroupTable) -> usize {
        self.factors.iter().fold(g.identity(), |acc, &(s, z)| {
            let h = match s {
                Sign::Plus => self.base,
                Sign::Minus => g.inv(self.base),
            };
            g.mul(acc, g.conj(h, z))
        })
    }
}

/// Breadth-first search for a shortest product of conjugates of `h^{±1}`
/// equal to `target`. Conjugators are tried identity first, then by index,
/// `+1` before `-1`; the first conjugator producing a given conjugate wins.
pub fn express_in_normal_closure(
    g: &GroupTable,
    h: usize,
    target: usize,
) -> Result<Option<ConjugateExpression>, GroupError> {
    g.check_element(h)?;
    g.check_element(target)?;
    if h == g.identity() {
        return Err(GroupError::TrivialBase);
    }
    let conjugators =
        std::iter::once(g.identity()).chain(g.elements().filter(|&z| z != g.identity()));
    let mut steps: Vec<(usize, Sign, usize)> = Vec::new();
    let mut seen = vec![false; g.order()];
    for sign in [Sign::Plus, Sign::Minus] {
        let base = if sign == Sign::Plus { h } else { g.inv(h) };
        for z in conjugators.clone() {
            let c = g.conj(base, z);
            if !seen[c] {
                seen[c] = true;
                steps.push((c, sign, z));
            }
        }
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.order()];
    let mut visited = vec![false; g.order()];
    visited[g.identity()] = true;
    let mut queue = VecDeque::from([g.identity()]);
    while let Some(x) = queue.pop_front() {
        if x == target {
            break;
        }
        for (k, &(c, _, _)) in steps.iter().enumerate() {
            let y = g.mul(x, c);
            if !visited[y] {
                visited[y] = true;
                parent[y] = Some((x, k));
                queue.push_back(y);
            }
        }
    }
    if !visited[target] {
        return Ok(None);
    }
    let mut factors = Vec::new();
    let mut cur = target;
    while let Some((prev, k)) = parent[cur] {
        let (_, s, z) = steps[k];
        factors.push((s, z));
        cur = prev;
    }
    factors.reverse();
    Ok(Some(ConjugateExpression { base: h, factors }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_atomic, AtomicSpec};

    fn perm_index(g: &GroupTable, name: &str) -> usize {
        g.resolve(name).unwrap_or_else(|| panic!("{name}"))
    }

    #[test]
    fn normal_closure_of_three_cycle_in_s3() {
        let s3 = build_atomic(AtomicSpec::Symmetric(3)).unwrap();
        let c = perm_index(&s3, "c123");
        let a3 = closure(&s3, &[c], ClosureMode::Normal);
        assert_eq!(a3.len(), 3);
        let t = perm_index(&s3, "c12");
        assert_eq!(closure(&s3, &[t], ClosureMode::Subgroup).len(), 2);
    }

    #[test]
    fn a5_is_normally_generated_by_a_three_cycle() {
        let a5 = build_atomic(AtomicSpec::Alternating(5)).unwrap();
        let c = perm_index(&a5, "c123");
        assert_eq!(closure(&a5, &[c], ClosureMode::Normal).len(), 60);
    }

    #[test]
    fn expression_absent_outside_closure() {
        let s3 = build_atomic(AtomicSpec::Symmetric(3)).unwrap();
        let r = express_in_normal_closure(&s3, perm_index(&s3, "c123"), perm_index(&s3, "c12")).unwrap();
        assert!(r.is_none());
    }

    #[test]
    fn expression_of_double_transposition() {
        let a5 = build_atomic(AtomicSpec::Alternating(5)).unwrap();
        let h = perm_index(&a5, "c123");
        let target = perm_index(&a5, "c14_23");
        // (123)(124) = (14)(23) composing left to right
        assert_eq!(a5.mul(h, perm_index(&a5, "c124")), target);
        let e = express_in_normal_closure(&a5, h, target).unwrap().unwrap();
        assert_eq!(e.factors.len(), 2);
        assert_eq!(e.evaluate(&a5), target);
    }

    #[test]
    fn expression_of_base_itself() {
        let s3 = build_atomic(AtomicSpec::Symmetric(3)).unwrap();
        let h = perm_index(&s3, "c123");
        let e = express_in_normal_closure(&s3, h, h).unwrap().unwrap();
        assert_eq!(e.factors, vec![(Sign::Plus, s3.identity())]);
        assert!(matches!(
            express_in_normal_closure(&s3, s3.identity(), h),
            Err(GroupError::TrivialBase)
        ));
    }

    #[test]
    fn d4_structure() {
        let d4 = build_atomic(AtomicSpec::Dihedral(4)).unwrap();
        let r = structure_report(&d4);
        assert_eq!(r.nilpotency_class, Some(2));
        assert_eq!(r.derived_size, 2);
        assert_eq!(r.center_size, 2);
        assert_eq!(r.derived_length, Some(2));
    }

    #[test]
    fn s3_structure() {
        let s3 = build_atomic(AtomicSpec::Symmetric(3)).unwrap();
        let r = structure_report(&s3);
        assert_eq!(r.derived_length, Some(2));
        assert_eq!(r.nilpotency_class, None);
        assert_eq!(r.center_size, 1);
    }

    #[test]
    fn z6_structure() {
        let z6 = build_atomic(AtomicSpec::Cyclic(6)).unwrap();
        let r = structure_report(&z6);
        assert!(r.is_abelian);
        assert_eq!(r.prime_set, BTreeSet::from([2, 3]));
        assert_eq!(r.nilpotency_class, Some(1));
        assert_eq!(r.derived_length, Some(1));
        let trivial = structure_report(&GroupTable::trivial());
        assert_eq!(trivial.nilpotency_class, Some(0));
        assert!(trivial.prime_set.is_empty());
    }
}
