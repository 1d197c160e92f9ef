use std::sync::Arc;

use super::{is_solution, named_equation, power_exponent, EquationError, EquationSystem, NamedEquation};
use crate::group::{
    build_atomic, central_product, semidirect_product, wreath_cyclic, AtomicSpec, FiniteGroup,
    GroupTable, Homomorphism, WreathCyclic, MAX_TABLE_ORDER,
};

/// An overgroup of the coefficient group together with a solution there.
#[derive(Debug, Clone)]
pub struct Witness<T: FiniteGroup = GroupTable> {
    pub overgroup: Arc<T>,
    pub embedding: Homomorphism<T>,
    pub solution: Vec<T::Elem>,
}

/// Power-equation witnesses outgrow the table limit quickly, so they may come
/// back as an implicit wreath product.
#[derive(Debug, Clone)]
pub enum AnyWitness {
    Table(Witness),
    Wreath(Witness<WreathCyclic>),
}

impl AnyWitness {
    pub fn order(&self) -> u64 {
        match self {
            AnyWitness::Table(w) => w.overgroup.order() as u64,
            AnyWitness::Wreath(w) => FiniteGroup::order(&*w.overgroup),
        }
    }

    pub fn verify(&self, sys: &EquationSystem) -> Result<(), EquationError> {
        match self {
            AnyWitness::Table(w) => verify_witness(sys, w),
            AnyWitness::Wreath(w) => verify_witness(sys, w),
        }
    }

    pub fn as_table(&self) -> Option<&Witness> {
        match self {
            AnyWitness::Table(w) => Some(w),
            AnyWitness::Wreath(_) => None,
        }
    }

    /// Solution entries rendered as labels (tables) or coordinate tuples.
    pub fn solution_labels(&self) -> Vec<String> {
        match self {
            AnyWitness::Table(w) => w.solution.iter().map(|&x| w.overgroup.label(x)).collect(),
            AnyWitness::Wreath(w) => w
                .solution
                .iter()
                .map(|e| {
                    let base = w.overgroup.base();
                    let coords: Vec<String> = e.coords.iter().map(|&c| base.label(c)).collect();
                    format!("({}; shift {})", coords.join(","), e.shift)
                })
                .collect(),
        }
    }
}

/// Embedding verified and every equation evaluating to the identity.
pub fn verify_witness<T: FiniteGroup>(sys: &EquationSystem, w: &Witness<T>) -> Result<(), EquationError> {
    w.embedding
        .require_embedding()
        .map_err(|e| EquationError::VerificationFailed(e.to_string()))?;
    if !is_solution(sys, &w.embedding, &w.solution)? {
        return Err(EquationError::VerificationFailed(
            "the solution does not satisfy every equation".into(),
        ));
    }
    Ok(())
}

/// The explicit overgroup for a named equation:
///
/// * power: `G ≀ ℤ_{q^k}` with `g ↦ (g,…,g,1,…,1)` (`p` copies, `p = |a|`) and `x` the shift;
/// * commutator: `(H × G)/⟨(c, g⁻¹)⟩` with `H` the Heisenberg group mod `|g|`, `x = a`, `y = b`;
/// * antipodal: `G ⋊ ℤ₂` by inversion (`G` abelian), `x` the involution.
pub fn witness_construction(g: &Arc<GroupTable>, kind: NamedEquation) -> Result<AnyWitness, EquationError> {
    let sys = named_equation(g, kind)?;
    let w = match kind {
        NamedEquation::Power { a, q, k } => {
            let qk = power_exponent(g, a, q, k)? as usize;
            let p = g.element_order(a) as usize;
            let implicit = WreathCyclic::new(g.clone(), qk);
            let small = implicit
                .checked_order()
                .is_some_and(|o| o <= MAX_TABLE_ORDER as u64);
            if small {
                let c = wreath_cyclic(g, qk, Some(p))?;
                let shift = c.group.tag("shift").expect("wreath products tag their shift");
                AnyWitness::Table(Witness {
                    overgroup: c.group.clone(),
                    embedding: c.embedding("prefix").clone(),
                    solution: vec![shift],
                })
            } else {
                let map = g.elements().map(|e| implicit.prefix(e, p)).collect();
                let shift = implicit.shift();
                let over = Arc::new(implicit);
                AnyWitness::Wreath(Witness {
                    embedding: Homomorphism::new(g.clone(), over.clone(), map)?,
                    overgroup: over,
                    solution: vec![shift],
                })
            }
        }
        NamedEquation::Commutator { g: e } => {
            let n = g.element_order(e) as usize;
            let h = Arc::new(build_atomic(AtomicSpec::Heisenberg(n))?);
            let tag = |t: &str| h.tag(t).expect("Heisenberg groups tag a, b, c");
            let c = central_product(&h, g, tag("c"), e)?;
            let left = c.embedding("left");
            AnyWitness::Table(Witness {
                overgroup: c.group.clone(),
                embedding: c.embedding("right").clone(),
                solution: vec![*left.apply(tag("a")), *left.apply(tag("b"))],
            })
        }
        NamedEquation::Antipodal { .. } => {
            if !g.is_abelian() {
                return Err(EquationError::BadParameters(
                    "the inversion witness needs an abelian group".into(),
                ));
            }
            let z2 = Arc::new(build_atomic(AtomicSpec::Cyclic(2))?);
            let identity: Vec<usize> = g.elements().collect();
            let inversion: Vec<usize> = g.elements().map(|x| g.inv(x)).collect();
            let c = semidirect_product(g, &z2, &[identity, inversion])?;
            let flip = *c.embedding("complement").apply(1);
            AnyWitness::Table(Witness {
                overgroup: c.group.clone(),
                embedding: c.embedding("normal").clone(),
                solution: vec![flip],
            })
        }
    };
    w.verify(&sys)?;
    Ok(w)
}
