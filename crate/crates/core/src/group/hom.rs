use std::collections::HashMap;
use std::sync::Arc;

use super::{FiniteGroup, GroupError, GroupTable};

/// A map from a table-backed group into any finite group, stored as the image
/// of every source element.
#[derive(Debug, Clone)]
pub struct Homomorphism<T: FiniteGroup = GroupTable> {
    source: Arc<GroupTable>,
    target: Arc<T>,
    map: Vec<T::Elem>,
}

/// Outcome of [`verify_map`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapReport {
    pub homomorphism: bool,
    pub embedding: bool,
    /// First pair `(s, s')` with `f(s·s') ≠ f(s)·f(s')`.
    pub violation: Option<(usize, usize)>,
    /// First pair of distinct elements with equal images.
    pub collision: Option<(usize, usize)>,
}

impl<T: FiniteGroup> Homomorphism<T> {
    /// Wraps a map without checking multiplicativity; see [`verify_map`].
    pub fn new(
        source: Arc<GroupTable>,
        target: Arc<T>,
        map: Vec<T::Elem>,
    ) -> Result<Self, GroupError> {
        if map.len() != source.order() {
            return Err(GroupError::MapLength {
                got: map.len(),
                expected: source.order(),
            });
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    /// Builds the map and insists that it is an injective homomorphism.
    pub fn embedding(
        source: Arc<GroupTable>,
        target: Arc<T>,
        map: Vec<T::Elem>,
    ) -> Result<Self, GroupError> {
        let f = Homomorphism::new(source, target, map)?;
        f.require_embedding()?;
        Ok(f)
    }

    pub fn require_homomorphism(&self) -> Result<(), GroupError> {
        match verify_map(self).violation {
            Some((a, b)) => Err(GroupError::NotHomomorphism(a, b)),
            None => Ok(()),
        }
    }

    pub fn require_embedding(&self) -> Result<(), GroupError> {
        let report = verify_map(self);
        if let Some((a, b)) = report.violation {
            return Err(GroupError::NotHomomorphism(a, b));
        }
        if let Some((a, b)) = report.collision {
            return Err(GroupError::NotInjective(a, b));
        }
        Ok(())
    }

    pub fn source(&self) -> &Arc<GroupTable> {
        &self.source
    }

    pub fn target(&self) -> &Arc<T> {
        &self.target
    }

    pub fn apply(&self, g: usize) -> &T::Elem {
        &self.map[g]
    }

    pub fn images(&self) -> &[T::Elem] {
        &self.map
    }
}

impl Homomorphism<GroupTable> {
    pub fn identity_on(group: Arc<GroupTable>) -> Self {
        let map = group.elements().collect();
        Homomorphism {
            source: group.clone(),
            target: group,
            map,
        }
    }

    /// The map `trivial group → target`.
    pub fn from_trivial(target: Arc<GroupTable>) -> Self {
        let id = target.identity();
        Homomorphism {
            source: Arc::new(GroupTable::trivial()),
            target,
            map: vec![id],
        }
    }

    /// Table-backed map with every image range-checked.
    pub fn from_indices(
        source: Arc<GroupTable>,
        target: Arc<GroupTable>,
        map: Vec<usize>,
    ) -> Result<Self, GroupError> {
        if let Some(&bad) = map.iter().find(|&&e| e >= target.order()) {
            return Err(GroupError::ElementOutOfRange(bad));
        }
        Homomorphism::new(source, target, map)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Homomorphism<GroupTable>) -> Result<Self, GroupError> {
        if next.source.order() != self.target.order() {
            return Err(GroupError::MapLength {
                got: next.source.order(),
                expected: self.target.order(),
            });
        }
        let map = self.map.iter().map(|&e| next.map[e]).collect();
        Homomorphism::new(self.source.clone(), next.target.clone(), map)
    }
}

/// True iff multiplicative on all pairs; `embedding` additionally requires
/// injectivity. The first violating pair is reported.
pub fn verify_map<T: FiniteGroup>(f: &Homomorphism<T>) -> MapReport {
    let src = &f.source;
    let tgt = &f.target;
    let mut violation = None;
    'outer: for a in src.elements() {
        for b in src.elements() {
            let lhs = &f.map[src.mul(a, b)];
            let rhs = tgt.mul(&f.map[a], &f.map[b]);
            if *lhs != rhs {
                violation = Some((a, b));
                break 'outer;
            }
        }
    }
    let mut seen: HashMap<&T::Elem, usize> = HashMap::with_capacity(f.map.len());
    let mut collision = None;
    for (i, e) in f.map.iter().enumerate() {
        if let Some(&j) = seen.get(e) {
            collision = Some((j, i));
            break;
        }
        seen.insert(e, i);
    }
    let homomorphism = violation.is_none() && f.map[src.identity()] == tgt.identity();
    MapReport {
        homomorphism,
        embedding: homomorphism && collision.is_none(),
        violation,
        collision,
    }
}
