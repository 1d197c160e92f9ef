use std::sync::Arc;

use super::{FiniteGroup, GroupTable};

/// `G ≀ ℤₙ` without a multiplication table: elements are a base coordinate
/// vector plus a rotation. Used for witnesses whose order makes a table
/// impractical.
///
/// `(f, s)·(f', s') = (i ↦ f(i)·f'(i+s), s+s')`, so the shift `(1, 1)` moves
/// coordinate `i+1` into position `i` under conjugation.
#[derive(Debug, Clone)]
pub struct WreathCyclic {
    base: Arc<GroupTable>,
    n: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WreathElem {
    pub coords: Vec<usize>,
    pub shift: usize,
}

impl WreathCyclic {
    pub fn new(base: Arc<GroupTable>, n: usize) -> Self {
        assert!(n >= 1, "wreath product needs a nontrivial top cycle length");
        WreathCyclic { base, n }
    }

    pub fn base(&self) -> &Arc<GroupTable> {
        &self.base
    }

    pub fn cycle_length(&self) -> usize {
        self.n
    }

    /// `|G|ⁿ · n`, or `None` on overflow.
    pub fn checked_order(&self) -> Option<u64> {
        let mut acc: u64 = self.n as u64;
        for _ in 0..self.n {
            acc = acc.checked_mul(self.base.order() as u64)?;
        }
        Some(acc)
    }

    pub fn shift(&self) -> WreathElem {
        WreathElem {
            coords: vec![self.base.identity(); self.n],
            shift: 1 % self.n,
        }
    }

    pub fn base_element(&self, coords: Vec<usize>) -> WreathElem {
        assert_eq!(coords.len(), self.n);
        WreathElem { coords, shift: 0 }
    }

    /// `g ↦ (g, …, g, 1, …, 1)` with `copies` leading copies.
    pub fn prefix(&self, g: usize, copies: usize) -> WreathElem {
        let id = self.base.identity();
        let coords = (0..self.n).map(|i| if i < copies { g } else { id }).collect();
        WreathElem { coords, shift: 0 }
    }

    /// Mixed-radix index: shift-major, coordinate 0 most significant.
    pub fn index_of(&self, e: &WreathElem) -> usize {
        let m = self.base.order();
        let mut idx = e.shift;
        for &c in &e.coords {
            idx = idx * m + c;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> WreathElem {
        let m = self.base.order();
        let mut coords = vec![0; self.n];
        for slot in coords.iter_mut().rev() {
            *slot = idx % m;
            idx /= m;
        }
        WreathElem { coords, shift: idx }
    }
}

impl FiniteGroup for WreathCyclic {
    type Elem = WreathElem;

    fn identity(&self) -> WreathElem {
        WreathElem {
            coords: vec![self.base.identity(); self.n],
            shift: 0,
        }
    }

    fn mul(&self, a: &WreathElem, b: &WreathElem) -> WreathElem {
        let coords = (0..self.n)
            .map(|i| self.base.mul(a.coords[i], b.coords[(i + a.shift) % self.n]))
            .collect();
        WreathElem {
            coords,
            shift: (a.shift + b.shift) % self.n,
        }
    }

    fn inv(&self, a: &WreathElem) -> WreathElem {
        // (f, s)⁻¹ = (j ↦ f(j - s)⁻¹, -s)
        let n = self.n;
        let coords = (0..n)
            .map(|j| self.base.inv(a.coords[(j + n - a.shift) % n]))
            .collect();
        WreathElem {
            coords,
            shift: (n - a.shift) % n,
        }
    }

    fn order(&self) -> u64 {
        self.checked_order().unwrap_or(u64::MAX)
    }
}
