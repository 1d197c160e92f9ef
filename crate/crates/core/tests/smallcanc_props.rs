use std::collections::BTreeSet;
use std::sync::Arc;

use geq_core::group::{builtin, GroupTable};
use geq_core::smallcanc::{fp_normalize, piece_length, symmetrize, RelatorSet, Syllable};
use num_bigint::BigInt;
use proptest::prelude::*;

fn s3() -> Arc<GroupTable> {
    Arc::new(builtin("S3").unwrap())
}

fn syllables() -> impl Strategy<Value = Vec<Syllable>> {
    let s = prop_oneof![
        (0..6usize).prop_map(Syllable::Q),
        (-3i64..=3).prop_map(|e| Syllable::T(BigInt::from(e))),
    ];
    prop::collection::vec(s, 0..16)
}

fn is_normal(q: &GroupTable, s: &[Syllable]) -> bool {
    let nontrivial = s.iter().all(|x| match x {
        Syllable::Q(g) => *g != q.identity(),
        Syllable::T(e) => *e != BigInt::from(0),
    });
    let alternating = s.windows(2).all(|w| {
        !matches!(
            (&w[0], &w[1]),
            (Syllable::Q(_), Syllable::Q(_)) | (Syllable::T(_), Syllable::T(_))
        )
    });
    nontrivial && alternating
}

proptest! {
    #[test]
    fn normalize_is_idempotent_and_alternating(tokens in syllables()) {
        let q = s3();
        let w = fp_normalize(&q, tokens);
        prop_assert!(is_normal(&q, w.syllables()));
        let again = fp_normalize(&q, w.syllables().to_vec());
        prop_assert_eq!(again, w);
    }

    #[test]
    fn free_product_is_a_group(a in syllables(), b in syllables(), c in syllables()) {
        let q = s3();
        let (a, b, c) = (fp_normalize(&q, a), fp_normalize(&q, b), fp_normalize(&q, c));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_empty());
        prop_assert!(a.inverse().mul(&a).is_empty());
    }

    #[test]
    fn symmetrized_sets_are_closed(rels in prop::collection::vec(syllables(), 1..3)) {
        let q = s3();
        let words: Vec<_> = rels.into_iter().map(|r| fp_normalize(&q, r)).collect();
        let Ok(sym) = symmetrize(&RelatorSet::new(q.clone(), words)) else {
            return Ok(());
        };
        prop_assert!(sym.is_symmetrized());
        let members: BTreeSet<Vec<Syllable>> =
            sym.relators().iter().map(|r| r.syllables().to_vec()).collect();
        prop_assert_eq!(members.len(), sym.len());
        for r in sym.relators() {
            prop_assert!(is_normal(&q, r.syllables()));
            prop_assert!(members.contains(r.inverse().weak_cyclic_reduce().syllables()));
            for k in 0..r.len() {
                prop_assert!(members.contains(r.rotate(k).syllables()));
            }
        }
        let twice = symmetrize(&sym).unwrap();
        prop_assert_eq!(twice.relators(), sym.relators());
    }

    #[test]
    fn pieces_are_symmetric_and_bounded(a in syllables(), b in syllables()) {
        let (pa, pb) = (piece_length(&a, &b), piece_length(&b, &a));
        prop_assert_eq!(pa, pb);
        prop_assert!(pa <= a.len().min(b.len()));
        prop_assert_eq!(piece_length(&a, &a), a.len());
    }
}
