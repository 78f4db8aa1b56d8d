mod common;

use outraag::factors::{
    disjoint_check, is_free_factor, meet_projection, overlap_check, transport, FreeFactorClass,
};
use outraag::freegroup::{Alphabet, GroupMap, Word};
use outraag::stallings::{pullback_components, SubgroupGraph};
use proptest::prelude::*;

use common::{naive_fold, random_nielsen_product, random_word, raw, rng};

fn gens_strategy(rank: usize) -> impl Strategy<Value = Vec<Vec<i32>>> {
    let r = rank as i32;
    prop::collection::vec(
        prop::collection::vec(prop_oneof![-r..=-1, 1..=r], 1..10),
        1..4,
    )
}

fn to_word(w: &[i32]) -> Word {
    Word::from_signed(w)
}

proptest! {
    #[test]
    fn fold_matches_naive_identification(gens in gens_strategy(3)) {
        let words: Vec<Word> = gens.iter().map(|g| to_word(g)).collect();
        let reduced: Vec<Vec<i32>> = words.iter().map(raw).filter(|w| !w.is_empty()).collect();
        let h = SubgroupGraph::from_generators(3, &words);
        let (v, e) = naive_fold(&reduced);
        prop_assert_eq!(h.graph().num_vertices(), v);
        prop_assert_eq!(h.graph().edges().len(), e);
        prop_assert_eq!(h.rank(), e + 1 - v);
    }

    #[test]
    fn products_of_generators_are_members(gens in gens_strategy(3), picks in prop::collection::vec((0usize..4, any::<bool>()), 0..8)) {
        let words: Vec<Word> = gens.iter().map(|g| to_word(g)).collect();
        let h = SubgroupGraph::from_generators(3, &words);
        let mut p = Word::identity();
        for (k, inv) in picks {
            let g = &words[k % words.len()];
            p = p.mul_word(&if inv { g.inverse() } else { g.clone() });
        }
        prop_assert!(h.contains(&p));
        let r = h.membership_rewrite(&p).unwrap();
        prop_assert_eq!(h.ambient_word(&r), p);
        for b in h.basis() {
            prop_assert!(h.contains(b));
        }
    }

    #[test]
    fn intersections_lie_in_both(a in gens_strategy(2), b in gens_strategy(2)) {
        let ga = SubgroupGraph::from_generators(2, &a.iter().map(|g| to_word(g)).collect::<Vec<_>>());
        let gb = SubgroupGraph::from_generators(2, &b.iter().map(|g| to_word(g)).collect::<Vec<_>>());
        for c in pullback_components(&ga, &gb) {
            for g in &c.gens {
                prop_assert!(ga.contains(g));
                // g ∈ cBc^-1, i.e. c^-1 g c ∈ B.
                prop_assert!(gb.contains(&c.conjugator.inverse().conjugate(g)));
            }
        }
    }
}

#[test]
fn canonical_core_is_a_conjugacy_invariant() {
    let mut r = rng(21);
    for _ in 0..200 {
        let gens: Vec<Word> = (0..2)
            .map(|_| random_word(&mut r, 3, 8))
            .filter(|w| !w.is_empty())
            .collect();
        if gens.is_empty() {
            continue;
        }
        let c = random_word(&mut r, 3, 6);
        let conj: Vec<Word> = gens.iter().map(|g| c.conjugate(g)).collect();
        let h = SubgroupGraph::from_generators(3, &gens);
        let k = SubgroupGraph::from_generators(3, &conj);
        assert_eq!(h.canonical_core().unwrap(), k.canonical_core().unwrap());
    }
}

#[test]
fn simple_intersections() {
    let al = Alphabet::standard(2);
    let w = |s: &str| al.parse_word(s).unwrap();
    // The base component of the product has 3 vertices and 4 edges: ⟨a^2, b^2⟩.
    let ga = SubgroupGraph::from_generators(2, &[w("a"), w("b b")]);
    let gb = SubgroupGraph::from_generators(2, &[w("a a"), w("b")]);
    let base = pullback_components(&ga, &gb)
        .into_iter()
        .find(|c| c.conjugator.is_empty())
        .unwrap();
    assert_eq!(base.rank(), 2);
    assert!(base.gens.iter().all(|g| ga.contains(g) && gb.contains(g)));
    assert!(pullback_components(
        &SubgroupGraph::from_generators(2, &[w("a")]),
        &SubgroupGraph::from_generators(2, &[w("b")])
    )
    .iter()
    .all(|c| c.rank() == 0));
}

#[test]
fn worked_example_meets_and_overlaps() {
    let al = Alphabet::standard(3);
    let factor = |i: usize| {
        let bic = format!("{}c", "b ".repeat(i));
        FreeFactorClass::parse(&al, &["a", &bic]).unwrap()
    };
    let x = FreeFactorClass::parse(&al, &["a"]).unwrap();
    for i in 0..5 {
        for j in i + 1..5 {
            let (a, b) = (factor(i), factor(j));
            let m = meet_projection(&a, &b);
            assert_eq!(m.len(), 1, "{i} {j}");
            assert_eq!(m[0].class.key(), x.key());
            let o = overlap_check(&a, &b).unwrap();
            assert_eq!(o.x.key(), x.key());
            assert_eq!(o.join_rank, 3);
            assert!(!disjoint_check(&a, &b).unwrap());
        }
    }
}

#[test]
fn disjoint_and_free_factors() {
    let al = Alphabet::standard(3);
    let a = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
    let c = FreeFactorClass::parse(&al, &["c"]).unwrap();
    assert!(disjoint_check(&a, &c).unwrap());
    assert!(meet_projection(&a, &c).is_empty());
    let h = SubgroupGraph::from_generators(3, &[al.parse_word("a b a^-1 b^-1").unwrap()]);
    assert!(!is_free_factor(&h).unwrap());
    let mut r = rng(22);
    for _ in 0..50 {
        let f: GroupMap = random_nielsen_product(&mut r, &al, 8);
        let fa = transport(&f, &a);
        assert!(is_free_factor(fa.graph()).unwrap());
    }
}
