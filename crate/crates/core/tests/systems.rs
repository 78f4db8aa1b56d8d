mod common;

use outraag::factors::FreeFactorClass;
use outraag::freegroup::{Alphabet, GroupMap};
use outraag::raag::{min_set, RaagWord, SimplicialGraph};
use outraag::systems::{
    alt_closed_form, build_support_graph, complexity, example2_fixture, example3_fixture,
    pentagon_gamma, verify_admissible, SystemFixture,
};
use rand::Rng;

use common::{edges_of, graphs_up_to_iso, inner_oracle, map_raw, rng};

/// Rank of the support graph counted by hand from `Γᶜ`: per component, the barycentric
/// subdivision has Betti number `1 + |E| - |V|` and one cyclic vertex group per edge and per
/// leaf, or a rank-two group for an isolated vertex. The wedge adds no rank.
fn rank_by_hand(adj: &[u32]) -> usize {
    let n = adj.len();
    let full = (1u32 << n) - 1;
    let comp_adj: Vec<u32> = (0..n).map(|i| !adj[i] & full & !(1 << i)).collect();
    let mut seen = 0u32;
    let mut total = 0;
    for s in 0..n {
        if seen >> s & 1 == 1 {
            continue;
        }
        let mut comp = 1u32 << s;
        loop {
            let grown = (0..n)
                .filter(|&v| comp >> v & 1 == 1)
                .fold(comp, |m, v| m | comp_adj[v]);
            if grown == comp {
                break;
            }
            comp = grown;
        }
        seen |= comp;
        let verts: Vec<usize> = (0..n).filter(|&v| comp >> v & 1 == 1).collect();
        if verts.len() == 1 {
            total += 2;
            continue;
        }
        let degs: Vec<usize> = verts
            .iter()
            .map(|&v| comp_adj[v].count_ones() as usize)
            .collect();
        let e: usize = degs.iter().sum::<usize>() / 2;
        let leaves = degs.iter().filter(|&&d| d == 1).count();
        total += (1 + e - verts.len()) + e + leaves;
    }
    total
}

#[test]
fn isomorphism_class_counts() {
    let counts: Vec<usize> = (1..=6).map(|n| graphs_up_to_iso(n).len()).collect();
    assert_eq!(counts, [1, 2, 4, 11, 34, 156]);
}

#[test]
fn support_graphs_up_to_six_vertices() {
    for n in 2..=6 {
        for adj in graphs_up_to_iso(n) {
            let g = SimplicialGraph::indexed(n, &edges_of(&adj)).unwrap();
            let s = build_support_graph(&g).unwrap();
            assert_eq!(s.ambient_rank(), complexity(&g), "{:?}", g.edges());
            assert_eq!(s.ambient_rank(), rank_by_hand(&adj), "{:?}", g.edges());
            assert_eq!(s.coincidence_graph().edges(), g.edges());
            for i in 0..n {
                assert!(s.factor(i).rank() >= 2);
                for j in i + 1..n {
                    let r = s.intersection_rank(i, j);
                    if g.adjacent(i, j) {
                        assert_eq!(r, 0);
                    } else {
                        assert!(r >= 1 && r < s.factor(i).rank() && r < s.factor(j).rank());
                    }
                }
            }
        }
    }
}

// The disjointness search is capped at ambient rank 6.
#[test]
fn support_factors_classify_algebraically() {
    let mut tried = 0;
    for n in 2..=4 {
        for adj in graphs_up_to_iso(n) {
            let g = SimplicialGraph::indexed(n, &edges_of(&adj)).unwrap();
            let s = build_support_graph(&g).unwrap();
            if s.ambient_rank() > 6 {
                continue;
            }
            tried += 1;
            let c = verify_admissible(g.names(), s.factors()).unwrap();
            assert_eq!(c.coincidence_graph().edges(), g.edges());
        }
    }
    assert!(tried >= 10, "{tried}");
}

#[test]
fn pentagon_numbers() {
    let g = pentagon_gamma();
    assert_eq!(complexity(&g), 6);
    assert_eq!(alt_closed_form(&g), 11);
    let s = build_support_graph(&g).unwrap();
    assert_eq!(s.ambient_rank(), 6);
    assert_eq!(s.graph().vertices().len(), 10);
    assert_eq!(complexity(&SimplicialGraph::edgeless(2)), 3);
    assert_eq!(complexity(&SimplicialGraph::complete(2)), 4);
}

#[test]
fn shipped_systems_certify() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    for name in ["example1", "example2", "example3"] {
        let text = std::fs::read_to_string(format!("{dir}/{name}.json")).unwrap();
        let loaded = SystemFixture::from_json_str(&text).unwrap().load().unwrap();
        let s = loaded.system(loaded.power, 1 << 20).unwrap();
        let cert = s.certificates();
        assert!(
            cert.support_ok() && cert.commutation_ok() && cert.irreducible_ok(),
            "{name}"
        );
        assert_eq!(s.gamma().edges(), loaded.gamma.edges());
    }
}

fn commutator(f: &GroupMap, g: &GroupMap) -> GroupMap {
    f.compose(g)
        .unwrap()
        .compose(&f.invert_automorphism().unwrap())
        .unwrap()
        .compose(&g.invert_automorphism().unwrap())
        .unwrap()
}

#[test]
fn example_two_commutators_match_oracle() {
    let fx = example2_fixture().unwrap().load().unwrap();
    let s = fx.system(1, 1 << 20).unwrap();
    let g = s.gamma().clone();
    for i in 0..5 {
        for j in i + 1..5 {
            let c = commutator(s.map(i), s.map(j));
            let oracle = inner_oracle(&map_raw(&c)).is_some();
            assert_eq!(oracle, g.adjacent(i, j), "[f{i}, f{j}]");
            assert_eq!(c.is_inner().is_some(), oracle);
        }
    }
}

#[test]
fn disjoint_pair_is_admissible() {
    let al = Alphabet::standard(4);
    let names = vec!["A".to_string(), "B".to_string()];
    let ab = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
    let cd = FreeFactorClass::parse(&al, &["c", "d"]).unwrap();
    assert_eq!(
        verify_admissible(&names, vec![ab.clone(), cd])
            .unwrap()
            .coincidence_graph()
            .edges(),
        [(0, 1)]
    );
    assert!(verify_admissible(&names, vec![ab.clone(), ab]).is_err());
    let fx = example3_fixture().unwrap().load().unwrap();
    assert!(fx
        .collection()
        .unwrap()
        .coincidence_graph()
        .edges()
        .is_empty());
}

#[test]
fn active_factors_agree_across_min_sets() {
    let fx = example2_fixture().unwrap().load().unwrap();
    let s = fx.system(1, 1 << 20).unwrap();
    let g = s.gamma().clone();
    let mut r = rng(51);
    let mut checked = 0;
    for _ in 0..60 {
        let len = r.gen_range(1..=8);
        let pairs: Vec<(usize, i64)> = (0..len)
            .map(|_| (r.gen_range(0..5), if r.gen_bool(0.5) { 1 } else { -1 }))
            .collect();
        let w = RaagWord::from_pairs(&g, &pairs).unwrap();
        let w = outraag::raag::normalize(&g, &w).unwrap();
        if w.is_empty() {
            continue;
        }
        checked += min_set(&g, &w).unwrap().len();
        s.active_factors_checked(&w).unwrap();
    }
    assert!(checked >= 60);
    // A single syllable is active on its own factor; v0 v2 commute, so v2 sees A_2.
    let w = RaagWord::from_pairs(&g, &[(0, 1), (2, 1)]).unwrap();
    assert_eq!(
        s.active_factor(&w, 0).unwrap().key(),
        s.collection().factor(0).key()
    );
    assert_eq!(
        s.active_factor(&w, 1).unwrap().key(),
        s.collection().factor(2).key()
    );
}
