//! Random (f, A, T) triples for the projection invariants, shared with the acceptance target.

#![allow(dead_code)]

use outraag::factors::{transport, FreeFactorClass};
use outraag::freegroup::{Alphabet, GroupMap, Nielsen, Word};
use outraag::projections::{project_tree, MarkedGraph, ProjectionSet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Case {
    pub alphabet: Alphabet,
    pub a: FreeFactorClass,
    pub t: MarkedGraph,
    pub f: GroupMap,
}

fn product(rng: &mut ChaCha8Rng, al: &Alphabet, moves: &[Nielsen], max: usize) -> GroupMap {
    let k = rng.gen_range(0..=max);
    (0..k).fold(GroupMap::identity(al), |f, _| {
        f.compose(&moves[rng.gen_range(0..moves.len())].to_map(al))
            .unwrap()
    })
}

/// A theta graph with a petal per remaining generator: two vertices joined by an empty edge
/// and the edges `a`, `b`.
fn theta(al: &Alphabet) -> MarkedGraph {
    let mut edges = vec![
        (0, 1, Word::identity()),
        (0, 1, Word::gen(0)),
        (0, 1, Word::gen(1)),
    ];
    edges.extend((2..al.rank()).map(|j| (0, 0, Word::gen(j))));
    MarkedGraph::new(al, 2, 0, edges).unwrap()
}

/// A rank-two factor `g⟨a, b⟩`, a tree `h T_0` with `T_0` a rose or theta graph, and a map `f`.
/// When `trivial_on_a`, `f = g u g^-1` with `u` fixing `a` and `b`.
pub fn random_case(rng: &mut ChaCha8Rng, trivial_on_a: bool) -> Case {
    let n = rng.gen_range(3..=4);
    let al = Alphabet::standard(n);
    let all = Nielsen::generators(n);
    let g = product(rng, &al, &all, 6);
    let h = product(rng, &al, &all, 6);
    let base = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
    let a = transport(&g, &base);
    let t0 = if rng.gen_bool(0.5) {
        MarkedGraph::rose(&al)
    } else {
        theta(&al)
    };
    let t = t0.transform(&h).unwrap();
    let f = if trivial_on_a {
        let fixing: Vec<Nielsen> = all
            .iter()
            .copied()
            .filter(|m| match *m {
                Nielsen::Right { i, .. } | Nielsen::Left { i, .. } | Nielsen::Invert { i } => {
                    i >= 2
                }
                Nielsen::Swap { i, j } => i >= 2 && j >= 2,
            })
            .collect();
        let u = product(rng, &al, &fixing, 8);
        let g_inv = g.invert_automorphism().unwrap();
        g.compose(&u).unwrap().compose(&g_inv).unwrap()
    } else {
        product(rng, &al, &all, 8)
    };
    Case {
        alphabet: al,
        a,
        t,
        f,
    }
}

/// `f` applied to every class of `p`.
pub fn transported_keys(f: &GroupMap, p: &ProjectionSet) -> std::collections::BTreeSet<String> {
    p.classes
        .iter()
        .map(|c| {
            let cls = FreeFactorClass::new(f.domain(), c.gens.clone()).unwrap();
            transport(f, &cls).key().to_string()
        })
        .collect()
}

/// `π_{fA}(fT) = f·π_A(T)`, as key sets. Projection errors (including the diameter bound) fail.
pub fn naturality_holds(c: &Case) -> Result<bool, String> {
    let p = project_tree(&c.a, &c.t).map_err(|e| e.to_string())?;
    let ft = c.t.transform(&c.f).map_err(|e| e.to_string())?;
    let fa = transport(&c.f, &c.a);
    let q = project_tree(&fa, &ft).map_err(|e| e.to_string())?;
    Ok(q.keys() == transported_keys(&c.f, &p))
}

/// `π_A(fT) = π_A(T)` for `f` trivial on `A`, as key sets and Farey sets.
pub fn trivial_restriction_holds(c: &Case) -> Result<bool, String> {
    let p = project_tree(&c.a, &c.t).map_err(|e| e.to_string())?;
    let ft = c.t.transform(&c.f).map_err(|e| e.to_string())?;
    let q = project_tree(&c.a, &ft).map_err(|e| e.to_string())?;
    Ok(p.keys() == q.keys() && p.farey == q.farey)
}
