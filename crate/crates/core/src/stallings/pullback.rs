use crate::freegroup::Word;

use super::graph::{LabeledGraph, SubgroupGraph};

/// One nontrivial component of the fiber product of `A` (based) with the core of `B`.
#[derive(Clone, Debug)]
pub struct PullbackComponent {
    /// Smallest product vertex `(vertex of A, vertex of B's core)` in the component.
    pub vertex: (usize, usize),
    /// `g` with the component's subgroup equal to `A ∩ g B g^-1`.
    pub conjugator: Word,
    /// Generators of the intersection as ambient words.
    pub gens: Vec<Word>,
    /// The same generators in `A`'s basis.
    pub gens_in_a: Vec<Word>,
    pub subgroup: SubgroupGraph,
}

impl PullbackComponent {
    pub fn rank(&self) -> usize {
        self.gens.len()
    }
}

/// Components of rank at least one, ordered by their smallest product vertex.
pub fn pullback_components(a: &SubgroupGraph, b: &SubgroupGraph) -> Vec<PullbackComponent> {
    assert_eq!(a.ambient_rank(), b.ambient_rank(), "alphabets differ");
    let rank = a.ambient_rank();
    let ga = a.graph();
    let (bc, num) = b.graph().prune(None);
    if bc.num_vertices() == 0 {
        return Vec::new();
    }
    let mut back = vec![0; bc.num_vertices()];
    for (old, n) in num.iter().enumerate() {
        if let Some(n) = n {
            back[*n] = old;
        }
    }
    let nb = bc.num_vertices();
    let idx = |u: usize, v: usize| u * nb + v;
    let mut edges = Vec::new();
    for &(u, u2, l) in ga.edges() {
        for v in 0..nb {
            if let Some((v2, _, _)) = bc.step(v, l) {
                edges.push((idx(u, v), idx(u2, v2), l));
            }
        }
    }
    let prod = LabeledGraph::new(rank, ga.num_vertices() * nb, None, edges);
    let mut comp_of = vec![0; prod.num_vertices()];
    let comps = prod.components();
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    let mut edge_count = vec![0usize; comps.len()];
    for &(u, _, _) in prod.edges() {
        edge_count[comp_of[u]] += 1;
    }
    let mut out = Vec::new();
    for (c, members) in comps.iter().enumerate() {
        if edge_count[c] < members.len() {
            continue;
        }
        let rep = members[0];
        let (u, v) = (rep / nb, rep % nb);
        let st = prod.spanning_tree(rep);
        let pu = a.tree_path(u);
        let qv = b.tree_path(back[v]);
        let mut gens = Vec::new();
        for (e, &(x, y, l)) in prod.edges().iter().enumerate() {
            if st.tree[e] || comp_of[x] != c {
                continue;
            }
            let lp = st.loop_word(x, l, y).expect("component is connected");
            gens.push(pu.conjugate(&lp));
        }
        let gens_in_a = gens
            .iter()
            .map(|g| a.membership_rewrite(g).expect("component loops lie in A"))
            .collect();
        let subgroup = SubgroupGraph::from_generators(rank, &gens);
        out.push(PullbackComponent {
            vertex: (u, v),
            conjugator: pu.mul_word(&qv.inverse()),
            gens,
            gens_in_a,
            subgroup,
        });
    }
    out
}
