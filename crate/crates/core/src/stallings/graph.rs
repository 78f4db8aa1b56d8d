use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Alphabet, Letter, Word};

use super::fold::{Folded, Folder};

/// Folded graph with edges labelled by letters of a rank-`rank` alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    rank: usize,
    num_vertices: usize,
    base: Option<usize>,
    edges: Vec<(usize, usize, Letter)>,
    /// `out[v * 2 * rank + slot] = (target, edge, forward)`.
    out: Vec<Option<(usize, usize, bool)>>,
}

impl LabeledGraph {
    /// Build from folded data; panics if two edges at a vertex share a label.
    pub fn new(
        rank: usize,
        num_vertices: usize,
        base: Option<usize>,
        edges: Vec<(usize, usize, Letter)>,
    ) -> Self {
        let s = 2 * rank;
        let mut out = vec![None; num_vertices * s];
        for (e, &(u, v, l)) in edges.iter().enumerate() {
            let a = u * s + l.slot();
            assert!(out[a].is_none(), "graph is not folded");
            out[a] = Some((v, e, true));
            let b = v * s + l.inverse().slot();
            assert!(out[b].is_none(), "graph is not folded");
            out[b] = Some((u, e, false));
        }
        LabeledGraph {
            rank,
            num_vertices,
            base,
            edges,
            out,
        }
    }

    pub fn rank_of_alphabet(&self) -> usize {
        self.rank
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn base(&self) -> Option<usize> {
        self.base
    }

    pub fn edges(&self) -> &[(usize, usize, Letter)] {
        &self.edges
    }

    /// First Betti number of a connected graph.
    pub fn betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.num_vertices)
    }

    pub fn step(&self, v: usize, l: Letter) -> Option<(usize, usize, bool)> {
        self.out[v * 2 * self.rank + l.slot()]
    }

    pub fn valence(&self, v: usize) -> usize {
        let s = 2 * self.rank;
        self.out[v * s..(v + 1) * s].iter().flatten().count()
    }

    /// Follow `w` from `start`.
    pub fn read(&self, start: usize, w: &Word) -> Option<usize> {
        let mut v = start;
        for &l in w.letters() {
            v = self.step(v, l)?.0;
        }
        Some(v)
    }

    /// Drop valence-one vertices repeatedly, keeping `keep` if given.
    pub fn prune(&self, keep: Option<usize>) -> (LabeledGraph, Vec<Option<usize>>) {
        let n = self.num_vertices;
        let mut val: Vec<usize> = (0..n).map(|v| self.valence(v)).collect();
        let mut dead_v = vec![false; n];
        let mut dead_e = vec![false; self.edges.len()];
        let mut stack: Vec<usize> = (0..n).filter(|&v| val[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if dead_v[v] || Some(v) == keep || val[v] > 1 {
                continue;
            }
            if val[v] == 0 {
                // An isolated vertex only survives if it is the kept base.
                dead_v[v] = true;
                continue;
            }
            dead_v[v] = true;
            let s = 2 * self.rank;
            for slot in 0..s {
                if let Some((w, e, _)) = self.out[v * s + slot] {
                    if !dead_e[e] {
                        dead_e[e] = true;
                        val[v] -= 1;
                        val[w] -= 1;
                        if val[w] <= 1 {
                            stack.push(w);
                        }
                    }
                }
            }
        }
        let mut num = vec![None; n];
        let mut k = 0;
        for v in 0..n {
            if !dead_v[v] {
                num[v] = Some(k);
                k += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(e, _)| !dead_e[*e])
            .map(|(_, &(u, v, l))| (num[u].unwrap(), num[v].unwrap(), l))
            .collect();
        let base = self.base.and_then(|b| num[b]);
        (LabeledGraph::new(self.rank, k, base, edges), num)
    }

    /// Breadth-first spanning tree from `root`: per vertex the label of the tree path and
    /// per edge whether it is a tree edge.
    pub fn spanning_tree(&self, root: usize) -> SpanningTree {
        let mut parent: Vec<Option<(usize, Letter)>> = vec![None; self.num_vertices];
        let mut reached = vec![false; self.num_vertices];
        let mut tree = vec![false; self.edges.len()];
        reached[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for slot in 0..2 * self.rank {
                let l = Letter::from_slot(slot);
                if let Some((w, e, _)) = self.step(v, l) {
                    if !reached[w] {
                        reached[w] = true;
                        parent[w] = Some((v, l));
                        tree[e] = true;
                        q.push_back(w);
                    }
                }
            }
        }
        SpanningTree {
            parent,
            reached,
            tree,
        }
    }

    /// Connected components as vertex lists in increasing order.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.num_vertices];
        let mut out = Vec::new();
        for s in 0..self.num_vertices {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for slot in 0..2 * self.rank {
                    if let Some((w, _, _)) = self.out[v * 2 * self.rank + slot] {
                        if comp[w] == usize::MAX {
                            comp[w] = id;
                            members.push(w);
                        }
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Canonical code of the graph read from `start`: vertex count plus sorted edge triples.
    fn code_from(&self, start: usize) -> Vec<(usize, usize, usize)> {
        let mut num = vec![usize::MAX; self.num_vertices];
        num[start] = 0;
        let mut order = vec![start];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for slot in 0..2 * self.rank {
                if let Some((w, _, _)) = self.step(v, Letter::from_slot(slot)) {
                    if num[w] == usize::MAX {
                        num[w] = order.len();
                        order.push(w);
                    }
                }
            }
        }
        let mut code: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v, l)| {
                if l.is_inverse() {
                    (num[v], l.gen(), num[u])
                } else {
                    (num[u], l.gen(), num[v])
                }
            })
            .collect();
        code.sort_unstable();
        code
    }

    /// The code from `start` if it is smaller than `best`, built in sorted order so that a
    /// losing start is abandoned at its first larger triple. `None` also when the graph is
    /// not folded and connected, where the stream is not the sorted code.
    fn code_below(
        &self,
        start: usize,
        best: Option<&[(usize, usize, usize)]>,
    ) -> Option<Vec<(usize, usize, usize)>> {
        let mut num = vec![usize::MAX; self.num_vertices];
        num[start] = 0;
        let mut order = vec![start];
        let mut code = Vec::with_capacity(self.edges.len());
        let mut below = best.is_none();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for slot in 0..2 * self.rank {
                if let Some((w, _, _)) = self.step(v, Letter::from_slot(slot)) {
                    if num[w] == usize::MAX {
                        num[w] = order.len();
                        order.push(w);
                    }
                }
            }
            for g in 0..self.rank {
                if let Some((w, _, _)) = self.step(v, Letter::new(g, true)) {
                    let t = (i, g, num[w]);
                    if !below {
                        match best.and_then(|b| b.get(code.len())) {
                            Some(b) if t > *b => return None,
                            Some(b) if t < *b => below = true,
                            Some(_) => {}
                            None => return None,
                        }
                    }
                    code.push(t);
                }
            }
            i += 1;
        }
        (below && code.len() == self.edges.len()).then_some(code)
    }

    fn is_folded_connected(&self) -> bool {
        let mut seen = vec![0u8; self.num_vertices * 2 * self.rank];
        for &(u, v, l) in &self.edges {
            for (x, s) in [(u, l.slot()), (v, l.inverse().slot())] {
                let k = x * 2 * self.rank + s;
                if seen[k] == 1 {
                    return false;
                }
                seen[k] = 1;
            }
        }
        self.num_vertices > 0 && self.components().len() == 1
    }

    /// Minimal code over all start vertices, as a stable string.
    pub fn canonical_code(&self) -> String {
        let best = if self.is_folded_connected() {
            let mut best: Option<Vec<(usize, usize, usize)>> = None;
            for s in 0..self.num_vertices {
                if let Some(c) = self.code_below(s, best.as_deref()) {
                    best = Some(c);
                }
            }
            best.unwrap_or_default()
        } else {
            (0..self.num_vertices)
                .map(|s| self.code_from(s))
                .min()
                .unwrap_or_default()
        };
        let mut out = format!("V{}|", self.num_vertices);
        for (i, (a, g, b)) in best.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(&format!("{a}.{g}.{b}"));
        }
        out
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> GraphJson {
        GraphJson {
            vertices: (0..self.num_vertices).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(u, v, l)| EdgeJson {
                    from: u,
                    to: v,
                    label: alphabet.format_word(&Word::letter(l)),
                })
                .collect(),
            base: self.base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeJson>,
    pub base: Option<usize>,
}

/// Breadth-first spanning tree stored by parent pointers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    parent: Vec<Option<(usize, Letter)>>,
    reached: Vec<bool>,
    /// Per edge: whether it lies in the tree.
    pub tree: Vec<bool>,
}

impl SpanningTree {
    /// Label of the tree path from the root to `v`, if `v` is reached.
    pub fn path(&self, v: usize) -> Option<Word> {
        if !self.reached[v] {
            return None;
        }
        let mut rev = Vec::new();
        let mut x = v;
        while let Some((p, l)) = self.parent[x] {
            rev.push(l);
            x = p;
        }
        rev.reverse();
        Some(Word::reduce(rev))
    }

    /// Tree word `path(u) · l · path(v)^-1` of an edge `u -l-> v`.
    pub fn loop_word(&self, u: usize, l: Letter, v: usize) -> Option<Word> {
        Some(
            self.path(u)?
                .mul_word(&Word::letter(l))
                .mul_word(&self.path(v)?.inverse()),
        )
    }
}

/// Based folded core graph of a finitely generated subgroup, with a fixed free basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupGraph {
    graph: LabeledGraph,
    /// Spanning tree at the base.
    tree: SpanningTree,
    /// Per edge: basis index and whether the basis element crosses the edge forwards.
    edge_basis: Vec<Option<(usize, bool)>>,
    basis: Vec<Word>,
}

impl SubgroupGraph {
    /// Stallings graph of `⟨gens⟩ ≤ F_rank`.
    pub fn from_generators(rank: usize, gens: &[Word]) -> Self {
        let mut f = Folder::new(rank, false);
        for g in gens {
            f.add_loop(0, g, Word::identity());
        }
        Self::from_folded(rank, f.fold(), gens)
    }

    pub(crate) fn from_folded(rank: usize, folded: Folded, order_hint: &[Word]) -> Self {
        let edges = folded.edges.iter().map(|&(u, v, l, _)| (u, v, l)).collect();
        let g = LabeledGraph::new(rank, folded.num_vertices, Some(folded.base), edges);
        let (core, _) = g.prune(Some(folded.base));
        Self::from_core(core, order_hint)
    }

    fn from_core(graph: LabeledGraph, order_hint: &[Word]) -> Self {
        let base = graph.base.expect("subgroup graphs are based");
        let st = graph.spanning_tree(base);
        let tree = &st.tree;
        // Number non-tree edges in order of first traversal by the hint words.
        let mut edge_basis: Vec<Option<(usize, bool)>> = vec![None; graph.edges.len()];
        let mut basis = Vec::new();
        let assign = |e: usize,
                      forward: bool,
                      basis: &mut Vec<Word>,
                      eb: &mut Vec<Option<(usize, bool)>>| {
            if tree[e] || eb[e].is_some() {
                return;
            }
            let (u, v, l) = graph.edges[e];
            let w = if forward {
                st.loop_word(u, l, v)
            } else {
                st.loop_word(v, l.inverse(), u)
            }
            .expect("core graph is connected");
            eb[e] = Some((basis.len(), forward));
            basis.push(w);
        };
        for h in order_hint {
            let mut v = base;
            for &l in h.letters() {
                match graph.step(v, l) {
                    Some((w, e, fwd)) => {
                        assign(e, fwd, &mut basis, &mut edge_basis);
                        v = w;
                    }
                    None => break,
                }
            }
        }
        for e in 0..graph.edges.len() {
            assign(e, true, &mut basis, &mut edge_basis);
        }
        SubgroupGraph {
            graph,
            tree: st,
            edge_basis,
            basis,
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn ambient_rank(&self) -> usize {
        self.graph.rank
    }

    pub fn base(&self) -> usize {
        self.graph.base.unwrap()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Free basis read off the spanning tree.
    pub fn basis(&self) -> &[Word] {
        &self.basis
    }

    /// Label of the spanning-tree path from the base to `v`.
    pub fn tree_path(&self, v: usize) -> Word {
        self.tree.path(v).expect("core graph is connected")
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.graph.read(self.base(), w) == Some(self.base())
    }

    /// Express `w` in the basis, or `None` if `w` is not in the subgroup.
    pub fn membership_rewrite(&self, w: &Word) -> Option<Word> {
        self.rewrite_path(self.base(), w, self.base())
    }

    /// Basis word of the loop `tree(start) · w · tree(end)^-1` when `w` reads a path
    /// from `start` to `end`.
    pub fn rewrite_path(&self, start: usize, w: &Word, end: usize) -> Option<Word> {
        let mut v = start;
        let mut out = Word::identity();
        for &l in w.letters() {
            let (t, e, fwd) = self.graph.step(v, l)?;
            if let Some((idx, bf)) = self.edge_basis[e] {
                out.push(Letter::new(idx, bf == fwd));
            }
            v = t;
        }
        (v == end).then_some(out)
    }

    /// Conjugacy-class key: canonical code of the unbased core.
    pub fn canonical_core(&self) -> Result<String> {
        if self.is_trivial() {
            return Err(Error::TrivialSubgroup);
        }
        Ok(self.unbased_core().canonical_code())
    }

    pub fn unbased_core(&self) -> LabeledGraph {
        let (core, _) = self.graph.prune(None);
        LabeledGraph::new(core.rank, core.num_vertices, None, core.edges)
    }

    /// Number of edges of the unbased core.
    pub fn core_size(&self) -> usize {
        self.graph.prune(None).0.edges.len()
    }

    /// The subgroup `⟨gens⟩` after substituting basis words; gens are basis-alphabet words.
    pub fn ambient_words(&self, gens: &[Word]) -> Vec<Word> {
        gens.iter().map(|g| self.ambient_word(g)).collect()
    }

    /// Substitute the basis into a word over the basis alphabet.
    pub fn ambient_word(&self, g: &Word) -> Word {
        let mut out = Word::identity();
        for &l in g.letters() {
            let b = &self.basis[l.gen()];
            if l.is_inverse() {
                out.push_word(&b.inverse());
            } else {
                out.push_word(b);
            }
        }
        out
    }
}
