//! Projections of marked graphs and free factors into free factor complexes of factors,
//! with mixed distances, the Behrstock minimum and the order on overlapping factors.

mod marked;
mod path;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::{meet_projection, overlap_check, FreeFactorClass};
use crate::farey::{diameter, FareyVertex};
use crate::freegroup::{Alphabet, GroupMap, Word};
use crate::stallings::LabeledGraph;

pub use marked::{MarkedEdgeJson, MarkedGraph, MarkedGraphJson};
pub use path::{
    intervals_and_order, nielsen_factorization, IntervalRecord, IntervalReport, PairOrder, TreePath,
};

/// Largest diameter a projection may have.
pub const PROJECTION_DIAMETER_BOUND: u32 = 4;

/// A vertex group of a one-edge collapse, as a class in the ambient group and in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectedClass {
    pub key: String,
    pub gens: Vec<Word>,
    pub gens_in_a: Vec<Word>,
}

/// `π_A(·)`: classes of subfactors of `A`, with Farey coordinates when `A` has rank two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionSet {
    pub classes: Vec<ProjectedClass>,
    pub farey: BTreeSet<FareyVertex>,
}

impl ProjectionSet {
    pub fn keys(&self) -> BTreeSet<String> {
        self.classes.iter().map(|c| c.key.clone()).collect()
    }

    pub fn diameter(&self) -> u32 {
        diameter(&self.farey)
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn push(&mut self, a: &FreeFactorClass, gens: Vec<Word>, gens_in_a: Vec<Word>) -> Result<()> {
        let class = FreeFactorClass::new(a.alphabet(), gens.clone())?;
        if self.classes.iter().any(|c| c.key == class.key()) {
            return Ok(());
        }
        if a.rank() == 2 && gens_in_a.len() == 1 {
            self.farey
                .insert(FareyVertex::of_basis_word(&gens_in_a[0])?);
        }
        self.classes.push(ProjectedClass {
            key: class.key().to_string(),
            gens,
            gens_in_a,
        });
        Ok(())
    }

    fn check_diameter(self) -> Result<Self> {
        let d = self.diameter();
        if d > PROJECTION_DIAMETER_BOUND {
            return Err(Error::ProjectionDiameter(d));
        }
        Ok(self)
    }
}

/// Diameter of the union of two Farey sets.
pub fn union_diameter(x: &ProjectionSet, y: &ProjectionSet) -> u32 {
    diameter(x.farey.iter().chain(y.farey.iter()))
}

/// Maximal chains of edges through valence-two vertices (edge index lists).
fn natural_edges(c: &LabeledGraph) -> Vec<Vec<usize>> {
    let n = c.num_vertices();
    let rank = c.rank_of_alphabet();
    let natural: Vec<bool> = (0..n).map(|v| c.valence(v) >= 3).collect();
    let mut used = vec![false; c.edges().len()];
    let mut out = Vec::new();
    for v in 0..n {
        if !natural[v] {
            continue;
        }
        for slot in 0..2 * rank {
            let l = crate::freegroup::Letter::from_slot(slot);
            let Some((mut w, e, _)) = c.step(v, l) else {
                continue;
            };
            if used[e] {
                continue;
            }
            let mut chain = vec![e];
            used[e] = true;
            while !natural[w] {
                // Leave `w` along its other edge.
                let mut next = None;
                for s in 0..2 * rank {
                    if let Some((x, f, _)) = c.step(w, crate::freegroup::Letter::from_slot(s)) {
                        if !used[f] {
                            next = Some((x, f));
                            break;
                        }
                    }
                }
                let Some((x, f)) = next else { break };
                used[f] = true;
                chain.push(f);
                w = x;
            }
            out.push(chain);
        }
    }
    if out.is_empty() && !c.edges().is_empty() {
        // A circle: one natural edge.
        out.push((0..c.edges().len()).collect());
    }
    out
}

/// `π_A(T)` through the vertex groups of one-edge collapses of the cover core.
pub fn project_tree(a: &FreeFactorClass, t: &MarkedGraph) -> Result<ProjectionSet> {
    if t.alphabet() != a.alphabet() {
        return Err(Error::AlphabetMismatch(
            "factor and marked graph alphabets differ".into(),
        ));
    }
    let cover = t.cover_graph(a.graph());
    // Express loops of the cover in `A`'s basis without reading them through the labels,
    // which can be long and cancel heavily.
    let ya = Alphabet::indexed("y", a.graph().rank());
    let in_cover = a
        .graph()
        .basis()
        .iter()
        .map(|b| cover.membership_rewrite(&t.edge_word_of(b)))
        .collect::<Option<Vec<_>>>()
        .filter(|_| cover.rank() == ya.rank())
        .ok_or_else(|| Error::InvalidMarking("cover does not carry the factor".into()))?;
    let to_a = GroupMap::new(ya.clone(), ya, in_cover)?.invert_automorphism()?;
    let (core, num) = cover.graph().prune(None);
    let mut back = vec![0; core.num_vertices()];
    for (old, n) in num.iter().enumerate() {
        if let Some(n) = n {
            back[*n] = old;
        }
    }
    let mut set = ProjectionSet {
        classes: Vec::new(),
        farey: BTreeSet::new(),
    };
    for chain in natural_edges(&core) {
        let drop: BTreeSet<usize> = chain.iter().copied().collect();
        let rest: Vec<_> = core
            .edges()
            .iter()
            .enumerate()
            .filter(|(e, _)| !drop.contains(e))
            .map(|(_, &x)| x)
            .collect();
        let g = LabeledGraph::new(core.rank_of_alphabet(), core.num_vertices(), None, rest);
        let mut comp_of = vec![0usize; g.num_vertices()];
        let comps = g.components();
        for (i, m) in comps.iter().enumerate() {
            for &v in m {
                comp_of[v] = i;
            }
        }
        let mut count = vec![0usize; comps.len()];
        for &(u, _, _) in g.edges() {
            count[comp_of[u]] += 1;
        }
        for (ci, members) in comps.iter().enumerate() {
            if count[ci] < members.len() {
                continue;
            }
            let root = members[0];
            let st = g.spanning_tree(root);
            let stem = cover.tree_path(back[root]);
            let mut gens = Vec::new();
            let mut gens_in_a = Vec::new();
            for (e, &(x, y, l)) in g.edges().iter().enumerate() {
                if st.tree[e] || comp_of[x] != ci {
                    continue;
                }
                let lp = st.loop_word(x, l, y).expect("component is connected");
                let ew = stem.conjugate(&lp);
                let ina = to_a.apply(&cover.membership_rewrite(&ew).ok_or_else(|| {
                    Error::InvalidMarking("cover loop does not lie in the cover".into())
                })?);
                gens.push(a.graph().ambient_word(&ina));
                gens_in_a.push(ina);
            }
            set.push(a, gens, gens_in_a)?;
        }
    }
    if set.is_empty() {
        return Err(Error::EmptyProjection);
    }
    set.check_diameter()
}

/// `π_A(B)` as a projection set.
pub fn project_factor(a: &FreeFactorClass, b: &FreeFactorClass) -> Result<ProjectionSet> {
    let mut set = ProjectionSet {
        classes: Vec::new(),
        farey: BTreeSet::new(),
    };
    for m in meet_projection(a, b) {
        set.push(a, m.class.gens().to_vec(), m.gens_in_a)?;
    }
    if set.is_empty() {
        return Err(Error::UndefinedProjection(format!(
            "⟨{}⟩ does not meet ⟨{}⟩",
            b.display_gens(),
            a.display_gens()
        )));
    }
    set.check_diameter()
}

/// Something with a projection to `F(A)`.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Tree(&'a MarkedGraph),
    Factor(&'a FreeFactorClass),
}

pub fn project(a: &FreeFactorClass, x: Target<'_>) -> Result<ProjectionSet> {
    match x {
        Target::Tree(t) => project_tree(a, t),
        Target::Factor(b) => project_factor(a, b),
    }
}

/// `d_A(X, Y)` for a rank-two factor.
pub fn projection_distance(a: &FreeFactorClass, x: Target<'_>, y: Target<'_>) -> Result<u32> {
    if a.rank() != 2 {
        return Err(Error::UndefinedProjection(format!(
            "distance needs a rank-two factor, got rank {}",
            a.rank()
        )));
    }
    let px = project(a, x)?;
    let py = project(a, y)?;
    Ok(union_diameter(&px, &py))
}

/// `min(d_A(B, T), d_B(A, T))`.
pub fn behrstock_min(a: &FreeFactorClass, b: &FreeFactorClass, t: &MarkedGraph) -> Result<u32> {
    let d1 = projection_distance(a, Target::Factor(b), Target::Tree(t))?;
    let d2 = projection_distance(b, Target::Factor(a), Target::Tree(t))?;
    Ok(d1.min(d2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrderVerdict {
    /// `A ≺ B`.
    Before,
    /// `B ≺ A`.
    After,
}

/// Verdict and the quantities of the order equivalences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorOrder {
    pub verdict: OrderVerdict,
    /// `d_A(T, B)`.
    pub a_t_b: u32,
    /// `d_B(T, A)`.
    pub b_t_a: u32,
    /// `d_B(T', A)`.
    pub b_t2_a: u32,
    /// `d_A(T', B)`.
    pub a_t2_b: u32,
    pub d_a: u32,
    pub d_b: u32,
    /// All four conditions agree with the verdict.
    pub consistent: bool,
}

/// Precomputed projections used by [`factor_order_from`].
pub struct OrderInputs<'a> {
    pub a_of_t: &'a ProjectionSet,
    pub a_of_t2: &'a ProjectionSet,
    pub a_of_b: &'a ProjectionSet,
    pub b_of_t: &'a ProjectionSet,
    pub b_of_t2: &'a ProjectionSet,
    pub b_of_a: &'a ProjectionSet,
}

/// `A ≺ B` iff `d_A(T, B) >= M + 1`, for overlapping `A, B ∈ Ω(2M + 1, T, T')`.
pub fn factor_order(
    a: &FreeFactorClass,
    b: &FreeFactorClass,
    t: &MarkedGraph,
    t2: &MarkedGraph,
    m: u32,
) -> Result<FactorOrder> {
    if overlap_check(a, b).is_none() {
        return Err(Error::NotOverlapping);
    }
    let inputs = OrderInputs {
        a_of_t: &project_tree(a, t)?,
        a_of_t2: &project_tree(a, t2)?,
        a_of_b: &project_factor(a, b)?,
        b_of_t: &project_tree(b, t)?,
        b_of_t2: &project_tree(b, t2)?,
        b_of_a: &project_factor(b, a)?,
    };
    factor_order_from(&inputs, m)
}

/// [`factor_order`] on precomputed projections; the overlap is the caller's responsibility.
pub fn factor_order_from(p: &OrderInputs<'_>, m: u32) -> Result<FactorOrder> {
    let k = 2 * m + 1;
    let d_a = union_diameter(p.a_of_t, p.a_of_t2);
    let d_b = union_diameter(p.b_of_t, p.b_of_t2);
    if d_a < k || d_b < k {
        return Err(Error::NotInOmega(format!(
            "d_A(T,T') = {d_a}, d_B(T,T') = {d_b}, K = {k}"
        )));
    }
    let a_t_b = union_diameter(p.a_of_t, p.a_of_b);
    let b_t_a = union_diameter(p.b_of_t, p.b_of_a);
    let b_t2_a = union_diameter(p.b_of_t2, p.b_of_a);
    let a_t2_b = union_diameter(p.a_of_t2, p.a_of_b);
    let before = a_t_b > m;
    let consistent = (b_t_a <= m) == before && (b_t2_a > m) == before && (a_t2_b <= m) == before;
    Ok(FactorOrder {
        verdict: if before {
            OrderVerdict::Before
        } else {
            OrderVerdict::After
        },
        a_t_b,
        b_t_a,
        b_t2_a,
        a_t2_b,
        d_a,
        d_b,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{Alphabet, GroupMap};

    fn fv(p: i64, q: i64) -> FareyVertex {
        FareyVertex::new(p, q).unwrap()
    }

    #[test]
    fn rose_projection() {
        let al = Alphabet::standard(3);
        let a = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
        let p = project_tree(&a, &MarkedGraph::rose(&al)).unwrap();
        assert_eq!(p.farey, BTreeSet::from([fv(1, 0), fv(0, 1)]));
        let al2 = Alphabet::standard(2);
        let whole = FreeFactorClass::parse(&al2, &["a", "b"]).unwrap();
        let p = project_tree(&whole, &MarkedGraph::rose(&al2)).unwrap();
        assert_eq!(p.farey, BTreeSet::from([fv(1, 0), fv(0, 1)]));
    }

    #[test]
    fn transformed_rose_projection() {
        let al = Alphabet::standard(2);
        let whole = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
        let f = GroupMap::parse(&al, &["a b", "b"]).unwrap();
        let t = MarkedGraph::rose(&al).transform(&f).unwrap();
        let p = project_tree(&whole, &t).unwrap();
        assert_eq!(p.farey, BTreeSet::from([fv(1, 1), fv(0, 1)]));
    }

    #[test]
    fn example_three_distance() {
        let al = Alphabet::standard(3);
        let a0 = FreeFactorClass::parse(&al, &["a", "c"]).unwrap();
        let a1 = FreeFactorClass::parse(&al, &["a", "b c"]).unwrap();
        let rose = MarkedGraph::rose(&al);
        let d = projection_distance(&a0, Target::Factor(&a1), Target::Tree(&rose)).unwrap();
        assert!(d <= 1);
        assert!(behrstock_min(&a0, &a1, &rose).unwrap() <= 4);
    }
}
