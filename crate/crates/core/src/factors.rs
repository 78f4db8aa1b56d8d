//! Free factors up to conjugacy: meeting, overlapping and disjoint pairs, the Whitehead
//! free-factor test and transport under automorphisms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freegroup::{Alphabet, GroupMap, Letter, Word};
use crate::stallings::fold::Folder;
use crate::stallings::{pullback_components, LabeledGraph, SubgroupGraph};

/// Largest ambient rank accepted by the Whitehead search.
pub const WHITEHEAD_RANK_BOUND: usize = 6;

/// Conjugacy class of a (candidate) free factor, with a chosen representative.
#[derive(Clone, Debug)]
pub struct FreeFactorClass {
    alphabet: Alphabet,
    gens: Vec<Word>,
    graph: SubgroupGraph,
    key: String,
    verified: bool,
}

impl PartialEq for FreeFactorClass {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.alphabet == other.alphabet
    }
}

impl Eq for FreeFactorClass {}

impl FreeFactorClass {
    pub fn new(alphabet: &Alphabet, gens: Vec<Word>) -> Result<Self> {
        let graph = SubgroupGraph::from_generators(alphabet.rank(), &gens);
        let key = graph.canonical_core()?;
        Ok(FreeFactorClass {
            alphabet: alphabet.clone(),
            gens,
            graph,
            key,
            verified: false,
        })
    }

    pub fn parse(alphabet: &Alphabet, gens: &[&str]) -> Result<Self> {
        let gens = gens
            .iter()
            .map(|s| alphabet.parse_word(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, gens)
    }

    /// Run the Whitehead test and set the verified flag.
    pub fn certify(mut self) -> Result<Self> {
        if !is_free_factor(&self.graph)? {
            return Err(Error::NotFreeFactor(format!("⟨{}⟩", self.display_gens())));
        }
        self.verified = true;
        Ok(self)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn gens(&self) -> &[Word] {
        &self.gens
    }

    pub fn graph(&self) -> &SubgroupGraph {
        &self.graph
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn rank(&self) -> usize {
        self.graph.rank()
    }

    /// The basis read from the Stallings graph; coordinates inside the factor refer to it.
    pub fn basis(&self) -> &[Word] {
        self.graph.basis()
    }

    pub fn display_gens(&self) -> String {
        self.gens
            .iter()
            .map(|g| self.alphabet.format_word(g))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// A nontrivial intersection `A ∩ g B g^-1`, as a class and in `A`'s basis.
#[derive(Clone, Debug)]
pub struct Intersection {
    pub class: FreeFactorClass,
    pub conjugator: Word,
    pub gens_in_a: Vec<Word>,
}

/// `π_A(B)`: classes of nontrivial intersections that are proper in both factors.
pub fn meet_projection(a: &FreeFactorClass, b: &FreeFactorClass) -> Vec<Intersection> {
    let bound = a.rank().min(b.rank());
    let mut out: Vec<Intersection> = Vec::new();
    for comp in pullback_components(a.graph(), b.graph()) {
        let r = comp.rank();
        if r == 0 || r >= bound {
            continue;
        }
        let Ok(class) = FreeFactorClass::new(&a.alphabet, comp.gens.clone()) else {
            continue;
        };
        if class.key == a.key || class.key == b.key {
            continue;
        }
        if out.iter().any(|x| x.class.key == class.key) {
            continue;
        }
        out.push(Intersection {
            class,
            conjugator: comp.conjugator,
            gens_in_a: comp.gens_in_a,
        });
    }
    out
}

#[derive(Clone, Debug)]
pub struct Overlap {
    pub x: FreeFactorClass,
    pub conjugator: Word,
    pub join: SubgroupGraph,
    pub join_rank: usize,
}

/// First double coset whose intersection `x` gives `rank⟨A, gBg^-1⟩ = rank A + rank B - rank x`.
pub fn overlap_check(a: &FreeFactorClass, b: &FreeFactorClass) -> Option<Overlap> {
    for m in meet_projection(a, b) {
        let join = join(a, b, &m.conjugator);
        let r = join.rank();
        if r + m.class.rank() == a.rank() + b.rank() {
            return Some(Overlap {
                x: m.class,
                conjugator: m.conjugator,
                join_rank: r,
                join,
            });
        }
    }
    None
}

/// `⟨A, g B g^-1⟩`.
pub fn join(a: &FreeFactorClass, b: &FreeFactorClass, g: &Word) -> SubgroupGraph {
    let mut gens: Vec<Word> = a.gens.clone();
    gens.extend(b.gens.iter().map(|w| g.conjugate(w)));
    SubgroupGraph::from_generators(a.alphabet.rank(), &gens)
}

/// Candidate conjugators: `1` and every `p_u q_v^-1` for vertices `u` of `A`'s graph and
/// `v` of `B`'s graph. Returns the first `g` with `⟨A, gBg^-1⟩` a free factor of rank
/// `rank A + rank B`.
pub fn disjoint_witness(a: &FreeFactorClass, b: &FreeFactorClass) -> Result<Option<Word>> {
    let n = a.alphabet.rank();
    let target = a.rank() + b.rank();
    if target > n {
        return Ok(None);
    }
    if n > WHITEHEAD_RANK_BOUND {
        return Err(Error::AmbientTooLarge {
            rank: n,
            bound: WHITEHEAD_RANK_BOUND,
        });
    }
    let mut cands = vec![Word::identity()];
    let (ga, gb) = (a.graph(), b.graph());
    for u in 0..ga.graph().num_vertices() {
        for v in 0..gb.graph().num_vertices() {
            let g = ga.tree_path(u).mul_word(&gb.tree_path(v).inverse());
            if !cands.contains(&g) {
                cands.push(g);
            }
        }
    }
    for g in cands {
        let h = join(a, b, &g);
        if h.rank() == target && is_free_factor(&h)? {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

pub fn disjoint_check(a: &FreeFactorClass, b: &FreeFactorClass) -> Result<bool> {
    Ok(disjoint_witness(a, b)?.is_some())
}

/// Edge count of the unbased core of `⟨gens⟩`.
fn core_edges(rank: usize, gens: &[Word]) -> usize {
    let mut f = Folder::new(rank, false);
    for g in gens {
        f.add_loop(0, g, Word::identity());
    }
    let folded = f.fold();
    let edges = folded.edges.iter().map(|&(u, v, l, _)| (u, v, l)).collect();
    LabeledGraph::new(rank, folded.num_vertices, None, edges)
        .prune(None)
        .0
        .edges()
        .len()
}

/// All Whitehead automorphisms of the second kind: a multiplier letter `a` and, for every
/// other generator, one of `x, x a, a^-1 x, a^-1 x a`. The identity choices are skipped.
pub fn whitehead_automorphisms(alphabet: &Alphabet) -> Vec<GroupMap> {
    let n = alphabet.rank();
    let mut out = Vec::new();
    for slot in 0..2 * n {
        let a = Letter::from_slot(slot);
        let aw = Word::letter(a);
        let ai = aw.inverse();
        let combos = 4usize.pow((n - 1) as u32);
        for code in 1..combos {
            let mut c = code;
            let mut images = Vec::with_capacity(n);
            for k in 0..n {
                let x = Word::gen(k);
                if k == a.gen() {
                    images.push(x);
                    continue;
                }
                let img = match c % 4 {
                    0 => x,
                    1 => x.mul_word(&aw),
                    2 => ai.mul_word(&x),
                    _ => ai.mul_word(&x).mul_word(&aw),
                };
                c /= 4;
                images.push(img);
            }
            let f = GroupMap::new(alphabet.clone(), alphabet.clone(), images)
                .expect("images lie in the alphabet");
            out.push(f);
        }
    }
    out
}

/// Greedy Whitehead descent on the core size; true iff the minimum is a sub-rose.
pub fn is_free_factor(h: &SubgroupGraph) -> Result<bool> {
    let n = h.ambient_rank();
    if n > WHITEHEAD_RANK_BOUND {
        return Err(Error::AmbientTooLarge {
            rank: n,
            bound: WHITEHEAD_RANK_BOUND,
        });
    }
    let r = h.rank();
    if r == 0 || r > n {
        return Ok(false);
    }
    let alphabet = Alphabet::standard(n);
    let autos = whitehead_automorphisms(&alphabet);
    let mut gens: Vec<Word> = h.basis().to_vec();
    let mut size = core_edges(n, &gens);
    'descend: while size > r {
        for f in &autos {
            let img: Vec<Word> = gens.iter().map(|w| f.apply(w)).collect();
            let s = core_edges(n, &img);
            if s < size {
                gens = img;
                size = s;
                continue 'descend;
            }
        }
        break;
    }
    Ok(size == r)
}

/// Class of `⟨f(a) : a ∈ A⟩`.
pub fn transport(f: &GroupMap, a: &FreeFactorClass) -> FreeFactorClass {
    let gens = a.gens.iter().map(|w| f.apply(w)).collect();
    let mut out =
        FreeFactorClass::new(f.codomain(), gens).expect("automorphic image is nontrivial");
    out.verified = a.verified && f.is_verified();
    out
}

/// If `f(A)` is conjugate to `A`, the induced automorphism of `A` on its graph basis.
pub fn restriction(f: &GroupMap, a: &FreeFactorClass) -> Option<GroupMap> {
    let fa = transport(f, a);
    if fa.key != a.key {
        return None;
    }
    let r = a.rank();
    let comp = pullback_components(a.graph(), fa.graph())
        .into_iter()
        .find(|c| c.rank() == r)?;
    let g = comp.conjugator;
    let basis_alpha = Alphabet::indexed("a", r);
    let images = a
        .basis()
        .iter()
        .map(|b| a.graph().membership_rewrite(&g.conjugate(&f.apply(b))))
        .collect::<Option<Vec<_>>>()?;
    GroupMap::new(basis_alpha.clone(), basis_alpha, images).ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairVerdict {
    Overlap,
    Disjoint,
    Meet,
    None,
}
