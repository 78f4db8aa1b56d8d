//! Support graphs, complexity, admissible collections and systems, and the homomorphism
//! `φ: A(Γ) -> Out(F_n)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{
    disjoint_check, overlap_check, restriction, transport, FreeFactorClass, PairVerdict,
};
use crate::farey::{matrix_of_out, Matrix2Z};
use crate::freegroup::{Alphabet, GroupMap, Letter, Nielsen, Word};
use crate::raag::{min_set, RaagWord, SimplicialGraph, SimplicialGraphJson};

/// A graph of groups with free vertex groups and trivial edge groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfGroups {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    /// Ambient generators of each vertex group.
    vertex_groups: Vec<Vec<usize>>,
    /// Stable letter of each edge outside the spanning tree.
    stable: Vec<Option<usize>>,
    alphabet: Alphabet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOfGroupsJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<GogEdgeJson>,
    pub ambient_alphabet: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub name: String,
    pub group: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GogEdgeJson {
    pub from: String,
    pub to: String,
    pub stable: Option<String>,
}

impl GraphOfGroups {
    fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>, groups: Vec<Vec<String>>) -> Self {
        let nv = vertices.len();
        let mut names: Vec<String> = Vec::new();
        let mut vertex_groups = Vec::with_capacity(nv);
        for g in groups {
            let mut ids = Vec::new();
            for name in g {
                ids.push(names.len());
                names.push(name);
            }
            vertex_groups.push(ids);
        }
        // Breadth-first spanning tree from vertex 0, edges scanned in order.
        let mut seen = vec![false; nv];
        let mut in_tree = vec![false; edges.len()];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (e, &(x, y)) in edges.iter().enumerate() {
                let w = if x == v {
                    y
                } else if y == v {
                    x
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    in_tree[e] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut stable = vec![None; edges.len()];
        let mut k = 0;
        for e in 0..edges.len() {
            if !in_tree[e] {
                stable[e] = Some(names.len());
                names.push(format!("t{k}"));
                k += 1;
            }
        }
        let alphabet = Alphabet::new(names).expect("generated names are distinct");
        GraphOfGroups {
            vertices,
            edges,
            vertex_groups,
            stable,
            alphabet,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// `rank(π_1 underlying) + Σ vertex ranks`.
    pub fn ambient_rank(&self) -> usize {
        self.alphabet.rank()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertex_rank(&self, v: usize) -> usize {
        self.vertex_groups[v].len()
    }

    pub fn underlying_betti(&self) -> usize {
        self.stable.iter().filter(|s| s.is_some()).count()
    }

    /// Basis of `π_1` of the star of `v` (the vertex, its incident edges and neighbours).
    fn star_basis(&self, v: usize) -> Vec<Word> {
        let mut out: Vec<Word> = self.vertex_groups[v]
            .iter()
            .map(|&g| Word::gen(g))
            .collect();
        for (e, &(x, y)) in self.edges.iter().enumerate() {
            let (u, forward) = if x == v {
                (y, true)
            } else if y == v {
                (x, false)
            } else {
                continue;
            };
            let c = match self.stable[e] {
                Some(t) => Word::letter(Letter::new(t, forward)),
                None => Word::identity(),
            };
            for &g in &self.vertex_groups[u] {
                out.push(c.conjugate(&Word::gen(g)));
            }
        }
        out
    }

    pub fn to_json(&self) -> GraphOfGroupsJson {
        GraphOfGroupsJson {
            vertices: self
                .vertices
                .iter()
                .zip(&self.vertex_groups)
                .map(|(name, g)| VertexJson {
                    name: name.clone(),
                    group: g
                        .iter()
                        .map(|&k| self.alphabet.name(k).to_string())
                        .collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .zip(&self.stable)
                .map(|(&(x, y), s)| GogEdgeJson {
                    from: self.vertices[x].clone(),
                    to: self.vertices[y].clone(),
                    stable: s.map(|k| self.alphabet.name(k).to_string()),
                })
                .collect(),
            ambient_alphabet: self.alphabet.names().to_vec(),
        }
    }
}

/// A support graph with one star subgraph `G_i` per vertex of `Γ`.
#[derive(Clone, Debug)]
pub struct SupportGraph {
    gamma: SimplicialGraph,
    gog: GraphOfGroups,
    /// Vertex of the graph of groups playing `v_i`.
    centers: Vec<usize>,
    stars: Vec<BTreeSet<usize>>,
    factor_gens: Vec<Vec<Word>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportGraphJson {
    pub graph: GraphOfGroupsJson,
    pub factors: Vec<FactorJson>,
    pub complexity: usize,
    pub alt_closed_form: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorJson {
    pub name: String,
    pub gens: Vec<String>,
}

/// Barycentric subdivision of each component of `Γᶜ`, wedged along intervals when `Γᶜ` is
/// disconnected. An isolated vertex of `Γᶜ` carries a rank-two vertex group.
pub fn build_support_graph(gamma: &SimplicialGraph) -> Result<SupportGraph> {
    let n = gamma.len();
    if n < 2 {
        return Err(Error::InvalidAlphabet(
            "support graphs need at least two vertices".into(),
        ));
    }
    let gc = gamma.complement();
    let comps = gc.components();
    let mut vertices = Vec::new();
    let mut groups: Vec<Vec<String>> = Vec::new();
    let mut edges = Vec::new();
    let mut centers = vec![0; n];
    let mut anchors = Vec::new();
    for comp in &comps {
        for &i in comp {
            centers[i] = vertices.len();
            vertices.push(format!("v{i}"));
            groups.push(match (comp.len(), gc.degree(i)) {
                (1, _) => vec![format!("v{i}a"), format!("v{i}b")],
                (_, 1) => vec![format!("v{i}")],
                _ => Vec::new(),
            });
        }
        anchors.push(centers[comp[0]]);
        for &i in comp {
            for &j in comp {
                if i < j && gc.adjacent(i, j) {
                    let s = vertices.len();
                    vertices.push(format!("v{i}_{j}"));
                    groups.push(vec![format!("e{i}_{j}")]);
                    edges.push((centers[i], s));
                    edges.push((s, centers[j]));
                }
            }
        }
    }
    if comps.len() > 1 {
        let w = vertices.len();
        vertices.push("w".into());
        groups.push(Vec::new());
        for a in anchors {
            edges.push((w, a));
        }
    }
    let gog = GraphOfGroups::new(vertices, edges, groups);
    let mut stars = Vec::with_capacity(n);
    let mut factor_gens = Vec::with_capacity(n);
    for i in 0..n {
        let c = centers[i];
        let mut s = BTreeSet::from([c]);
        for &(x, y) in gog.edges() {
            // Wedge edges are not part of the subdivided complement.
            if gog.vertices[x] == "w" || gog.vertices[y] == "w" {
                continue;
            }
            if x == c {
                s.insert(y);
            } else if y == c {
                s.insert(x);
            }
        }
        stars.push(s);
        factor_gens.push(gog.star_basis(c));
    }
    Ok(SupportGraph {
        gamma: gamma.clone(),
        gog,
        centers,
        stars,
        factor_gens,
    })
}

impl SupportGraph {
    pub fn gamma(&self) -> &SimplicialGraph {
        &self.gamma
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.gog
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.gog.alphabet()
    }

    pub fn ambient_rank(&self) -> usize {
        self.gog.ambient_rank()
    }

    pub fn center(&self, i: usize) -> usize {
        self.centers[i]
    }

    /// Vertex set of `G_i`.
    pub fn star(&self, i: usize) -> &BTreeSet<usize> {
        &self.stars[i]
    }

    pub fn factor_gens(&self, i: usize) -> &[Word] {
        &self.factor_gens[i]
    }

    pub fn factor(&self, i: usize) -> FreeFactorClass {
        FreeFactorClass::new(self.alphabet(), self.factor_gens[i].clone())
            .expect("star groups are nontrivial")
    }

    pub fn factors(&self) -> Vec<FreeFactorClass> {
        (0..self.gamma.len()).map(|i| self.factor(i)).collect()
    }

    /// Ambient letters outside `A_i`'s basis; together with it they form a basis.
    pub fn complement(&self, i: usize) -> Vec<Word> {
        let used: BTreeSet<usize> = self.factor_gens[i]
            .iter()
            .map(|w| w.cyclic_reduction().1.letters()[0].gen())
            .collect();
        (0..self.ambient_rank())
            .filter(|k| !used.contains(k))
            .map(Word::gen)
            .collect()
    }

    /// Total vertex-group rank on `G_i ∩ G_j`.
    pub fn intersection_rank(&self, i: usize, j: usize) -> usize {
        self.stars[i]
            .intersection(&self.stars[j])
            .map(|&v| self.gog.vertex_rank(v))
            .sum()
    }

    /// Graph on the factors with an edge for each disjoint pair of stars.
    pub fn coincidence_graph(&self) -> SimplicialGraph {
        let n = self.gamma.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.stars[i].is_disjoint(&self.stars[j]) {
                    edges.push((i, j));
                }
            }
        }
        SimplicialGraph::new(self.gamma.names().to_vec(), &edges).expect("valid graph")
    }

    pub fn to_json(&self) -> SupportGraphJson {
        SupportGraphJson {
            graph: self.gog.to_json(),
            factors: (0..self.gamma.len())
                .map(|i| FactorJson {
                    name: self.gamma.names()[i].clone(),
                    gens: self.factor_gens[i]
                        .iter()
                        .map(|w| self.alphabet().format_word(w))
                        .collect(),
                })
                .collect(),
            complexity: complexity(&self.gamma),
            alt_closed_form: alt_closed_form(&self.gamma),
        }
    }
}

/// `c(Γ)`: over components `Δ` of `Γᶜ`, `1 + 2|E(Δ)| - |V(Δ)| + #valence-one(Δ)`, with an
/// isolated vertex counting 2.
pub fn complexity(gamma: &SimplicialGraph) -> usize {
    let gc = gamma.complement();
    gc.components()
        .iter()
        .map(|comp| {
            if comp.len() == 1 {
                return 2;
            }
            let deg: Vec<usize> = comp.iter().map(|&v| gc.degree(v)).collect();
            let e: usize = deg.iter().sum::<usize>() / 2;
            let leaves = deg.iter().filter(|&&d| d == 1).count();
            1 + 2 * e + leaves - comp.len()
        })
        .sum()
}

/// The closed form in terms of `Γ`: `1 + |V|(|V|-2) - |E| + #valence-(|V|-2)`.
pub fn alt_closed_form(gamma: &SimplicialGraph) -> i64 {
    let v = gamma.len() as i64;
    let e = gamma.edges().len() as i64;
    let k = (0..gamma.len())
        .filter(|&i| gamma.degree(i) as i64 == v - 2)
        .count() as i64;
    1 + v * (v - 2) - e + k
}

/// Factors with a pairwise classification and coincidence graph.
#[derive(Clone, Debug)]
pub struct AdmissibleCollection {
    names: Vec<String>,
    factors: Vec<FreeFactorClass>,
    verdicts: Vec<Vec<PairVerdict>>,
    gamma: SimplicialGraph,
}

/// Classify every pair as overlapping or disjoint.
pub fn verify_admissible(
    names: &[String],
    factors: Vec<FreeFactorClass>,
) -> Result<AdmissibleCollection> {
    let m = factors.len();
    if names.len() != m {
        return Err(Error::InvalidAlphabet("one name per factor".into()));
    }
    for (i, f) in factors.iter().enumerate() {
        if f.rank() < 2 {
            return Err(Error::NotAdmissible {
                i,
                j: i,
                detail: format!("rank {} < 2", f.rank()),
            });
        }
    }
    let mut verdicts = vec![vec![PairVerdict::None; m]; m];
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let v = if overlap_check(&factors[i], &factors[j]).is_some() {
                PairVerdict::Overlap
            } else if disjoint_check(&factors[i], &factors[j])? {
                edges.push((i, j));
                PairVerdict::Disjoint
            } else {
                let meets = crate::factors::meet_projection(&factors[i], &factors[j]);
                return Err(Error::NotAdmissible {
                    i,
                    j,
                    detail: format!(
                        "no overlap certificate among {} meet classes; no disjointness witness",
                        meets.len()
                    ),
                });
            };
            verdicts[i][j] = v;
            verdicts[j][i] = v;
        }
    }
    let gamma = SimplicialGraph::new(names.to_vec(), &edges)?;
    Ok(AdmissibleCollection {
        names: names.to_vec(),
        factors,
        verdicts,
        gamma,
    })
}

impl AdmissibleCollection {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn factors(&self) -> &[FreeFactorClass] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &FreeFactorClass {
        &self.factors[i]
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn verdict(&self, i: usize, j: usize) -> PairVerdict {
        self.verdicts[i][j]
    }

    pub fn coincidence_graph(&self) -> &SimplicialGraph {
        &self.gamma
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.factors[0].alphabet()
    }
}

/// The automorphism of `F_2` with abelianization `m`, as a product of transvections.
pub fn seed_automorphism(m: Matrix2Z) -> Result<GroupMap> {
    let det = m.det();
    if det.abs() != 1 {
        return Err(Error::BadDeterminant(det));
    }
    let al = Alphabet::standard(2);
    // Reduce columns by column operations, i.e. right composition with Nielsen moves.
    let [a, b, c, d] = m.rows();
    let mut cols = [[a, c], [b, d]];
    let mut right = Vec::new();
    let l1 = |v: [i64; 2]| v[0].abs() + v[1].abs();
    loop {
        if l1(cols[0]) == 1 && l1(cols[1]) == 1 {
            break;
        }
        let mut best = None;
        for i in 0..2 {
            let j = 1 - i;
            for inv in [false, true] {
                let s = if inv { -1 } else { 1 };
                let v = [cols[i][0] + s * cols[j][0], cols[i][1] + s * cols[j][1]];
                // Shorten the longer column first, Euclid style.
                let score = (usize::from(l1(cols[i]) < l1(cols[j])), l1(v));
                if l1(v) < l1(cols[i]) && best.is_none_or(|(b, _, _)| score < b) {
                    best = Some((score, Nielsen::Right { i, j, inv }, v));
                }
            }
        }
        let (_, mv, v) = best.ok_or(Error::BadDeterminant(det))?;
        let Nielsen::Right { i, .. } = mv else {
            unreachable!()
        };
        cols[i] = v;
        right.push(mv);
    }
    // Signed permutation.
    for i in 0..2 {
        if cols[i][0] + cols[i][1] < 0 {
            cols[i] = [-cols[i][0], -cols[i][1]];
            right.push(Nielsen::Invert { i });
        }
    }
    if cols[0][0] == 0 {
        cols.swap(0, 1);
        right.push(Nielsen::Swap { i: 0, j: 1 });
    }
    let mut f = GroupMap::identity(&al);
    for mv in right.into_iter().rev() {
        f = f.compose(&mv.inverse().to_map(&al))?;
    }
    debug_assert_eq!(matrix_of_out(&f)?, m);
    Ok(f)
}

/// The automorphism acting by `seed` on the basis of `a` and fixing `complement`.
pub fn supported_map(
    a: &FreeFactorClass,
    complement: &[Word],
    seed: &GroupMap,
) -> Result<GroupMap> {
    let al = a.alphabet();
    let n = al.rank();
    let r = a.gens().len();
    if seed.domain().rank() != r {
        return Err(Error::AlphabetMismatch(format!(
            "seed has rank {}, factor has {r} generators",
            seed.domain().rank()
        )));
    }
    let mut basis: Vec<Word> = a.gens().to_vec();
    basis.extend(complement.iter().cloned());
    if basis.len() != n {
        return Err(Error::SupportViolation(format!(
            "factor and complement give {} words for rank {n}",
            basis.len()
        )));
    }
    let h = GroupMap::new(al.clone(), al.clone(), basis)?
        .certify()
        .map_err(|_| Error::SupportViolation("factor and complement do not form a basis".into()))?;
    let hinv = h.invert_automorphism()?;
    let mut images: Vec<Word> = (0..n).map(Word::gen).collect();
    for k in 0..r {
        images[k] = seed.image(k).clone();
    }
    let s = GroupMap::new(al.clone(), al.clone(), images)?.certify()?;
    h.compose(&s)?.compose(&hinv)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupportCertificate {
    pub i: usize,
    pub j: usize,
    pub stabilized: bool,
    pub inner_trivial: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutationCertificate {
    pub i: usize,
    pub j: usize,
    pub inner: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificates {
    pub support: Vec<SupportCertificate>,
    pub commutation: Vec<CommutationCertificate>,
    /// Trace of `f_i|A_i` when `A_i` has rank two and `f_i` stabilizes it.
    pub traces: Vec<Option<i64>>,
    pub fully_irreducible: Vec<bool>,
}

impl Certificates {
    pub fn support_ok(&self) -> bool {
        self.support.iter().all(|c| c.stabilized && c.inner_trivial)
    }

    pub fn commutation_ok(&self) -> bool {
        self.commutation.iter().all(|c| c.inner)
    }

    pub fn irreducible_ok(&self) -> bool {
        self.fully_irreducible.iter().all(|&b| b)
    }
}

fn is_inner_trivial(f: &GroupMap, a: &FreeFactorClass) -> bool {
    restriction(f, a).is_some_and(|r| r.is_inner().is_some())
}

/// Support, commutation and irreducibility certificates for `maps` on `c`.
pub fn certify_system(c: &AdmissibleCollection, maps: &[GroupMap]) -> Result<Certificates> {
    let m = c.len();
    let gamma = c.coincidence_graph();
    let mut support = Vec::new();
    let mut traces = Vec::with_capacity(m);
    let mut irreducible = Vec::with_capacity(m);
    for i in 0..m {
        let ai = c.factor(i);
        let stabilized = transport(&maps[i], ai).key() == ai.key();
        support.push(SupportCertificate {
            i,
            j: i,
            stabilized,
            inner_trivial: true,
        });
        let mx = match restriction(&maps[i], ai) {
            Some(r) if ai.rank() == 2 => Some(matrix_of_out(&r)?),
            _ => None,
        };
        traces.push(mx.map(Matrix2Z::trace));
        irreducible.push(mx.is_some_and(Matrix2Z::is_hyperbolic));
        for j in 0..m {
            if j != i && gamma.adjacent(i, j) {
                let aj = c.factor(j);
                let stabilized = transport(&maps[i], aj).key() == aj.key();
                support.push(SupportCertificate {
                    i,
                    j,
                    stabilized,
                    inner_trivial: stabilized && is_inner_trivial(&maps[i], aj),
                });
            }
        }
    }
    let mut commutation = Vec::new();
    for (i, j) in gamma.edges() {
        let fi_inv = maps[i].invert_automorphism()?;
        let fj_inv = maps[j].invert_automorphism()?;
        let comm = maps[i]
            .compose(&maps[j])?
            .compose(&fi_inv)?
            .compose(&fj_inv)?;
        commutation.push(CommutationCertificate {
            i,
            j,
            inner: comm.is_inner().is_some(),
        });
    }
    Ok(Certificates {
        support,
        commutation,
        traces,
        fully_irreducible: irreducible,
    })
}

/// An admissible collection with generators `f_i = base_i^p` and their certificates.
#[derive(Clone, Debug)]
pub struct AdmissibleSystem {
    collection: AdmissibleCollection,
    base: Vec<GroupMap>,
    power: u32,
    maps: Vec<GroupMap>,
    inverses: Vec<GroupMap>,
    certificates: Certificates,
}

impl AdmissibleSystem {
    /// Raise each base map to `power` and require every certificate.
    pub fn new(collection: AdmissibleCollection, base: Vec<GroupMap>, power: u32) -> Result<Self> {
        Self::with_limit(collection, base, power, usize::MAX)
    }

    /// Like [`AdmissibleSystem::new`], failing once an image passes `limit` letters.
    pub fn with_limit(
        collection: AdmissibleCollection,
        base: Vec<GroupMap>,
        power: u32,
        limit: usize,
    ) -> Result<Self> {
        if base.len() != collection.len() {
            return Err(Error::SupportViolation(format!(
                "{} generators for {} factors",
                base.len(),
                collection.len()
            )));
        }
        let mut maps = Vec::with_capacity(base.len());
        let mut inverses = Vec::with_capacity(base.len());
        for f in &base {
            let f = f.clone().certify()?;
            let fp = bounded_pow(&f, power, limit)?;
            let inv = bounded_pow(&f.invert_automorphism()?, power, limit)?;
            maps.push(fp);
            inverses.push(inv);
        }
        let certificates = certify_system(&collection, &maps)?;
        if let Some(c) = certificates
            .support
            .iter()
            .find(|c| !(c.stabilized && c.inner_trivial))
        {
            return Err(Error::SupportViolation(format!(
                "f_{} on A_{}: stabilized {}, inner-trivial {}",
                c.i, c.j, c.stabilized, c.inner_trivial
            )));
        }
        if let Some(c) = certificates.commutation.iter().find(|c| !c.inner) {
            return Err(Error::CommutationViolation(format!(
                "[f_{}, f_{}] is not inner",
                c.i, c.j
            )));
        }
        if let Some(i) = certificates.fully_irreducible.iter().position(|&b| !b) {
            return Err(Error::NotHyperbolicSeed(format!(
                "f_{i} restricted to A_{i} has trace {:?}",
                certificates.traces[i]
            )));
        }
        Ok(AdmissibleSystem {
            collection,
            base,
            power,
            maps,
            inverses,
            certificates,
        })
    }

    pub fn collection(&self) -> &AdmissibleCollection {
        &self.collection
    }

    pub fn gamma(&self) -> &SimplicialGraph {
        self.collection.coincidence_graph()
    }

    pub fn base(&self) -> &[GroupMap] {
        &self.base
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn map(&self, i: usize) -> &GroupMap {
        &self.maps[i]
    }

    pub fn certificates(&self) -> &Certificates {
        &self.certificates
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.collection.alphabet()
    }

    /// `f_i^e`.
    pub fn generator_power(&self, i: usize, e: i64, limit: usize) -> Result<GroupMap> {
        let b = if e < 0 {
            &self.inverses[i]
        } else {
            &self.maps[i]
        };
        bounded_pow(b, e.unsigned_abs() as u32, limit)
    }

    /// `φ(g) = f_{J(1)}^{e_1} ∘ ... ∘ f_{J(s)}^{e_s}`.
    pub fn apply_phi(&self, g: &RaagWord) -> Result<GroupMap> {
        self.apply_phi_bounded(g, usize::MAX)
    }

    pub fn apply_phi_bounded(&self, g: &RaagWord, limit: usize) -> Result<GroupMap> {
        self.prefix_map(g, g.len(), limit)
    }

    /// `φ` of the first `k` syllables.
    pub fn prefix_map(&self, g: &RaagWord, k: usize, limit: usize) -> Result<GroupMap> {
        let mut out = GroupMap::identity(self.alphabet());
        for s in &g.syllables()[..k] {
            out = out.compose_bounded(&self.generator_power(s.gen, s.exp, limit)?, limit)?;
        }
        Ok(out)
    }

    /// `A^g(x_k^{e_k}) = φ(x_1^{e_1} ... x_{k-1}^{e_{k-1}}) A_{J(k)}`.
    pub fn active_factor(&self, g: &RaagWord, k: usize) -> Result<FreeFactorClass> {
        let p = self.prefix_map(g, k, usize::MAX)?;
        Ok(transport(&p, self.collection.factor(g.syllables()[k].gen)))
    }

    /// Active factor keys by syllable id, checked equal across `Min(g)`.
    pub fn active_factors_checked(&self, g: &RaagWord) -> Result<Vec<(usize, String)>> {
        let base: Vec<(usize, String)> = (0..g.len())
            .map(|k| {
                Ok((
                    g.syllables()[k].id,
                    self.active_factor(g, k)?.key().to_string(),
                ))
            })
            .collect::<Result<_>>()?;
        let mut sorted = base.clone();
        sorted.sort();
        for w in min_set(self.gamma(), g)? {
            let mut keys: Vec<(usize, String)> = (0..w.len())
                .map(|k| {
                    Ok((
                        w.syllables()[k].id,
                        self.active_factor(&w, k)?.key().to_string(),
                    ))
                })
                .collect::<Result<_>>()?;
            keys.sort();
            if keys != sorted {
                return Err(Error::SupportViolation(format!(
                    "active factors differ between {g} and {w}"
                )));
            }
        }
        Ok(base)
    }
}

fn bounded_pow(f: &GroupMap, e: u32, limit: usize) -> Result<GroupMap> {
    let mut out = GroupMap::identity(f.domain());
    for _ in 0..e {
        out = out.compose_bounded(f, limit)?;
    }
    Ok(out)
}

/// Generators acting by `seeds[i]^p` on `A_i` and trivially on `complements[i]`.
pub fn build_generators(
    collection: AdmissibleCollection,
    complements: &[Vec<Word>],
    seeds: &[Matrix2Z],
    power: u32,
) -> Result<AdmissibleSystem> {
    let mut base = Vec::with_capacity(collection.len());
    for (i, a) in collection.factors().iter().enumerate() {
        let m = seeds[i.min(seeds.len().saturating_sub(1))];
        if !m.is_hyperbolic() {
            return Err(Error::NotHyperbolicSeed(format!(
                "seed {i} has trace {}",
                m.trace()
            )));
        }
        if a.rank() != 2 || a.gens().len() != 2 {
            return Err(Error::NotHyperbolicSeed(format!(
                "factor {i} has rank {}; rank-two seeds only",
                a.rank()
            )));
        }
        base.push(supported_map(a, &complements[i], &seed_automorphism(m)?)?);
    }
    AdmissibleSystem::new(collection, base, power)
}

/// On-disk form of an admissible system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFixture {
    pub gamma: SimplicialGraphJson,
    pub ambient_alphabet: Vec<String>,
    pub factors: Vec<FactorJson>,
    pub generators: Vec<GeneratorJson>,
    pub power: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub name: String,
    pub images: Vec<String>,
}

/// Parsed but not yet certified fixture contents.
#[derive(Clone, Debug)]
pub struct LoadedFixture {
    pub gamma: SimplicialGraph,
    pub alphabet: Alphabet,
    pub names: Vec<String>,
    pub factors: Vec<FreeFactorClass>,
    pub generators: Vec<GroupMap>,
    pub power: u32,
}

impl SystemFixture {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| {
            Error::schema(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    /// Canonical form: pretty JSON with a trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fixture serializes");
        s.push('\n');
        s
    }

    pub fn load(&self) -> Result<LoadedFixture> {
        let gamma = SimplicialGraph::from_json(&self.gamma)
            .map_err(|e| Error::schema("gamma", e.to_string()))?;
        let alphabet = Alphabet::new(self.ambient_alphabet.clone())
            .map_err(|e| Error::schema("ambient_alphabet", e.to_string()))?;
        if self.factors.len() != gamma.len() {
            return Err(Error::schema(
                "factors",
                format!(
                    "{} factors for {} vertices",
                    self.factors.len(),
                    gamma.len()
                ),
            ));
        }
        let mut names = Vec::new();
        let mut factors = Vec::new();
        for (k, f) in self.factors.iter().enumerate() {
            let gens = f
                .gens
                .iter()
                .enumerate()
                .map(|(m, g)| {
                    alphabet.parse_word(g).map_err(|e| {
                        Error::schema(format!("factors[{k}].gens[{m}]"), e.to_string())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let class = FreeFactorClass::new(&alphabet, gens)
                .map_err(|e| Error::schema(format!("factors[{k}]"), e.to_string()))?;
            names.push(f.name.clone());
            factors.push(class);
        }
        let mut generators = Vec::new();
        for (k, g) in self.generators.iter().enumerate() {
            if g.images.len() != alphabet.rank() {
                return Err(Error::schema(
                    format!("generators[{k}].images"),
                    format!("{} images for rank {}", g.images.len(), alphabet.rank()),
                ));
            }
            let images = g
                .images
                .iter()
                .enumerate()
                .map(|(m, w)| {
                    alphabet.parse_word(w).map_err(|e| {
                        Error::schema(format!("generators[{k}].images[{m}]"), e.to_string())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let f = GroupMap::new(alphabet.clone(), alphabet.clone(), images)?
                .certify()
                .map_err(|e| Error::schema(format!("generators[{k}]"), e.to_string()))?;
            generators.push(f);
        }
        Ok(LoadedFixture {
            gamma,
            alphabet,
            names,
            factors,
            generators,
            power: self.power,
        })
    }

    pub fn from_system(
        gamma: &SimplicialGraph,
        names: &[String],
        factors: &[FreeFactorClass],
        generators: &[GroupMap],
        power: u32,
    ) -> Self {
        let al = factors[0].alphabet();
        SystemFixture {
            gamma: gamma.to_json(),
            ambient_alphabet: al.names().to_vec(),
            factors: names
                .iter()
                .zip(factors)
                .map(|(n, f)| FactorJson {
                    name: n.clone(),
                    gens: f.gens().iter().map(|w| al.format_word(w)).collect(),
                })
                .collect(),
            generators: names
                .iter()
                .zip(generators)
                .map(|(n, g)| GeneratorJson {
                    name: format!("f_{n}"),
                    images: g.images().iter().map(|w| al.format_word(w)).collect(),
                })
                .collect(),
            power,
        }
    }
}

impl LoadedFixture {
    /// Classify the factors and check the fixture graph is their coincidence graph.
    pub fn collection(&self) -> Result<AdmissibleCollection> {
        let c = verify_admissible(&self.names, self.factors.clone())?;
        if c.coincidence_graph().edges() != self.gamma.edges() {
            return Err(Error::schema(
                "gamma",
                "graph differs from the coincidence graph of the factors",
            ));
        }
        Ok(c)
    }

    /// Certified system at power `p`.
    pub fn system(&self, power: u32, limit: usize) -> Result<AdmissibleSystem> {
        AdmissibleSystem::with_limit(self.collection()?, self.generators.clone(), power, limit)
    }
}

/// Pentagon with edges `(i, i+2)`: its complement is the 5-cycle `0-1-2-3-4`.
pub fn pentagon_gamma() -> SimplicialGraph {
    SimplicialGraph::pentagon()
}

fn fixture_of(
    gamma: &SimplicialGraph,
    factors: Vec<FreeFactorClass>,
    complements: &[Vec<Word>],
    seed: Matrix2Z,
) -> Result<SystemFixture> {
    let names = gamma.names().to_vec();
    let c = verify_admissible(&names, factors.clone())?;
    let seeds = vec![seed; factors.len()];
    let s = build_generators(c, complements, &seeds, 1)?;
    Ok(SystemFixture::from_system(
        gamma,
        &names,
        &factors,
        s.base(),
        1,
    ))
}

/// The support graph of the pentagon in `F_6` with rank-two star factors.
pub fn example1_fixture() -> Result<SystemFixture> {
    let gamma = pentagon_gamma();
    let sg = build_support_graph(&gamma)?;
    let complements: Vec<Vec<Word>> = (0..gamma.len()).map(|i| sg.complement(i)).collect();
    let seed = Matrix2Z::from_rows([1, 1, 1, 2])?;
    fixture_of(&gamma, sg.factors(), &complements, seed)
}

/// `A_i = <x_i, x_{i+1}>` in `F_5`, indices mod 5.
pub fn example2_fixture() -> Result<SystemFixture> {
    let gamma = pentagon_gamma();
    let al = Alphabet::indexed("x", 5);
    let factors = (0..5)
        .map(|i| FreeFactorClass::new(&al, vec![Word::gen(i), Word::gen((i + 1) % 5)]))
        .collect::<Result<Vec<_>>>()?;
    let complements: Vec<Vec<Word>> = (0..5)
        .map(|i| (2..5).map(|k| Word::gen((i + k) % 5)).collect())
        .collect();
    let seed = Matrix2Z::from_rows([1, 1, 1, 2])?;
    fixture_of(&gamma, factors, &complements, seed)
}

/// `A_i = <a, b^i c>` in `F_3` for `0 <= i <= 4`, pairwise overlapping.
pub fn example3_fixture() -> Result<SystemFixture> {
    let gamma = SimplicialGraph::edgeless(5);
    let al = Alphabet::standard(3);
    let (a, b, c) = (Word::gen(0), Word::gen(1), Word::gen(2));
    let factors = (0..5)
        .map(|i| FreeFactorClass::new(&al, vec![a.clone(), b.pow(i).mul_word(&c)]))
        .collect::<Result<Vec<_>>>()?;
    let complements = vec![vec![b.clone()]; 5];
    let seed = Matrix2Z::from_rows([1, 1, 1, 2])?;
    fixture_of(&gamma, factors, &complements, seed)
}
