//! Right-angled Artin groups: syllable moves, minimal forms, the syllable order and
//! clique numbers.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest syllable count accepted by [`min_set`] and [`syllable_order`].
pub const MIN_SET_SYLLABLE_LIMIT: usize = 12;
/// Orbit size at which [`min_set`] gives up.
pub const ORBIT_BUDGET: usize = 1_000_000;
/// Largest vertex count accepted by [`clique_number`].
pub const CLIQUE_VERTEX_LIMIT: usize = 40;

/// Finite simple graph on named vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplicialGraph {
    names: Vec<String>,
    adj: Vec<Vec<bool>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialGraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl SimplicialGraph {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let n = names.len();
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || a.contains(char::is_whitespace) || a.contains('^') {
                return Err(Error::InvalidAlphabet(format!("bad vertex name `{a}`")));
            }
            if names[..i].contains(a) {
                return Err(Error::InvalidAlphabet(format!("duplicate vertex `{a}`")));
            }
        }
        let mut adj = vec![vec![false; n]; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::UnknownGenerator(format!("{}", i.max(j))));
            }
            if i == j {
                return Err(Error::InvalidAlphabet(format!("loop at `{}`", names[i])));
            }
            if adj[i][j] {
                return Err(Error::InvalidAlphabet(format!(
                    "repeated edge {}-{}",
                    names[i], names[j]
                )));
            }
            adj[i][j] = true;
            adj[j][i] = true;
        }
        Ok(SimplicialGraph { names, adj })
    }

    /// Vertices `v0..v{n-1}`.
    pub fn indexed(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new((0..n).map(|i| format!("v{i}")), edges)
    }

    /// The five-cycle with edges `(i, i+2)`, so that its complement is `0-1-2-3-4`.
    pub fn pentagon() -> Self {
        Self::indexed(5, &[(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]).unwrap()
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::indexed(n, &edges).unwrap()
    }

    pub fn edgeless(n: usize) -> Self {
        Self::indexed(n, &[]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adj[i][j])
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].iter().filter(|&&b| b).count()
    }

    /// Complement graph on the same vertex names.
    pub fn complement(&self) -> SimplicialGraph {
        let n = self.len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                adj[i][j] = i != j && !self.adj[i][j];
            }
        }
        SimplicialGraph {
            names: self.names.clone(),
            adj,
        }
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for w in 0..n {
                    if self.adj[v][w] && !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn to_json(&self) -> SimplicialGraphJson {
        SimplicialGraphJson {
            vertices: self.names.clone(),
            edges: self
                .edges()
                .into_iter()
                .map(|(i, j)| [self.names[i].clone(), self.names[j].clone()])
                .collect(),
        }
    }

    pub fn from_json(j: &SimplicialGraphJson) -> Result<Self> {
        let mut edges = Vec::new();
        for (k, [a, b]) in j.edges.iter().enumerate() {
            let idx = |s: &String| {
                j.vertices.iter().position(|v| v == s).ok_or_else(|| {
                    Error::schema(format!("edges[{k}]"), format!("unknown vertex `{s}`"))
                })
            };
            edges.push((idx(a)?, idx(b)?));
        }
        Self::new(j.vertices.clone(), &edges)
    }

    /// Parse a word of tokens `name`, `name^k`.
    pub fn parse_word(&self, text: &str) -> Result<RaagWord> {
        let mut syl = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>()
                        .map_err(|_| Error::MalformedToken(tok.to_string()))?,
                ),
                None => (tok, 1),
            };
            let g = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
            syl.push((g, exp));
        }
        RaagWord::from_pairs(self, &syl)
    }

    pub fn format_word(&self, w: &RaagWord) -> String {
        w.syllables
            .iter()
            .map(|s| {
                if s.exp == 1 {
                    self.names[s.gen].clone()
                } else {
                    format!("{}^{}", self.names[s.gen], s.exp)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Syllable {
    pub gen: usize,
    pub exp: i64,
    /// Stable identity used to match syllables across members of `Min(g)`.
    pub id: usize,
}

/// A word in `A(Γ)` as a sequence of syllables. Exponent-zero syllables are allowed only
/// in raw input; every constructor here drops them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RaagWord {
    syllables: Vec<Syllable>,
}

impl fmt::Display for RaagWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|s| format!("v{}^{}", s.gen, s.exp))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl RaagWord {
    pub fn identity() -> Self {
        RaagWord {
            syllables: Vec::new(),
        }
    }

    /// Raw word from `(generator, exponent)` pairs; zero exponents are dropped and ids are
    /// positions.
    pub fn from_pairs(g: &SimplicialGraph, pairs: &[(usize, i64)]) -> Result<Self> {
        let mut syllables = Vec::new();
        for &(gen, exp) in pairs {
            if gen >= g.len() {
                return Err(Error::UnknownGenerator(format!("v{gen}")));
            }
            if exp != 0 {
                syllables.push(Syllable {
                    gen,
                    exp,
                    id: syllables.len(),
                });
            }
        }
        Ok(RaagWord { syllables })
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Word length `Σ |e_i|`.
    pub fn word_length(&self) -> u64 {
        self.syllables.iter().map(|s| s.exp.unsigned_abs()).sum()
    }

    pub fn pairs(&self) -> Vec<(usize, i64)> {
        self.syllables.iter().map(|s| (s.gen, s.exp)).collect()
    }

    pub fn inverse(&self) -> RaagWord {
        let n = self.syllables.len();
        RaagWord {
            syllables: self
                .syllables
                .iter()
                .rev()
                .enumerate()
                .map(|(i, s)| Syllable {
                    gen: s.gen,
                    exp: -s.exp,
                    id: n - 1 - i,
                })
                .collect(),
        }
    }

    /// Concatenation as raw words (not normalized).
    pub fn concat(&self, other: &RaagWord) -> RaagWord {
        let mut syllables = self.syllables.clone();
        let off = syllables.len();
        syllables.extend(other.syllables.iter().map(|s| Syllable {
            id: s.id + off,
            ..*s
        }));
        RaagWord { syllables }
    }

    fn check(&self, g: &SimplicialGraph) -> Result<()> {
        for s in &self.syllables {
            if s.gen >= g.len() {
                return Err(Error::UnknownGenerator(format!("v{}", s.gen)));
            }
        }
        Ok(())
    }
}

fn commute(g: &SimplicialGraph, a: usize, b: usize) -> bool {
    g.adjacent(a, b)
}

/// Syllable-reduce by moves (1) and (2): each incoming syllable merges with the nearest
/// same-generator syllable it can reach by commuting leftwards.
fn reduce_syllables(g: &SimplicialGraph, w: &RaagWord) -> Vec<(usize, i64)> {
    let mut out: Vec<(usize, i64)> = Vec::new();
    for s in &w.syllables {
        if s.exp == 0 {
            continue;
        }
        let mut merged = false;
        for j in (0..out.len()).rev() {
            if out[j].0 == s.gen {
                out[j].1 += s.exp;
                if out[j].1 == 0 {
                    out.remove(j);
                }
                merged = true;
                break;
            }
            if !commute(g, out[j].0, s.gen) {
                break;
            }
        }
        if !merged {
            out.push((s.gen, s.exp));
        }
    }
    out
}

/// Lexicographically least reordering by commutations, comparing generator indices.
fn least_extension(g: &SimplicialGraph, syl: &[(usize, i64)]) -> Vec<(usize, i64)> {
    let n = syl.len();
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<usize> = None;
        for i in 0..n {
            if used[i] {
                continue;
            }
            // Available iff every earlier unused syllable commutes with it.
            let free =
                (0..i).all(|k| used[k] || (syl[k].0 != syl[i].0 && commute(g, syl[k].0, syl[i].0)));
            if free && best.is_none_or(|b| syl[i].0 < syl[b].0) {
                best = Some(i);
            }
        }
        let b = best.expect("some syllable is always available");
        used[b] = true;
        out.push(syl[b]);
    }
    out
}

/// Canonical member of `Min(g)`; syllable ids are positions in the result.
pub fn normalize(g: &SimplicialGraph, w: &RaagWord) -> Result<RaagWord> {
    w.check(g)?;
    let red = reduce_syllables(g, w);
    let ext = least_extension(g, &red);
    Ok(RaagWord {
        syllables: ext
            .into_iter()
            .enumerate()
            .map(|(id, (gen, exp))| Syllable { gen, exp, id })
            .collect(),
    })
}

/// Equality in `A(Γ)`.
pub fn equal(g: &SimplicialGraph, u: &RaagWord, v: &RaagWord) -> Result<bool> {
    Ok(normalize(g, u)?.pairs() == normalize(g, v)?.pairs())
}

/// All of `Min(g)`: the orbit of the normal form under swaps of adjacent commuting
/// syllables. Syllable ids follow the normal form.
pub fn min_set(g: &SimplicialGraph, w: &RaagWord) -> Result<Vec<RaagWord>> {
    let nf = normalize(g, w)?;
    if nf.len() > MIN_SET_SYLLABLE_LIMIT {
        return Err(Error::TooLong {
            len: nf.len(),
            limit: MIN_SET_SYLLABLE_LIMIT,
        });
    }
    let mut seen: HashSet<Vec<Syllable>> = HashSet::new();
    let mut q = VecDeque::new();
    seen.insert(nf.syllables.clone());
    q.push_back(nf.syllables);
    while let Some(cur) = q.pop_front() {
        for i in 0..cur.len().saturating_sub(1) {
            if commute(g, cur[i].gen, cur[i + 1].gen) {
                let mut next = cur.clone();
                next.swap(i, i + 1);
                if seen.insert(next.clone()) {
                    if seen.len() > ORBIT_BUDGET {
                        return Err(Error::OrbitBudget(ORBIT_BUDGET));
                    }
                    q.push_back(next);
                }
            }
        }
    }
    let mut out: Vec<RaagWord> = seen
        .into_iter()
        .map(|syllables| RaagWord { syllables })
        .collect();
    out.sort_by(|a, b| a.pairs().cmp(&b.pairs()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// The strict order `≺` on syllables and its subrelation `≺ᵐ`, by syllable id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyllableOrder {
    pub syllables: Vec<Syllable>,
    pub prec: BTreeSet<(usize, usize)>,
    pub prec_m: BTreeSet<(usize, usize)>,
}

impl SyllableOrder {
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.prec.contains(&(i, j))
    }

    /// Transitive closure of `≺ᵐ`.
    pub fn closure_of_m(&self) -> BTreeSet<(usize, usize)> {
        let n = self.syllables.len();
        let mut r = vec![vec![false; n]; n];
        for &(i, j) in &self.prec_m {
            r[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                if r[i][j] {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.closure_of_m().iter().all(|&(i, j)| i != j)
            && self.prec.iter().all(|&(i, j)| !self.prec.contains(&(j, i)))
    }

    /// Largest set of pairwise incomparable syllables.
    pub fn max_antichain(&self) -> usize {
        let n = self.syllables.len();
        let mut best = 0;
        for mask in 0u32..(1u32 << n) {
            let c = mask.count_ones() as usize;
            if c <= best {
                continue;
            }
            let ok = (0..n).all(|i| {
                mask & (1 << i) == 0
                    || (0..n).all(|j| {
                        mask & (1 << j) == 0 || (!self.precedes(i, j) && !self.precedes(j, i))
                    })
            });
            if ok {
                best = c;
            }
        }
        best
    }
}

pub fn syllable_order(g: &SimplicialGraph, w: &RaagWord) -> Result<SyllableOrder> {
    let members = min_set(g, w)?;
    let syllables = normalize(g, w)?.syllables;
    let n = syllables.len();
    let mut always = vec![vec![true; n]; n];
    let mut adjacent = vec![vec![false; n]; n];
    for m in &members {
        let mut pos = vec![0; n];
        for (p, s) in m.syllables.iter().enumerate() {
            pos[s.id] = p;
        }
        for i in 0..n {
            for j in 0..n {
                if pos[i] >= pos[j] {
                    always[i][j] = false;
                }
            }
        }
        for p in 0..n.saturating_sub(1) {
            adjacent[m.syllables[p].id][m.syllables[p + 1].id] = true;
        }
    }
    let mut prec = BTreeSet::new();
    let mut prec_m = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && always[i][j] {
                prec.insert((i, j));
                if adjacent[i][j] {
                    prec_m.insert((i, j));
                }
            }
        }
    }
    Ok(SyllableOrder {
        syllables,
        prec,
        prec_m,
    })
}

/// Size of a largest complete subgraph.
pub fn clique_number(g: &SimplicialGraph) -> Result<usize> {
    let n = g.len();
    if n > CLIQUE_VERTEX_LIMIT {
        return Err(Error::TooLarge {
            len: n,
            limit: CLIQUE_VERTEX_LIMIT,
        });
    }
    let nbr: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| g.adjacent(i, j))
                .fold(0u64, |m, j| m | (1 << j))
        })
        .collect();
    fn bk(r: usize, mut p: u64, mut x: u64, nbr: &[u64], best: &mut usize) {
        if p == 0 {
            if x == 0 {
                *best = (*best).max(r);
            }
            return;
        }
        if r + p.count_ones() as usize <= *best {
            return;
        }
        let pivot = (p | x).trailing_zeros() as usize;
        let mut cand = p & !nbr[pivot];
        while cand != 0 {
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            bk(r + 1, p & nbr[v], x & nbr[v], nbr, best);
            p &= !(1 << v);
            x |= 1 << v;
        }
    }
    let mut best = 0;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    bk(0, all, 0, &nbr, &mut best);
    Ok(best)
}
