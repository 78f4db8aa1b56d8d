use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Alphabet, GroupMap, Word};
use crate::stallings::fold::Folder;
use crate::stallings::SubgroupGraph;

/// A finite graph whose edges carry reduced words, realizing a marking of `F_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedGraph {
    alphabet: Alphabet,
    num_vertices: usize,
    base: usize,
    edges: Vec<(usize, usize, Word)>,
    /// Generator `x_j` as a closed edge path at the base, written over the edge alphabet.
    inverse_marking: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedEdgeJson {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedGraphJson {
    pub vertices: Vec<usize>,
    pub edges: Vec<MarkedEdgeJson>,
    pub base: usize,
}

impl MarkedGraph {
    pub fn new(
        alphabet: &Alphabet,
        num_vertices: usize,
        base: usize,
        edges: Vec<(usize, usize, Word)>,
    ) -> Result<Self> {
        let n = alphabet.rank();
        if num_vertices == 0 || base >= num_vertices {
            return Err(Error::InvalidMarking("base vertex out of range".into()));
        }
        let mut valence = vec![0usize; num_vertices];
        for (k, (u, v, w)) in edges.iter().enumerate() {
            if *u >= num_vertices || *v >= num_vertices {
                return Err(Error::InvalidMarking(format!(
                    "edge {k} has an unknown endpoint"
                )));
            }
            if w.max_gen().is_some_and(|g| g >= n) {
                return Err(Error::InvalidMarking(format!(
                    "edge {k} label leaves the alphabet"
                )));
            }
            valence[*u] += 1;
            valence[*v] += 1;
        }
        if let Some(v) = valence.iter().position(|&d| d == 1) {
            return Err(Error::InvalidMarking(format!("vertex {v} has valence one")));
        }
        if edges.len() + 1 != num_vertices + n {
            return Err(Error::InvalidMarking(format!(
                "first Betti number {} differs from rank {n}",
                (edges.len() + 1) as i64 - num_vertices as i64
            )));
        }
        // Fold the subdivided graph, tagging each subdivided edge by its edge letter.
        let mut f = Folder::with_vertices(n, true, num_vertices, base);
        for (k, (u, v, w)) in edges.iter().enumerate() {
            f.add_path(*u, *v, w, Word::gen(k));
        }
        let folded = f.fold();
        if folded.num_vertices != 1 || folded.edges.len() != n {
            return Err(Error::InvalidMarking(
                "label map is not an isomorphism onto the free group".into(),
            ));
        }
        let mut inv = vec![Word::identity(); n];
        for (_, _, l, tag) in &folded.edges {
            let t = if l.is_inverse() {
                tag.inverse()
            } else {
                tag.clone()
            };
            inv[l.gen()] = folded.beta.conjugate(&t);
        }
        let g = MarkedGraph {
            alphabet: alphabet.clone(),
            num_vertices,
            base,
            edges,
            inverse_marking: inv,
        };
        Ok(g)
    }

    /// The rose with one petal per generator.
    pub fn rose(alphabet: &Alphabet) -> Self {
        let edges = (0..alphabet.rank()).map(|j| (0, 0, Word::gen(j))).collect();
        Self::new(alphabet, 1, 0, edges).expect("the rose is a marked graph")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[(usize, usize, Word)] {
        &self.edges
    }

    /// Alphabet `e0, e1, ...` of oriented edges.
    pub fn edge_alphabet(&self) -> Alphabet {
        Alphabet::indexed("e", self.edges.len())
    }

    pub fn inverse_marking(&self) -> &[Word] {
        &self.inverse_marking
    }

    /// Total label length.
    pub fn size(&self) -> usize {
        self.edges.iter().map(|e| e.2.len()).sum()
    }

    /// Read an edge-alphabet word through the labels.
    pub fn read_edge_word(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            let lab = &self.edges[l.gen()].2;
            if l.is_inverse() {
                out.push_word(&lab.inverse());
            } else {
                out.push_word(lab);
            }
        }
        out
    }

    /// Write an ambient word as a closed edge path at the base.
    pub fn edge_word_of(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            let p = &self.inverse_marking[l.gen()];
            if l.is_inverse() {
                out.push_word(&p.inverse());
            } else {
                out.push_word(p);
            }
        }
        out
    }

    /// Relabel every edge `w` by `f(w)`.
    pub fn transform(&self, f: &GroupMap) -> Result<MarkedGraph> {
        let edges = self
            .edges
            .iter()
            .map(|(u, v, w)| (*u, *v, f.apply(w)))
            .collect();
        MarkedGraph::new(f.codomain(), self.num_vertices, self.base, edges)
    }

    /// Like [`MarkedGraph::transform`], failing once total label length passes `limit`.
    pub fn transform_bounded(&self, f: &GroupMap, limit: usize) -> Result<MarkedGraph> {
        let mut total = 0;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (u, v, w) in &self.edges {
            let img = f.apply_bounded(w, limit)?;
            total += img.len();
            if total > limit {
                return Err(Error::ResourceLimit(format!(
                    "marked graph labels exceed {limit} letters"
                )));
            }
            edges.push((*u, *v, img));
        }
        MarkedGraph::new(f.codomain(), self.num_vertices, self.base, edges)
    }

    /// Core of the cover of this graph for the subgroup `a`, over the edge alphabet, as a
    /// based Stallings graph whose unbased core is the quotient of the minimal subtree.
    pub fn cover_graph(&self, a: &SubgroupGraph) -> SubgroupGraph {
        let gens: Vec<Word> = a.basis().iter().map(|b| self.edge_word_of(b)).collect();
        SubgroupGraph::from_generators(self.edges.len(), &gens)
    }

    pub fn to_json(&self) -> MarkedGraphJson {
        MarkedGraphJson {
            vertices: (0..self.num_vertices).collect(),
            edges: self
                .edges
                .iter()
                .map(|(u, v, w)| MarkedEdgeJson {
                    from: *u,
                    to: *v,
                    label: self.alphabet.format_word(w),
                })
                .collect(),
            base: self.base,
        }
    }

    pub fn from_json(alphabet: &Alphabet, j: &MarkedGraphJson) -> Result<Self> {
        let mut idx = BTreeMap::new();
        for (k, v) in j.vertices.iter().enumerate() {
            if idx.insert(*v, k).is_some() {
                return Err(Error::schema(
                    format!("vertices[{k}]"),
                    format!("duplicate vertex {v}"),
                ));
            }
        }
        let mut edges = Vec::new();
        for (k, e) in j.edges.iter().enumerate() {
            let from = *idx.get(&e.from).ok_or_else(|| {
                Error::schema(
                    format!("edges[{k}].from"),
                    format!("unknown vertex {}", e.from),
                )
            })?;
            let to = *idx.get(&e.to).ok_or_else(|| {
                Error::schema(format!("edges[{k}].to"), format!("unknown vertex {}", e.to))
            })?;
            let w = alphabet
                .parse_word(&e.label)
                .map_err(|err| Error::schema(format!("edges[{k}].label"), err.to_string()))?;
            edges.push((from, to, w));
        }
        let base = *idx
            .get(&j.base)
            .ok_or_else(|| Error::schema("base", format!("unknown vertex {}", j.base)))?;
        Self::new(alphabet, j.vertices.len(), base, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rose_and_transform() {
        let a = Alphabet::standard(2);
        let r = MarkedGraph::rose(&a);
        assert_eq!(r.inverse_marking(), &[Word::gen(0), Word::gen(1)]);
        let f = GroupMap::parse(&a, &["a b", "b"]).unwrap();
        let t = r.transform(&f).unwrap();
        assert_eq!(a.format_word(&t.edges()[0].2), "a b");
        for j in 0..2 {
            assert_eq!(t.read_edge_word(&t.inverse_marking()[j]), Word::gen(j));
        }
        assert_eq!(r.transform(&GroupMap::identity(&a)).unwrap(), r);
    }

    #[test]
    fn theta_graph_with_empty_label() {
        // Two vertices, three edges labelled 1, a, b: a theta graph marking F_2.
        let a = Alphabet::standard(2);
        let edges = vec![
            (0, 1, Word::identity()),
            (0, 1, Word::gen(0)),
            (0, 1, Word::gen(1)),
        ];
        let t = MarkedGraph::new(&a, 2, 0, edges).unwrap();
        for j in 0..2 {
            assert_eq!(t.read_edge_word(&t.inverse_marking()[j]), Word::gen(j));
        }
    }

    #[test]
    fn bad_markings() {
        let a = Alphabet::standard(2);
        let not_iso = vec![(0, 0, Word::gen(0).pow(2)), (0, 0, Word::gen(1))];
        assert!(MarkedGraph::new(&a, 1, 0, not_iso).is_err());
        let leaf = vec![
            (0, 0, Word::gen(0)),
            (0, 0, Word::gen(1)),
            (0, 1, Word::identity()),
        ];
        assert!(MarkedGraph::new(&a, 2, 0, leaf).is_err());
    }

    #[test]
    fn json_errors_name_the_edge() {
        let a = Alphabet::standard(2);
        let j = MarkedGraphJson {
            vertices: vec![0],
            edges: vec![
                MarkedEdgeJson {
                    from: 0,
                    to: 0,
                    label: "a".into(),
                },
                MarkedEdgeJson {
                    from: 0,
                    to: 7,
                    label: "b".into(),
                },
            ],
            base: 0,
        };
        let err = MarkedGraph::from_json(&a, &j).unwrap_err();
        assert!(err.to_string().contains("edges[1].to"), "{err}");
    }
}
