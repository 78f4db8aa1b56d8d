//! Stallings folding on directed letter-labelled graphs, optionally carrying
//! a tag word per edge that records which auxiliary generators a path crosses.

use crate::freegroup::{Letter, Word};

#[derive(Clone, Debug)]
struct FEdge {
    from: usize,
    to: usize,
    label: Letter,
    tag: Word,
    alive: bool,
}

/// Mutable graph under construction. Call [`Folder::fold`] to get a folded result.
#[derive(Clone, Debug)]
pub struct Folder {
    slots: usize,
    tagged: bool,
    edges: Vec<FEdge>,
    inc: Vec<Vec<usize>>,
    alive: Vec<bool>,
    base: usize,
    beta: Word,
    pending: Vec<(usize, usize, Word)>,
    /// For a merged vertex: the survivor and the tag of the crossing survivor -> merged.
    fwd: Vec<Option<(usize, Word)>>,
}

/// Folded graph with vertices renumbered `0..num_vertices`.
#[derive(Clone, Debug)]
pub struct Folded {
    pub num_vertices: usize,
    pub base: usize,
    /// `(from, to, label, tag)`.
    pub edges: Vec<(usize, usize, Letter, Word)>,
    /// Base-loop tags must be conjugated by `beta` to recover their original meaning.
    pub beta: Word,
}

impl Folder {
    /// `rank` is the size of the label alphabet.
    pub fn new(rank: usize, tagged: bool) -> Self {
        Folder {
            slots: 2 * rank,
            tagged,
            edges: Vec::new(),
            inc: vec![Vec::new()],
            alive: vec![true],
            base: 0,
            beta: Word::identity(),
            pending: Vec::new(),
            fwd: vec![None],
        }
    }

    /// Folder with `n` initial vertices (at least one) and the given base.
    pub fn with_vertices(rank: usize, tagged: bool, n: usize, base: usize) -> Self {
        let mut f = Folder::new(rank, tagged);
        for _ in 1..n.max(1) {
            f.add_vertex();
        }
        f.base = base;
        f
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn add_vertex(&mut self) -> usize {
        self.inc.push(Vec::new());
        self.alive.push(true);
        self.fwd.push(None);
        self.inc.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: Letter, tag: Word) {
        debug_assert!(label.slot() < self.slots);
        let id = self.edges.len();
        self.edges.push(FEdge {
            from,
            to,
            label,
            tag: if self.tagged { tag } else { Word::identity() },
            alive: true,
        });
        self.inc[from].push(id);
        self.inc[to].push(id);
    }

    /// Declare `x` and `y` equal; crossing from `x` to `y` carries `tag`.
    pub fn identify(&mut self, x: usize, y: usize, tag: Word) {
        self.pending.push((x, y, tag));
    }

    /// Add a closed path at `start` reading `word`; the first edge carries `tag`.
    pub fn add_loop(&mut self, start: usize, word: &Word, tag: Word) {
        let n = word.len();
        if n == 0 {
            self.identify(start, start, tag);
            return;
        }
        let mut cur = start;
        let mut tag = Some(tag);
        for (i, &l) in word.letters().iter().enumerate() {
            let next = if i + 1 == n { start } else { self.add_vertex() };
            self.add_edge(cur, next, l, tag.take().unwrap_or_default());
            cur = next;
        }
    }

    /// Add a path from `start` to `end` reading `word`, tag on the first edge or on the
    /// identification when the word is empty.
    pub fn add_path(&mut self, start: usize, end: usize, word: &Word, tag: Word) {
        let n = word.len();
        if n == 0 {
            self.identify(start, end, tag);
            return;
        }
        let mut cur = start;
        let mut tag = Some(tag);
        for (i, &l) in word.letters().iter().enumerate() {
            let next = if i + 1 == n { end } else { self.add_vertex() };
            self.add_edge(cur, next, l, tag.take().unwrap_or_default());
            cur = next;
        }
    }

    fn merge(&mut self, x: usize, y: usize, t: Word, work: &mut Vec<usize>) {
        if x == y {
            return;
        }
        let (keep, die, o) = if self.inc[x].len() >= self.inc[y].len() {
            (x, y, t)
        } else {
            (y, x, t.inverse())
        };
        let moved = std::mem::take(&mut self.inc[die]);
        let oi = if self.tagged {
            o.inverse()
        } else {
            Word::identity()
        };
        for &e in &moved {
            let edge = &mut self.edges[e];
            if !edge.alive {
                continue;
            }
            if edge.from == die {
                edge.from = keep;
                if self.tagged {
                    edge.tag = o.mul_word(&edge.tag);
                }
            }
            if edge.to == die {
                edge.to = keep;
                if self.tagged {
                    edge.tag = edge.tag.mul_word(&oi);
                }
            }
        }
        // Loops stay listed twice, edges between `die` and `keep` become loops at `keep`.
        for e in moved {
            if self.edges[e].alive {
                self.inc[keep].push(e);
            }
        }
        if self.base == die {
            self.base = keep;
            if self.tagged {
                self.beta = self.beta.mul_word(&oi);
            }
        }
        self.alive[die] = false;
        self.fwd[die] = Some((keep, o));
        work.push(keep);
    }

    /// Look for one folding conflict at `v`; perform it and return true if found.
    fn fold_at(&mut self, v: usize, seen: &mut [Option<usize>], work: &mut Vec<usize>) -> bool {
        for s in seen.iter_mut() {
            *s = None;
        }
        // Compact the incidence list.
        let edges = &self.edges;
        self.inc[v].retain(|&e| edges[e].alive);
        let mut conflict = None;
        'scan: for idx in 0..self.inc[v].len() {
            let e = self.inc[v][idx];
            let edge = &self.edges[e];
            let mut dirs = [None, None];
            if edge.from == v {
                dirs[0] = Some(edge.label.slot());
            }
            if edge.to == v {
                dirs[1] = Some(edge.label.inverse().slot());
            }
            for (d, slot) in dirs.into_iter().enumerate() {
                let Some(slot) = slot else { continue };
                match seen[slot] {
                    None => seen[slot] = Some(2 * e + d),
                    Some(prev) if prev == 2 * e + d => {}
                    Some(prev) => {
                        conflict = Some((prev, 2 * e + d));
                        break 'scan;
                    }
                }
            }
        }
        let Some((p, q)) = conflict else {
            return false;
        };
        let far = |me: &Self, code: usize| -> (usize, Word) {
            let edge = &me.edges[code / 2];
            if code % 2 == 0 {
                (edge.to, edge.tag.clone())
            } else {
                (edge.from, edge.tag.inverse())
            }
        };
        let (a, t1) = far(self, p);
        let (b, t2) = far(self, q);
        self.edges[q / 2].alive = false;
        let t = if self.tagged {
            t1.inverse().mul_word(&t2)
        } else {
            Word::identity()
        };
        self.merge(a, b, t, work);
        work.push(v);
        true
    }

    pub fn fold(mut self) -> Folded {
        let mut work: Vec<usize> = Vec::new();
        for (x, y, t) in std::mem::take(&mut self.pending) {
            let (x, ox) = self.resolve(x);
            let (y, oy) = self.resolve(y);
            let t = if self.tagged {
                ox.mul_word(&t).mul_word(&oy.inverse())
            } else {
                t
            };
            self.merge(x, y, t, &mut work);
        }
        work.extend((0..self.inc.len()).filter(|&v| self.alive[v]));
        let mut seen = vec![None; self.slots];
        while let Some(v) = work.pop() {
            if !self.alive[v] {
                continue;
            }
            while self.alive[v] && self.fold_at(v, &mut seen, &mut work) {}
        }
        self.finish()
    }

    /// Live vertex `r` equal to `v`, with the tag of the crossing `r -> v`.
    fn resolve(&self, mut v: usize) -> (usize, Word) {
        let mut acc = Word::identity();
        while let Some((k, o)) = &self.fwd[v] {
            if self.tagged {
                acc = o.mul_word(&acc);
            }
            v = *k;
        }
        (v, acc)
    }

    fn finish(self) -> Folded {
        let mut num = vec![usize::MAX; self.inc.len()];
        let mut n = 0;
        for v in 0..self.inc.len() {
            if self.alive[v] {
                num[v] = n;
                n += 1;
            }
        }
        let edges = self
            .edges
            .into_iter()
            .filter(|e| e.alive)
            .map(|e| (num[e.from], num[e.to], e.label, e.tag))
            .collect();
        Folded {
            num_vertices: n,
            base: num[self.base],
            edges,
            beta: self.beta,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aa_and_a_fold_to_loop() {
        let mut f = Folder::new(2, true);
        let a = Word::gen(0);
        f.add_loop(0, &a.pow(2), Word::gen(0));
        f.add_loop(0, &a, Word::gen(1));
        let r = f.fold();
        assert_eq!(r.num_vertices, 1);
        assert_eq!(r.edges.len(), 1);
    }

    #[test]
    fn identification_path_then_fold() {
        // a-loop and b-path with identified endpoints: a rose.
        let mut f = Folder::new(2, false);
        let v = f.add_vertex();
        f.add_edge(0, 0, Letter::new(0, true), Word::identity());
        f.add_edge(0, v, Letter::new(1, true), Word::identity());
        f.identify(v, 0, Word::identity());
        let r = f.fold();
        assert_eq!(r.num_vertices, 1);
        assert_eq!(r.edges.len(), 2);
    }
}
