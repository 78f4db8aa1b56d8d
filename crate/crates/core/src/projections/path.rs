use serde::Serialize;

use crate::error::{Error, Result};
use crate::factors::FreeFactorClass;
use crate::freegroup::{GroupMap, Nielsen, Word};

use super::{project_tree, union_diameter, MarkedGraph, ProjectionSet};

fn signed(w: &Word, inv: bool) -> Word {
    if inv {
        w.inverse()
    } else {
        w.clone()
    }
}

/// Elementary moves `n_1, ..., n_m` with `f = n_1 ∘ ... ∘ n_m`.
///
/// Greedy Nielsen reduction of the image tuple; fails if no single transvection shortens a
/// non-permutation tuple.
pub fn nielsen_factorization(f: &GroupMap) -> Result<Vec<Nielsen>> {
    let n = f.domain().rank();
    if f.codomain().rank() != n {
        return Err(Error::AlphabetMismatch(
            "factorization needs an automorphism".into(),
        ));
    }
    let mut im: Vec<Word> = f.images().to_vec();
    // Right-composed moves: f ∘ ψ_1 ∘ ... ∘ ψ_k has images `im`.
    let mut right = Vec::new();
    loop {
        if im.iter().all(|w| w.len() == 1) {
            break;
        }
        let total: usize = im.iter().map(Word::len).sum();
        let mut best: Option<(usize, Nielsen, Word)> = None;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for inv in [false, true] {
                    let r = im[i].mul_word(&signed(&im[j], inv));
                    let l = signed(&im[j], inv).mul_word(&im[i]);
                    for (w, mv) in [
                        (r, Nielsen::Right { i, j, inv }),
                        (l, Nielsen::Left { i, j, inv }),
                    ] {
                        let t = total - im[i].len() + w.len();
                        if t < total && best.as_ref().is_none_or(|b| t < b.0) {
                            best = Some((t, mv, w));
                        }
                    }
                }
            }
        }
        let Some((_, mv, w)) = best else {
            return Err(Error::ResourceLimit(
                "Nielsen reduction stalled before reaching a permutation".into(),
            ));
        };
        let i = match mv {
            Nielsen::Right { i, .. } | Nielsen::Left { i, .. } => i,
            _ => unreachable!(),
        };
        im[i] = w;
        right.push(mv);
    }
    if im.iter().any(Word::is_empty) {
        return Err(Error::NotSurjective);
    }
    // Signed permutation: clear signs, then sort.
    for (i, w) in im.iter_mut().enumerate() {
        if w.letters()[0].is_inverse() {
            *w = w.inverse();
            right.push(Nielsen::Invert { i });
        }
    }
    for i in 0..n {
        let k = (i..n)
            .find(|&k| im[k].letters()[0].gen() == i)
            .ok_or(Error::NotSurjective)?;
        if k != i {
            im.swap(i, k);
            right.push(Nielsen::Swap { i, j: k });
        }
    }
    Ok(right.into_iter().rev().map(Nielsen::inverse).collect())
}

/// `T_0, ..., T_N` with `T_k = (n_1 ∘ ... ∘ n_k) · T_0`.
#[derive(Clone, Debug)]
pub struct TreePath {
    trees: Vec<MarkedGraph>,
}

impl TreePath {
    pub fn new(trees: Vec<MarkedGraph>) -> Result<Self> {
        if trees.len() < 2 {
            return Err(Error::InvalidMarking(
                "a tree path needs at least one step".into(),
            ));
        }
        Ok(TreePath { trees })
    }

    /// Path of partial products of `moves` applied to `start`; labels are capped at `limit`.
    pub fn from_moves(start: &MarkedGraph, moves: &[Nielsen], limit: usize) -> Result<Self> {
        let al = start.alphabet();
        let mut prefix = GroupMap::identity(al);
        let mut trees = vec![start.clone()];
        for mv in moves {
            prefix = prefix.compose_bounded(&mv.to_map(al), limit)?;
            trees.push(start.transform_bounded(&prefix, limit)?);
        }
        if moves.is_empty() {
            trees.push(start.clone());
        }
        Self::new(trees)
    }

    pub fn trees(&self) -> &[MarkedGraph] {
        &self.trees
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.trees.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn projections(&self, a: &FreeFactorClass) -> Result<Vec<ProjectionSet>> {
        self.trees.iter().map(|t| project_tree(a, t)).collect()
    }

    /// `max_k d_A(T_k, T_{k+1})`.
    pub fn step_bound(&self, a: &FreeFactorClass) -> Result<u32> {
        Ok(step_bound_of(&self.projections(a)?))
    }
}

fn step_bound_of(p: &[ProjectionSet]) -> u32 {
    p.windows(2)
        .map(|w| union_diameter(&w[0], &w[1]))
        .max()
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalRecord {
    pub factor: usize,
    pub key: String,
    pub a: usize,
    pub b: usize,
    /// `d_A(T_0, T_N)`.
    pub total: u32,
    /// `max_k d_A(T_k, T_{k+1})`.
    pub step: u32,
    pub m: u32,
    pub l: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairOrder {
    pub before: usize,
    pub after: usize,
    /// `b_A < a_B`.
    pub ordered: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalReport {
    pub records: Vec<IntervalRecord>,
    pub pairs: Vec<PairOrder>,
    pub n: usize,
    pub sum: u64,
    /// `5 s L N`.
    pub bound: u64,
    pub threshold: u32,
}

impl IntervalReport {
    pub fn ordered(&self) -> bool {
        self.pairs.iter().all(|p| p.ordered)
    }

    pub fn sum_ok(&self) -> bool {
        self.sum <= self.bound
    }
}

/// Activity intervals `[a_A, b_A]` along `path`, the ordering of each pair `(A, B)` listed in
/// `ordered_pairs` (indices into `factors`, `A` first), and the sum bound with `s` factors per
/// step.
pub fn intervals_and_order(
    path: &TreePath,
    factors: &[FreeFactorClass],
    ordered_pairs: &[(usize, usize)],
    m: u32,
    l: u32,
    s: u64,
) -> Result<IntervalReport> {
    let n = path.len();
    let reach = 2 * m + l;
    let threshold = 5 * m + 3 * l;
    let mut records = Vec::with_capacity(factors.len());
    let mut sum = 0u64;
    for (idx, a) in factors.iter().enumerate() {
        let p = path.projections(a)?;
        let total = union_diameter(&p[0], &p[n]);
        if total < threshold {
            return Err(Error::ThresholdViolated(format!(
                "factor {idx}: d_A(T_0, T_N) = {total} < {threshold}"
            )));
        }
        let first = (0..=n)
            .filter(|&k| union_diameter(&p[0], &p[k]) <= reach)
            .max()
            .unwrap_or(0);
        let last = (first..=n)
            .find(|&k| union_diameter(&p[k], &p[n]) <= reach)
            .unwrap_or(n);
        sum += u64::from(total);
        records.push(IntervalRecord {
            factor: idx,
            key: a.key().to_string(),
            a: first,
            b: last,
            total,
            step: step_bound_of(&p),
            m,
            l,
        });
    }
    let pairs = ordered_pairs
        .iter()
        .map(|&(x, y)| PairOrder {
            before: x,
            after: y,
            ordered: records[x].b < records[y].a,
        })
        .collect();
    Ok(IntervalReport {
        records,
        pairs,
        n,
        sum,
        bound: 5 * s * u64::from(l) * n as u64,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::Alphabet;

    fn compose_all(al: &Alphabet, moves: &[Nielsen]) -> GroupMap {
        moves.iter().fold(GroupMap::identity(al), |acc, m| {
            acc.compose(&m.to_map(al)).unwrap()
        })
    }

    #[test]
    fn factorization_recovers_map() {
        let al = Alphabet::standard(3);
        for imgs in [
            ["a b", "b a b", "c"],
            ["c^-1", "a", "b"],
            ["a b a b a", "a b a", "c b"],
            ["a", "b", "c"],
        ] {
            let f = GroupMap::parse(&al, &imgs).unwrap();
            let moves = nielsen_factorization(&f).unwrap();
            assert_eq!(compose_all(&al, &moves).images(), f.images(), "{imgs:?}");
        }
        let seed = Nielsen::Right {
            i: 0,
            j: 1,
            inv: false,
        }
        .to_map(&al)
        .compose(
            &Nielsen::Right {
                i: 1,
                j: 0,
                inv: false,
            }
            .to_map(&al),
        )
        .unwrap();
        assert_eq!(
            seed.images(),
            GroupMap::parse(&al, &["a b", "b a b", "c"])
                .unwrap()
                .images()
        );
    }

    #[test]
    fn path_partial_products() {
        let al = Alphabet::standard(2);
        let moves = [Nielsen::Right {
            i: 0,
            j: 1,
            inv: false,
        }; 3];
        let p = TreePath::from_moves(&MarkedGraph::rose(&al), &moves, 1000).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(al.format_word(&p.trees()[3].edges()[0].2), "a b b b");
        let whole = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
        assert_eq!(p.step_bound(&whole).unwrap(), 1);
    }

    #[test]
    fn threshold_is_enforced() {
        let al = Alphabet::standard(2);
        let moves = [Nielsen::Right {
            i: 0,
            j: 1,
            inv: false,
        }];
        let p = TreePath::from_moves(&MarkedGraph::rose(&al), &moves, 1000).unwrap();
        let whole = FreeFactorClass::parse(&al, &["a", "b"]).unwrap();
        assert!(matches!(
            intervals_and_order(&p, &[whole.clone()], &[], 1, 1, 1),
            Err(Error::ThresholdViolated(_))
        ));
        let r = intervals_and_order(&p, &[whole], &[], 0, 0, 1).unwrap();
        assert!(r.records[0].a < r.records[0].b);
    }
}
