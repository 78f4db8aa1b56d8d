//! Brute-force oracles shared by the integration tests. None of these call the
//! algorithms they check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use outraag::freegroup::{Alphabet, GroupMap, Letter, Nielsen, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    Word::reduce((0..n).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))))
}

pub fn random_nielsen_product(rng: &mut ChaCha8Rng, al: &Alphabet, max_moves: usize) -> GroupMap {
    let gens = Nielsen::generators(al.rank());
    let k = rng.gen_range(1..=max_moves);
    let mut f = GroupMap::identity(al);
    for _ in 0..k {
        let m = gens[rng.gen_range(0..gens.len())];
        f = f.compose(&m.to_map(al)).unwrap();
    }
    f
}

// ---------- free groups ----------

/// Free reduction by a stack, on raw signed integers.
pub fn reduce_raw(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &x in w {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

pub fn raw(w: &Word) -> Vec<i32> {
    w.letters().iter().map(|l| l.raw()).collect()
}

fn inv_raw(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|x| -x).collect()
}

fn apply_raw(images: &[Vec<i32>], w: &[i32]) -> Vec<i32> {
    let mut out = Vec::new();
    for &x in w {
        let img = &images[(x.unsigned_abs() - 1) as usize];
        if x > 0 {
            out.extend_from_slice(img);
        } else {
            out.extend(inv_raw(img));
        }
    }
    reduce_raw(&out)
}

/// Constructive inner-automorphism test: `f(x_0) = u x_0 u^-1` pins `u` down to
/// `s x_0^k`, and the other images decide whether some small `k` works.
pub fn inner_oracle(images: &[Vec<i32>]) -> Option<Vec<i32>> {
    let n = images.len();
    let w = &images[0];
    // w must be s x0 s^-1 with s not ending in x0^{±1}.
    if w.len() % 2 == 0 {
        return None;
    }
    let h = w.len() / 2;
    if w[h] != 1 {
        return None;
    }
    let s: Vec<i32> = w[..h].to_vec();
    if inv_raw(&w[h + 1..]) != s {
        return None;
    }
    let bound = images.iter().map(Vec::len).sum::<usize>() as i64 + 2;
    for k in -bound..=bound {
        let mut u = s.clone();
        for _ in 0..k.unsigned_abs() {
            u.push(if k > 0 { 1 } else { -1 });
        }
        let u = reduce_raw(&u);
        let ok = (0..n).all(|j| {
            let mut c = u.clone();
            c.push(j as i32 + 1);
            c.extend(inv_raw(&u));
            reduce_raw(&c) == images[j]
        });
        if ok {
            return Some(u);
        }
    }
    None
}

pub fn map_raw(f: &GroupMap) -> Vec<Vec<i32>> {
    f.images().iter().map(raw).collect()
}

pub fn compose_raw(f: &[Vec<i32>], g: &[Vec<i32>]) -> Vec<Vec<i32>> {
    g.iter().map(|w| apply_raw(f, w)).collect()
}

// ---------- Stallings graphs ----------

/// Folded core by repeated identification of equal-labelled edges at a vertex. Returns
/// (vertices, edges) of the core after pruning leaves other than the base.
pub fn naive_fold(gens: &[Vec<i32>]) -> (usize, usize) {
    let mut edges: Vec<(usize, i32, usize)> = Vec::new();
    let mut nv = 1;
    for g in gens {
        let mut cur = 0;
        for (k, &x) in g.iter().enumerate() {
            let next = if k + 1 == g.len() {
                0
            } else {
                nv += 1;
                nv - 1
            };
            if x > 0 {
                edges.push((cur, x, next));
            } else {
                edges.push((next, -x, cur));
            }
            cur = next;
        }
    }
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    loop {
        let mut merged = false;
        let cur: Vec<(usize, i32, usize)> = edges
            .iter()
            .map(|&(u, l, v)| (find(&mut parent, u), l, find(&mut parent, v)))
            .collect();
        let mut out: BTreeMap<(usize, i32), usize> = BTreeMap::new();
        let mut inc: BTreeMap<(usize, i32), usize> = BTreeMap::new();
        for &(u, l, v) in &cur {
            for (map, key, other) in [(&mut out, (u, l), v), (&mut inc, (v, l), u)] {
                match map.get(&key) {
                    Some(&o) if find(&mut parent, o) != find(&mut parent, other) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, other));
                        parent[a.max(b)] = a.min(b);
                        merged = true;
                    }
                    Some(_) => {}
                    None => {
                        map.insert(key, other);
                    }
                }
            }
            if merged {
                break;
            }
        }
        let mut set: BTreeSet<(usize, i32, usize)> = BTreeSet::new();
        for &(u, l, v) in &edges {
            set.insert((find(&mut parent, u), l, find(&mut parent, v)));
        }
        edges = set.into_iter().collect();
        if !merged {
            break;
        }
    }
    // Prune non-base leaves.
    let base = find(&mut parent, 0);
    loop {
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for &(u, _, v) in &edges {
            *deg.entry(u).or_default() += 1;
            *deg.entry(v).or_default() += 1;
        }
        let before = edges.len();
        edges.retain(|&(u, _, v)| (u == base || deg[&u] > 1) && (v == base || deg[&v] > 1));
        if edges.len() == before {
            let mut verts: BTreeSet<usize> = BTreeSet::new();
            verts.insert(base);
            for &(u, _, v) in &edges {
                verts.insert(u);
                verts.insert(v);
            }
            return (verts.len(), edges.len());
        }
    }
}

// ---------- Farey graph ----------

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn canon(p: i64, q: i64) -> (i64, i64) {
    if q < 0 || (q == 0 && p < 0) {
        (-p, -q)
    } else {
        (p, q)
    }
}

/// Distances from `1/0` by BFS over reduced fractions in the box `|p|, |q| <= bound`.
pub fn farey_bfs(bound: i64) -> BTreeMap<(i64, i64), u32> {
    let mut verts = BTreeSet::new();
    for p in -bound..=bound {
        for q in -bound..=bound {
            if gcd(p, q) == 1 {
                verts.insert(canon(p, q));
            }
        }
    }
    let verts: Vec<(i64, i64)> = verts.into_iter().collect();
    let mut dist = BTreeMap::new();
    dist.insert((1, 0), 0);
    let mut q = VecDeque::from([(1i64, 0i64)]);
    while let Some(u) = q.pop_front() {
        let d = dist[&u];
        for &v in &verts {
            if (u.0 * v.1 - u.1 * v.0).abs() == 1 && !dist.contains_key(&v) {
                dist.insert(v, d + 1);
                q.push_back(v);
            }
        }
    }
    dist
}

// ---------- right-angled Artin groups ----------

pub type Syl = (usize, i64);

// Words of at most eight syllables packed one byte each, low byte first:
// (generator + 1) << 5 | (exponent + 16), so a zero byte ends the word.
fn pack(w: &[Syl]) -> u64 {
    assert!(w.len() <= 8);
    w.iter().enumerate().fold(0, |acc, (i, &(g, e))| {
        assert!(g < 7 && (-15..=15).contains(&e));
        acc | (((g as u64 + 1) << 5) | (e + 16) as u64) << (8 * i)
    })
}

fn unpack(mut x: u64) -> Vec<Syl> {
    let mut out = Vec::new();
    while x != 0 {
        let b = x & 0xff;
        out.push(((b >> 5) as usize - 1, (b & 31) as i64 - 16));
        x >>= 8;
    }
    out
}

/// Every generator sequence of length `len`, each with the sign patterns `signs` yields.
pub fn for_words(
    n: usize,
    len: usize,
    signs: &dyn Fn(&[usize]) -> Vec<Vec<i64>>,
    f: &mut dyn FnMut(&[Syl]),
) {
    let mut gens = vec![0usize; len];
    loop {
        for pat in signs(&gens) {
            let w: Vec<Syl> = gens.iter().copied().zip(pat).collect();
            f(&w);
        }
        let mut k = 0;
        loop {
            if k == len {
                return;
            }
            gens[k] += 1;
            if gens[k] < n {
                break;
            }
            gens[k] = 0;
            k += 1;
        }
    }
}

pub fn all_signs(gens: &[usize]) -> Vec<Vec<i64>> {
    (0u32..1 << gens.len())
        .map(|m| {
            (0..gens.len())
                .map(|i| if m >> i & 1 == 1 { -1 } else { 1 })
                .collect()
        })
        .collect()
}

/// Two sign patterns per sequence: all positive, and one mixed pattern fixed by the sequence.
pub fn two_signs(gens: &[usize]) -> Vec<Vec<i64>> {
    let h = gens.iter().fold(0x9e37u64, |h, &g| {
        h.wrapping_mul(31).wrapping_add(g as u64 + 7)
    });
    vec![
        vec![1; gens.len()],
        (0..gens.len())
            .map(|i| if (h >> (i % 13)) & 1 == 1 { -1 } else { 2 })
            .collect(),
    ]
}

/// Every word reachable from `w` by the moves: delete a zero syllable, merge two adjacent
/// syllables of one generator, swap two adjacent commuting syllables. Words are packed one
/// syllable per byte.
fn move_closure(adj: &dyn Fn(usize, usize) -> bool, w: &[Syl]) -> FxHashSet<u64> {
    let nv = w.iter().map(|s| s.0 + 1).max().unwrap_or(0);
    let mut comm = [[false; 7]; 7];
    for a in 0..nv {
        for b in 0..nv {
            comm[a][b] = a != b && adj(a, b);
        }
    }
    let start: Vec<Syl> = w.iter().copied().filter(|s| s.1 != 0).collect();
    let mut seen = FxHashSet::default();
    seen.insert(pack(&start));
    let mut queue = vec![pack(&start)];
    while let Some(x) = queue.pop() {
        let n = (64 - x.leading_zeros() as usize).div_ceil(8);
        for i in 0..n.saturating_sub(1) {
            let (a, b) = ((x >> (8 * i)) & 0xff, (x >> (8 * i + 8)) & 0xff);
            let (ga, gb) = ((a >> 5) as usize - 1, (b >> 5) as usize - 1);
            let y = if ga == gb {
                let e = (a & 31) as i64 + (b & 31) as i64 - 32;
                assert!((-15..=15).contains(&e));
                let low = x & ((1u64 << (8 * i)) - 1);
                let high = ((x as u128) >> (8 * i + 16)) as u64;
                if e == 0 {
                    low | ((high as u128) << (8 * i)) as u64
                } else {
                    let byte = (a & !31) | (e + 16) as u64;
                    low | byte << (8 * i) | ((high as u128) << (8 * i + 8)) as u64
                }
            } else if comm[ga][gb] {
                let cleared = x & !(0xffffu64 << (8 * i));
                cleared | b << (8 * i) | a << (8 * i + 8)
            } else {
                continue;
            };
            if seen.insert(y) {
                queue.push(y);
            }
        }
    }
    seen
}

/// The words of fewest syllables reachable from `w`.
pub fn oracle_min(adj: &dyn Fn(usize, usize) -> bool, w: &[Syl]) -> BTreeSet<Vec<Syl>> {
    let all = move_closure(adj, w);
    let m = all.iter().map(|x| x.leading_zeros()).max().unwrap_or(64) / 8;
    all.into_iter()
        .filter(|x| x.leading_zeros() / 8 == m)
        .map(unpack)
        .collect()
}

/// Orders on positions of a reduced word computed from the orbit under swaps, tracking
/// each syllable by its position in `w`: (`≺`, `≺ᵐ`).
pub fn oracle_orders(
    adj: &dyn Fn(usize, usize) -> bool,
    w: &[Syl],
) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
    let n = w.len();
    assert!(n <= 8);
    // A permutation of positions, four bits per slot.
    let get = |s: u32, i: usize| (s >> (4 * i) & 15) as usize;
    let start = (0..n).fold(0u32, |acc, i| acc | (i as u32) << (4 * i));
    let mut seen = FxHashSet::default();
    seen.insert(start);
    let mut queue = vec![start];
    while let Some(s) = queue.pop() {
        for i in 0..n.saturating_sub(1) {
            let (a, b) = (get(s, i), get(s, i + 1));
            if adj(w[a].0, w[b].0) {
                let t = s & !(0xff << (4 * i)) | (b as u32) << (4 * i) | (a as u32) << (4 * i + 4);
                if seen.insert(t) {
                    queue.push(t);
                }
            }
        }
    }
    // Bit x*8+y: x came after y somewhere, or x sat right before y somewhere.
    let (mut reversed, mut adjacent) = (0u64, 0u64);
    for &s in &seen {
        for i in 0..n {
            for j in i + 1..n {
                reversed |= 1 << (get(s, j) * 8 + get(s, i));
            }
            if i + 1 < n {
                adjacent |= 1 << (get(s, i) * 8 + get(s, i + 1));
            }
        }
    }
    let mut prec = BTreeSet::new();
    let mut prec_m = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            if x != y && reversed >> (x * 8 + y) & 1 == 0 {
                prec.insert((x, y));
                if adjacent >> (x * 8 + y) & 1 == 1 {
                    prec_m.insert((x, y));
                }
            }
        }
    }
    (prec, prec_m)
}

pub fn transitive_closure(n: usize, r: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
    let mut m = vec![vec![false; n]; n];
    for &(i, j) in r {
        m[i][j] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                out.insert((i, j));
            }
        }
    }
    out
}

// ---------- graphs ----------

/// Adjacency bitmasks of one graph per isomorphism class on `n` vertices, grown one
/// vertex at a time and deduplicated by a degree-respecting canonical form.
pub fn graphs_up_to_iso(n: usize) -> Vec<Vec<u32>> {
    let mut classes: Vec<Vec<u32>> = vec![vec![]];
    for k in 1..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &classes {
            for nb in 0u32..(1 << (k - 1)) {
                let mut h = g.clone();
                for (i, row) in h.iter_mut().enumerate() {
                    if nb >> i & 1 == 1 {
                        *row |= 1 << (k - 1);
                    }
                }
                h.push(nb);
                if seen.insert(canonical_form(&h)) {
                    next.push(h);
                }
            }
        }
        classes = next;
    }
    classes
}

fn canonical_form(adj: &[u32]) -> Vec<u32> {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|r| r.count_ones()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| deg[v]);
    let mut best: Option<Vec<u32>> = None;
    // Permute only within blocks of equal degree.
    fn rec(
        pos: usize,
        order: &mut Vec<usize>,
        deg: &[u32],
        adj: &[u32],
        best: &mut Option<Vec<u32>>,
    ) {
        let n = order.len();
        if pos == n {
            let inv = {
                let mut inv = vec![0; n];
                for (i, &v) in order.iter().enumerate() {
                    inv[v] = i;
                }
                inv
            };
            let code: Vec<u32> = order
                .iter()
                .map(|&v| {
                    (0..n)
                        .filter(|&w| adj[v] >> w & 1 == 1)
                        .fold(0u32, |m, w| m | 1 << inv[w])
                })
                .collect();
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        for i in pos..n {
            if deg[order[i]] != deg[order[pos]] {
                break;
            }
            order.swap(pos, i);
            rec(pos + 1, order, deg, adj, best);
            order.swap(pos, i);
        }
    }
    rec(0, &mut order, &deg, adj, &mut best);
    best.unwrap_or_default()
}

pub fn edges_of(adj: &[u32]) -> Vec<(usize, usize)> {
    let n = adj.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if adj[i] >> j & 1 == 1 {
                out.push((i, j));
            }
        }
    }
    out
}
