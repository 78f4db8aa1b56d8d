//! The Farey graph: primitive integer pairs up to sign, adjacent when they form a basis of Z^2.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::freegroup::{GroupMap, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FareyVertex {
    p: i64,
    q: i64,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn det(a: (i128, i128), b: (i128, i128)) -> i128 {
    a.0 * b.1 - a.1 * b.0
}

impl FareyVertex {
    pub const INFINITY: FareyVertex = FareyVertex { p: 1, q: 0 };
    pub const ZERO: FareyVertex = FareyVertex { p: 0, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p as i128, q as i128) != 1 {
            return Err(Error::NonPrimitiveImage(p, q));
        }
        let (p, q) = if p < 0 || (p == 0 && q < 0) {
            (p.checked_neg(), q.checked_neg())
        } else {
            (Some(p), Some(q))
        };
        match (p, q) {
            (Some(p), Some(q)) => Ok(FareyVertex { p, q }),
            _ => Err(Error::Overflow("farey vertex")),
        }
    }

    fn from_wide(p: i128, q: i128) -> Result<Self> {
        let p = i64::try_from(p).map_err(|_| Error::Overflow("farey vertex"))?;
        let q = i64::try_from(q).map_err(|_| Error::Overflow("farey vertex"))?;
        Self::new(p, q)
    }

    /// Abelianized image of a rank-one factor generator written in a rank-two basis.
    pub fn of_basis_word(w: &Word) -> Result<Self> {
        let v = w.abelianize(2);
        Self::new(v[0], v[1])
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    fn wide(self) -> (i128, i128) {
        (self.p as i128, self.q as i128)
    }

    pub fn adjacent(self, other: FareyVertex) -> bool {
        det(self.wide(), other.wide()).abs() == 1
    }

    /// Exact graph distance.
    pub fn distance(self, other: FareyVertex) -> u32 {
        if self == other {
            return 0;
        }
        if self.adjacent(other) {
            return 1;
        }
        // Move `self` to infinity by the inverse of [[p, r], [q, s]] with p s - q r = 1.
        let (p, q) = self.wide();
        let (_, x, y) = ext_gcd(p, q);
        // p x + q y = 1, so take s = x, r = -y.
        let (r, s) = (-y, x);
        let (a, b) = other.wide();
        let a2 = s * a - r * b;
        let b2 = -q * a + p * b;
        let (a2, b2) = if b2 < 0 { (-a2, -b2) } else { (a2, b2) };
        distance_from_infinity(a2, b2)
    }
}

/// Distance from `1/0` to `a/b` with `b > 0` and `gcd(a, b) = 1`, by breadth-first search
/// on the continued-fraction ladder, which contains every geodesic.
fn distance_from_infinity(a: i128, b: i128) -> u32 {
    if b == 0 {
        return 0;
    }
    if b == 1 {
        return 1;
    }
    let a0 = a.div_euclid(b);
    let (mut num, mut den) = (a - a0 * b, b);
    let mut quotients = Vec::new();
    while num != 0 {
        // Continued fraction of num/den with 0 < num < den.
        let qk = den / num;
        quotients.push(qk);
        (num, den) = (den - qk * num, num);
    }
    // Convergents with a0 = 0: c_{-1} = 1/0, c_0 = 0/1.
    let mut verts: Vec<(i128, i128)> = vec![(1, 0), (0, 1)];
    let (mut prev2, mut prev1) = ((1i128, 0i128), (0i128, 1i128));
    for &ak in &quotients {
        let mut ts: Vec<i128> = vec![1, 2, ak - 2, ak - 1, ak];
        ts.retain(|&t| t >= 1 && t <= ak);
        ts.sort_unstable();
        ts.dedup();
        for t in ts {
            verts.push((prev2.0 + t * prev1.0, prev2.1 + t * prev1.1));
        }
        let next = (prev2.0 + ak * prev1.0, prev2.1 + ak * prev1.1);
        prev2 = prev1;
        prev1 = next;
    }
    let target = prev1;
    let n = verts.len();
    let tgt = verts
        .iter()
        .position(|&v| v == target)
        .expect("target is the last convergent");
    let mut dist = vec![u32::MAX; n];
    dist[0] = 0;
    let mut q = VecDeque::from([0usize]);
    while let Some(i) = q.pop_front() {
        if i == tgt {
            return dist[i];
        }
        for j in 0..n {
            if dist[j] == u32::MAX && det(verts[i], verts[j]).abs() == 1 {
                dist[j] = dist[i] + 1;
                q.push_back(j);
            }
        }
    }
    unreachable!("the ladder is connected")
}

impl fmt::Display for FareyVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = if self.q < 0 {
            (-self.p, -self.q)
        } else {
            (self.p, self.q)
        };
        write!(f, "{p}/{q}")
    }
}

impl FromStr for FareyVertex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedToken(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        Self::new(p, q)
    }
}

/// Largest pairwise distance.
pub fn diameter<'a>(set: impl IntoIterator<Item = &'a FareyVertex>) -> u32 {
    let v: Vec<FareyVertex> = set.into_iter().copied().collect();
    let mut best = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            best = best.max(v[i].distance(v[j]));
        }
    }
    best
}

/// Integer 2x2 matrix `[[a, b], [c, d]]` with determinant ±1, acting on column vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Matrix2Z {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Matrix2Z {
    pub const IDENTITY: Matrix2Z = Matrix2Z {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = Matrix2Z { a, b, c, d };
        let det = m.det_wide();
        if det.abs() != 1 {
            return Err(Error::BadDeterminant(
                i64::try_from(det).unwrap_or(i64::MAX),
            ));
        }
        Ok(m)
    }

    /// Row-major quadruple.
    pub fn from_rows(r: [i64; 4]) -> Result<Self> {
        Self::new(r[0], r[1], r[2], r[3])
    }

    pub fn rows(self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn det_wide(self) -> i128 {
        self.a as i128 * self.d as i128 - self.b as i128 * self.c as i128
    }

    pub fn det(self) -> i64 {
        self.det_wide() as i64
    }

    pub fn trace(self) -> i64 {
        self.a + self.d
    }

    /// Hyperbolic elements are exactly the fully irreducible classes in rank two.
    pub fn is_hyperbolic(self) -> bool {
        if self.det() == 1 {
            self.trace().abs() > 2
        } else {
            self.trace() != 0
        }
    }

    pub fn mul(self, o: Matrix2Z) -> Result<Matrix2Z> {
        let f = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|u| z.checked_mul(w).and_then(|v| u.checked_add(v)))
                .ok_or(Error::Overflow("matrix product"))
        };
        Ok(Matrix2Z {
            a: f(self.a, o.a, self.b, o.c)?,
            b: f(self.a, o.b, self.b, o.d)?,
            c: f(self.c, o.a, self.d, o.c)?,
            d: f(self.c, o.b, self.d, o.d)?,
        })
    }

    pub fn pow(self, k: u32) -> Result<Matrix2Z> {
        let mut out = Matrix2Z::IDENTITY;
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    pub fn inverse(self) -> Matrix2Z {
        let s = self.det();
        Matrix2Z {
            a: s * self.d,
            b: -s * self.b,
            c: -s * self.c,
            d: s * self.a,
        }
    }

    pub fn act(self, v: FareyVertex) -> Result<FareyVertex> {
        let (p, q) = v.wide();
        FareyVertex::from_wide(
            self.a as i128 * p + self.b as i128 * q,
            self.c as i128 * p + self.d as i128 * q,
        )
    }
}

/// Abelianization matrix of an automorphism of a rank-two free group; columns are the
/// images of the two generators.
pub fn matrix_of_out(f: &GroupMap) -> Result<Matrix2Z> {
    if f.domain().rank() != 2 || f.codomain().rank() != 2 {
        return Err(Error::AlphabetMismatch("expected a rank-two map".into()));
    }
    let x = f.image(0).abelianize(2);
    let y = f.image(1).abelianize(2);
    Matrix2Z::new(x[0], y[0], x[1], y[1])
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationEstimate {
    /// `d(v, M^k v)` for `k = 1..=k_max`, `v = 1/0`.
    pub distances: Vec<u32>,
    /// `d(v, M^k v) / k`.
    pub upper_bounds: Vec<f64>,
    /// Minimum of the upper bounds; by subadditivity an upper bound for the stable length.
    pub fekete: f64,
    /// Slope over the second half of the sequence.
    pub slope: f64,
}

pub fn translation_length_estimate(m: Matrix2Z, k_max: u32) -> Result<TranslationEstimate> {
    if k_max == 0 || k_max > 16 {
        return Err(Error::ThresholdViolated(format!(
            "k_max = {k_max} outside 1..=16"
        )));
    }
    if m != Matrix2Z::IDENTITY && !m.is_hyperbolic() {
        return Err(Error::NotHyperbolic(m.trace()));
    }
    let v = FareyVertex::INFINITY;
    let mut distances = Vec::new();
    let mut mk = Matrix2Z::IDENTITY;
    for _ in 0..k_max {
        mk = mk.mul(m)?;
        distances.push(v.distance(mk.act(v)?));
    }
    let upper_bounds: Vec<f64> = distances
        .iter()
        .enumerate()
        .map(|(i, &d)| d as f64 / (i + 1) as f64)
        .collect();
    let fekete = upper_bounds.iter().copied().fold(f64::INFINITY, f64::min);
    let k = k_max as usize;
    let h = k.div_ceil(2);
    let slope = if k > h {
        (distances[k - 1] as f64 - distances[h - 1] as f64) / (k - h) as f64
    } else {
        distances[0] as f64
    };
    Ok(TranslationEstimate {
        distances,
        upper_bounds,
        fekete,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::Alphabet;

    fn v(p: i64, q: i64) -> FareyVertex {
        FareyVertex::new(p, q).unwrap()
    }

    #[test]
    fn small_distances() {
        assert_eq!(v(1, 0).distance(v(0, 1)), 1);
        assert_eq!(v(3, 5).distance(v(3, 5)), 0);
        assert_eq!(v(1, 0).distance(v(1, 2)), 2);
        assert_eq!(v(0, 1).distance(v(1, 0)), 1);
    }

    #[test]
    fn normalization_and_strings() {
        assert_eq!(v(-1, 2), v(1, -2));
        assert_eq!(v(1, -2).to_string(), "-1/2");
        assert_eq!("-1/2".parse::<FareyVertex>().unwrap(), v(1, -2));
        assert_eq!(v(0, -1).to_string(), "0/1");
        assert!(FareyVertex::new(2, 4).is_err());
        assert!(FareyVertex::new(0, 0).is_err());
    }

    #[test]
    fn vertex_of_basis_words() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let f = |s: &str| FareyVertex::of_basis_word(&a.parse_word(s).unwrap()).unwrap();
        assert_eq!(f("x"), v(1, 0));
        assert_eq!(f("x y"), v(1, 1));
        assert_eq!(f("y x y^-1"), v(1, 0));
        assert_eq!(f("y"), v(0, 1));
    }

    #[test]
    fn matrices() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let f = GroupMap::parse(&a, &["x y", "y"]).unwrap();
        let m = matrix_of_out(&f).unwrap();
        assert_eq!(m.rows(), [1, 0, 1, 1]);
        assert!(!m.is_hyperbolic());
        let g = GroupMap::parse(&a, &["x y", "y x y"]).unwrap();
        let m = matrix_of_out(&g).unwrap();
        assert_eq!(m.rows(), [1, 1, 1, 2]);
        assert!(m.is_hyperbolic());
        assert_eq!(m.act(v(1, 0)).unwrap(), v(1, 1));
        assert!(Matrix2Z::new(2, 0, 0, 1).is_err());
    }

    #[test]
    fn identity_translation() {
        let t = translation_length_estimate(Matrix2Z::IDENTITY, 5).unwrap();
        assert!(t.distances.iter().all(|&d| d == 0));
        assert_eq!(t.fekete, 0.0);
        let parabolic = Matrix2Z::new(1, 1, 0, 1).unwrap();
        assert!(translation_length_estimate(parabolic, 4).is_err());
    }
}
