use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered list of distinct generator names for a free group of rank `names.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Arc<Vec<String>>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::InvalidAlphabet("rank must be at least 1".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(char::is_whitespace) || n.contains('^') {
                return Err(Error::InvalidAlphabet(format!("bad letter name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidAlphabet(format!("duplicate letter `{n}`")));
            }
        }
        Ok(Self {
            names: Arc::new(names),
        })
    }

    /// Alphabet with names `{prefix}0 .. {prefix}{rank-1}`.
    pub fn indexed(prefix: &str, rank: usize) -> Self {
        Self::new((0..rank).map(|i| format!("{prefix}{i}"))).expect("indexed alphabet is valid")
    }

    /// `a, b, c, ...` for rank up to 26, indexed `x0..` otherwise.
    pub fn standard(rank: usize) -> Self {
        if rank <= 26 {
            Self::new((0..rank).map(|i| ((b'a' + i as u8) as char).to_string()))
                .expect("letters are distinct")
        } else {
            Self::indexed("x", rank)
        }
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, gen: usize) -> &str {
        &self.names[gen]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parse whitespace separated tokens `name`, `name^-1` or `name^k`.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let mut raw = Vec::new();
        for tok in text.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::MalformedToken(tok.to_string()))?;
                    (n, e)
                }
                None => (tok, 1),
            };
            if name.is_empty() {
                return Err(Error::MalformedToken(tok.to_string()));
            }
            let gen = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownLetter(name.to_string()))?;
            let l = Letter::new(gen, exp > 0);
            for _ in 0..exp.unsigned_abs() {
                raw.push(l);
            }
        }
        Ok(Word::reduce(raw))
    }

    pub fn format_word(&self, w: &Word) -> String {
        let mut out = String::new();
        for (i, l) in w.letters().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(l.gen()));
            if l.is_inverse() {
                out.push_str("^-1");
            }
        }
        out
    }
}

/// A generator or its inverse, stored as a nonzero signed index (`+(g+1)` or `-(g+1)`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(i32);

impl Letter {
    pub fn new(gen: usize, positive: bool) -> Self {
        let v = gen as i32 + 1;
        Letter(if positive { v } else { -v })
    }

    pub fn gen(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn positive(self) -> Self {
        Letter(self.0.abs())
    }

    /// Dense index `2*gen + (inverse as usize)`, the order used by canonical traversals.
    pub fn slot(self) -> usize {
        2 * self.gen() + self.is_inverse() as usize
    }

    pub fn from_slot(slot: usize) -> Self {
        Letter::new(slot / 2, slot.is_multiple_of(2))
    }

    pub fn raw(self) -> i32 {
        self.0
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.slot().cmp(&other.slot())
    }
}

/// A freely reduced word. Every constructor reduces.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l.0)?;
        }
        write!(f, "]")
    }
}

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::new(g, true)])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut buf: Vec<Letter> = Vec::new();
        for l in raw {
            if buf.last() == Some(&l.inverse()) {
                buf.pop();
            } else {
                buf.push(l);
            }
        }
        Word(buf)
    }

    /// Build from signed ids: `+k` is generator `k-1`, `-k` its inverse.
    pub fn from_signed(ids: &[i32]) -> Self {
        Self::reduce(ids.iter().map(|&v| {
            assert!(v != 0, "signed ids are nonzero");
            Letter(v)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul_word(&self, rhs: &Word) -> Word {
        let mut k = 0;
        let (a, b) = (&self.0, &rhs.0);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
            k += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a[..a.len() - k]);
        out.extend_from_slice(&b[k..]);
        Word(out)
    }

    /// In-place right multiplication.
    pub fn push_word(&mut self, rhs: &Word) {
        for &l in &rhs.0 {
            self.push(l);
        }
    }

    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..e.unsigned_abs() {
            out.push_word(&base);
        }
        out
    }

    /// `self * x * self^-1`.
    pub fn conjugate(&self, x: &Word) -> Word {
        self.mul_word(x).mul_word(&self.inverse())
    }

    pub fn commutator(&self, other: &Word) -> Word {
        self.mul_word(other)
            .mul_word(&self.inverse())
            .mul_word(&other.inverse())
    }

    /// Returns `(c, core)` with `self = c * core * c^-1` and `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let a = &self.0;
        let mut k = 0;
        while 2 * k + 1 < a.len() && a[k] == a[a.len() - 1 - k].inverse() {
            k += 1;
        }
        (Word(a[..k].to_vec()), Word(a[k..a.len() - k].to_vec()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.0.len() < 2 || self.0[0] != self.0[self.0.len() - 1].inverse()
    }

    /// Exponent sum of each generator (abelianization).
    pub fn abelianize(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            v[l.gen()] += if l.is_inverse() { -1 } else { 1 };
        }
        v
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen()).max()
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        self.mul_word(rhs)
    }
}

impl Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        self.mul_word(&rhs)
    }
}

/// Returns `w` with `w u w^-1 = v`, or `None` when `u` and `v` are not conjugate.
pub fn conjugacy_witness(u: &Word, v: &Word) -> Option<Word> {
    let (a, cu) = u.cyclic_reduction();
    let (b, cv) = v.cyclic_reduction();
    if cu.len() != cv.len() {
        return None;
    }
    let n = cu.len();
    if n == 0 {
        return Some(Word::identity());
    }
    // cu = P S and cv = S P for some split; then cv = P^-1 cu P.
    let doubled: Vec<Letter> = cu.0.iter().chain(cu.0.iter()).copied().collect();
    for k in 0..n {
        if doubled[k..k + n] == cv.0[..] {
            let p = Word(cu.0[..k].to_vec());
            // v = b cv b^-1 = b p^-1 a^-1 u a p b^-1
            let w = b.mul_word(&p.inverse()).mul_word(&a.inverse());
            debug_assert_eq!(w.conjugate(u), *v);
            return Some(w);
        }
    }
    None
}
