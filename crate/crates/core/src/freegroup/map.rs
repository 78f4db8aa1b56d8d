use crate::error::{Error, Result};
use crate::stallings::fold::Folder;

use super::word::{conjugacy_witness, Alphabet, Letter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    Endomorphism,
    VerifiedAutomorphism,
}

/// Homomorphism between free groups given by the images of the domain generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupMap {
    domain: Alphabet,
    codomain: Alphabet,
    images: Vec<Word>,
    kind: MapKind,
}

impl GroupMap {
    pub fn new(domain: Alphabet, codomain: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != domain.rank() {
            return Err(Error::AlphabetMismatch(format!(
                "{} images for a domain of rank {}",
                images.len(),
                domain.rank()
            )));
        }
        for w in &images {
            if let Some(g) = w.max_gen() {
                if g >= codomain.rank() {
                    return Err(Error::AlphabetMismatch(format!(
                        "image uses generator {g} outside codomain of rank {}",
                        codomain.rank()
                    )));
                }
            }
        }
        Ok(GroupMap {
            domain,
            codomain,
            images,
            kind: MapKind::Endomorphism,
        })
    }

    /// Endomorphism of `alphabet` from image strings.
    pub fn parse(alphabet: &Alphabet, images: &[&str]) -> Result<Self> {
        let imgs = images
            .iter()
            .map(|s| alphabet.parse_word(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet.clone(), alphabet.clone(), imgs)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        GroupMap {
            domain: alphabet.clone(),
            codomain: alphabet.clone(),
            images: (0..alphabet.rank()).map(Word::gen).collect(),
            kind: MapKind::VerifiedAutomorphism,
        }
    }

    /// Inner automorphism `x -> w x w^-1`.
    pub fn conjugation(alphabet: &Alphabet, w: &Word) -> Self {
        GroupMap {
            domain: alphabet.clone(),
            codomain: alphabet.clone(),
            images: (0..alphabet.rank())
                .map(|i| w.conjugate(&Word::gen(i)))
                .collect(),
            kind: MapKind::VerifiedAutomorphism,
        }
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen]
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn is_verified(&self) -> bool {
        self.kind == MapKind::VerifiedAutomorphism
    }

    pub fn is_identity(&self) -> bool {
        self.domain == self.codomain
            && self
                .images
                .iter()
                .enumerate()
                .all(|(i, w)| *w == Word::gen(i))
    }

    /// Total length of the images.
    pub fn size(&self) -> usize {
        self.images.iter().map(Word::len).sum()
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::identity();
        for &l in w.letters() {
            let img = &self.images[l.gen()];
            if l.is_inverse() {
                out.push_word(&img.inverse());
            } else {
                out.push_word(img);
            }
        }
        out
    }

    /// Like [`GroupMap::apply`] but stops once the result would exceed `limit` letters.
    pub fn apply_bounded(&self, w: &Word, limit: usize) -> Result<Word> {
        let mut out = Word::identity();
        for &l in w.letters() {
            let img = &self.images[l.gen()];
            if l.is_inverse() {
                out.push_word(&img.inverse());
            } else {
                out.push_word(img);
            }
            if out.len() > limit {
                return Err(Error::ResourceLimit(format!(
                    "word length exceeds {limit} letters"
                )));
            }
        }
        Ok(out)
    }

    /// `self ∘ g`, that is `x -> self(g(x))`.
    pub fn compose(&self, g: &GroupMap) -> Result<GroupMap> {
        if g.codomain != self.domain {
            return Err(Error::AlphabetMismatch(
                "codomain of the inner map differs from the domain of the outer map".into(),
            ));
        }
        let kind = if self.is_verified() && g.is_verified() {
            MapKind::VerifiedAutomorphism
        } else {
            MapKind::Endomorphism
        };
        Ok(GroupMap {
            domain: g.domain.clone(),
            codomain: self.codomain.clone(),
            images: g.images.iter().map(|w| self.apply(w)).collect(),
            kind,
        })
    }

    /// Composition that fails once any image exceeds `limit` letters.
    pub fn compose_bounded(&self, g: &GroupMap, limit: usize) -> Result<GroupMap> {
        if g.codomain != self.domain {
            return Err(Error::AlphabetMismatch(
                "codomain of the inner map differs from the domain of the outer map".into(),
            ));
        }
        let images = g
            .images
            .iter()
            .map(|w| self.apply_bounded(w, limit))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupMap {
            domain: g.domain.clone(),
            codomain: self.codomain.clone(),
            images,
            kind: if self.is_verified() && g.is_verified() {
                MapKind::VerifiedAutomorphism
            } else {
                MapKind::Endomorphism
            },
        })
    }

    /// Fold the wedge of image words, recording each fold, and read every codomain
    /// generator back as a word in the domain generators.
    pub fn invert_automorphism(&self) -> Result<GroupMap> {
        let n = self.codomain.rank();
        if self.domain.rank() != n {
            return Err(Error::AlphabetMismatch(format!(
                "domain rank {} differs from codomain rank {n}",
                self.domain.rank()
            )));
        }
        let mut folder = Folder::new(n, true);
        for (j, img) in self.images.iter().enumerate() {
            folder.add_loop(0, img, Word::gen(j));
        }
        let folded = folder.fold();
        if folded.num_vertices != 1 || folded.edges.len() != n {
            return Err(Error::NotSurjective);
        }
        let mut inv = vec![None; n];
        for (_, _, label, tag) in &folded.edges {
            let t = if label.is_inverse() {
                tag.inverse()
            } else {
                tag.clone()
            };
            inv[label.gen()] = Some(folded.beta.conjugate(&t));
        }
        let images = inv
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::NotSurjective)?;
        let g = GroupMap {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            images,
            kind: MapKind::VerifiedAutomorphism,
        };
        let fg = self.compose(&g)?;
        let gf = g.compose(self)?;
        if !fg.is_identity() || !gf.is_identity() {
            return Err(Error::NotSurjective);
        }
        Ok(g)
    }

    /// Returns the same map flagged as a verified automorphism, or `NotSurjective`.
    pub fn certify(mut self) -> Result<GroupMap> {
        if !self.is_verified() {
            self.invert_automorphism()?;
            self.kind = MapKind::VerifiedAutomorphism;
        }
        Ok(self)
    }

    /// `self^e`, inverting when `e < 0`.
    pub fn pow(&self, e: i64) -> Result<GroupMap> {
        let base = if e < 0 {
            self.invert_automorphism()?
        } else {
            self.clone()
        };
        let mut out = GroupMap::identity(&self.domain);
        if e == 0 {
            return Ok(out);
        }
        // Square-and-multiply; composition is associative.
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out.compose(&b)?;
            }
            k >>= 1;
            if k > 0 {
                b = b.compose(&b)?;
            }
        }
        if self.is_verified() {
            out.kind = MapKind::VerifiedAutomorphism;
        }
        Ok(out)
    }

    /// Witness `w` with `self(x) = w x w^-1` for every generator, if the map is inner.
    pub fn is_inner(&self) -> Option<Word> {
        let n = self.domain.rank();
        if self.codomain != self.domain {
            return None;
        }
        if n == 1 {
            return self.is_identity().then(Word::identity);
        }
        let x1 = Word::gen(0);
        let w0 = conjugacy_witness(&x1, &self.images[0])?;
        let bound = (self.images[1].len() + w0.len() + 1) as i64;
        let fits = |w: &Word| (0..n).all(|k| w.conjugate(&Word::gen(k)) == self.images[k]);
        for t in 0..=bound {
            for s in [t, -t] {
                let w = w0.mul_word(&x1.pow(s));
                if fits(&w) {
                    return Some(w);
                }
                if t == 0 {
                    break;
                }
            }
        }
        None
    }
}

/// Elementary automorphisms of `F_n` used to build bounded-step paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nielsen {
    /// `x_i -> x_i x_j^{±1}`.
    Right { i: usize, j: usize, inv: bool },
    /// `x_i -> x_j^{±1} x_i`.
    Left { i: usize, j: usize, inv: bool },
    /// `x_i -> x_i^-1`.
    Invert { i: usize },
    /// swap `x_i` and `x_j`.
    Swap { i: usize, j: usize },
}

impl Nielsen {
    /// Fixed generating set of `Aut(F_n)`, in a deterministic order.
    pub fn generators(rank: usize) -> Vec<Nielsen> {
        let mut out = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                if i == j {
                    continue;
                }
                for inv in [false, true] {
                    out.push(Nielsen::Right { i, j, inv });
                    out.push(Nielsen::Left { i, j, inv });
                }
            }
        }
        for i in 0..rank {
            out.push(Nielsen::Invert { i });
        }
        for i in 0..rank {
            for j in i + 1..rank {
                out.push(Nielsen::Swap { i, j });
            }
        }
        out
    }

    pub fn to_map(self, alphabet: &Alphabet) -> GroupMap {
        let mut images: Vec<Word> = (0..alphabet.rank()).map(Word::gen).collect();
        match self {
            Nielsen::Right { i, j, inv } => {
                images[i] = Word::gen(i).mul_word(&Word::letter(Letter::new(j, !inv)))
            }
            Nielsen::Left { i, j, inv } => {
                images[i] = Word::letter(Letter::new(j, !inv)).mul_word(&Word::gen(i))
            }
            Nielsen::Invert { i } => images[i] = Word::gen(i).inverse(),
            Nielsen::Swap { i, j } => images.swap(i, j),
        }
        GroupMap {
            domain: alphabet.clone(),
            codomain: alphabet.clone(),
            images,
            kind: MapKind::VerifiedAutomorphism,
        }
    }

    pub fn inverse(self) -> Nielsen {
        match self {
            Nielsen::Right { i, j, inv } => Nielsen::Right { i, j, inv: !inv },
            Nielsen::Left { i, j, inv } => Nielsen::Left { i, j, inv: !inv },
            other => other,
        }
    }
}
