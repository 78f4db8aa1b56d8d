//! Free groups: reduced words, conjugacy and homomorphisms given by generator images.

mod map;
mod word;

pub use map::{GroupMap, MapKind, Nielsen};
pub use word::{conjugacy_witness, Alphabet, Letter, Word};
