//! Free-factor projections, Stallings foldings, right-angled Artin group normal forms and
//! Farey-graph geometry for experiments with admissible systems in `Out(F_n)`.

pub mod error;
pub mod experiment;
pub mod factors;
pub mod farey;
pub mod freegroup;
pub mod projections;
pub mod raag;
pub mod stallings;
pub mod systems;

pub use error::{Error, Result};
