//! Stallings subgroup graphs: folding, membership, conjugacy keys, pullbacks and covers.

pub mod fold;
mod graph;
mod pullback;

pub use graph::{EdgeJson, GraphJson, LabeledGraph, SpanningTree, SubgroupGraph};
pub use pullback::{pullback_components, PullbackComponent};
