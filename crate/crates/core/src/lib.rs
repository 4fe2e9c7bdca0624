//! Weighted composition operators `f ↦ ψ·(f∘φ)` on functions over rooted
//! trees: norms, essential norms, injectivity and surjectivity moduli on
//! `L∞` and from the Lipschitz space `ℒ` to `L∞`, computed on depth-`N`
//! truncations, with brute-force oracles and trend certificates for the
//! limit criteria.

pub mod certificate;
pub mod classify;
pub mod cli;
pub mod dot;
pub mod error;
pub mod fixtures;
pub mod func;
pub mod input;
pub mod oracle;
pub mod report;
pub mod sample;
pub mod tree;
pub mod wco;

pub use certificate::{Certificate, Statement, Verdict, Witness};
pub use error::{Error, Result};
pub use func::VertexFunction;
pub use tree::{RootedTree, TreeSpec, VertexId};
pub use wco::{SelfMap, WeightedCompOp};
