//! Parameterized algorithms built on mixed-strategy representative families:
//! internal out-branching, weighted k-path, weighted 3-set packing and
//! packing of 3-node paths, together with exhaustive oracles and the
//! numeric evaluation of their running-time bases.

pub mod bounds;
pub mod budget;
pub mod cutting;
pub mod error;
pub mod gen;
pub mod io;
pub mod kpath;
pub mod kiob;
pub mod matching;
pub mod oracles;
pub mod p2pack;
pub mod problems;
pub mod registry;
pub mod repsets;
pub mod types;
pub mod unisets;
pub mod wsp;

pub use error::{Error, Result};
pub use types::{Digraph, ElemSet, Graph, Objective, OrderedUniverse, Weight, WeightedSet, WeightedSetFamily};
