//! Exact cut and flow sparsification for terminal networks.
//!
//! A network here is an undirected capacitated graph with a distinguished,
//! ordered list of terminals. The toolkit computes exact (quality-1) vertex
//! sparsifiers for networks whose non-terminals form an independent set, and
//! structured reductions (vertex cover, vertex integrity, bounded treewidth)
//! that split a general network into pieces such sparsifiers apply to.
//! All arithmetic is exact: capacities, demands, cut values and flow values
//! are arbitrary-precision rationals, never floats.

pub mod bipartite;
pub mod error;
pub mod extensions;
pub mod flow;
pub mod io;
pub mod lp;
pub mod mincut;
pub mod network;
pub mod rational;
pub mod rays;
pub mod signature;
pub mod split;
pub mod treewidth;

pub use error::{Error, Result};
pub use network::{Cut, Network, VertexId};
pub use rational::{rat, Rational};
