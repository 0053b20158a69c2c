//! Sharblies, modular symbols and their reductions.

pub mod chain;
pub mod reduce;

pub use chain::{gamma0_equivalence, normalize, theta, Sharbly, SharblyChain, SharblyElement, UnimodularSymbol};
pub use reduce::{ar_reduce, one_sharbly_reduce_n2, OneSharblyReduction};
