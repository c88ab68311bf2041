//! Finite lattice toolkit: lexicographic shellability of comodernistic
//! lattices and order congruence lattices, checked against brute-force
//! definition-level verifiers.

pub mod complex_shell;
pub mod corpus;
pub mod error;
pub mod generators;
pub mod lattice;
pub mod lattice_props;
pub mod order_congruence;
pub mod poset;
pub mod shelling;

pub use error::{Error, Result};
pub use lattice::{Chain, Interval, Lattice};
pub use poset::{is_isomorphic, ElemId, Poset, PosetFile};
