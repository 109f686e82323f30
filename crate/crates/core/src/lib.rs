//! Finite and lazily enumerated semigroups: structure, quotients,
//! finiteness predicates and closedness deciders.

pub mod cli;
pub mod closedness;
pub mod corpus;
pub mod lazy;
pub mod predicates;
pub mod quotients;
pub mod structure;
pub mod table;
pub mod verdict;

pub use lazy::LazySemigroup;
pub use predicates::Subject;
pub use table::{ElementSet, FiniteSemigroup};
pub use verdict::{Status, Verdict};
