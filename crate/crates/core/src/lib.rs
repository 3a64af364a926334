//! Proof search, proof transformations and Kripke semantics for
//! intuitionistic Strong Löb logic, built on the terminating sequent
//! calculus G4iSLt.

pub mod audit;
pub mod calculus;
pub mod cert;
pub mod cut;
pub mod formula;
pub mod hilbert;
pub mod measure;
pub mod random;
pub mod search;
pub mod semantics;
pub mod sequent;
pub mod structural;

pub use calculus::{expand, premises, Derivation, Rule, RuleInstance, Violation};
pub use formula::{parse, print, Formula, ParseError};
pub use measure::{shortlex_less, theta, Theta};
pub use search::{decide, prove, SearchResult};
pub use sequent::{mremove, msum, parse_sequent, partition_boxed, Multiset, Sequent};
