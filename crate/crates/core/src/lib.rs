//! Incremental semiring path queries on edge-labelled graphs, and matchbound
//! certificate construction for string rewriting built on top of them.
//!
//! * [`semiring`] and [`relation`]: the algebra and sparse weighted relations.
//! * [`chain`] and [`incremental`]: multiplication chains for a fixed query
//!   set, and their bottom-up maintenance under edge insertion.
//! * [`weights`], [`completion`] and [`certificate`]: the enriched fuzzy
//!   weights, the completion procedure, and an independent checker.

pub mod certificate;
pub mod chain;
pub mod completion;
pub mod error;
pub mod incremental;
pub mod relation;
pub mod semiring;
pub mod srs;
pub mod weights;

pub use certificate::{verify, Certificate, Verdict};
pub use chain::{Chain, ExtLetter, Symbol};
pub use completion::{prove, CompletionState, Limits, Options, Outcome, Rule};
pub use error::{AlgebraError, Error, Result};
pub use incremental::{Edge, Execution, IncrementalAutomaton};
pub use relation::{NodeId, Relation};
pub use semiring::{Boolean, Fuzzy, FuzzyValue, Natural, Semiring, Weight};
pub use srs::{parse_srs, Srs};
pub use weights::{EWeight, Matchbox};
