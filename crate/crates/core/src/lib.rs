//! Clustering of concepts into chains from randomly ordered length-2
//! observations.
//!
//! Observations `(key, member)` feed a [`ChainStore`] of dual counters. A
//! [`ClassificationReport`] separates genuine members from noise, and
//! [`assemble`] rebuilds the ontology forest from the accepted links.

pub mod assemble;
pub mod chain;
pub mod concept;
pub mod eval;
pub mod ingest;
pub mod ontology;
pub mod report;
pub mod rules;
pub mod tree;

pub use assemble::{assemble, InconsistencyKind, InconsistencyNote};
pub use chain::{ChainSnapshot, ChainStore, ChainTotals, ChainView, MemberEntry, MemberStats, StoreError};
pub use concept::{ConceptError, ConceptId, ObservationPair};
pub use rules::{
    classify_all, classify_member, ClassificationReport, Confidence, Decision, ExclusionReason, OccurrenceIndex,
    RuleConfig, RuleSet, Verdict,
};
pub use tree::{diff_trees, EdgeDiff, OntologyTree};
