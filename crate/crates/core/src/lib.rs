//! Grounding analysis and automated rule splitting for answer-set programs.
//!
//! Non-ground programs suffer from the grounding bottleneck: bottom-up
//! instantiation is exponential in the number of variables per rule, while
//! body-decoupled grounding (BDG) is exponential only in predicate arity.
//! Neither dominates — which one grounds a given rule smaller depends on both
//! rule structure and the data. This crate analyzes a program and decides,
//! per rule, which technique a hybrid grounder should apply:
//!
//! - [`ast`] — parse, represent, and print an ASP-Core-2 subset;
//! - [`analysis`] — fact splitting, dependency graph, SCCs, stratification,
//!   and domain inference;
//! - [`treedecomp`] — per-rule variable graphs and tree decompositions
//!   (the bag size bounds variables-per-rule after structural rewriting);
//! - [`rewriter`] — lpopt-style decomposition of a rule along a tree
//!   decomposition into smaller chained rules;
//! - [`estimator`] — grounding-size estimates: a join-cardinality estimate
//!   for bottom-up and an arity-driven estimate for BDG;
//! - [`heuristics`] — the decision procedure combining structural gates with
//!   the size estimates, and the resulting program partition;
//! - [`oracle`] — reference semantics at test scale: naive and bottom-up
//!   grounders plus brute-force answer-set enumeration;
//! - [`instance`] — deterministic random-graph instance generation.

pub mod analysis;
pub mod ast;
pub mod estimator;
pub mod heuristics;
pub mod instance;
pub mod oracle;
pub mod rewriter;
pub mod treedecomp;
