//! Generalized arc consistency (GAC) on single global constraints.
//!
//! The crate answers the five GAC questions (support, is-it-GAC, no-wipe-out,
//! GAC domain, maximal GAC subdomain) with a budgeted generic search, derives
//! each question from the others through polynomial reductions, ships
//! specialized polynomial propagators for tractable kinds, and builds the
//! hardness gadgets that turn 3SAT, 1-in-3 SAT, 3-colouring and Max2SAT
//! instances into GAC questions together with brute-force oracles for them.

pub mod csp;
pub mod engine;
pub mod gadgets;
pub mod propagators;
pub mod suites;
