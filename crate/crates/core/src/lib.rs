//! Primitive arithmetic progressions whose terms are perfect powers with
//! exponents from a small alphabet.
//!
//! The crate bundles exact number-field arithmetic, a polynomial identity
//! checker, a rule engine that prunes exponent patterns with replayable
//! certificates, a bounded progression search and rational-point scans for
//! the curves that back the pruning rules.

pub mod arith;
pub mod curves;
pub mod error;
pub mod engine;
pub mod identities;
pub mod numfield;
pub mod report;
pub mod search;
