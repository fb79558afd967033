//! Nested recurrence relations that run tag machines.
//!
//! The crate has two halves. One half is a small universe of rewriting
//! machines: Post 2-tag systems ([`tag`]), reverse tag systems ([`revtag`]),
//! and a translation from the former to the latter ([`xlate`]). The other
//! half is a sequence engine: a textual DSL for nested recurrence
//! definitions ([`recdsl`]) and a memoized evaluator that computes such a
//! sequence bottom-up and reports exactly when it stops being calculable
//! ([`seq`]).
//!
//! The [`encode`] module connects the halves: it compiles a reverse tag
//! system into initial conditions for a fixed pair of nested recurrences
//! (`B`, and the deeper-nested `A`) whose values replay the machine's run.
//! [`verify`] cross-checks the whole chain, using the simulators and the
//! recurrence tables as mutual oracles.

pub mod encode;
#[cfg(test)]
mod fixtures;
pub mod gen;
pub mod recdsl;
pub mod revtag;
pub mod seq;
pub mod tag;
pub mod verify;
pub mod xlate;
