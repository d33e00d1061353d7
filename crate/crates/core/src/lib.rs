//! Typechecking and elaboration for a small language with single-parameter type
//! classes and explicit dictionary application, targeting System F.
//!
//! Pipeline: [`surface`] parses a program, [`typecheck`] infers principal
//! schemes and elaborates each definition through [`elaborate`] and
//! [`entailment`], [`systemf`] checks and normalises the output, and
//! [`coherence`] compares alternative elaborations of the same program.

#![allow(clippy::result_large_err)]

pub mod syntax;
pub mod surface;
pub mod elaborate;
pub mod entailment;
pub mod systemf;
pub mod typecheck;
pub mod coherence;
pub mod gen;
