//! Satisfiability checking for ALC with functional roles and integer
//! registers compared along role paths.

pub mod abstraction;
pub mod cgraph;
pub mod normalize;
pub mod pipeline;
pub mod syntax;
