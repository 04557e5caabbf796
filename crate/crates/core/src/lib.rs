//! Proof comprehension toolkit: exact expression equivalence, statement
//! logic, an annotated proof model, question generation, grading and
//! response analytics.

pub mod analytics;
pub mod combos;
pub mod config;
pub mod corpus;
pub mod dsl;
pub mod expr;
pub mod grader;
pub mod logic;
pub mod proof;
pub mod questions;
