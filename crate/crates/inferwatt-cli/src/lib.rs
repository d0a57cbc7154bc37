// Validation guards use `!(x > 0.0)` on purpose: the negation rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Library surface of the command-line tool, split out so integration tests
//! can drive commands directly and compare rendered documents.

pub mod commands;
pub mod config;
