//! Command-line front end and file formats for `weakcoh-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod diagnose;
pub mod error;
pub mod figure;
pub mod io;
pub mod survey;
