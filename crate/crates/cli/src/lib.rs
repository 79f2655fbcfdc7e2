//! Support code for the `entwit` command-line tool.

pub mod format;
pub mod reproduce;
