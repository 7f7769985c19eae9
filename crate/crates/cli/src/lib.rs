//! Command line front end: expression grammar, subcommands, JSON reports
//! and the acceptance suite.

pub mod commands;
pub mod expr;
pub mod report;
pub mod suite;
