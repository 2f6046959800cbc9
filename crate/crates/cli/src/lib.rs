//! Library surface of the command-line front end, shared by the binary and
//! the verification test suites.

pub mod commands;
pub mod exprs;
pub mod modfile;
